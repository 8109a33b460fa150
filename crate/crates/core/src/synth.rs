//! Seeded synthetic data for tests, benchmarks, and demos.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::ingest::TweetRecord;
use crate::rng::{self, Stream};
use crate::stance::{StanceExample, StanceLabel};

/// Words that appear only in disagreeing texts of [`stance_corpus`].
pub const DISAGREE_MARKERS: [&str; 8] = [
    "false", "fake", "wrong", "hoax", "debunked", "untrue", "lies", "nonsense",
];

const FILLER: [&str; 24] = [
    "the",
    "story",
    "police",
    "report",
    "says",
    "today",
    "news",
    "people",
    "city",
    "update",
    "video",
    "officials",
    "photo",
    "latest",
    "source",
    "crowd",
    "near",
    "station",
    "morning",
    "after",
    "this",
    "is",
    "a",
    "of",
];

const OTHER_CUES: [&str; 6] = ["confirmed", "true", "agree", "indeed", "exactly", "verified"];

/// One standard normal draw (Box-Muller).
pub fn standard_normal(rng: &mut Stream) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
}

/// Alternating-label rows whose every column is N(±separation/2, 1).
pub fn gaussian_clusters(n: usize, k: usize, separation: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<bool>) {
    informative_plus_noise(n, k, 0, separation, seed)
}

/// Rows whose first `informative` columns are N(±shift/2, 1) by label and
/// whose remaining `noise` columns are N(0, 1). Labels alternate.
pub fn informative_plus_noise(
    n: usize,
    informative: usize,
    noise: usize,
    shift: f64,
    seed: u64,
) -> (Vec<Vec<f64>>, Vec<bool>) {
    let mut rng = rng::stream(seed, "synth/gaussian", &[]);
    let labels: Vec<bool> = (0..n).map(|i| i % 2 == 0).collect();
    let rows = labels
        .iter()
        .map(|&y| {
            let centre = if y { shift / 2.0 } else { -shift / 2.0 };
            (0..informative + noise)
                .map(|j| standard_normal(&mut rng) + if j < informative { centre } else { 0.0 })
                .collect()
        })
        .collect();
    (rows, labels)
}

fn sentence(rng: &mut Stream, extra: &[&str]) -> String {
    let len = rng.random_range(4..10);
    let mut words: Vec<&str> = (0..len).map(|_| *FILLER.choose(rng).unwrap_or(&"the")).collect();
    for w in extra {
        let at = rng.random_range(0..=words.len());
        words.insert(at, w);
    }
    words.join(" ")
}

/// A linearly separable stance corpus: each disagreeing text contains one
/// of [`DISAGREE_MARKERS`], each other text one cue word and no marker.
pub fn stance_corpus(n_per_class: usize, seed: u64) -> Vec<StanceExample> {
    let mut rng = rng::stream(seed, "synth/stance", &[]);
    let mut out = Vec::with_capacity(2 * n_per_class);
    for _ in 0..n_per_class {
        let marker = *DISAGREE_MARKERS.choose(&mut rng).unwrap_or(&"false");
        let cue = *OTHER_CUES.choose(&mut rng).unwrap_or(&"true");
        for (word, label) in [(marker, StanceLabel::Disagree), (cue, StanceLabel::Other)] {
            let text = sentence(&mut rng, &[word]);
            out.push(StanceExample::new(text, label, "synthetic").expect("sentences are non-empty"));
        }
    }
    out
}

/// One reply tree of `size` tweets with ids `"{prefix}-{i}"`; tweet 0 is the
/// root and every other tweet replies to (or retweets) an earlier one.
pub fn synthetic_thread(prefix: &str, size: usize, seed: u64) -> Vec<TweetRecord> {
    let mut rng = rng::stream(seed, "synth/thread", &[]);
    let start = 1_600_000_000 + rng.random_range(0..10_000_000i64);
    let authors = (size / 3).max(2);
    let mut t = start;
    (0..size)
        .map(|i| {
            let author = rng.random_range(0..authors);
            let mut text = sentence(&mut rng, &[]);
            match rng.random_range(0..8) {
                0 => text.push('?'),
                1 => text.push_str("!!"),
                2 => text.push_str(" :)"),
                3 => text.push_str(" we"),
                _ => {}
            }
            let parent = (i > 0).then(|| format!("{prefix}-{}", rng.random_range(0..i)));
            let retweet = i > 0 && rng.random_range(0..5) == 0;
            if i > 0 {
                t += rng.random_range(0..240);
            }
            TweetRecord {
                id: format!("{prefix}-{i}"),
                created_at: t,
                text,
                author_id: format!("{prefix}-u{author}"),
                author_created_at: start - rng.random_range(0..300_000_000),
                followers: rng.random_range(0..100_000),
                friends: rng.random_range(0..5_000),
                statuses: rng.random_range(0..200_000),
                verified: rng.random_range(0..20) == 0,
                in_reply_to: if retweet { None } else { parent.clone() },
                retweet_of: if retweet { parent } else { None },
                retweet_count: rng.random_range(0..1_000),
                hashtags: if rng.random_range(0..4) == 0 {
                    vec!["news".into()]
                } else {
                    vec![]
                },
                urls: if rng.random_range(0..6) == 0 {
                    vec!["https://example.org".into()]
                } else {
                    vec![]
                },
                media: if rng.random_range(0..10) == 0 {
                    vec!["photo".into()]
                } else {
                    vec![]
                },
                mentions: if rng.random_range(0..3) == 0 {
                    vec![format!("{prefix}-u{}", rng.random_range(0..authors))]
                } else {
                    vec![]
                },
            }
        })
        .collect()
}

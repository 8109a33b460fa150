//! The 45-column thread feature vector.
//!
//! Columns fall into four groups (see [`Feature`] for the fixed order):
//!
//! * structural: size, average text length, lifetime in minutes, reply depth,
//!   and count/ratio of tweets carrying hashtags, media, mentions, retweets,
//!   and links;
//! * user: author account age at root time, follower/friend/status means,
//!   verified tweet count, whether the root author is verified, the per-tweet
//!   gap between account creation and posting, and interaction density;
//! * content: lexicon polarity and subjectivity, share of replies flagged as
//!   disagreeing, and count/ratio of tweets with question marks, exclamation
//!   points, runs of `?`/`!`, first/second/third-person pronouns, and smiles;
//! * temporal: log-space slopes of running author means and the cumulative
//!   tweet count, sampled at every minute of the thread's life.
//!
//! Minutes are `floor((t - t_root) / 60)`, with tweets stamped before the
//! root clamped to minute 0. Day-valued gaps are clamped at zero to absorb
//! clock skew between tweets and account records.

mod network;
mod registry;
mod temporal;
mod text;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

pub use network::network_density;
pub use registry::{feature_names, Feature, FeatureGroup, FEATURE_COUNT, REGISTRY_VERSION};
pub use temporal::temporal_slope;
pub use text::{
    content_markers, sentiment, ContentMarkers, SentimentLexicon, FIRST_PERSON, SECOND_PERSON, SMILES, THIRD_PERSON,
};

use crate::ingest::{Label, ThreadTree, TweetRecord};
use crate::stance::{tokenize, StanceModel};
use temporal::step_slope;
use text::{markers_with_tokens, sentiment_of_tokens};

const SECONDS_PER_DAY: f64 = 86_400.0;

/// Per-reply disagreement flags consumed by [`extract`].
pub trait StanceFlags {
    fn is_disagreement(&self, tweet: &TweetRecord) -> bool;
}

/// Annotation lookup by tweet id; tweets without an entry do not disagree.
impl StanceFlags for BTreeMap<String, bool> {
    fn is_disagreement(&self, tweet: &TweetRecord) -> bool {
        self.get(&tweet.id).copied().unwrap_or(false)
    }
}

#[cfg(feature = "std")]
impl<S: std::hash::BuildHasher> StanceFlags for std::collections::HashMap<String, bool, S> {
    fn is_disagreement(&self, tweet: &TweetRecord) -> bool {
        self.get(&tweet.id).copied().unwrap_or(false)
    }
}

impl StanceFlags for StanceModel {
    fn is_disagreement(&self, tweet: &TweetRecord) -> bool {
        StanceModel::is_disagreement(self, &tweet.text)
    }
}

impl<T: StanceFlags + ?Sized> StanceFlags for &T {
    fn is_disagreement(&self, tweet: &TweetRecord) -> bool {
        (**self).is_disagreement(tweet)
    }
}

/// Flags nothing.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoFlags;

impl StanceFlags for NoFlags {
    fn is_disagreement(&self, _: &TweetRecord) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub thread_id: String,
    pub values: [f64; FEATURE_COUNT],
    pub label: Label,
}

impl FeatureVector {
    pub fn get(&self, feature: Feature) -> f64 {
        self.values[feature.index()]
    }
}

/// Computes every registry feature for one thread.
pub fn extract(thread: &ThreadTree, flags: &impl StanceFlags, lexicon: &SentimentLexicon) -> FeatureVector {
    let walk = thread.walk();
    let root = thread.root();
    let n = walk.len() as f64;
    let t_root = root.created_at;

    let mut v = [0.0f64; FEATURE_COUNT];
    let mut set = |f: Feature, x: f64| v[f.index()] = x;

    let mut text_len = 0usize;
    let mut structural = [0usize; 5];
    let mut marker_counts = [0usize; 7];
    let (mut polarity, mut subjectivity) = (0.0, 0.0);
    let (mut sum_age, mut sum_gap) = (0.0, 0.0);
    let (mut sum_followers, mut sum_friends, mut sum_statuses) = (0.0, 0.0, 0.0);
    let mut verified = 0usize;
    let mut disagree = 0usize;
    let (mut first, mut last) = (t_root, t_root);
    let mut depth = 0usize;
    // (minute, age, gap, followers, friends, statuses) per tweet.
    let mut timeline: Vec<(u64, [f64; 5])> = Vec::with_capacity(walk.len());

    for &(t, d) in &walk {
        depth = depth.max(d);
        first = first.min(t.created_at);
        last = last.max(t.created_at);
        text_len += t.text.chars().count();

        let has = [
            !t.hashtags.is_empty(),
            !t.media.is_empty(),
            !t.mentions.is_empty(),
            t.is_retweet(),
            !t.urls.is_empty(),
        ];
        for (count, flag) in structural.iter_mut().zip(has) {
            *count += usize::from(flag);
        }

        let tokens = tokenize(&t.text);
        let (p, s) = sentiment_of_tokens(&tokens, lexicon);
        polarity += p;
        subjectivity += s;
        let markers = markers_with_tokens(&t.text, &tokens).to_flags();
        for (count, flag) in marker_counts.iter_mut().zip(markers) {
            *count += usize::from(flag);
        }

        let age = (t_root - t.author_created_at).max(0) as f64 / SECONDS_PER_DAY;
        let gap = (t.created_at - t.author_created_at).max(0) as f64 / SECONDS_PER_DAY;
        let (followers, friends, statuses) = (t.followers as f64, t.friends as f64, t.statuses as f64);
        sum_age += age;
        sum_gap += gap;
        sum_followers += followers;
        sum_friends += friends;
        sum_statuses += statuses;
        verified += usize::from(t.verified);
        if t.id != root.id && flags.is_disagreement(t) {
            disagree += 1;
        }
        let minute = ((t.created_at - t_root).max(0) / 60) as u64;
        timeline.push((minute, [age, gap, followers, friends, statuses]));
    }

    set(Feature::TweetCount, n);
    set(Feature::AvgTweetLength, text_len as f64 / n);
    set(Feature::LifetimeMinutes, (last - first) as f64 / 60.0);
    set(Feature::TreeDepth, depth as f64);
    let structural_cols = [
        (Feature::FreqHashtag, Feature::RatioHashtag),
        (Feature::FreqMedia, Feature::RatioMedia),
        (Feature::FreqMention, Feature::RatioMention),
        (Feature::FreqRetweet, Feature::RatioRetweet),
        (Feature::FreqLink, Feature::RatioLink),
    ];
    for ((freq, ratio), count) in structural_cols.into_iter().zip(structural) {
        set(freq, count as f64);
        set(ratio, count as f64 / n);
    }

    set(Feature::MeanAccountAgeDays, sum_age / n);
    set(Feature::MeanFollowers, sum_followers / n);
    set(Feature::MeanFriends, sum_friends / n);
    set(Feature::MeanStatuses, sum_statuses / n);
    set(Feature::CountVerifiedTweets, verified as f64);
    set(Feature::RootIsVerified, if root.verified { 1.0 } else { 0.0 });
    set(Feature::MeanCreationToTweetDays, sum_gap / n);
    set(Feature::NetworkDensity, network_density(thread));

    set(Feature::MeanPolarity, polarity / n);
    set(Feature::MeanSubjectivity, subjectivity / n);
    let replies = walk.len() - 1;
    set(
        Feature::RatioDisagreement,
        if replies == 0 {
            0.0
        } else {
            disagree as f64 / replies as f64
        },
    );
    let marker_cols = [
        (Feature::FreqQuestionMark, Feature::RatioQuestionMark),
        (Feature::FreqExclamation, Feature::RatioExclamation),
        (Feature::FreqMultiPunct, Feature::RatioMultiPunct),
        (Feature::FreqFirstPronoun, Feature::RatioFirstPronoun),
        (Feature::FreqSecondPronoun, Feature::RatioSecondPronoun),
        (Feature::FreqThirdPronoun, Feature::RatioThirdPronoun),
        (Feature::FreqSmileEmoticon, Feature::RatioSmileEmoticon),
    ];
    for ((freq, ratio), count) in marker_cols.into_iter().zip(marker_counts) {
        set(freq, count as f64);
        set(ratio, count as f64 / n);
    }

    let slopes = temporal_slopes(&mut timeline);
    let temporal_cols = [
        Feature::SlopeAccountAge,
        Feature::SlopeCreationGap,
        Feature::SlopeFollowers,
        Feature::SlopeFriends,
        Feature::SlopeStatuses,
        Feature::SlopeTweetsPerMinute,
    ];
    for (f, s) in temporal_cols.into_iter().zip(slopes) {
        set(f, s);
    }

    FeatureVector {
        thread_id: root.id.clone(),
        values: v,
        label: Label::Unlabeled,
    }
}

/// Slopes of the five running author means and of the cumulative tweet count.
fn temporal_slopes(timeline: &mut [(u64, [f64; 5])]) -> [f64; 6] {
    timeline.sort_by_key(|&(m, _)| m);
    let last_minute = timeline.last().map_or(0, |&(m, _)| m);
    let mut steps: [Vec<(u64, f64)>; 6] = Default::default();
    let mut sums = [0.0f64; 5];
    let mut count = 0usize;
    let mut i = 0;
    while i < timeline.len() {
        let minute = timeline[i].0;
        while i < timeline.len() && timeline[i].0 == minute {
            for (s, x) in sums.iter_mut().zip(timeline[i].1) {
                *s += x;
            }
            count += 1;
            i += 1;
        }
        for (k, s) in sums.iter().enumerate() {
            steps[k].push((minute, s / count as f64));
        }
        steps[5].push((minute, count as f64));
    }
    let mut out = [0.0; 6];
    for (o, s) in out.iter_mut().zip(&steps) {
        *o = step_slope(s, last_minute);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{build_threads, tests::tweet};
    use alloc::vec;
    use proptest::prelude::*;

    fn with_hashtag(mut t: TweetRecord) -> TweetRecord {
        t.hashtags = vec!["x".into()];
        t
    }

    #[test]
    fn hashtag_counting() {
        let tweets = vec![
            with_hashtag(tweet("a", 0, None)),
            with_hashtag(tweet("b", 60, Some("a"))),
            tweet("c", 120, Some("a")),
        ];
        let tree = build_threads(&tweets).unwrap().threads.remove(0);
        let fv = extract(&tree, &NoFlags, &SentimentLexicon::new());
        assert_eq!(fv.get(Feature::FreqHashtag), 2.0);
        assert_eq!(fv.get(Feature::RatioHashtag), 2.0 / 3.0);
    }

    #[test]
    fn root_only_thread_is_degenerate() {
        let tree = ThreadTree::single(tweet("a", 1000, None));
        let fv = extract(&tree, &NoFlags, &SentimentLexicon::new());
        assert_eq!(fv.get(Feature::TreeDepth), 0.0);
        assert_eq!(fv.get(Feature::LifetimeMinutes), 0.0);
        assert_eq!(fv.get(Feature::NetworkDensity), 0.0);
        assert_eq!(fv.get(Feature::RatioDisagreement), 0.0);
        for f in [
            Feature::SlopeAccountAge,
            Feature::SlopeCreationGap,
            Feature::SlopeFollowers,
            Feature::SlopeFriends,
            Feature::SlopeStatuses,
            Feature::SlopeTweetsPerMinute,
        ] {
            assert_eq!(fv.get(f), 0.0);
        }
    }

    #[test]
    fn chain_depth_and_disagreement() {
        let tweets: Vec<TweetRecord> = (0..6)
            .map(|i| {
                let parent = (i > 0).then(|| alloc::format!("t{}", i - 1));
                tweet(&alloc::format!("t{i}"), i * 90, parent.as_deref())
            })
            .collect();
        let tree = build_threads(&tweets).unwrap().threads.remove(0);
        let mut flags = BTreeMap::new();
        flags.insert(String::from("t0"), true); // root flag is ignored
        flags.insert(String::from("t2"), true);
        let fv = extract(&tree, &flags, &SentimentLexicon::new());
        assert_eq!(fv.get(Feature::TreeDepth), 5.0);
        assert_eq!(fv.get(Feature::RatioDisagreement), 1.0 / 5.0);
        assert_eq!(fv.get(Feature::LifetimeMinutes), 7.5);
        assert!(fv.get(Feature::SlopeTweetsPerMinute) > 0.0);
    }

    #[test]
    fn temporal_columns_match_expanded_regression() {
        let mut a = tweet("a", 0, None);
        a.followers = 100;
        let mut b = tweet("b", 200, Some("a"));
        b.followers = 3;
        let mut c = tweet("c", 250, Some("a"));
        c.followers = 50;
        let tree = build_threads(&[a, b, c]).unwrap().threads.remove(0);
        let fv = extract(&tree, &NoFlags, &SentimentLexicon::new());
        // minutes 0, 3, 4; running follower means 100, 51.5, 51.
        let series = [(0, 100.0), (1, 100.0), (2, 100.0), (3, 51.5), (4, 51.0)];
        let expect = temporal_slope(&series).unwrap();
        assert!((fv.get(Feature::SlopeFollowers) - expect).abs() < 1e-12);
        let counts = [(0, 1.0), (1, 1.0), (2, 1.0), (3, 2.0), (4, 3.0)];
        let expect = temporal_slope(&counts).unwrap();
        assert!((fv.get(Feature::SlopeTweetsPerMinute) - expect).abs() < 1e-12);
    }

    #[test]
    fn early_replies_clamp_to_minute_zero() {
        let mut a = tweet("a", 1000, None);
        a.author_created_at = 2000;
        let b = tweet("b", 400, Some("a"));
        let tree = build_threads(&[a, b]).unwrap().threads.remove(0);
        let fv = extract(&tree, &NoFlags, &SentimentLexicon::new());
        assert_eq!(fv.get(Feature::LifetimeMinutes), 10.0);
        assert_eq!(fv.get(Feature::SlopeTweetsPerMinute), 0.0);
        assert!(fv.values.iter().all(|x| x.is_finite() && *x >= 0.0));
    }

    fn arb_thread() -> impl Strategy<Value = Vec<TweetRecord>> {
        let one = (
            0usize..64,
            -100_000i64..400_000,
            -1_000_000_000i64..1_000_000_000,
            (0u64..10_000_000, 0u64..100_000, 0u64..1_000_000, any::<bool>()),
            ".{0,40}",
            (any::<bool>(), any::<bool>(), any::<bool>(), any::<bool>(), 0usize..4),
        );
        prop::collection::vec(one, 1..30).prop_map(|specs| {
            let n = specs.len();
            specs
                .into_iter()
                .enumerate()
                .map(|(i, (p, dt, created, (fo, fr, st, ver), text, (h, m, u, rt, who)))| {
                    let parent = (i > 0).then(|| alloc::format!("t{}", p % i));
                    let mut t = tweet(
                        &alloc::format!("t{i}"),
                        1_500_000_000 + if i == 0 { 0 } else { dt },
                        parent.as_deref(),
                    );
                    t.author_id = alloc::format!("u{}", who);
                    t.author_created_at = 1_500_000_000 + created;
                    t.followers = fo;
                    t.friends = fr;
                    t.statuses = st;
                    t.verified = ver;
                    t.text = text;
                    if h {
                        t.hashtags = vec!["h".into()];
                    }
                    if u {
                        t.urls = vec!["http://u".into()];
                    }
                    if m {
                        t.mentions = vec![alloc::format!("u{}", (who + 1) % n.max(1))];
                    }
                    if rt && i > 0 {
                        t.retweet_of = Some(alloc::format!("t{}", p % i));
                    }
                    t
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn features_are_finite_and_in_range(tweets in arb_thread()) {
            let tree = build_threads(&tweets).unwrap().threads.remove(0);
            let lex: SentimentLexicon = [("a", 0.5, 0.5), ("b", -1.0, 1.0)].into_iter().collect();
            let fv = extract(&tree, &NoFlags, &lex);
            let n = fv.get(Feature::TweetCount);
            for f in Feature::ALL {
                let x = fv.get(f);
                prop_assert!(x.is_finite(), "{} = {}", f, x);
                if let Some(freq) = f.frequency_of_ratio() {
                    prop_assert!((0.0..=1.0).contains(&x));
                    prop_assert_eq!(x, fv.get(freq) / n);
                }
                if f.group() != FeatureGroup::Temporal && f != Feature::MeanPolarity {
                    prop_assert!(x >= 0.0, "{} = {}", f, x);
                }
            }
            prop_assert!((-1.0..=1.0).contains(&fv.get(Feature::MeanPolarity)));
            prop_assert!((0.0..=1.0).contains(&fv.get(Feature::MeanSubjectivity)));
            prop_assert!((0.0..=1.0).contains(&fv.get(Feature::NetworkDensity)));
            prop_assert_eq!(fv.get(Feature::TreeDepth), tree.depth() as f64);
        }

        #[test]
        fn extraction_ignores_input_order(tweets in arb_thread(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let mut shuffled = tweets.clone();
            shuffled.shuffle(&mut crate::rng::stream(seed, "test", &[]));
            let a = build_threads(&tweets).unwrap().threads.remove(0);
            let b = build_threads(&shuffled).unwrap().threads.remove(0);
            let lex = SentimentLexicon::new();
            prop_assert_eq!(extract(&a, &NoFlags, &lex), extract(&b, &NoFlags, &lex));
        }
    }
}

//! Label alignment across heterogeneous sources.
//!
//! Crowdsourced sources rate each event on a five-point factuality scale
//! (-2..=+2) instead of giving a discrete label. Those ratings are averaged
//! per event and the extreme tails of the mean distribution become labels:
//! means strictly above `high` are accurate, strictly below `low` are
//! inaccurate, and everything else is left unlabeled.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ingest::{DatasetManifest, Label, ManifestEntry, SourceKind, ThreadTree, TweetRecord};

/// Published default: events averaging below this are inaccurate.
pub const DEFAULT_LOW: f64 = 1.467;
/// Published default: events averaging above this are accurate.
pub const DEFAULT_HIGH: f64 = 1.9;
/// Tail mass used to derive the defaults.
pub const DEFAULT_QUANTILE: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RatingVector {
    event_id: String,
    ratings: Vec<i8>,
}

impl RatingVector {
    pub fn new(event_id: impl Into<String>, ratings: Vec<i64>) -> Result<Self> {
        let event_id = event_id.into();
        if ratings.is_empty() {
            return Err(Error::EmptyRatings(event_id));
        }
        let ratings = ratings
            .into_iter()
            .map(|r| match r {
                -2..=2 => Ok(r as i8),
                other => Err(Error::RatingOutOfRange(other)),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(RatingVector { event_id, ratings })
    }

    pub fn event_id(&self) -> &str {
        &self.event_id
    }

    pub fn ratings(&self) -> &[i8] {
        &self.ratings
    }

    pub fn mean(&self) -> f64 {
        let sum: i64 = self.ratings.iter().map(|&r| i64::from(r)).sum();
        sum as f64 / self.ratings.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LabelThresholds {
    pub low: f64,
    pub high: f64,
    /// Tail mass the thresholds were derived from, when known.
    pub quantile: Option<f64>,
}

impl Default for LabelThresholds {
    fn default() -> Self {
        LabelThresholds {
            low: DEFAULT_LOW,
            high: DEFAULT_HIGH,
            quantile: Some(DEFAULT_QUANTILE),
        }
    }
}

impl LabelThresholds {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low.is_finite() && high.is_finite()) {
            return Err(Error::NonFinite("thresholds"));
        }
        if low >= high {
            return Err(Error::DegenerateThresholds { low, high });
        }
        Ok(LabelThresholds {
            low,
            high,
            quantile: None,
        })
    }

    pub fn label(&self, mean: f64) -> Label {
        if mean > self.high {
            Label::Accurate
        } else if mean < self.low {
            Label::Inaccurate
        } else {
            Label::Unlabeled
        }
    }
}

/// Linear-interpolation quantile of already sorted data (the "type 7"
/// definition): position `q * (n - 1)` between order statistics.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let pos = q * (sorted.len() - 1) as f64;
    let lo = libm::floor(pos) as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

/// Derives `(low, high)` as the `quantile` and `1 - quantile` quantiles of
/// the event means.
pub fn compute_thresholds(means: &[f64], quantile: f64) -> Result<LabelThresholds> {
    if !(quantile > 0.0 && quantile < 0.5) {
        return Err(Error::QuantileOutOfRange(quantile));
    }
    if means.is_empty() {
        return Err(Error::EmptyInput("event means"));
    }
    if means.iter().any(|m| !m.is_finite()) {
        return Err(Error::NonFinite("event means"));
    }
    let mut sorted = means.to_vec();
    sorted.sort_by(f64::total_cmp);
    let low = quantile_sorted(&sorted, quantile);
    let high = quantile_sorted(&sorted, 1.0 - quantile);
    let mut t = LabelThresholds::new(low, high)?;
    t.quantile = Some(quantile);
    Ok(t)
}

pub fn label_by_mean(ratings: &RatingVector, thresholds: &LabelThresholds) -> Label {
    thresholds.label(ratings.mean())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiscardReason {
    NoTweets,
    /// The chosen root drew no replies or retweets inside the event.
    NoReactions {
        root_id: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootOutcome {
    Thread(ThreadTree),
    Discard(DiscardReason),
}

/// Re-roots a flat event tweet set at its most retweeted tweet.
///
/// Ties on `retweet_count` go to the earliest tweet, then the smallest id.
/// The thread is the root plus everything that (transitively) replies to or
/// retweets it inside the set; a root with no such reactions is discarded.
pub fn root_event(tweets: &[TweetRecord]) -> RootOutcome {
    let Some(root) = tweets.iter().min_by(|a, b| {
        b.retweet_count
            .cmp(&a.retweet_count)
            .then(a.created_at.cmp(&b.created_at))
            .then(a.id.cmp(&b.id))
    }) else {
        return RootOutcome::Discard(DiscardReason::NoTweets);
    };
    match ThreadTree::grow(&root.id, tweets) {
        Some(tree) if tree.len() > 1 => RootOutcome::Thread(tree),
        _ => RootOutcome::Discard(DiscardReason::NoReactions {
            root_id: root.id.clone(),
        }),
    }
}

/// A thread entry as it arrives from a source, before label alignment.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SourceEntry {
    pub path: String,
    #[cfg_attr(feature = "serde", serde(default))]
    pub label: Option<String>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub ratings: Option<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SourceManifest {
    pub name: String,
    pub source_kind: SourceKind,
    pub threads: Vec<SourceEntry>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Exclusion {
    pub path: String,
    pub reason: String,
}

/// Binary-labeled dataset plus the threads left out and why.
#[derive(Debug, Clone, PartialEq)]
pub struct UnifiedDataset {
    pub manifest: DatasetManifest,
    pub excluded: Vec<Exclusion>,
}

fn normalize(raw: &str) -> String {
    raw.trim()
        .chars()
        .map(|c| match c {
            ' ' | '_' => '-',
            c => c.to_ascii_lowercase(),
        })
        .collect()
}

/// Maps one source label onto the shared scheme. `Ok(None)` means the label is
/// known but carries no binary truth value (the thread is excluded).
pub fn unify_label(kind: SourceKind, raw: &str) -> Result<Option<Label>> {
    let norm = normalize(raw);
    if let Ok(label) = norm.parse::<Label>() {
        return Ok(label.as_binary().map(|_| label));
    }
    let mapped = match (kind, norm.as_str()) {
        (SourceKind::PhemeLike, "true") => Some(Label::Accurate),
        (SourceKind::PhemeLike, "false") => Some(Label::Inaccurate),
        (SourceKind::PhemeLike, "unverified") => None,
        (SourceKind::BuzzfeedLike, "mostly-true") => Some(Label::Accurate),
        (SourceKind::BuzzfeedLike, "mostly-false") => Some(Label::Inaccurate),
        (SourceKind::BuzzfeedLike, "mixture-of-true-and-false" | "no-factual-content") => None,
        _ => return Err(Error::UnknownLabel(raw.to_string())),
    };
    Ok(mapped)
}

/// Resolves every entry of a source manifest to accurate/inaccurate.
///
/// Credbank-like entries carrying `ratings` are labeled by their mean under
/// `thresholds`; all other entries go through [`unify_label`].
pub fn unify_labels(source: &SourceManifest, thresholds: &LabelThresholds) -> Result<UnifiedDataset> {
    let mut threads = Vec::new();
    let mut excluded = Vec::new();
    for entry in &source.threads {
        let resolved = match (&entry.ratings, &entry.label) {
            (Some(ratings), _) if source.source_kind == SourceKind::CredbankLike => {
                let rv = RatingVector::new(entry.path.clone(), ratings.clone())?;
                match label_by_mean(&rv, thresholds) {
                    Label::Unlabeled => Err(alloc::format!(
                        "mean rating {:.4} within [{}, {}]",
                        rv.mean(),
                        thresholds.low,
                        thresholds.high
                    )),
                    label => Ok(label),
                }
            }
            (_, Some(raw)) => match unify_label(source.source_kind, raw)? {
                Some(label) => Ok(label),
                None => Err(alloc::format!("label \"{raw}\" has no binary truth value")),
            },
            _ => Err("no label or ratings".to_string()),
        };
        match resolved {
            Ok(label) => threads.push(ManifestEntry {
                path: entry.path.clone(),
                label,
            }),
            Err(reason) => excluded.push(Exclusion {
                path: entry.path.clone(),
                reason,
            }),
        }
    }
    Ok(UnifiedDataset {
        manifest: DatasetManifest {
            name: source.name.clone(),
            source_kind: source.source_kind,
            threads,
        },
        excluded,
    })
}

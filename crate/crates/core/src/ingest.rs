//! Tweet records and reply-tree reconstruction.
//!
//! A tweet's parent is its `in_reply_to` target, or, for a retweet that
//! replies to nothing, the retweeted tweet. Tweets without a parent root a
//! thread. Replies whose parent is not in the input are dropped rather than
//! grafted onto a root, since tree depth is itself a feature.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};

/// Seconds since the Unix epoch, UTC.
pub type Timestamp = i64;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TweetRecord {
    pub id: String,
    pub created_at: Timestamp,
    pub text: String,
    pub author_id: String,
    pub author_created_at: Timestamp,
    pub followers: u64,
    pub friends: u64,
    pub statuses: u64,
    pub verified: bool,
    pub in_reply_to: Option<String>,
    pub retweet_of: Option<String>,
    pub retweet_count: u64,
    pub hashtags: Vec<String>,
    pub urls: Vec<String>,
    pub media: Vec<String>,
    pub mentions: Vec<String>,
}

impl TweetRecord {
    pub fn is_retweet(&self) -> bool {
        self.retweet_of.is_some()
    }

    /// The tweet this one hangs under in a thread, if any.
    pub fn parent_id(&self) -> Option<&str> {
        self.in_reply_to.as_deref().or(self.retweet_of.as_deref())
    }

    fn order_key(&self) -> (Timestamp, &str) {
        (self.created_at, self.id.as_str())
    }
}

/// Thread-level accuracy label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Label {
    Accurate,
    Inaccurate,
    Unlabeled,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Accurate => "accurate",
            Label::Inaccurate => "inaccurate",
            Label::Unlabeled => "unlabeled",
        }
    }

    /// `Some(true)` for accurate, `Some(false)` for inaccurate.
    pub fn as_binary(self) -> Option<bool> {
        match self {
            Label::Accurate => Some(true),
            Label::Inaccurate => Some(false),
            Label::Unlabeled => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "accurate" => Ok(Label::Accurate),
            "inaccurate" => Ok(Label::Inaccurate),
            "unlabeled" => Ok(Label::Unlabeled),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

/// Where a dataset came from, which decides how its raw labels are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SourceKind {
    #[cfg_attr(feature = "serde", serde(rename = "pheme-like"))]
    PhemeLike,
    #[cfg_attr(feature = "serde", serde(rename = "credbank-like"))]
    CredbankLike,
    #[cfg_attr(feature = "serde", serde(rename = "buzzfeed-like"))]
    BuzzfeedLike,
}

impl SourceKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SourceKind::PhemeLike => "pheme-like",
            SourceKind::CredbankLike => "credbank-like",
            SourceKind::BuzzfeedLike => "buzzfeed-like",
        }
    }
}

impl fmt::Display for SourceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SourceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pheme-like" => Ok(SourceKind::PhemeLike),
            "credbank-like" => Ok(SourceKind::CredbankLike),
            "buzzfeed-like" => Ok(SourceKind::BuzzfeedLike),
            other => Err(Error::UnknownSourceKind(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ManifestEntry {
    pub path: String,
    pub label: Label,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DatasetManifest {
    pub name: String,
    pub source_kind: SourceKind,
    pub threads: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn count(&self, label: Label) -> usize {
        self.threads.iter().filter(|e| e.label == label).count()
    }
}

/// A rooted reply tree.
///
/// Child lists are ordered by `(created_at, id)`. Every tweet except the root
/// appears in exactly one child list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreadTree {
    root: String,
    children: BTreeMap<String, Vec<String>>,
    tweets: BTreeMap<String, TweetRecord>,
    dropped_orphans: usize,
}

impl ThreadTree {
    /// A thread consisting of `root` alone.
    pub fn single(root: TweetRecord) -> Self {
        let id = root.id.clone();
        let mut tweets = BTreeMap::new();
        tweets.insert(id.clone(), root);
        ThreadTree {
            root: id,
            children: BTreeMap::new(),
            tweets,
            dropped_orphans: 0,
        }
    }

    /// Grows the tree hanging below `root_id` out of `pool`.
    ///
    /// Tweets in `pool` that are not reachable from the root are ignored.
    /// `dropped_orphans` counts pool tweets whose parent is absent from the
    /// pool. Returns `None` when the root is not in the pool.
    pub fn grow(root_id: &str, pool: &[TweetRecord]) -> Option<Self> {
        let by_id: BTreeMap<&str, &TweetRecord> = pool.iter().map(|t| (t.id.as_str(), t)).collect();
        let root = by_id.get(root_id)?;
        let kids = child_index(&by_id);
        let orphans = pool
            .iter()
            .filter(|t| t.id != root_id)
            .filter(|t| matches!(t.parent_id(), Some(p) if !by_id.contains_key(p)))
            .count();
        let mut tree = collect_tree(root, &by_id, &kids);
        tree.dropped_orphans = orphans;
        Some(tree)
    }

    pub fn root(&self) -> &TweetRecord {
        &self.tweets[&self.root]
    }

    pub fn root_id(&self) -> &str {
        &self.root
    }

    pub fn get(&self, id: &str) -> Option<&TweetRecord> {
        self.tweets.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.tweets.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.tweets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tweets.is_empty()
    }

    pub fn children_of(&self, id: &str) -> &[String] {
        self.children.get(id).map_or(&[], Vec::as_slice)
    }

    pub fn dropped_orphans(&self) -> usize {
        self.dropped_orphans
    }

    pub fn tweets(&self) -> impl Iterator<Item = &TweetRecord> {
        self.tweets.values()
    }

    /// Tweets in breadth-first order with their depth (root at depth 0).
    pub fn walk(&self) -> Vec<(&TweetRecord, usize)> {
        let mut out = Vec::with_capacity(self.tweets.len());
        let mut queue = VecDeque::new();
        queue.push_back((self.root.as_str(), 0usize));
        while let Some((id, depth)) = queue.pop_front() {
            out.push((&self.tweets[id], depth));
            for child in self.children_of(id) {
                queue.push_back((child.as_str(), depth + 1));
            }
        }
        out
    }

    /// Longest root-to-leaf path, in edges.
    pub fn depth(&self) -> usize {
        self.walk().iter().map(|&(_, d)| d).max().unwrap_or(0)
    }

    pub fn into_tweets(self) -> Vec<TweetRecord> {
        self.tweets.into_values().collect()
    }
}

/// Output of [`build_threads`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreadBuild {
    /// One tree per parentless tweet, ordered by root `(created_at, id)`.
    pub threads: Vec<ThreadTree>,
    /// Tweets not reachable from any root: replies to missing tweets, their
    /// descendants, and members of reply cycles.
    pub dropped_orphans: usize,
}

/// Reconstructs every reply tree in `tweets`.
pub fn build_threads(tweets: &[TweetRecord]) -> Result<ThreadBuild> {
    let mut by_id: BTreeMap<&str, &TweetRecord> = BTreeMap::new();
    let mut dups = BTreeSet::new();
    for t in tweets {
        if by_id.insert(t.id.as_str(), t).is_some() {
            dups.insert(t.id.clone());
        }
    }
    if !dups.is_empty() {
        return Err(Error::DuplicateIds(dups.into_iter().collect()));
    }

    let kids = child_index(&by_id);
    let mut roots: Vec<&TweetRecord> = by_id.values().copied().filter(|t| t.parent_id().is_none()).collect();
    roots.sort_by(|a, b| a.order_key().cmp(&b.order_key()));

    let threads: Vec<ThreadTree> = roots.into_iter().map(|r| collect_tree(r, &by_id, &kids)).collect();
    let kept: usize = threads.iter().map(ThreadTree::len).sum();
    Ok(ThreadBuild {
        threads,
        dropped_orphans: tweets.len() - kept,
    })
}

type ChildIndex<'a> = BTreeMap<&'a str, Vec<&'a TweetRecord>>;

fn child_index<'a>(by_id: &BTreeMap<&'a str, &'a TweetRecord>) -> ChildIndex<'a> {
    let mut kids: ChildIndex<'a> = BTreeMap::new();
    for &t in by_id.values() {
        if let Some(p) = t.parent_id() {
            if let Some((&parent, _)) = by_id.get_key_value(p) {
                kids.entry(parent).or_default().push(t);
            }
        }
    }
    for list in kids.values_mut() {
        list.sort_by(|a, b| a.order_key().cmp(&b.order_key()));
    }
    kids
}

fn collect_tree(root: &TweetRecord, by_id: &BTreeMap<&str, &TweetRecord>, kids: &ChildIndex<'_>) -> ThreadTree {
    let mut tweets = BTreeMap::new();
    let mut children = BTreeMap::new();
    let mut stack = alloc::vec![root.id.as_str()];
    while let Some(id) = stack.pop() {
        tweets.insert(id.to_string(), by_id[id].clone());
        // `grow` may pick a root that itself replies into its own subtree;
        // that edge is the only way back to the root.
        if let Some(list) = kids.get(id) {
            let list: Vec<&TweetRecord> = list.iter().copied().filter(|c| c.id != root.id).collect();
            if !list.is_empty() {
                children.insert(id.to_string(), list.iter().map(|c| c.id.clone()).collect());
                stack.extend(list.iter().map(|c| c.id.as_str()));
            }
        }
    }
    ThreadTree {
        root: root.id.clone(),
        children,
        tweets,
        dropped_orphans: 0,
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    pub(crate) fn tweet(id: &str, t: i64, parent: Option<&str>) -> TweetRecord {
        TweetRecord {
            id: id.into(),
            created_at: t,
            text: alloc::format!("tweet {id}"),
            author_id: alloc::format!("a-{id}"),
            in_reply_to: parent.map(Into::into),
            ..Default::default()
        }
    }

    #[test]
    fn chain_builds_one_tree_of_depth_two() {
        let tweets = vec![
            tweet("A", 0, None),
            tweet("B", 10, Some("A")),
            tweet("C", 20, Some("B")),
        ];
        let build = build_threads(&tweets).unwrap();
        assert_eq!(build.threads.len(), 1);
        let tree = &build.threads[0];
        assert_eq!(tree.root_id(), "A");
        assert_eq!(tree.depth(), 2);
        assert_eq!(tree.len(), 3);
        assert_eq!(build.dropped_orphans, 0);
    }

    #[test]
    fn lone_tweet_is_a_tree() {
        let build = build_threads(&[tweet("A", 0, None)]).unwrap();
        assert_eq!(build.threads.len(), 1);
        assert_eq!(build.threads[0].depth(), 0);
        assert!(build.threads[0].children_of("A").is_empty());
    }

    #[test]
    fn reply_to_missing_parent_is_dropped() {
        let build = build_threads(&[tweet("B", 0, Some("X"))]).unwrap();
        assert!(build.threads.is_empty());
        assert_eq!(build.dropped_orphans, 1);
    }

    #[test]
    fn orphan_subtrees_and_cycles_are_dropped() {
        let tweets = vec![
            tweet("A", 0, None),
            tweet("B", 1, Some("X")),
            tweet("C", 2, Some("B")),
            tweet("D", 3, Some("E")),
            tweet("E", 4, Some("D")),
        ];
        let build = build_threads(&tweets).unwrap();
        assert_eq!(build.threads.len(), 1);
        assert_eq!(build.dropped_orphans, 4);
    }

    #[test]
    fn duplicate_ids_are_listed() {
        let err = build_threads(&[tweet("A", 0, None), tweet("A", 1, None)]).unwrap_err();
        assert_eq!(err, Error::DuplicateIds(vec!["A".into()]));
    }

    #[test]
    fn children_ordered_by_time_then_id() {
        let tweets = vec![
            tweet("R", 0, None),
            tweet("z", 5, Some("R")),
            tweet("b", 7, Some("R")),
            tweet("a", 7, Some("R")),
        ];
        let tree = build_threads(&tweets).unwrap().threads.remove(0);
        assert_eq!(tree.children_of("R"), ["z", "a", "b"]);
    }

    #[test]
    fn retweets_hang_under_the_retweeted_tweet() {
        let mut rt = tweet("rt", 3, None);
        rt.retweet_of = Some("R".into());
        let tree = build_threads(&[tweet("R", 0, None), rt]).unwrap().threads.remove(0);
        assert_eq!(tree.children_of("R"), ["rt"]);
    }

    #[test]
    fn grow_counts_orphans_in_pool() {
        let pool = vec![
            tweet("R", 0, None),
            tweet("a", 1, Some("R")),
            tweet("b", 2, Some("gone")),
            tweet("other", 3, None),
        ];
        let tree = ThreadTree::grow("R", &pool).unwrap();
        assert_eq!(tree.len(), 2);
        assert_eq!(tree.dropped_orphans(), 1);
        assert!(ThreadTree::grow("nope", &pool).is_none());
    }

    #[test]
    fn grow_from_a_reply_inside_a_cycle_terminates() {
        let pool = vec![tweet("R", 0, Some("b")), tweet("b", 1, Some("R"))];
        let tree = ThreadTree::grow("R", &pool).unwrap();
        assert_eq!(tree.len(), 2);
        assert_eq!(tree.children_of("R"), ["b"]);
        assert!(tree.children_of("b").is_empty());
    }

    #[test]
    fn label_parsing_is_closed() {
        assert_eq!("accurate".parse::<Label>().unwrap(), Label::Accurate);
        assert_eq!(
            "mostly-true".parse::<Label>().unwrap_err(),
            Error::UnknownLabel("mostly-true".into())
        );
    }

    fn forest_strategy() -> impl Strategy<Value = Vec<TweetRecord>> {
        // Parent of tweet i is drawn from earlier tweets, a missing id, or none.
        prop::collection::vec((0u8..4, 0usize..64, 0i64..1000), 1..40).prop_map(|spec| {
            spec.iter()
                .enumerate()
                .map(|(i, &(kind, pick, t))| {
                    let parent = match kind {
                        0 => None,
                        1 if i > 0 => Some(alloc::format!("t{}", pick % i)),
                        2 => Some(alloc::format!("missing{pick}")),
                        _ if i > 0 => Some(alloc::format!("t{}", pick % i)),
                        _ => None,
                    };
                    tweet(&alloc::format!("t{i}"), t, parent.as_deref())
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn tree_shape_laws(tweets in forest_strategy()) {
            let build = build_threads(&tweets).unwrap();
            let mut seen = BTreeSet::new();
            for tree in &build.threads {
                let listed: usize = tree.tweets().map(|t| tree.children_of(&t.id).len()).sum();
                prop_assert_eq!(tree.len(), 1 + listed);
                let mut in_lists = BTreeSet::new();
                for t in tree.tweets() {
                    for c in tree.children_of(&t.id) {
                        prop_assert!(in_lists.insert(c.clone()), "child listed twice");
                    }
                }
                prop_assert!(!in_lists.contains(tree.root_id()));
                prop_assert_eq!(in_lists.len(), tree.len() - 1);
                for t in tree.tweets() {
                    prop_assert!(seen.insert(t.id.clone()));
                }
            }
            prop_assert_eq!(seen.len() + build.dropped_orphans, tweets.len());
        }

        #[test]
        fn build_is_order_independent(tweets in forest_strategy(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            let mut shuffled = tweets.clone();
            shuffled.shuffle(&mut crate::rng::stream(seed, "test", &[]));
            prop_assert_eq!(build_threads(&tweets).unwrap(), build_threads(&shuffled).unwrap());
        }
    }
}

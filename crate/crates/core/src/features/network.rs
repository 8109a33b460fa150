use alloc::collections::BTreeSet;
use alloc::string::String;

use crate::ingest::ThreadTree;

/// Density of the directed author interaction graph of a thread.
///
/// Nodes are the thread's distinct authors. Edges run from a mentioning author
/// to each mentioned author, and from a retweeter to the author of the
/// retweeted tweet, counted once per ordered pair. Self-loops and targets who
/// did not post in the thread are ignored. With `n` authors the density is
/// `|E| / (n (n - 1))`, and 0 when `n < 2`.
pub fn network_density(thread: &ThreadTree) -> f64 {
    let authors: BTreeSet<&str> = thread.tweets().map(|t| t.author_id.as_str()).collect();
    let n = authors.len();
    if n < 2 {
        return 0.0;
    }
    let mut edges: BTreeSet<(&str, &str)> = BTreeSet::new();
    for t in thread.tweets() {
        let from = t.author_id.as_str();
        let retweeted = t
            .retweet_of
            .as_deref()
            .and_then(|id| thread.get(id))
            .map(|orig| orig.author_id.as_str());
        for to in t.mentions.iter().map(String::as_str).chain(retweeted) {
            if to != from && authors.contains(to) {
                edges.insert((from, to));
            }
        }
    }
    edges.len() as f64 / (n * (n - 1)) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{build_threads, tests::tweet, TweetRecord};
    use alloc::vec::Vec;

    fn thread(specs: &[(&str, &str, &[&str])]) -> ThreadTree {
        // (id, author, mentions); first tweet is the root, the rest reply to it.
        let tweets: Vec<TweetRecord> = specs
            .iter()
            .enumerate()
            .map(|(i, &(id, author, mentions))| {
                let mut t = tweet(id, i as i64, if i == 0 { None } else { Some(specs[0].0) });
                t.author_id = author.into();
                t.mentions = mentions.iter().map(|m| String::from(*m)).collect();
                t
            })
            .collect();
        build_threads(&tweets).unwrap().threads.remove(0)
    }

    #[test]
    fn mutual_pair_among_three() {
        let t = thread(&[("1", "A", &["B"]), ("2", "B", &["A"]), ("3", "C", &[])]);
        assert!((network_density(&t) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn single_author_is_zero() {
        let t = thread(&[("1", "A", &["A"]), ("2", "A", &[])]);
        assert_eq!(network_density(&t), 0.0);
    }

    #[test]
    fn complete_graph_is_one() {
        let all = ["A", "B", "C", "D"];
        let specs: Vec<(String, &str, Vec<&str>)> = all
            .iter()
            .enumerate()
            .map(|(i, a)| {
                (
                    alloc::format!("{i}"),
                    *a,
                    all.iter().copied().filter(|b| b != a).collect(),
                )
            })
            .collect();
        let borrowed: Vec<(&str, &str, &[&str])> =
            specs.iter().map(|(i, a, m)| (i.as_str(), *a, m.as_slice())).collect();
        assert_eq!(network_density(&thread(&borrowed)), 1.0);
    }

    #[test]
    fn retweet_edges_and_duplicates() {
        let root = tweet("r", 0, None);
        let mut rt = tweet("rt", 1, None);
        rt.retweet_of = Some("r".into());
        rt.mentions = alloc::vec!["a-r".into(), "a-r".into(), "outsider".into()];
        let tree = build_threads(&[root, rt]).unwrap().threads.remove(0);
        // One deduplicated edge a-rt -> a-r out of 2 possible.
        assert_eq!(network_density(&tree), 0.5);
    }
}

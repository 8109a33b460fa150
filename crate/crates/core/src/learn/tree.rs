use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use super::matrix::TrainingMatrix;
use crate::rng::Stream;

/// One node of a fitted tree. Rows with `x[feature] <= threshold` go left.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Node {
    Leaf {
        /// Fraction of positive training rows that reached this leaf.
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: u32,
        right: u32,
    },
}

/// A CART classification tree stored as a node arena rooted at index 0.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecisionTree {
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    pub features_per_split: usize,
}

impl DecisionTree {
    /// Wraps a node arena; check it with [`DecisionTree::is_well_formed`].
    pub fn from_nodes(nodes: Vec<Node>) -> Self {
        DecisionTree { nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Checks child links, feature indices against `width`, and leaf values.
    pub fn is_well_formed(&self, width: usize) -> bool {
        let n = self.nodes.len();
        n > 0
            && self.nodes.iter().enumerate().all(|(i, node)| match *node {
                Node::Leaf { value } => (0.0..=1.0).contains(&value),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    feature < width
                        && threshold.is_finite()
                        && (left as usize) > i
                        && (right as usize) > i
                        && (left as usize) < n
                        && (right as usize) < n
                }
            })
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { value } => return value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if row[feature] <= threshold { left } else { right } as usize;
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(nodes, left as usize).max(go(nodes, right as usize)),
            }
        }
        go(&self.nodes, 0)
    }

    /// Fits a tree on the rows listed in `sample` (repeats allowed).
    pub(crate) fn fit(data: &Ranked, sample: &mut [usize], params: TreeParams, rng: &mut Stream) -> DecisionTree {
        let mut b = Builder {
            data,
            params,
            rng,
            nodes: Vec::new(),
            keys: Vec::with_capacity(sample.len()),
            order: (0..data.values.len()).collect(),
        };
        b.grow(sample, 0);
        DecisionTree { nodes: b.nodes }
    }
}

/// A training matrix with each column replaced by dense ranks of its
/// distinct values, so nodes sort small integers instead of floats.
pub(crate) struct Ranked {
    n: usize,
    /// Column-major: the rank of row `r` in column `f` is `ranks[f * n + r]`.
    ranks: Vec<u32>,
    /// Distinct values of each column, ascending.
    values: Vec<Vec<f64>>,
    labels: Vec<bool>,
}

impl Ranked {
    pub(crate) fn new(m: &TrainingMatrix) -> Self {
        let n = m.len();
        let mut ranks = vec![0u32; n * m.width()];
        let mut values = Vec::with_capacity(m.width());
        let mut order: Vec<usize> = (0..n).collect();
        for f in 0..m.width() {
            order.sort_unstable_by(|&a, &b| m.get(a, f).total_cmp(&m.get(b, f)));
            let mut distinct: Vec<f64> = Vec::new();
            for &r in &order {
                let x = m.get(r, f);
                if distinct.last() != Some(&x) {
                    distinct.push(x);
                }
                ranks[f * n + r] = (distinct.len() - 1) as u32;
            }
            values.push(distinct);
        }
        Ranked {
            n,
            ranks,
            values,
            labels: m.labels().to_vec(),
        }
    }

    #[inline]
    fn rank(&self, row: usize, feature: usize) -> u32 {
        self.ranks[feature * self.n + row]
    }
}

struct Builder<'a> {
    data: &'a Ranked,
    params: TreeParams,
    rng: &'a mut Stream,
    nodes: Vec<Node>,
    /// `rank << 1 | label` for the node being split.
    keys: Vec<u32>,
    order: Vec<usize>,
}

#[derive(Clone, Copy)]
struct Candidate {
    score: f64,
    feature: usize,
    threshold: f64,
    /// Highest rank sent left.
    cut: u32,
}

impl Candidate {
    fn beats(&self, other: &Option<Candidate>) -> bool {
        match other {
            None => true,
            Some(o) => {
                self.score < o.score
                    || (self.score == o.score
                        && (self.feature < o.feature || (self.feature == o.feature && self.threshold < o.threshold)))
            }
        }
    }
}

impl Builder<'_> {
    fn grow(&mut self, sample: &mut [usize], depth: usize) -> u32 {
        let id = self.nodes.len() as u32;
        let n = sample.len();
        let positives = sample.iter().filter(|&&i| self.data.labels[i]).count();
        let value = positives as f64 / n as f64;
        self.nodes.push(Node::Leaf { value });

        let pure = positives == 0 || positives == n;
        let depth_capped = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || depth_capped || n < 2 * self.params.min_leaf {
            return id;
        }
        let Some(best) = self.best_split(sample, positives) else {
            return id;
        };

        let mut mid = 0;
        for i in 0..n {
            if self.data.rank(sample[i], best.feature) <= best.cut {
                sample.swap(i, mid);
                mid += 1;
            }
        }
        let (l, r) = sample.split_at_mut(mid);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id as usize] = Node::Split {
            feature: best.feature,
            threshold: best.threshold,
            left,
            right,
        };
        id
    }

    /// Evaluates features in a fresh random order until `features_per_split`
    /// non-constant ones have been tried.
    fn best_split(&mut self, sample: &[usize], positives: usize) -> Option<Candidate> {
        let k = self.order.len();
        let mut best: Option<Candidate> = None;
        let mut tried = 0;
        for i in 0..k {
            if tried == self.params.features_per_split {
                break;
            }
            let j = self.rng.random_range(i..k);
            self.order.swap(i, j);
            let feature = self.order[i];

            self.keys.clear();
            let (mut lo, mut hi) = (u32::MAX, 0);
            for &r in sample {
                let rank = self.data.rank(r, feature);
                lo = lo.min(rank);
                hi = hi.max(rank);
                self.keys.push(rank << 1 | u32::from(self.data.labels[r]));
            }
            if lo == hi {
                continue;
            }
            tried += 1;
            self.keys.sort_unstable();
            let values = &self.data.values[feature];
            if let Some(c) = scan(&self.keys, positives, feature, self.params.min_leaf, values) {
                if c.beats(&best) {
                    best = Some(c);
                }
            }
        }
        best
    }
}

/// Best Gini split of one sorted key column.
fn scan(keys: &[u32], positives: usize, feature: usize, min_leaf: usize, values: &[f64]) -> Option<Candidate> {
    let n = keys.len();
    let total_p = positives as f64;
    let mut best: Option<(f64, u32, u32)> = None;
    let mut left_p = 0usize;
    for i in 0..n - 1 {
        left_p += (keys[i] & 1) as usize;
        let (a, b) = (keys[i] >> 1, keys[i + 1] >> 1);
        let nl = i + 1;
        if a == b || nl < min_leaf || n - nl < min_leaf {
            continue;
        }
        let (nl, nr) = (nl as f64, (n - nl) as f64);
        let pl = left_p as f64;
        let pr = total_p - pl;
        // n times the weighted Gini impurity, halved.
        let score = pl * (nl - pl) / nl + pr * (nr - pr) / nr;
        if best.map_or(true, |(s, _, _)| score < s) {
            best = Some((score, a, b));
        }
    }
    best.map(|(score, a, b)| Candidate {
        score,
        feature,
        threshold: midpoint(values[a as usize], values[b as usize]),
        cut: a,
    })
}

/// A threshold in `[a, b)` halfway between `a < b` where representable.
fn midpoint(a: f64, b: f64) -> f64 {
    let t = a + (b - a) / 2.0;
    if t >= b {
        a
    } else {
        t
    }
}

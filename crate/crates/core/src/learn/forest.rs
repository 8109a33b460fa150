use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use super::matrix::TrainingMatrix;
use super::tree::{DecisionTree, Ranked, TreeParams};
use crate::error::{Error, Result};
use crate::exec::{Executor, Sequential};
use crate::rng;

/// Bumped whenever the serialized model layout changes.
pub const FOREST_MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ForestConfig {
    pub n_trees: usize,
    /// `None` grows until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
    /// Candidate features per node; `None` means `ceil(sqrt(k))`.
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        ForestConfig {
            n_trees: 100,
            max_depth: None,
            min_leaf: 1,
            features_per_split: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

impl ForestConfig {
    pub fn with_seed(seed: u64) -> Self {
        ForestConfig {
            seed,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_trees == 0 {
            return Err(Error::InvalidConfig("n_trees must be positive".into()));
        }
        if self.min_leaf == 0 {
            return Err(Error::InvalidConfig("min_leaf must be positive".into()));
        }
        if self.features_per_split == Some(0) {
            return Err(Error::InvalidConfig("features_per_split must be positive".into()));
        }
        Ok(())
    }
}

/// `ceil(sqrt(k))` without floating point.
fn ceil_sqrt(k: usize) -> usize {
    let mut r = 0;
    while r * r < k {
        r += 1;
    }
    r
}

/// A bagged ensemble of CART trees scored by soft voting.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ForestModel {
    config: ForestConfig,
    width: usize,
    trees: Vec<DecisionTree>,
}

impl ForestModel {
    pub fn from_parts(config: ForestConfig, width: usize, trees: Vec<DecisionTree>) -> Result<Self> {
        let model = ForestModel { config, width, trees };
        model.validate()?;
        Ok(model)
    }

    /// Structural checks for models built outside [`train_forest`].
    pub fn validate(&self) -> Result<()> {
        if self.trees.is_empty() {
            return Err(Error::InvalidConfig("forest has no trees".into()));
        }
        match self.trees.iter().position(|t| !t.is_well_formed(self.width)) {
            Some(i) => Err(Error::InvalidConfig(format!("tree {i} is malformed"))),
            None => Ok(()),
        }
    }

    pub fn config(&self) -> &ForestConfig {
        &self.config
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn trees(&self) -> &[DecisionTree] {
        &self.trees
    }

    /// Mean leaf positive fraction over all trees.
    pub fn predict_proba(&self, row: &[f64]) -> Result<f64> {
        if row.len() != self.width {
            return Err(Error::WidthMismatch {
                expected: self.width,
                got: row.len(),
            });
        }
        let sum: f64 = self.trees.iter().map(|t| t.predict(row)).sum();
        Ok(sum / self.trees.len() as f64)
    }

    pub fn predict_matrix(&self, m: &TrainingMatrix) -> Result<Vec<f64>> {
        m.rows().map(|r| self.predict_proba(r)).collect()
    }
}

pub fn train_forest(m: &TrainingMatrix, config: &ForestConfig) -> Result<ForestModel> {
    train_forest_with(m, config, &Sequential)
}

/// Trains the trees through `exec`; tree `t` always uses the stream
/// `(seed, "forest/tree", t)`, so any executor gives the same model.
pub fn train_forest_with(m: &TrainingMatrix, config: &ForestConfig, exec: &impl Executor) -> Result<ForestModel> {
    config.validate()?;
    if m.width() == 0 {
        return Err(Error::TooFewFeatures { needed: 1, got: 0 });
    }
    if !m.has_both_classes() {
        return Err(Error::SingleClass);
    }
    let k = m.width();
    let params = TreeParams {
        max_depth: config.max_depth,
        min_leaf: config.min_leaf,
        features_per_split: config.features_per_split.unwrap_or_else(|| ceil_sqrt(k)).min(k),
    };
    let n = m.len();
    let data = Ranked::new(m);
    let trees = exec.map((0..config.n_trees).collect(), |t| {
        let mut rng = rng::stream(config.seed, "forest/tree", &[t as u64]);
        let mut sample: Vec<usize> = if config.bootstrap {
            (0..n).map(|_| rng.random_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        DecisionTree::fit(&data, &mut sample, params, &mut rng)
    });
    Ok(ForestModel {
        config: *config,
        width: k,
        trees,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::metrics::roc_auc;
    use crate::learn::tree::Node;
    use crate::synth;
    use alloc::vec;

    #[test]
    fn ceil_sqrt_values() {
        let got: Vec<usize> = [1, 2, 4, 5, 9, 10, 45].iter().map(|&k| ceil_sqrt(k)).collect();
        assert_eq!(got, [1, 2, 2, 3, 3, 4, 7]);
    }

    #[test]
    fn soft_voting_averages_leaves() {
        let leaf = |v| DecisionTree::from_nodes(vec![Node::Leaf { value: v }]);
        let f = ForestModel::from_parts(ForestConfig::default(), 1, vec![leaf(1.0), leaf(1.0)]).unwrap();
        assert_eq!(f.predict_proba(&[0.0]).unwrap(), 1.0);
        let f = ForestModel::from_parts(
            ForestConfig::default(),
            1,
            vec![leaf(0.0), leaf(1.0), leaf(1.0), leaf(0.0)],
        )
        .unwrap();
        assert_eq!(f.predict_proba(&[0.0]).unwrap(), 0.5);
        let g = ForestModel::from_parts(
            ForestConfig::default(),
            1,
            vec![leaf(1.0), leaf(0.0), leaf(0.0), leaf(1.0)],
        )
        .unwrap();
        assert_eq!(g.predict_proba(&[3.0]).unwrap(), f.predict_proba(&[3.0]).unwrap());
        assert_eq!(
            f.predict_proba(&[0.0, 1.0]).unwrap_err(),
            Error::WidthMismatch { expected: 1, got: 2 }
        );
    }

    #[test]
    fn malformed_models_rejected() {
        let bad = DecisionTree::from_nodes(vec![Node::Split {
            feature: 3,
            threshold: 0.0,
            left: 1,
            right: 2,
        }]);
        assert!(ForestModel::from_parts(ForestConfig::default(), 2, vec![bad]).is_err());
        assert!(ForestModel::from_parts(ForestConfig::default(), 2, vec![]).is_err());
        let leaf = DecisionTree::from_nodes(vec![Node::Leaf { value: 1.5 }]);
        assert!(ForestModel::from_parts(ForestConfig::default(), 2, vec![leaf]).is_err());
    }

    #[test]
    fn single_class_rejected() {
        let m = TrainingMatrix::from_rows(1, &[vec![0.0], vec![1.0]], &[true, true]).unwrap();
        assert_eq!(
            train_forest(&m, &ForestConfig::default()).unwrap_err(),
            Error::SingleClass
        );
    }

    #[test]
    fn perfect_predictor_column() {
        let (rows, labels) = synth::gaussian_clusters(60, 3, 0.5, 4);
        let rows: Vec<Vec<f64>> = rows
            .into_iter()
            .zip(&labels)
            .map(|(mut r, &y)| {
                r[1] = f64::from(u8::from(y));
                r
            })
            .collect();
        let m = TrainingMatrix::from_rows(3, &rows, &labels).unwrap();
        let cfg = ForestConfig {
            n_trees: 1,
            features_per_split: Some(3),
            ..ForestConfig::with_seed(1)
        };
        let f = train_forest(&m, &cfg).unwrap();
        for (row, &y) in rows.iter().zip(&labels) {
            assert_eq!(f.predict_proba(row).unwrap(), f64::from(u8::from(y)));
        }
    }

    /// Nearest-centroid classification of the training set: the oracle the
    /// forest's training fit must match on well-separated clusters.
    fn nearest_centroid_accuracy(rows: &[Vec<f64>], labels: &[bool]) -> f64 {
        let k = rows[0].len();
        let mut c = [vec![0.0; k], vec![0.0; k]];
        let mut n = [0.0f64; 2];
        for (r, &y) in rows.iter().zip(labels) {
            let g = usize::from(y);
            n[g] += 1.0;
            c[g].iter_mut().zip(r).for_each(|(a, b)| *a += b);
        }
        for g in 0..2 {
            c[g].iter_mut().for_each(|a| *a /= n[g]);
        }
        let d = |r: &[f64], c: &[f64]| r.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        let hits = rows
            .iter()
            .zip(labels)
            .filter(|(r, &y)| (d(r, &c[1]) < d(r, &c[0])) == y)
            .count();
        hits as f64 / rows.len() as f64
    }

    #[test]
    fn separable_clusters_fit_and_reproduce() {
        let (rows, labels) = synth::gaussian_clusters(500, 10, 3.0, 7);
        assert!(nearest_centroid_accuracy(&rows, &labels) >= 0.99);
        let m = TrainingMatrix::from_rows(10, &rows, &labels).unwrap();
        let cfg = ForestConfig::with_seed(42);
        let f = train_forest(&m, &cfg).unwrap();
        let p = f.predict_matrix(&m).unwrap();
        let acc = p.iter().zip(&labels).filter(|(p, &y)| (**p > 0.5) == y).count() as f64 / 500.0;
        assert!(acc >= 0.99, "{acc}");
        assert!(roc_auc(&p, &labels).unwrap() > 0.999);
        let again = train_forest(&m, &cfg).unwrap();
        assert_eq!(f, again);
        for t in f.trees() {
            assert!(t.is_well_formed(10));
        }
    }
}

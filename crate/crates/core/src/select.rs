//! Cross-validated feature scoring, recursive feature elimination, and
//! cross-dataset transfer.
//!
//! Feature ids are column indices of a [`Dataset`]; for extracted threads
//! they coincide with registry indices.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use alloc::{format, vec};

use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::Executor;
use crate::features::{feature_names, FeatureVector};
use crate::learn::{
    accuracy, chi2_test, roc_auc, roc_curve, stratified_kfold, train_forest_with, ForestConfig, RocCurve,
    TrainingMatrix,
};
use crate::rng;

/// Labeled rows with named columns. `true` is the accurate class.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    columns: Vec<String>,
    ids: Vec<String>,
    values: Vec<f64>,
    labels: Vec<bool>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        columns: Vec<String>,
        ids: Vec<String>,
        rows: &[Vec<f64>],
        labels: Vec<bool>,
    ) -> Result<Self> {
        if ids.len() != rows.len() {
            return Err(Error::LengthMismatch(ids.len(), rows.len()));
        }
        if labels.len() != rows.len() {
            return Err(Error::LengthMismatch(labels.len(), rows.len()));
        }
        let width = columns.len();
        let mut values = Vec::with_capacity(rows.len() * width);
        for row in rows {
            if row.len() != width {
                return Err(Error::WidthMismatch {
                    expected: width,
                    got: row.len(),
                });
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite("dataset row"));
            }
            values.extend_from_slice(row);
        }
        Ok(Dataset {
            name: name.into(),
            columns,
            ids,
            values,
            labels,
        })
    }

    /// Registry-ordered columns; unlabeled vectors are skipped.
    pub fn from_features(name: impl Into<String>, vectors: &[FeatureVector]) -> Result<Self> {
        let labeled: Vec<(&FeatureVector, bool)> = vectors
            .iter()
            .filter_map(|v| v.label.as_binary().map(|y| (v, y)))
            .collect();
        let rows: Vec<Vec<f64>> = labeled.iter().map(|(v, _)| v.values.to_vec()).collect();
        Dataset::new(
            name,
            feature_names().map(String::from).collect(),
            labeled.iter().map(|(v, _)| v.thread_id.clone()).collect(),
            &rows,
            labeled.iter().map(|&(_, y)| y).collect(),
        )
    }

    /// Columns named `f0, f1, ...` and rows `r0, r1, ...`.
    pub fn synthetic(name: impl Into<String>, rows: &[Vec<f64>], labels: Vec<bool>) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        Dataset::new(
            name,
            (0..width).map(|j| format!("f{j}")).collect(),
            (0..rows.len()).map(|i| format!("r{i}")).collect(),
            rows,
            labels,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn width(&self) -> usize {
        self.columns.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.width();
        &self.values[i * w..(i + 1) * w]
    }

    /// Column indices for `names`, in the given order.
    pub fn resolve(&self, names: &[String]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                self.columns
                    .iter()
                    .position(|c| c == n)
                    .ok_or_else(|| Error::UnknownFeature(n.clone()))
            })
            .collect()
    }

    /// This dataset with every label inverted.
    pub fn flipped(&self) -> Dataset {
        Dataset {
            labels: self.labels.iter().map(|y| !y).collect(),
            ..self.clone()
        }
    }

    fn matrix(&self, cols: &[usize], rows: impl Iterator<Item = usize>) -> TrainingMatrix {
        let mut m = TrainingMatrix::new(cols.len());
        let mut buf = vec![0.0; cols.len()];
        for i in rows {
            let row = self.row(i);
            for (b, &c) in buf.iter_mut().zip(cols) {
                *b = row[c];
            }
            m.push(&buf, self.labels[i])
                .expect("rows are validated on construction");
        }
        m
    }

    /// Row indices sorted by id, then by raw values, so evaluation does not
    /// depend on the order rows were loaded in.
    fn canonical_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by(|&a, &b| {
            self.ids[a].cmp(&self.ids[b]).then_with(|| {
                let bits = |i| self.row(i).iter().map(|x: &f64| x.to_bits());
                bits(a).cmp(bits(b)).then(self.labels[a].cmp(&self.labels[b]))
            })
        });
        order
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CvConfig {
    pub repeats: usize,
    pub folds: usize,
    pub trees: usize,
    pub seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            repeats: 30,
            folds: 10,
            trees: 100,
            seed: 0,
        }
    }
}

impl CvConfig {
    fn validate(&self) -> Result<()> {
        if self.repeats == 0 || self.trees == 0 {
            return Err(Error::InvalidConfig("repeats and trees must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeatureSetScore {
    pub repeat_aucs: Vec<f64>,
    pub mean: f64,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Repeated stratified k-fold CV of a forest on the columns `features`.
/// Each repeat pools its out-of-fold scores into one AUC.
pub fn evaluate_feature_set(dataset: &Dataset, features: &[usize], config: &CvConfig) -> Result<FeatureSetScore> {
    evaluate_ordered(dataset, &dataset.canonical_order(), features, config)
}

fn evaluate_ordered(
    dataset: &Dataset,
    order: &[usize],
    features: &[usize],
    config: &CvConfig,
) -> Result<FeatureSetScore> {
    config.validate()?;
    if features.is_empty() {
        return Err(Error::TooFewFeatures { needed: 1, got: 0 });
    }
    if let Some(&bad) = features.iter().find(|&&c| c >= dataset.width()) {
        return Err(Error::UnknownFeature(format!("column {bad}")));
    }
    let labels: Vec<bool> = order.iter().map(|&i| dataset.labels[i]).collect();
    let mut repeat_aucs = Vec::with_capacity(config.repeats);
    for r in 0..config.repeats as u64 {
        let folds = stratified_kfold(&labels, config.folds, rng::derive_seed(config.seed, "cv/folds", &[r]))?;
        let mut scores = vec![0.0; labels.len()];
        let mut held = vec![false; labels.len()];
        for (f, test) in folds.iter().enumerate() {
            held.iter_mut().for_each(|h| *h = false);
            test.iter().for_each(|&i| held[i] = true);
            let train = dataset.matrix(features, (0..labels.len()).filter(|&i| !held[i]).map(|i| order[i]));
            let forest_cfg = ForestConfig {
                n_trees: config.trees,
                seed: rng::derive_seed(config.seed, "cv/forest", &[r, f as u64]),
                ..ForestConfig::default()
            };
            let forest = train_forest_with(&train, &forest_cfg, &crate::Sequential)?;
            let mut buf = vec![0.0; features.len()];
            for &i in test {
                let row = dataset.row(order[i]);
                for (b, &c) in buf.iter_mut().zip(features) {
                    *b = row[c];
                }
                scores[i] = forest.predict_proba(&buf)?;
            }
        }
        repeat_aucs.push(roc_auc(&scores, &labels)?);
    }
    Ok(FeatureSetScore {
        mean: mean(&repeat_aucs),
        repeat_aucs,
    })
}

/// One elimination round.
#[derive(Debug, Clone, PartialEq)]
pub struct EliminationStep {
    /// Active columns, ascending.
    pub active: Vec<usize>,
    /// Mean AUC without `active[i]`, aligned with `active`.
    pub held_out_auc: Vec<f64>,
    pub removed: usize,
    pub best_auc: f64,
}

impl EliminationStep {
    /// The columns left after this round.
    pub fn remaining(&self) -> Vec<usize> {
        self.active.iter().copied().filter(|&c| c != self.removed).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EliminationTrace {
    pub config: CvConfig,
    pub iterations: Vec<EliminationStep>,
    pub chosen_subset: Vec<usize>,
}

/// Index of the highest score; the first one wins ties.
fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// The remaining set of the round with the highest best-AUC, preferring
/// later (smaller) rounds on ties.
fn chosen_subset(steps: &[EliminationStep]) -> Vec<usize> {
    let mut best: Option<&EliminationStep> = None;
    for s in steps {
        if best.map_or(true, |b| s.best_auc >= b.best_auc) {
            best = Some(s);
        }
    }
    best.map(EliminationStep::remaining).unwrap_or_default()
}

/// Recursive feature elimination over every column of `dataset`.
pub fn rfe(dataset: &Dataset, config: &CvConfig, exec: &impl Executor) -> Result<EliminationTrace> {
    rfe_with_progress(dataset, config, exec, |_| {})
}

/// [`rfe`], calling `progress` after each round.
pub fn rfe_with_progress(
    dataset: &Dataset,
    config: &CvConfig,
    exec: &impl Executor,
    mut progress: impl FnMut(&EliminationStep),
) -> Result<EliminationTrace> {
    config.validate()?;
    if dataset.width() < 2 {
        return Err(Error::TooFewFeatures {
            needed: 2,
            got: dataset.width(),
        });
    }
    let order = dataset.canonical_order();
    let mut active: Vec<usize> = (0..dataset.width()).collect();
    let mut iterations = Vec::with_capacity(active.len() - 1);
    while active.len() >= 2 {
        let subsets: Vec<Vec<usize>> = (0..active.len())
            .map(|i| {
                let mut s = active.clone();
                s.remove(i);
                s
            })
            .collect();
        let scores = exec
            .map(subsets, |s| {
                evaluate_ordered(dataset, &order, &s, config).map(|r| r.mean)
            })
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
        let best = argmax(&scores);
        let step = EliminationStep {
            active: active.clone(),
            removed: active[best],
            best_auc: scores[best],
            held_out_auc: scores,
        };
        progress(&step);
        iterations.push(step);
        active.remove(best);
    }
    Ok(EliminationTrace {
        config: *config,
        chosen_subset: chosen_subset(&iterations),
        iterations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TransferConfig {
    pub repeats: usize,
    pub trees: usize,
    pub seed: u64,
}

impl Default for TransferConfig {
    fn default() -> Self {
        TransferConfig {
            repeats: 20,
            trees: 100,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Chi2Summary {
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TransferResult {
    pub source: String,
    pub target: String,
    pub features: Vec<String>,
    pub repeat_aucs: Vec<f64>,
    pub mean_auc: f64,
    pub repeat_accuracies: Vec<f64>,
    pub mean_accuracy: f64,
    /// The repeat whose AUC is closest to the mean.
    pub representative_repeat: usize,
    pub roc: RocCurve,
    /// True label × predicted label test on the final repeat; `None` when a
    /// row or column of the table is empty.
    pub chi2: Option<Chi2Summary>,
}

/// Scores strictly above 0.5 predict the accurate class.
pub const DECISION_THRESHOLD: f64 = 0.5;

fn summarize(
    source: &str,
    target: &Dataset,
    features: Vec<String>,
    repeat_scores: Vec<Vec<f64>>,
) -> Result<TransferResult> {
    let labels = target.labels();
    let mut repeat_aucs = Vec::with_capacity(repeat_scores.len());
    let mut repeat_accuracies = Vec::with_capacity(repeat_scores.len());
    for scores in &repeat_scores {
        repeat_aucs.push(roc_auc(scores, labels)?);
        let predicted: Vec<bool> = scores.iter().map(|&s| s > DECISION_THRESHOLD).collect();
        repeat_accuracies.push(accuracy(&predicted, labels)?);
    }
    let mean_auc = mean(&repeat_aucs);
    let mut representative_repeat = 0;
    for (r, a) in repeat_aucs.iter().enumerate() {
        if (a - mean_auc).abs() < (repeat_aucs[representative_repeat] - mean_auc).abs() {
            representative_repeat = r;
        }
    }
    let last = repeat_scores.last().ok_or(Error::EmptyInput("repeats"))?;
    let mut table = [[0u64; 2]; 2];
    for (&s, &y) in last.iter().zip(labels) {
        table[usize::from(!y)][usize::from(s <= DECISION_THRESHOLD)] += 1;
    }
    let chi2 = chi2_test(table)
        .ok()
        .map(|(statistic, p_value)| Chi2Summary { statistic, p_value });
    Ok(TransferResult {
        source: source.to_string(),
        target: target.name().to_string(),
        features,
        mean_accuracy: mean(&repeat_accuracies),
        roc: roc_curve(&repeat_scores[representative_repeat], labels)?,
        representative_repeat,
        repeat_aucs,
        mean_auc,
        repeat_accuracies,
        chi2,
    })
}

/// Trains on all of `source` and scores `target`, once per repeat.
pub fn transfer(
    source: &Dataset,
    target: &Dataset,
    features: &[String],
    config: &TransferConfig,
    exec: &impl Executor,
) -> Result<TransferResult> {
    if config.repeats == 0 || config.trees == 0 {
        return Err(Error::InvalidConfig("repeats and trees must be positive".into()));
    }
    if features.is_empty() {
        return Err(Error::TooFewFeatures { needed: 1, got: 0 });
    }
    let src_cols = source.resolve(features)?;
    let tgt_cols = target.resolve(features)?;
    let train = source.matrix(&src_cols, source.canonical_order().into_iter());
    let rows: Vec<Vec<f64>> = (0..target.len())
        .map(|i| tgt_cols.iter().map(|&c| target.row(i)[c]).collect())
        .collect();
    let repeat_scores = exec
        .map((0..config.repeats as u64).collect(), |r| {
            let cfg = ForestConfig {
                n_trees: config.trees,
                seed: rng::derive_seed(config.seed, "transfer/forest", &[r]),
                ..ForestConfig::default()
            };
            let forest = train_forest_with(&train, &cfg, &crate::Sequential)?;
            rows.iter()
                .map(|row| forest.predict_proba(row))
                .collect::<Result<Vec<f64>>>()
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    summarize(source.name(), target, features.to_vec(), repeat_scores)
}

/// Trains on the concatenated sources restricted to the union of their
/// subsets, ordered as in the target's columns.
pub fn pooled_transfer(
    sources: &[(&Dataset, Vec<String>)],
    target: &Dataset,
    config: &TransferConfig,
    exec: &impl Executor,
) -> Result<TransferResult> {
    if sources.len() < 2 {
        return Err(Error::TooFewSources(sources.len()));
    }
    let mut union: Vec<usize> = Vec::new();
    for (_, subset) in sources {
        for c in target.resolve(subset)? {
            if !union.contains(&c) {
                union.push(c);
            }
        }
    }
    union.sort_unstable();
    let names: Vec<String> = union.iter().map(|&c| target.columns()[c].clone()).collect();

    let mut ids = Vec::new();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for (s, (ds, _)) in sources.iter().enumerate() {
        let cols = ds.resolve(&names)?;
        for i in 0..ds.len() {
            ids.push(format!("{s}/{}", ds.ids()[i]));
            rows.push(cols.iter().map(|&c| ds.row(i)[c]).collect::<Vec<f64>>());
            labels.push(ds.labels()[i]);
        }
    }
    let name = sources.iter().map(|(d, _)| d.name()).collect::<Vec<_>>().join("+");
    let pooled = Dataset::new(name, names.clone(), ids, &rows, labels)?;
    transfer(&pooled, target, &names, config, exec)
}

/// Coin-toss scores: uniform in `[0, 1)`, independent per repeat.
pub fn random_baseline(target: &Dataset, repeats: usize, seed: u64) -> Result<TransferResult> {
    if repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be positive".into()));
    }
    let repeat_scores = (0..repeats as u64)
        .map(|r| {
            let mut rng = rng::stream(seed, "baseline", &[r]);
            (0..target.len()).map(|_| rng.random::<f64>()).collect()
        })
        .collect();
    summarize("random", target, Vec::new(), repeat_scores)
}

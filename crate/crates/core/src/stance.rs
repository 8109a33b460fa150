//! Disagreement classifier for replies.
//!
//! Text is tokenized, expanded into unigrams and adjacent bigrams, and hashed
//! into `2^hash_bits` signed buckets. A logistic-loss linear model is fit by
//! seeded SGD with an L2 penalty and a `1 / (lambda * (t0 + t))` step size.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::learn::{roc_auc, stratified_kfold};
use crate::rng;

pub const DEFAULT_HASH_BITS: u32 = 18;
pub const URL_TOKEN: &str = "<url>";
pub const MENTION_TOKEN: &str = "<mention>";

/// Lowercases and splits `text` into word tokens.
///
/// URLs become `<url>` and @-mentions `<mention>`. Words split on every
/// character that is neither alphanumeric nor an apostrophe; apostrophes at
/// word edges are trimmed.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        let lower = chunk.to_lowercase();
        if lower.starts_with("http://") || lower.starts_with("https://") || lower.starts_with("www.") {
            out.push(URL_TOKEN.to_string());
            continue;
        }
        let mut rest = lower.as_str();
        if let Some(after) = rest.strip_prefix('@') {
            let handle_len: usize = after
                .chars()
                .take_while(|c| c.is_alphanumeric() || *c == '_')
                .map(char::len_utf8)
                .sum();
            if handle_len > 0 {
                out.push(MENTION_TOKEN.to_string());
                rest = &after[handle_len..];
            }
        }
        for word in rest.split(|c: char| !(c.is_alphanumeric() || c == '\'')) {
            let word = word.trim_matches('\'');
            if !word.is_empty() {
                out.push(word.to_string());
            }
        }
    }
    out
}

/// Sparse vector with strictly increasing indices and no zero values.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    pub indices: Vec<u32>,
    pub values: Vec<f64>,
}

impl SparseVector {
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(i, v)| dense[i as usize] * v).sum()
    }
}

fn hash_term(term: &[&str], bits: u32) -> (u32, f64) {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for (k, part) in term.iter().enumerate() {
        if k > 0 {
            h ^= u64::from(b' ');
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        for &b in part.as_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    // Finalize so low and high bits are both well mixed.
    h ^= h >> 33;
    h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
    h ^= h >> 33;
    let bucket = (h & ((1u64 << bits) - 1)) as u32;
    let sign = if h >> 63 == 1 { -1.0 } else { 1.0 };
    (bucket, sign)
}

/// Hashes unigrams and adjacent bigrams of `tokens` into signed counts.
pub fn featurize_text(tokens: &[String], hash_bits: u32) -> SparseVector {
    let mut entries: Vec<(u32, f64)> = Vec::with_capacity(tokens.len() * 2);
    for (i, tok) in tokens.iter().enumerate() {
        entries.push(hash_term(&[tok], hash_bits));
        if let Some(next) = tokens.get(i + 1) {
            entries.push(hash_term(&[tok, next], hash_bits));
        }
    }
    entries.sort_by_key(|&(i, _)| i);
    let mut merged: Vec<(u32, f64)> = Vec::with_capacity(entries.len());
    for (idx, v) in entries {
        match merged.last_mut() {
            Some((last, acc)) if *last == idx => *acc += v,
            _ => merged.push((idx, v)),
        }
    }
    // Opposite-signed collisions can cancel.
    merged.retain(|&(_, v)| v != 0.0);
    let (indices, values) = merged.into_iter().unzip();
    SparseVector { indices, values }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum StanceLabel {
    Disagree,
    Other,
}

impl StanceLabel {
    /// Maps a per-reply support annotation: refutations disagree, and
    /// support, comment, and query replies do not.
    pub fn from_support(annotation: &str) -> Result<Self> {
        match annotation.trim().to_ascii_lowercase().as_str() {
            "refute" | "deny" | "disputed" => Ok(StanceLabel::Disagree),
            "support" | "agreed" | "comment" | "query" | "appeal-for-more-information" => Ok(StanceLabel::Other),
            _ => Err(Error::UnknownLabel(annotation.to_string())),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StanceLabel::Disagree => "disagree",
            StanceLabel::Other => "other",
        }
    }
}

impl FromStr for StanceLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disagree" => Ok(StanceLabel::Disagree),
            "other" => Ok(StanceLabel::Other),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

impl fmt::Display for StanceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StanceExample {
    text: String,
    label: StanceLabel,
    source: String,
}

impl StanceExample {
    pub fn new(text: impl Into<String>, label: StanceLabel, source: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.trim().is_empty() {
            return Err(Error::EmptyText);
        }
        Ok(StanceExample {
            text,
            label,
            source: source.into(),
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn label(&self) -> StanceLabel {
        self.label
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StanceConfig {
    pub hash_bits: u32,
    pub l2: f64,
    pub epochs: usize,
    /// Step size at t = 0.
    pub initial_rate: f64,
    pub seed: u64,
}

impl Default for StanceConfig {
    fn default() -> Self {
        StanceConfig {
            hash_bits: DEFAULT_HASH_BITS,
            l2: 1e-4,
            epochs: 10,
            initial_rate: 0.1,
            seed: 0,
        }
    }
}

impl StanceConfig {
    fn validate(&self) -> Result<()> {
        check_bits(self.hash_bits)?;
        if !(self.l2 > 0.0 && self.l2.is_finite()) {
            return Err(Error::InvalidConfig("l2 must be positive".into()));
        }
        if !(self.initial_rate > 0.0 && self.initial_rate.is_finite()) {
            return Err(Error::InvalidConfig("initial rate must be positive".into()));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        Ok(())
    }
}

fn check_bits(bits: u32) -> Result<()> {
    if (1..=30).contains(&bits) {
        Ok(())
    } else {
        Err(Error::InvalidHashBits(bits))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StanceModel {
    weights: Vec<f64>,
    bias: f64,
    hash_bits: u32,
    training_seed: u64,
}

/// Orders of the n-grams a model is trained on.
pub const NGRAM_ORDERS: [u8; 2] = [1, 2];

impl StanceModel {
    pub fn from_parts(hash_bits: u32, weights: Vec<f64>, bias: f64, training_seed: u64) -> Result<Self> {
        check_bits(hash_bits)?;
        if weights.len() != 1usize << hash_bits {
            return Err(Error::WeightLength {
                bits: hash_bits,
                got: weights.len(),
            });
        }
        if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("stance weights"));
        }
        Ok(StanceModel {
            weights,
            bias,
            hash_bits,
            training_seed,
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn hash_bits(&self) -> u32 {
        self.hash_bits
    }

    pub fn training_seed(&self) -> u64 {
        self.training_seed
    }

    pub fn margin(&self, x: &SparseVector) -> f64 {
        x.dot(&self.weights) + self.bias
    }

    /// Probability that `text` disagrees with the thread root.
    pub fn predict(&self, text: &str) -> f64 {
        let x = featurize_text(&tokenize(text), self.hash_bits);
        sigmoid(self.margin(&x))
    }

    pub fn is_disagreement(&self, text: &str) -> bool {
        self.predict(text) > 0.5
    }
}

/// Probability of disagreement for `text`; the binary label is `p > 0.5`.
pub fn predict_disagreement(model: &StanceModel, text: &str) -> f64 {
    model.predict(text)
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

fn log_loss(p: f64, y: f64) -> f64 {
    let p = p.clamp(1e-15, 1.0 - 1e-15);
    -(y * libm::log(p) + (1.0 - y) * libm::log(1.0 - p))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingDiagnostics {
    /// Mean log-loss over the training set after each epoch.
    pub epoch_loss: Vec<f64>,
    pub examples: usize,
    pub disagree: usize,
}

struct Encoded {
    x: SparseVector,
    y: f64,
}

fn encode(corpus: &[StanceExample], bits: u32) -> Vec<Encoded> {
    corpus
        .iter()
        .map(|ex| Encoded {
            x: featurize_text(&tokenize(&ex.text), bits),
            y: if ex.label == StanceLabel::Disagree { 1.0 } else { 0.0 },
        })
        .collect()
}

pub fn train_stance(corpus: &[StanceExample], config: &StanceConfig) -> Result<(StanceModel, TrainingDiagnostics)> {
    config.validate()?;
    let disagree = corpus.iter().filter(|e| e.label == StanceLabel::Disagree).count();
    if disagree == 0 || disagree == corpus.len() {
        return Err(Error::SingleClass);
    }
    let data = encode(corpus, config.hash_bits);
    let lambda = config.l2;
    let t0 = 1.0 / (lambda * config.initial_rate);

    // Weights are stored as `scale * v` so the L2 shrink is O(1) per step.
    let mut v = vec![0.0f64; 1usize << config.hash_bits];
    let mut scale = 1.0f64;
    let mut bias = 0.0f64;
    let mut t = 0u64;
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut epoch_loss = Vec::with_capacity(config.epochs);

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng::stream(config.seed, "stance/epoch", &[epoch as u64]));
        for &i in &order {
            let ex = &data[i];
            let eta = 1.0 / (lambda * (t0 + t as f64));
            let p = sigmoid(scale * ex.x.dot(&v) + bias);
            let g = p - ex.y;
            scale *= 1.0 - eta * lambda;
            let step = eta * g / scale;
            for (idx, val) in ex.x.iter() {
                v[idx as usize] -= step * val;
            }
            bias -= eta * g;
            t += 1;
            if scale < 1e-9 {
                v.iter_mut().for_each(|w| *w *= scale);
                scale = 1.0;
            }
        }
        let loss = data
            .iter()
            .map(|ex| log_loss(sigmoid(scale * ex.x.dot(&v) + bias), ex.y))
            .sum::<f64>()
            / data.len() as f64;
        epoch_loss.push(loss);
    }

    v.iter_mut().for_each(|w| *w *= scale);
    let model = StanceModel::from_parts(config.hash_bits, v, bias, config.seed)?;
    Ok((
        model,
        TrainingDiagnostics {
            epoch_loss,
            examples: corpus.len(),
            disagree,
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StanceCvReport {
    /// AUC over the pooled out-of-fold probabilities.
    pub auc: f64,
    pub folds: usize,
}

/// Stratified k-fold cross-validation of the stance classifier.
pub fn cross_validate_stance(corpus: &[StanceExample], config: &StanceConfig, folds: usize) -> Result<StanceCvReport> {
    let labels: Vec<bool> = corpus.iter().map(|e| e.label == StanceLabel::Disagree).collect();
    let split = stratified_kfold(&labels, folds, rng::derive_seed(config.seed, "stance/cv", &[]))?;
    let mut scores = vec![0.0; corpus.len()];
    for (f, held_out) in split.iter().enumerate() {
        let mut in_fold = vec![false; corpus.len()];
        held_out.iter().for_each(|&i| in_fold[i] = true);
        let train: Vec<StanceExample> = corpus
            .iter()
            .zip(&in_fold)
            .filter(|(_, &held)| !held)
            .map(|(e, _)| e.clone())
            .collect();
        let cfg = StanceConfig {
            seed: rng::derive_seed(config.seed, "stance/cv-fold", &[f as u64]),
            ..*config
        };
        let (model, _) = train_stance(&train, &cfg)?;
        for &i in held_out {
            scores[i] = model.predict(&corpus[i].text);
        }
    }
    Ok(StanceCvReport {
        auc: roc_auc(&scores, &labels)?,
        folds,
    })
}

//! ROC analysis and accuracy.

use alloc::vec::Vec;

use crate::error::{Error, Result};

fn check(scores: &[f64], labels: &[bool]) -> Result<(usize, usize)> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch(scores.len(), labels.len()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite("scores"));
    }
    let pos = labels.iter().filter(|&&y| y).count();
    let neg = labels.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    Ok((pos, neg))
}

/// Indices sorted by descending score.
fn descending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    order
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half (the Mann-Whitney statistic via mid-ranks).
pub fn roc_auc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let (pos, neg) = check(scores, labels)?;
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        // ranks i+1 ..= j+1 share their average
        let mid = (i + j + 2) as f64 / 2.0;
        let tied_pos = order[i..=j].iter().filter(|&&k| labels[k]).count();
        rank_sum += mid * tied_pos as f64;
        i = j + 1;
    }
    let (p, n) = (pos as f64, neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * n))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RocPoint {
    pub fpr: f64,
    pub tpr: f64,
    /// Rows scoring at or above this value are predicted positive.
    #[cfg_attr(feature = "serde", serde(with = "crate::serde_ext::lossless_f64"))]
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

impl RocCurve {
    /// Trapezoidal area under the points.
    pub fn trapezoid_area(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].fpr - w[0].fpr) * (w[1].tpr + w[0].tpr) / 2.0)
            .sum()
    }
}

/// One point per distinct score, from `(0, 0)` at an infinite threshold to
/// `(1, 1)` at the lowest score.
pub fn roc_curve(scores: &[f64], labels: &[bool]) -> Result<RocCurve> {
    let (pos, neg) = check(scores, labels)?;
    let order = descending(scores);
    let mut points = Vec::with_capacity(scores.len() + 1);
    points.push(RocPoint {
        fpr: 0.0,
        tpr: 0.0,
        threshold: f64::INFINITY,
    });
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < order.len() {
        let s = scores[order[i]];
        while i < order.len() && scores[order[i]] == s {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            fpr: fp as f64 / neg as f64,
            tpr: tp as f64 / pos as f64,
            threshold: s,
        });
    }
    Ok(RocCurve {
        points,
        auc: roc_auc(scores, labels)?,
    })
}

/// Fraction of positions where `predicted` equals `labels`.
pub fn accuracy(predicted: &[bool], labels: &[bool]) -> Result<f64> {
    if predicted.len() != labels.len() {
        return Err(Error::LengthMismatch(predicted.len(), labels.len()));
    }
    if labels.is_empty() {
        return Err(Error::EmptyInput("labels"));
    }
    let hits = predicted.iter().zip(labels).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / labels.len() as f64)
}

/// O(n²) concordant-pair count.
#[cfg(test)]
pub(crate) fn brute_force_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &yi) in labels.iter().enumerate() {
        for (j, &yj) in labels.iter().enumerate() {
            if yi && !yj {
                den += 1.0;
                if scores[i] > scores[j] {
                    num += 1.0;
                } else if scores[i] == scores[j] {
                    num += 0.5;
                }
            }
        }
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    #[test]
    fn reference_examples() {
        assert_eq!(
            roc_auc(&[0.9, 0.8, 0.3, 0.2], &[true, true, false, false]).unwrap(),
            1.0
        );
        assert_eq!(
            roc_auc(&[0.9, 0.2, 0.8, 0.3], &[true, false, false, true]).unwrap(),
            0.75
        );
        assert_eq!(
            roc_auc(&[0.4; 6], &[true, false, true, false, false, true]).unwrap(),
            0.5
        );
        assert_eq!(roc_auc(&[0.1, 0.2], &[true, true]).unwrap_err(), Error::SingleClass);
        assert!(roc_auc(&[f64::NAN, 0.2], &[true, false]).is_err());
    }

    #[test]
    fn curve_shape() {
        let c = roc_curve(&[0.9, 0.2, 0.8, 0.3, 0.8], &[true, false, false, true, true]).unwrap();
        assert_eq!(c.points.first().map(|p| (p.fpr, p.tpr)), Some((0.0, 0.0)));
        assert_eq!(c.points.last().map(|p| (p.fpr, p.tpr)), Some((1.0, 1.0)));
        assert_eq!(c.points.len(), 5);
        assert!((c.trapezoid_area() - c.auc).abs() < 1e-12);
    }

    #[test]
    fn accuracy_basics() {
        assert_eq!(accuracy(&[true, false], &[true, false]).unwrap(), 1.0);
        assert_eq!(
            accuracy(&[true, true, false, false], &[true, false, true, false]).unwrap(),
            0.5
        );
        assert!(accuracy(&[], &[]).is_err());
    }

    fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
        (2usize..200).prop_flat_map(|n| {
            (
                prop::collection::vec((0u8..20).prop_map(|x| f64::from(x) / 4.0), n),
                prop::collection::vec(any::<bool>(), n),
            )
                .prop_filter("both classes", |(_, y)| y.iter().any(|&b| b) && y.iter().any(|&b| !b))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn matches_pair_count((s, y) in instance()) {
            let fast = roc_auc(&s, &y).unwrap();
            prop_assert!((fast - brute_force_auc(&s, &y)).abs() <= 1e-9);
            let curve = roc_curve(&s, &y).unwrap();
            prop_assert!((curve.trapezoid_area() - fast).abs() <= 1e-9);
            prop_assert!(curve.points.windows(2).all(|w| w[0].fpr <= w[1].fpr && w[0].tpr <= w[1].tpr));
        }

        #[test]
        fn flipped_labels_complement((s, y) in instance()) {
            // jitter by index to remove ties
            let s: Vec<f64> = s.iter().enumerate().map(|(i, v)| v + i as f64 * 1e-6).collect();
            let flipped: Vec<bool> = y.iter().map(|b| !b).collect();
            let sum = roc_auc(&s, &y).unwrap() + roc_auc(&s, &flipped).unwrap();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }

        #[test]
        fn monotone_transform_invariant((s, y) in instance()) {
            let t: Vec<f64> = s.iter().map(|v| libm::exp(3.0 * v) - 7.0).collect();
            prop_assert_eq!(roc_auc(&s, &y).unwrap(), roc_auc(&t, &y).unwrap());
        }

        #[test]
        fn accuracy_row_order_invariant(y in prop::collection::vec(any::<bool>(), 1..50), p in prop::collection::vec(any::<bool>(), 50)) {
            let p = &p[..y.len()];
            let a = accuracy(p, &y).unwrap();
            let rp: Vec<bool> = p.iter().rev().copied().collect();
            let ry: Vec<bool> = y.iter().rev().copied().collect();
            prop_assert_eq!(a, accuracy(&rp, &ry).unwrap());
            prop_assert_eq!(accuracy(&y, &y).unwrap(), 1.0);
        }
    }

    #[test]
    fn two_point_auc_enumerates() {
        for s in [vec![0.1, 0.9], vec![0.9, 0.1], vec![0.5, 0.5]] {
            let a = roc_auc(&s, &[true, false]).unwrap();
            assert!([0.0, 0.5, 1.0].contains(&a));
        }
    }
}

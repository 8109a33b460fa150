use alloc::vec::Vec;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng;

/// Splits row indices into `k` folds with per-class balance.
///
/// Each class is shuffled on its own stream and dealt round-robin; the deal
/// for the second class continues where the first stopped, so fold sizes
/// differ by at most one overall as well as per class.
pub fn stratified_kfold(labels: &[bool], k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidFolds(k));
    }
    let mut folds: Vec<Vec<usize>> = (0..k).map(|_| Vec::new()).collect();
    let mut offset = 0;
    for (c, class) in [true, false].into_iter().enumerate() {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < k {
            return Err(Error::ClassTooSmall {
                members: members.len(),
                folds: k,
            });
        }
        members.shuffle(&mut rng::stream(seed, "cv/stratify", &[c as u64]));
        for (j, &i) in members.iter().enumerate() {
            folds[(offset + j) % k].push(i);
        }
        offset += members.len();
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

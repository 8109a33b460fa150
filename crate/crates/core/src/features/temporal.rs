//! Log-space growth slopes of cumulative thread statistics.

use crate::error::{Error, Result};

/// Ordinary-least-squares slope of `ln(1 + value)` against `minute`.
///
/// Minutes must be strictly increasing and values non-negative. Fewer than two
/// points give a slope of 0.
pub fn temporal_slope(series: &[(u64, f64)]) -> Result<f64> {
    for &(_, v) in series {
        if !v.is_finite() {
            return Err(Error::NonFinite("temporal series"));
        }
        if v < 0.0 {
            return Err(Error::NegativeValue(v));
        }
    }
    if series.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::NonIncreasingMinutes);
    }
    if series.len() < 2 {
        return Ok(0.0);
    }
    let n = series.len() as f64;
    let mean_x = series.iter().map(|&(m, _)| m as f64).sum::<f64>() / n;
    let ys: alloc::vec::Vec<f64> = series.iter().map(|&(_, v)| libm::log1p(v)).collect();
    let mean_y = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (&(m, _), y) in series.iter().zip(&ys) {
        let dx = m as f64 - mean_x;
        sxy += dx * (y - mean_y);
        sxx += dx * dx;
    }
    Ok(sxy / sxx)
}

/// Slope of a step series sampled at every minute `0..=last_minute`.
///
/// `steps` lists `(minute, value)` change points in increasing minute order,
/// starting at minute 0; each value holds until the next change point. This
/// is the same regression as [`temporal_slope`] on the expanded per-minute
/// series, computed in closed form so long quiet stretches cost nothing.
pub(crate) fn step_slope(steps: &[(u64, f64)], last_minute: u64) -> f64 {
    if last_minute == 0 || steps.is_empty() {
        return 0.0;
    }
    let n = (last_minute + 1) as f64;
    let mean_x = last_minute as f64 / 2.0;
    // Sum of squared deviations of 0..=L from their mean.
    let sxx = n * (n * n - 1.0) / 12.0;
    let mut sxy = 0.0;
    for (i, &(start, value)) in steps.iter().enumerate() {
        let end = steps.get(i + 1).map_or(last_minute, |&(next, _)| next - 1);
        let len = (end - start + 1) as f64;
        let centered = len * ((start + end) as f64 / 2.0 - mean_x);
        sxy += libm::log1p(value) * centered;
    }
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    #[test]
    fn exponential_growth_recovers_ln2() {
        // Closed form: ln(1 + 2^t - 1) = t ln 2, so the OLS slope is exactly ln 2.
        let series: Vec<(u64, f64)> = (0..=10).map(|t| (t, libm::pow(2.0, t as f64) - 1.0)).collect();
        let s = temporal_slope(&series).unwrap();
        assert!((s - core::f64::consts::LN_2).abs() < 1e-12);
        // Scaling values by 10 stays within |ln 10| / span of the original.
        let scaled: Vec<(u64, f64)> = series.iter().map(|&(t, v)| (t, v * 10.0)).collect();
        assert!((temporal_slope(&scaled).unwrap() - s).abs() < 0.25);
    }

    #[test]
    fn degenerate_series() {
        assert_eq!(temporal_slope(&[(0, 4.0), (1, 4.0), (5, 4.0)]).unwrap(), 0.0);
        assert_eq!(temporal_slope(&[(3, 7.0)]).unwrap(), 0.0);
        assert_eq!(temporal_slope(&[]).unwrap(), 0.0);
        assert_eq!(temporal_slope(&[(0, -1.0)]).unwrap_err(), Error::NegativeValue(-1.0));
        assert_eq!(
            temporal_slope(&[(1, 1.0), (1, 2.0)]).unwrap_err(),
            Error::NonIncreasingMinutes
        );
    }

    fn expand(steps: &[(u64, f64)], last: u64) -> Vec<(u64, f64)> {
        (0..=last)
            .map(|m| {
                let v = steps.iter().take_while(|&&(s, _)| s <= m).last().unwrap().1;
                (m, v)
            })
            .collect()
    }

    proptest! {
        #[test]
        fn step_slope_matches_expanded_regression(
            gaps in prop::collection::vec((1u64..50, 0.0f64..1e6), 0..12),
            first in 0.0f64..1e6,
            tail in 0u64..40,
        ) {
            let mut steps = alloc::vec![(0u64, first)];
            for &(g, v) in &gaps {
                let m = steps.last().unwrap().0 + g;
                steps.push((m, v));
            }
            let last = steps.last().unwrap().0 + tail;
            let fast = step_slope(&steps, last);
            let slow = temporal_slope(&expand(&steps, last)).unwrap();
            prop_assert!((fast - slow).abs() <= 1e-9 * (1.0 + slow.abs()), "{} vs {}", fast, slow);
        }
    }
}

use crate::error::{Error, Result};

/// Pearson's statistic for a 2×2 table (no continuity correction) and its
/// df=1 p-value.
pub fn chi2_test(table: [[u64; 2]; 2]) -> Result<(f64, f64)> {
    let t = table.map(|r| r.map(|c| c as f64));
    let rows = [t[0][0] + t[0][1], t[1][0] + t[1][1]];
    let cols = [t[0][0] + t[1][0], t[0][1] + t[1][1]];
    let n = rows[0] + rows[1];
    if rows.contains(&0.0) || cols.contains(&0.0) {
        return Err(Error::ZeroMarginal);
    }
    let mut stat = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let e = rows[i] * cols[j] / n;
            stat += (t[i][j] - e) * (t[i][j] - e) / e;
        }
    }
    Ok((stat, chi2_p(stat)))
}

/// Survival function of the χ² distribution with one degree of freedom,
/// `P(X > x) = erfc(sqrt(x / 2))`.
pub fn chi2_p(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 {
        return 1.0;
    }
    libm::erfc(libm::sqrt(x / 2.0))
}

//! Small statistics helpers for ensemble comparisons.

use statrs::distribution::{ContinuousCDF, StudentsT};

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (n-1 denominator).
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Standard error of the mean.
pub fn std_err(xs: &[f64]) -> f64 {
    std_dev(xs) / (xs.len() as f64).sqrt()
}

/// One-sided paired t-test p-value for H1: mean(diffs) > shift.
///
/// `diffs` are per-pair differences (x_i - y_i); pass a negative `shift`
/// for a non-inferiority margin. Degenerate zero-variance samples give
/// p = 0 or 1 by the sign of the mean.
pub fn paired_one_sided_p(diffs: &[f64], shift: f64) -> f64 {
    let n = diffs.len();
    assert!(n >= 2, "need at least two pairs");
    let m = mean(diffs) - shift;
    let sd = std_dev(diffs);
    if sd == 0.0 {
        return if m > 0.0 { 0.0 } else { 1.0 };
    }
    let t = m / (sd / (n as f64).sqrt());
    let dist = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("valid dof");
    1.0 - dist.cdf(t)
}

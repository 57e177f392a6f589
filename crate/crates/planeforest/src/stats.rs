//! Kolmogorov–Smirnov and chi-square statistics plus the threshold helpers
//! used by the experiment verdicts.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("empty sample")]
    EmptySample,
    #[error("observed and expected lengths differ")]
    LengthMismatch,
}

fn sorted(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(|a, b| a.partial_cmp(b).expect("NaN in sample"));
    xs
}

/// Two-sample KS statistic: sup over the merged sample of the difference of
/// empirical CDFs.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64, StatsError> {
    if a.is_empty() || b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let a = sorted(a.to_vec());
    let b = sorted(b.to_vec());
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup: f64 = 0.0;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        sup = sup.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    Ok(sup)
}

/// One-sample KS statistic against a continuous CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<f64, StatsError> {
    if sample.is_empty() {
        return Err(StatsError::EmptySample);
    }
    let xs = sorted(sample.to_vec());
    let n = xs.len() as f64;
    let mut sup: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        sup = sup.max((f - i as f64 / n).abs());
        sup = sup.max((f - (i as f64 + 1.0) / n).abs());
    }
    Ok(sup)
}

/// Pearson chi-square statistic for observed counts against expected counts.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> Result<f64, StatsError> {
    if observed.is_empty() {
        return Err(StatsError::EmptySample);
    }
    if observed.len() != expected.len() {
        return Err(StatsError::LengthMismatch);
    }
    Ok(observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum())
}

/// Quantile of the chi-square law with `df` degrees of freedom.
pub fn chi_square_quantile(p: f64, df: u64) -> f64 {
    ChiSquared::new(df as f64)
        .expect("df >= 1")
        .inverse_cdf(p)
}

/// Asymptotic one-sample KS quantile: `sqrt(ln(2/alpha)/2) / sqrt(n)`.
pub fn ks_one_sample_quantile(alpha: f64, n: usize) -> f64 {
    ((2.0 / alpha).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

/// Asymptotic two-sample KS quantile at significance `alpha`.
pub fn ks_two_sample_quantile(alpha: f64, n: usize, m: usize) -> f64 {
    let scale = ((n + m) as f64 / (n as f64 * m as f64)).sqrt();
    ((2.0 / alpha).ln() / 2.0).sqrt() * scale
}

/// Binomial standard error of an empirical frequency.
pub fn binomial_se(p_hat: f64, n: usize) -> f64 {
    (p_hat * (1.0 - p_hat) / n as f64).sqrt()
}

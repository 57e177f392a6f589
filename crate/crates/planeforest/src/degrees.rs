//! Degree sequences of plane forests and their derived statistics.
//!
//! A degree sequence records, for each degree `i`, the number `s^(i)` of
//! vertices with exactly `i` children. Validity requires at least one vertex
//! and `c(s) = Σ (1-i)·s^(i) >= 1`; `c(s)` is the number of tree components
//! of every forest realizing `s`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DegreeError {
    #[error("degree sequence is empty (n = 0)")]
    EmptySequence,
    #[error("not a forest: c(s) = {c} must be >= 1")]
    NotAForest { c: i64 },
    #[error("64-bit overflow while computing degree statistics")]
    Overflow,
    #[error("degenerate sequence: sigma^2(p) = 0")]
    DegenerateSigma,
}

/// Validated degree counts, stored sparsely as degree -> count.
///
/// Construct through [`DegreeSequence::validate`]; every instance satisfies
/// `n >= 1` and `c >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawDegreeSequence", into = "RawDegreeSequence")]
pub struct DegreeSequence {
    counts: BTreeMap<u64, u64>,
    n: u64,
    c: u64,
}

/// Wire form: `{"counts": {"0": 7, "1": 2, ...}}` with decimal degree keys.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawDegreeSequence {
    counts: BTreeMap<u64, u64>,
}

impl TryFrom<RawDegreeSequence> for DegreeSequence {
    type Error = DegreeError;

    fn try_from(raw: RawDegreeSequence) -> Result<Self, DegreeError> {
        DegreeSequence::validate(raw.counts)
    }
}

impl From<DegreeSequence> for RawDegreeSequence {
    fn from(s: DegreeSequence) -> Self {
        RawDegreeSequence { counts: s.counts }
    }
}

/// Derived statistics of a degree sequence.
///
/// `sigma2_s = Σ i^2 s^(i)` is the raw sum used by the height-tail bound;
/// `sigma2_p = sigma2_s / n` is the second moment of the empirical child
/// distribution and `mu_p = (n - c)/n` its mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeStats {
    pub n: u64,
    pub c: u64,
    pub delta: u64,
    pub sigma2_s: u64,
    pub sigma2_p: f64,
    pub mu_p: f64,
}

/// The scaled quantities appearing in the convergence hypotheses: a family of
/// sequences approaches regime `(lambda, sigma)` iff `c/(sigma(p) sqrt(n))`
/// stabilizes, `mu_p -> 1` and `delta/sqrt(n) -> 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegimeDiagnostics {
    pub n: u64,
    pub c_over_sigma_sqrt_n: f64,
    pub mu_p: f64,
    pub sigma2_p: f64,
    pub delta_over_sqrt_n: f64,
}

impl DegreeSequence {
    /// Checks `n >= 1` and `c >= 1` and drops zero-count entries.
    pub fn validate(counts: BTreeMap<u64, u64>) -> Result<Self, DegreeError> {
        let counts: BTreeMap<u64, u64> =
            counts.into_iter().filter(|&(_, cnt)| cnt > 0).collect();
        let mut n: u64 = 0;
        let mut c: i64 = 0;
        for (&deg, &cnt) in &counts {
            n = n.checked_add(cnt).ok_or(DegreeError::Overflow)?;
            let deg_i = i64::try_from(deg).map_err(|_| DegreeError::Overflow)?;
            let cnt_i = i64::try_from(cnt).map_err(|_| DegreeError::Overflow)?;
            let term = (1 - deg_i).checked_mul(cnt_i).ok_or(DegreeError::Overflow)?;
            c = c.checked_add(term).ok_or(DegreeError::Overflow)?;
        }
        if n == 0 {
            return Err(DegreeError::EmptySequence);
        }
        if c < 1 {
            return Err(DegreeError::NotAForest { c });
        }
        Ok(DegreeSequence { counts, n, c: c as u64 })
    }

    /// Convenience constructor from `(degree, count)` pairs.
    pub fn from_pairs(pairs: &[(u64, u64)]) -> Result<Self, DegreeError> {
        let mut counts = BTreeMap::new();
        for &(deg, cnt) in pairs {
            *counts.entry(deg).or_insert(0) += cnt;
        }
        Self::validate(counts)
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    /// Total number of vertices `n(s)`.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of tree components `c(s) = Σ (1-i) s^(i)`.
    pub fn c(&self) -> u64 {
        self.c
    }

    /// Largest degree with positive count.
    pub fn delta(&self) -> u64 {
        self.counts.keys().next_back().copied().unwrap_or(0)
    }

    pub fn stats(&self) -> Result<DegreeStats, DegreeError> {
        let mut sigma2_s: u64 = 0;
        for (&deg, &cnt) in &self.counts {
            let sq = deg.checked_mul(deg).ok_or(DegreeError::Overflow)?;
            let term = sq.checked_mul(cnt).ok_or(DegreeError::Overflow)?;
            sigma2_s = sigma2_s.checked_add(term).ok_or(DegreeError::Overflow)?;
        }
        let n = self.n;
        Ok(DegreeStats {
            n,
            c: self.c,
            delta: self.delta(),
            sigma2_s,
            sigma2_p: sigma2_s as f64 / n as f64,
            mu_p: (n - self.c) as f64 / n as f64,
        })
    }

    /// The weakly increasing child vector `d(s)`: `s^(i)` copies of each `i`.
    pub fn child_vector(&self) -> Vec<u64> {
        let mut d = Vec::with_capacity(self.n as usize);
        for (&deg, &cnt) in &self.counts {
            d.extend(std::iter::repeat_n(deg, cnt as usize));
        }
        d
    }

    /// Second moment of the walk increments, `Σ (i-1)^2 s^(i) / n`.
    ///
    /// This is the normalizer under which the scaled depth-first walk has
    /// asymptotically unit diffusivity (the permuted-bridge `tau^2` tends to
    /// one exactly); the convergence experiments scale by its square root.
    pub fn sigma2_walk(&self) -> f64 {
        let mut ssq: i128 = 0;
        for (&deg, &cnt) in &self.counts {
            let d = deg as i128 - 1;
            ssq += d * d * cnt as i128;
        }
        ssq as f64 / self.n as f64
    }

    pub fn regime_diagnostics(&self) -> Result<RegimeDiagnostics, DegreeError> {
        let stats = self.stats()?;
        if stats.sigma2_s == 0 {
            return Err(DegreeError::DegenerateSigma);
        }
        let sqrt_n = (stats.n as f64).sqrt();
        Ok(RegimeDiagnostics {
            n: stats.n,
            c_over_sigma_sqrt_n: stats.c as f64 / (stats.sigma2_p.sqrt() * sqrt_n),
            mu_p: stats.mu_p,
            sigma2_p: stats.sigma2_p,
            delta_over_sqrt_n: stats.delta as f64 / sqrt_n,
        })
    }
}

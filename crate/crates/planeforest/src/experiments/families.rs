//! Parametric degree families meeting the convergence hypotheses: the number
//! of components `c` is tuned so that `c/(sigma_w sqrt(n))` hits the target
//! lambda, where `sigma_w^2 = Σ (i-1)^2 s^(i) / n` is the walk-increment
//! second moment (one fixed-point iteration on sigma_w suffices).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::degrees::DegreeSequence;
use crate::experiments::ExperimentError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegreeFamily {
    /// Degrees `{0, 2}`: `s^(0) = (n+c)/2`, `s^(2) = (n-c)/2`. The walk
    /// increments are `±1`, so `sigma_w = 1` and `c ≈ lambda sqrt(n)`.
    Binary,
    /// The `c = 1` member of the binary family (n rounded up to odd), for
    /// the single-tree experiments.
    BinaryTree,
    /// Geometric-like tail `s^(i) ≈ n (1-q) q^i` for `i >= 2`, with `s^(1)`
    /// and `s^(0)` solving the vertex-count and component-count constraints.
    /// Exercises growing maximum degree.
    Geometric {
        #[serde(default = "default_ratio")]
        ratio: f64,
    },
    /// Explicit counts (decimal degree keys), ignoring `n` and `lambda`.
    Counts { counts: BTreeMap<String, u64> },
    /// Explicit counts loaded from a DegreeSequence JSON file.
    CountsFile { path: String },
}

fn default_ratio() -> f64 {
    0.5
}

/// Rounds `target` to a nearby integer with `parity = n mod 2`, clamped to
/// at least 1 component (2 if parity forces it).
fn round_to_parity(target: f64, n: u64) -> u64 {
    let raw = target.round().max(1.0) as u64;
    let c = if raw % 2 == n % 2 {
        raw
    } else if raw < n {
        raw + 1
    } else {
        raw - 1
    };
    c.max(if n.is_multiple_of(2) { 2 } else { 1 }).min(n)
}

impl DegreeFamily {
    pub fn build(&self, n: u64, lambda: f64) -> Result<DegreeSequence, ExperimentError> {
        match self {
            DegreeFamily::Binary => binary(n, lambda),
            DegreeFamily::BinaryTree => {
                let n = if n.is_multiple_of(2) { n + 1 } else { n };
                let s = DegreeSequence::from_pairs(&[(0, n.div_ceil(2)), (2, (n - 1) / 2)])?;
                Ok(s)
            }
            DegreeFamily::Geometric { ratio } => geometric(n, lambda, *ratio),
            DegreeFamily::Counts { counts } => {
                let parsed: BTreeMap<u64, u64> = counts
                    .iter()
                    .map(|(k, &v)| {
                        k.parse::<u64>().map(|deg| (deg, v)).map_err(|_| {
                            ExperimentError::InvalidConfig(format!(
                                "degree key `{k}` is not an integer"
                            ))
                        })
                    })
                    .collect::<Result<_, _>>()?;
                Ok(DegreeSequence::validate(parsed)?)
            }
            DegreeFamily::CountsFile { path } => {
                let text = std::fs::read_to_string(path)?;
                Ok(serde_json::from_str(&text)?)
            }
        }
    }
}

fn binary(n: u64, lambda: f64) -> Result<DegreeSequence, ExperimentError> {
    if n < 2 {
        return Err(ExperimentError::InvalidConfig("binary family needs n >= 2".into()));
    }
    // sigma_w = 1 identically for ±1 increments, so the fixed point is
    // immediate: c = lambda sqrt(n), adjusted to the parity of n.
    let c = round_to_parity(lambda * (n as f64).sqrt(), n);
    Ok(DegreeSequence::from_pairs(&[(0, (n + c) / 2), (2, (n - c) / 2)])?)
}

fn geometric(n: u64, lambda: f64, q: f64) -> Result<DegreeSequence, ExperimentError> {
    if !(q > 0.0 && q < 1.0) {
        return Err(ExperimentError::InvalidConfig(format!(
            "geometric ratio {q} must lie in (0,1)"
        )));
    }
    // First pass with the infinite-n walk variance of the mean-one
    // geometric tail, then one correction pass with the realized counts.
    let mut sigma_w = (2.0 * q / (1.0 - q)).sqrt().max(0.5);
    let mut seq = None;
    for _ in 0..2 {
        let c_target = (lambda * sigma_w * (n as f64).sqrt()).round().max(1.0) as u64;
        let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
        let mut used = 0u64;
        let mut weighted = 0u64;
        for i in 2.. {
            let expect = n as f64 * (1.0 - q) * q.powi(i as i32);
            let cnt = expect.floor() as u64;
            if cnt == 0 {
                break;
            }
            counts.insert(i, cnt);
            used += cnt;
            weighted += i * cnt;
        }
        // s1 + s0 fill the remaining vertices; s1 fixes the edge count.
        let target_edges = n
            .checked_sub(c_target)
            .ok_or_else(|| ExperimentError::InvalidConfig("lambda too large for n".into()))?;
        let s1 = target_edges.checked_sub(weighted).ok_or_else(|| {
            ExperimentError::InvalidConfig("geometric tail too heavy for target lambda".into())
        })?;
        let s0 = (n - used).checked_sub(s1).ok_or_else(|| {
            ExperimentError::InvalidConfig("geometric tail incompatible with n".into())
        })?;
        counts.insert(1, s1);
        counts.insert(0, s0);
        let s = DegreeSequence::validate(counts)?;
        sigma_w = s.sigma2_walk().sqrt();
        seq = Some(s);
    }
    Ok(seq.expect("two iterations ran"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_family_hits_lambda() {
        let s = DegreeFamily::Binary.build(10_000, 1.0).unwrap();
        assert_eq!(s.n(), 10_000);
        assert_eq!(s.c(), 100);
        assert_eq!(s.counts()[&0], 5050);
        assert_eq!(s.counts()[&2], 4950);
        let sigma_w = s.sigma2_walk().sqrt();
        assert!((sigma_w - 1.0).abs() < 1e-12);
        assert!((s.c() as f64 / (sigma_w * 100.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binary_tree_family_is_single_tree() {
        for n in [1000, 1001, 9999, 10_000] {
            let s = DegreeFamily::BinaryTree.build(n, 1.0).unwrap();
            assert_eq!(s.c(), 1);
            assert!(s.n() == n || s.n() == n + 1);
        }
    }

    #[test]
    fn geometric_family_matches_target() {
        let s = DegreeFamily::Geometric { ratio: 0.5 }.build(10_000, 1.0).unwrap();
        assert_eq!(s.n(), 10_000);
        let sigma_w = s.sigma2_walk().sqrt();
        let lambda = s.c() as f64 / (sigma_w * 100.0);
        assert!((lambda - 1.0).abs() < 0.05, "realized lambda {lambda}");
        assert!(s.delta() >= 5, "tail too short: delta = {}", s.delta());
    }

    #[test]
    fn family_deserializes_from_json() {
        let family: DegreeFamily = serde_json::from_str(r#"{"kind":"binary"}"#).unwrap();
        assert!(matches!(family, DegreeFamily::Binary));
        let family: DegreeFamily =
            serde_json::from_str(r#"{"kind":"geometric","ratio":0.4}"#).unwrap();
        assert!(matches!(family, DegreeFamily::Geometric { .. }));
        let family: DegreeFamily =
            serde_json::from_str(r#"{"kind":"counts","counts":{"0":2,"1":2}}"#).unwrap();
        let s = family.build(0, 0.0).unwrap();
        assert_eq!(s.n(), 4);
    }
}

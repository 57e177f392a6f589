//! Integer-increment lattice paths: bridges, first-passage bridges, the
//! cyclic shift, and the n-to-1 rotation map between them.
//!
//! Paths are stored as increment sequences (each entry `>= -1`, i.e. a child
//! count minus one); values are prefix sums, derived on demand. Everything in
//! this module is integer arithmetic.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degrees::DegreeSequence;

/// Largest `n(s)` accepted by the exhaustive enumeration routines.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("increment {0} < -1 is not a child-count increment")]
    InvalidIncrement(i64),
    #[error("index {index} out of range for path of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("shift index {j} outside [0, {c})")]
    InvalidShiftIndex { j: u64, c: u64 },
    #[error("n(s) = {n} exceeds enumeration cap {cap}")]
    TooLarge { n: u64, cap: u64 },
    #[error("sigma^2 must be positive")]
    DegenerateSigma,
}

/// A lattice path on `[0, n]` with `W(0) = 0` and integer increments `>= -1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<i64>", into = "Vec<i64>")]
pub struct LatticePath {
    increments: Vec<i64>,
}

impl TryFrom<Vec<i64>> for LatticePath {
    type Error = PathError;

    fn try_from(increments: Vec<i64>) -> Result<Self, PathError> {
        LatticePath::new(increments)
    }
}

impl From<LatticePath> for Vec<i64> {
    fn from(p: LatticePath) -> Vec<i64> {
        p.increments
    }
}

impl LatticePath {
    pub fn new(increments: Vec<i64>) -> Result<Self, PathError> {
        if let Some(&bad) = increments.iter().find(|&&x| x < -1) {
            return Err(PathError::InvalidIncrement(bad));
        }
        Ok(LatticePath { increments })
    }

    /// Depth-first walk of a child-count sequence: increments `c_i - 1`.
    pub fn walk_from_children(children: &[u64]) -> Self {
        LatticePath {
            increments: children.iter().map(|&c| c as i64 - 1).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    pub fn increments(&self) -> &[i64] {
        &self.increments
    }

    pub fn children(&self) -> Vec<u64> {
        self.increments.iter().map(|&x| (x + 1) as u64).collect()
    }

    /// Values `W(0), ..., W(n)` as prefix sums.
    pub fn values(&self) -> Vec<i64> {
        let mut values = Vec::with_capacity(self.len() + 1);
        let mut acc = 0i64;
        values.push(acc);
        for &inc in &self.increments {
            acc += inc;
            values.push(acc);
        }
        values
    }

    pub fn endpoint(&self) -> i64 {
        self.increments.iter().sum()
    }

    pub fn min_value(&self) -> i64 {
        let mut acc = 0i64;
        let mut min = 0i64;
        for &inc in &self.increments {
            acc += inc;
            min = min.min(acc);
        }
        min
    }

    /// Degree sequence realized by this path (histogram of `increment + 1`).
    pub fn degree_counts(&self) -> BTreeMap<u64, u64> {
        let mut counts = BTreeMap::new();
        for &inc in &self.increments {
            *counts.entry((inc + 1) as u64).or_insert(0u64) += 1;
        }
        counts
    }

    /// Increments rotated left by `u`. `u = 0` and `u = n` are the identity.
    pub fn cyclic_shift(&self, u: usize) -> Result<Self, PathError> {
        let n = self.len();
        if u > n {
            return Err(PathError::IndexOutOfRange { index: u, len: n });
        }
        let mut increments = Vec::with_capacity(n);
        increments.extend_from_slice(&self.increments[u..]);
        increments.extend_from_slice(&self.increments[..u]);
        Ok(LatticePath { increments })
    }

    /// Smallest `j` with `W(j) <= y`, or 0 when `y` is below the minimum
    /// (so that shifting at the first passage of such `y` is the identity).
    pub fn first_passage_index(&self, y: i64) -> usize {
        if y >= 0 {
            return 0;
        }
        let mut acc = 0i64;
        for (j, &inc) in self.increments.iter().enumerate() {
            acc += inc;
            if acc <= y {
                return j + 1;
            }
        }
        0
    }

    /// The rotation map: shifts the bridge at the first passage of
    /// `min(b) + j`, landing in the set of first-passage bridges.
    pub fn rotate_to_first_passage(&self, j: u64) -> Result<Self, PathError> {
        let c = -self.endpoint();
        if c < 1 || (j as i64) >= c {
            return Err(PathError::InvalidShiftIndex { j, c: c.max(0) as u64 });
        }
        let t = self.first_passage_index(self.min_value() + j as i64);
        self.cyclic_shift(t)
    }

    /// First-passage-bridge condition: `W(j) > -c` for all `j < n` and
    /// `W(n) = -c`.
    pub fn is_first_passage(&self) -> bool {
        let n = self.len();
        if n == 0 {
            return false;
        }
        let c = -self.endpoint();
        if c < 1 {
            return false;
        }
        let mut acc = 0i64;
        for &inc in &self.increments[..n - 1] {
            acc += inc;
            if acc <= -c {
                return false;
            }
        }
        true
    }
}

/// Exchangeability statistics of a child sequence under the given normalizer:
/// `mu = -c/(sigma sqrt(n))` and `tau2 = (Σ(c_i-1)^2 - c^2/n)/(sigma^2 n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BridgeStats {
    pub mu: f64,
    pub tau2: f64,
    pub sum_sq_increments: i64,
}

pub fn bridge_statistics(children: &[u64], sigma_p: f64) -> Result<BridgeStats, PathError> {
    if children.is_empty() || sigma_p.is_nan() || sigma_p <= 0.0 {
        return Err(PathError::DegenerateSigma);
    }
    let n = children.len() as i64;
    let total: i64 = children.iter().map(|&c| c as i64).sum();
    let c = n - total;
    let sum_sq_increments: i64 = children
        .iter()
        .map(|&ch| {
            let d = ch as i64 - 1;
            d * d
        })
        .sum();
    let sigma2 = sigma_p * sigma_p;
    let nf = n as f64;
    Ok(BridgeStats {
        mu: -(c as f64) / (sigma_p * nf.sqrt()),
        tau2: (sum_sq_increments as f64 - (c * c) as f64 / nf) / (sigma2 * nf),
        sum_sq_increments,
    })
}

fn check_cap(s: &DegreeSequence, cap: u64) -> Result<(), PathError> {
    if s.n() > cap {
        Err(PathError::TooLarge { n: s.n(), cap })
    } else {
        Ok(())
    }
}

/// Rearranges `seq` into its lexicographic successor; false once at the last
/// permutation. Visits every distinct multiset permutation exactly once when
/// started from sorted order.
pub(crate) fn next_permutation(seq: &mut [i64]) -> bool {
    let n = seq.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && seq[i - 1] >= seq[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while seq[j] <= seq[i - 1] {
        j -= 1;
    }
    seq.swap(i - 1, j);
    seq[i..].reverse();
    true
}

/// All distinct bridges realizing `s`, in lexicographic increment order.
pub fn enumerate_bridges(s: &DegreeSequence) -> Result<Vec<LatticePath>, PathError> {
    enumerate_bridges_capped(s, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_bridges_capped(
    s: &DegreeSequence,
    cap: u64,
) -> Result<Vec<LatticePath>, PathError> {
    check_cap(s, cap)?;
    let mut increments: Vec<i64> = s.child_vector().iter().map(|&c| c as i64 - 1).collect();
    let mut out = Vec::new();
    loop {
        out.push(LatticePath { increments: increments.clone() });
        if !next_permutation(&mut increments) {
            break;
        }
    }
    Ok(out)
}

/// The subset of bridges staying strictly above `-c(s)` before time `n`.
pub fn enumerate_fp_bridges(s: &DegreeSequence) -> Result<Vec<LatticePath>, PathError> {
    enumerate_fp_bridges_capped(s, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_fp_bridges_capped(
    s: &DegreeSequence,
    cap: u64,
) -> Result<Vec<LatticePath>, PathError> {
    Ok(enumerate_bridges_capped(s, cap)?
        .into_iter()
        .filter(LatticePath::is_first_passage)
        .collect())
}

/// Outcome of exhaustively applying the rotation map to `Λ(s) × [c(s)]-1`.
#[derive(Debug, Clone)]
pub struct NToOneCheck {
    pub preimage_counts: BTreeMap<LatticePath, u64>,
    pub ok: bool,
}

/// Applies the rotation map to every `(bridge, j)` pair and checks that each
/// first-passage bridge receives exactly `n(s)` preimages.
pub fn verify_n_to_one(s: &DegreeSequence) -> Result<NToOneCheck, PathError> {
    verify_n_to_one_capped(s, DEFAULT_ENUMERATION_CAP)
}

pub fn verify_n_to_one_capped(s: &DegreeSequence, cap: u64) -> Result<NToOneCheck, PathError> {
    let bridges = enumerate_bridges_capped(s, cap)?;
    let fp: Vec<LatticePath> = bridges
        .iter()
        .filter(|p| p.is_first_passage())
        .cloned()
        .collect();
    let mut preimage_counts: BTreeMap<LatticePath, u64> = BTreeMap::new();
    for b in &bridges {
        for j in 0..s.c() {
            let image = b.rotate_to_first_passage(j)?;
            *preimage_counts.entry(image).or_insert(0) += 1;
        }
    }
    let n = s.n();
    let ok = preimage_counts.len() == fp.len()
        && fp.iter().all(|p| preimage_counts.get(p) == Some(&n))
        && preimage_counts.values().all(|&k| k == n);
    Ok(NToOneCheck { preimage_counts, ok })
}

/// `n! / Π s^(i)!` computed exactly in 128-bit arithmetic.
pub fn multinomial(s: &DegreeSequence) -> u128 {
    let mut result: u128 = 1;
    let mut slots: u128 = 0;
    for &cnt in s.counts().values() {
        for k in 1..=cnt as u128 {
            slots += 1;
            result = result * slots / k;
        }
    }
    result
}

/// `(c/n) · n!/Π s^(i)!`, the number of plane forests realizing `s`.
pub fn fp_bridge_count(s: &DegreeSequence) -> u128 {
    let m = multinomial(s) * s.c() as u128;
    debug_assert_eq!(m % s.n() as u128, 0);
    m / s.n() as u128
}

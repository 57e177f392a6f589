//! Exact uniform sampling of plane forests with a prescribed degree sequence.
//!
//! A uniformly permuted child sequence is a uniform lattice bridge; rotating
//! it at the first passage of `min + ν` with `ν` uniform on `{0,...,c-1}` and
//! independent of the permutation is exactly uniform on the first-passage
//! bridges, hence decoding gives an exactly uniform forest. No rejection, one
//! linear pass.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::degrees::DegreeSequence;
use crate::forests::{decode, PlaneForest, PlaneTree};
use crate::paths::LatticePath;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("sample_tree requires c(s) = 1, got c = {c}")]
    NotATree { c: u64 },
}

/// Seedable, splittable stream of randomness: identical `(seed, stream_id)`
/// pairs yield identical streams, and distinct stream ids are independent
/// streams of the same keyed generator, so parallel replicates can each own
/// `(seed, replicate_index)` without coordination.
#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: ChaCha8Rng,
    seed: u64,
    stream_id: u64,
}

impl SeededRng {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        SeededRng { inner, seed, stream_id }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `[0, bound)` by 128-bit widening multiply.
    pub fn uniform_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        (((self.next_u64() as u128) * (bound as u128)) >> 64) as u64
    }

    /// Uniform in `[0, 1)`, 53-bit resolution.
    pub fn uniform_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn standard_normal(&mut self) -> f64 {
        use rand_distr::{Distribution, StandardNormal};
        StandardNormal.sample(&mut self.inner)
    }

    /// In-place Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, slice: &mut [T]) {
        for i in (1..slice.len()).rev() {
            let j = self.uniform_below(i as u64 + 1) as usize;
            slice.swap(i, j);
        }
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }
}

/// Uniformly random first-passage bridge for `s`: permute `d(s)`, draw the
/// rotation offset independently, rotate.
pub fn sample_fp_path(s: &DegreeSequence, rng: &mut SeededRng) -> LatticePath {
    let mut children = s.child_vector();
    rng.shuffle(&mut children);
    let nu = rng.uniform_below(s.c());
    LatticePath::walk_from_children(&children)
        .rotate_to_first_passage(nu)
        .expect("nu < c by construction")
}

/// Uniformly random plane forest with degree sequence `s`.
pub fn sample_forest(s: &DegreeSequence, rng: &mut SeededRng) -> PlaneForest {
    decode(&sample_fp_path(s, rng)).expect("rotation output is a first-passage bridge")
}

/// Uniformly random plane tree; requires `c(s) = 1`.
pub fn sample_tree(s: &DegreeSequence, rng: &mut SeededRng) -> Result<PlaneTree, SampleError> {
    if s.c() != 1 {
        return Err(SampleError::NotATree { c: s.c() });
    }
    let forest = sample_forest(s, rng);
    Ok(forest.trees()[0].clone())
}

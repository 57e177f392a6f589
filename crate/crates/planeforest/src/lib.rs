//! Uniform random plane forests with prescribed degree sequences and their
//! Brownian scaling limits.
//!
//! The crate has three layers:
//!
//! * combinatorics — [`degrees`], [`paths`], [`forests`]: degree sequences,
//!   lattice bridges, the cycle-lemma rotation map, and the Lukasiewicz codec
//!   between first-passage bridges and plane forests;
//! * exact sampling — [`sampler`]: linear-time uniform sampling of forests by
//!   rotating a uniformly permuted child sequence;
//! * continuum and verification — [`continuum`] (Brownian bridges,
//!   first-passage bridges, excursion decomposition), [`ghp`] (rooted
//!   Gromov–Hausdorff machinery and coding-function bounds), [`stats`] and
//!   [`experiments`] (Monte Carlo harness comparing discrete and continuum
//!   laws and checking the proven concentration bounds empirically).

pub mod continuum;
pub mod degrees;
pub mod experiments;
pub mod forests;
pub mod ghp;
pub mod paths;
pub mod sampler;
pub mod stats;

pub use degrees::DegreeSequence;
pub use forests::{PlaneForest, PlaneTree};
pub use paths::LatticePath;
pub use sampler::SeededRng;

//! Grid simulation of the continuum objects: Brownian bridges to a negative
//! level, first-passage bridges via the rotation construction, reflection at
//! the running minimum, excursion decomposition, and a closed-form marginal
//! density oracle for the first-passage bridge.
//!
//! Paths live on the uniform grid `k/m`, `k = 0..m`, interpreted as piecewise
//! linear on `[0, 1]`.

use serde::Serialize;
use thiserror::Error;

use crate::sampler::SeededRng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContinuumError {
    #[error("grid resolution m = {0} must be >= 2")]
    GridTooCoarse(usize),
    #[error("parameter out of domain: {0}")]
    DomainError(String),
}

/// A continuum path sampled at grid times `k/m`, piecewise linear between.
/// Always starts at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    values: Vec<f64>,
}

impl GridPath {
    pub fn from_values(values: Vec<f64>) -> Result<Self, ContinuumError> {
        if values.len() < 3 {
            return Err(ContinuumError::GridTooCoarse(values.len().saturating_sub(1)));
        }
        if values[0] != 0.0 {
            return Err(ContinuumError::DomainError("path must start at 0".into()));
        }
        Ok(GridPath { values })
    }

    /// Grid resolution `m`; the path has `m + 1` values.
    pub fn m(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value of the piecewise-linear interpolant at `t` in `[0, 1]`.
    pub fn value_at(&self, t: f64) -> f64 {
        let m = self.m() as f64;
        let x = (t.clamp(0.0, 1.0)) * m;
        let k = (x.floor() as usize).min(self.m() - 1);
        let frac = x - k as f64;
        self.values[k] * (1.0 - frac) + self.values[k + 1] * frac
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Cyclic shift at grid index `u`: the path is cut at `u`, both halves
    /// are swapped and the whole curve re-anchored at 0.
    pub fn cyclic_shift(&self, u: usize) -> Result<GridPath, ContinuumError> {
        let m = self.m();
        if u > m {
            return Err(ContinuumError::DomainError(format!(
                "shift index {u} exceeds grid size {m}"
            )));
        }
        let v = &self.values;
        let mut out = Vec::with_capacity(m + 1);
        for k in 0..=m {
            if k + u <= m {
                out.push(v[k + u] - v[u]);
            } else {
                out.push(v[k + u - m] + v[m] - v[u]);
            }
        }
        Ok(GridPath { values: out })
    }

    /// Path minus its running minimum: non-negative, zero wherever the
    /// original attains a new minimum.
    pub fn reflect_at_min(&self) -> GridPath {
        let mut running = f64::INFINITY;
        let values = self
            .values
            .iter()
            .map(|&v| {
                running = running.min(v);
                v - running
            })
            .collect();
        GridPath { values }
    }

    /// Two-column CSV (`time,value` per row).
    pub fn to_csv(&self) -> String {
        let m = self.m() as f64;
        let mut out = String::from("time,value\n");
        for (k, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{v}\n", k as f64 / m));
        }
        out
    }
}

/// Brownian bridge of duration 1 from 0 to `-l`, built by tilting a Gaussian
/// random walk: `W(k/m) - (k/m)(W(1) + l)`. Endpoints are exact.
pub fn sample_brownian_bridge(
    l: f64,
    m: usize,
    rng: &mut SeededRng,
) -> Result<GridPath, ContinuumError> {
    if m < 2 {
        return Err(ContinuumError::GridTooCoarse(m));
    }
    if l.is_nan() || l < 0.0 {
        return Err(ContinuumError::DomainError(format!("level l = {l} must be >= 0")));
    }
    let step = (1.0 / m as f64).sqrt();
    let mut values = Vec::with_capacity(m + 1);
    let mut acc = 0.0f64;
    values.push(0.0);
    for _ in 0..m {
        acc += step * rng.standard_normal();
        values.push(acc);
    }
    let endpoint = acc;
    for (k, v) in values.iter_mut().enumerate() {
        *v -= k as f64 / m as f64 * (endpoint + l);
    }
    values[m] = -l;
    Ok(GridPath { values })
}

/// First-passage bridge from 0 to `-lambda` via the rotation construction:
/// draw the bridge, draw `nu` uniform on `[0, lambda]` independently, shift
/// at the first grid time the bridge is at or below `min + nu`.
pub fn sample_fp_bridge(
    lambda: f64,
    m: usize,
    rng: &mut SeededRng,
) -> Result<GridPath, ContinuumError> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(ContinuumError::DomainError(format!(
            "lambda = {lambda} must be > 0"
        )));
    }
    let bridge = sample_brownian_bridge(lambda, m, rng)?;
    let nu = rng.uniform_f64() * lambda;
    let threshold = bridge.min_value() + nu;
    let u = bridge
        .values
        .iter()
        .position(|&v| v <= threshold)
        .expect("minimum is attained on the grid");
    bridge.cyclic_shift(u)
}

/// Normalized Brownian excursion by the Vervaat transform: cyclic shift of
/// the standard bridge at its (first) minimum.
pub fn sample_brownian_excursion(
    m: usize,
    rng: &mut SeededRng,
) -> Result<GridPath, ContinuumError> {
    let bridge = sample_brownian_bridge(0.0, m, rng)?;
    let min = bridge.min_value();
    let argmin = bridge
        .values
        .iter()
        .position(|&v| v == min)
        .expect("minimum is attained on the grid");
    bridge.cyclic_shift(argmin)
}

/// An excursion interval of a reflected path, in path time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Excursion {
    pub left: f64,
    pub right: f64,
}

impl Excursion {
    pub fn length(&self) -> f64 {
        self.right - self.left
    }
}

/// Excursion intervals ranked by decreasing length (ties by earlier left
/// endpoint).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExcursionList {
    pub intervals: Vec<Excursion>,
}

impl ExcursionList {
    pub fn ranked_lengths(&self) -> Vec<f64> {
        self.intervals.iter().map(Excursion::length).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.intervals.iter().map(Excursion::length).sum()
    }
}

/// Maximal intervals where the piecewise-linear interpolant is strictly
/// positive, with exact zero-crossings of the interpolant as endpoints.
/// When `reflected` is false the path is first reflected at its running
/// minimum.
pub fn excursions(path: &GridPath, reflected: bool) -> ExcursionList {
    let work;
    let p = if reflected {
        path
    } else {
        work = path.reflect_at_min();
        &work
    };
    let m = p.m() as f64;
    let v = &p.values;
    let mut intervals = Vec::new();
    let mut open: Option<f64> = None;
    for k in 0..p.m() {
        let (a, b) = (v[k], v[k + 1]);
        if a <= 0.0 && b > 0.0 {
            let frac = if a == 0.0 { 0.0 } else { -a / (b - a) };
            open = Some((k as f64 + frac) / m);
        } else if a > 0.0 && b <= 0.0 {
            let frac = a / (a - b);
            if let Some(left) = open.take() {
                intervals.push(Excursion { left, right: (k as f64 + frac) / m });
            }
        }
    }
    if let Some(left) = open {
        intervals.push(Excursion { left, right: 1.0 });
    }
    intervals.sort_by(|x, y| {
        y.length()
            .partial_cmp(&x.length())
            .unwrap()
            .then(x.left.partial_cmp(&y.left).unwrap())
    });
    ExcursionList { intervals }
}

/// Height and mass of the real tree coded by one excursion: the height is
/// the maximum of the coding function on the interval, the mass its length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExcursionTreeStats {
    pub height: f64,
    pub length: f64,
}

pub fn excursion_tree_stats(path: &GridPath, exc: &Excursion) -> ExcursionTreeStats {
    let m = path.m() as f64;
    let lo = (exc.left * m).ceil() as usize;
    let hi = (exc.right * m).floor() as usize;
    let mut height = 0.0f64;
    for k in lo..=hi.min(path.m()) {
        height = height.max(path.values[k]);
    }
    ExcursionTreeStats { height, length: exc.length() }
}

fn gaussian_density(variance: f64, x: f64) -> f64 {
    (-x * x / (2.0 * variance)).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
}

/// Marginal density of the first-passage bridge at time `s`, by the change
/// of measure against Brownian motion combined with the reflection
/// principle:
///
/// `[p_s(x) - p_s(x + 2λ)] · p'_{1-s}(-λ-x) / p'_1(-λ)`
///
/// where the bracket is the sub-density of `{B(s) ∈ dx, min_{r<=s} B > -λ}`
/// and `p_a` is the centered Gaussian density with variance `a`. Zero at and
/// below `-λ`.
pub fn fp_marginal_density(lambda: f64, s: f64, x: f64) -> Result<f64, ContinuumError> {
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(ContinuumError::DomainError(format!(
            "lambda = {lambda} must be > 0"
        )));
    }
    if !(s > 0.0 && s < 1.0) {
        return Err(ContinuumError::DomainError(format!(
            "time s = {s} must lie in (0, 1)"
        )));
    }
    if x <= -lambda {
        return Ok(0.0);
    }
    let meander = gaussian_density(s, x) - gaussian_density(s, x + 2.0 * lambda);
    // p'_a(y) = -(y/a) p_a(y); the ratio below is p'_{1-s}(-λ-x) / p'_1(-λ).
    let derivative_ratio =
        (lambda + x) / (1.0 - s) * gaussian_density(1.0 - s, lambda + x) / (lambda * gaussian_density(1.0, lambda));
    Ok((meander * derivative_ratio).max(0.0))
}

/// Tabulated CDF of the first-passage-bridge marginal, built by composite
/// Simpson integration of [`fp_marginal_density`] on a fine grid.
#[derive(Debug, Clone)]
pub struct FpMarginalCdf {
    xs: Vec<f64>,
    cumulative: Vec<f64>,
    total: f64,
}

impl FpMarginalCdf {
    pub fn build(lambda: f64, s: f64, cells: usize) -> Result<Self, ContinuumError> {
        let cells = cells.max(16) & !1; // even
        let lo = -lambda;
        let hi = -lambda * s + 12.0 * s.sqrt().max(0.2) + 1.0;
        let h = (hi - lo) / cells as f64;
        let density: Vec<f64> = (0..=cells)
            .map(|i| fp_marginal_density(lambda, s, lo + i as f64 * h))
            .collect::<Result<_, _>>()?;
        let mut xs = Vec::with_capacity(cells / 2 + 1);
        let mut cumulative = Vec::with_capacity(cells / 2 + 1);
        xs.push(lo);
        cumulative.push(0.0);
        let mut acc = 0.0;
        // Simpson on pairs of cells.
        for i in (0..cells).step_by(2) {
            acc += h / 3.0 * (density[i] + 4.0 * density[i + 1] + density[i + 2]);
            xs.push(lo + (i + 2) as f64 * h);
            cumulative.push(acc);
        }
        Ok(FpMarginalCdf { xs, cumulative, total: acc })
    }

    /// Integral of the density over the whole domain; 1 up to quadrature
    /// error.
    pub fn total_mass(&self) -> f64 {
        self.total
    }

    /// Normalized CDF value at `x` (linear interpolation on the table).
    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= *self.xs.last().unwrap() {
            return 1.0;
        }
        let idx = self.xs.partition_point(|&t| t <= x) - 1;
        let (x0, x1) = (self.xs[idx], self.xs[idx + 1]);
        let (c0, c1) = (self.cumulative[idx], self.cumulative[idx + 1]);
        let frac = (x - x0) / (x1 - x0);
        ((c0 + frac * (c1 - c0)) / self.total).clamp(0.0, 1.0)
    }
}

/// Normal CDF, used for the pre-rotation bridge marginal checks.
pub fn normal_cdf(mean: f64, sd: f64, x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc((mean - x) / (sd * std::f64::consts::SQRT_2))
}

//! Metric-geometry utilities: exact rooted Gromov–Hausdorff distance on tiny
//! spaces, the coding-function bound on the Gromov–Hausdorff–Prokhorov
//! distance of real trees, rescaled tree spaces, and the discrete coupling
//! bounds between a tree and the real tree coded by its contour.

use thiserror::Error;

use crate::continuum::GridPath;
use crate::forests::PlaneTree;
use crate::paths::LatticePath;

/// Largest space size accepted by the exact correspondence search.
pub const GH_EXACT_CAP: usize = 8;

const METRIC_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GhpError {
    #[error("space with {n} points exceeds the exact-search cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("not a metric space: {0}")]
    NotAMetric(String),
}

/// A finite rooted metric measure space given by its distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricMeasureSpace {
    distances: Vec<Vec<f64>>,
    root: usize,
    masses: Vec<f64>,
}

impl FiniteMetricMeasureSpace {
    pub fn new(
        distances: Vec<Vec<f64>>,
        root: usize,
        masses: Vec<f64>,
    ) -> Result<Self, GhpError> {
        let n = distances.len();
        if n == 0 {
            return Err(GhpError::NotAMetric("empty space".into()));
        }
        if root >= n || masses.len() != n {
            return Err(GhpError::NotAMetric("root or masses out of range".into()));
        }
        if masses.iter().any(|&m| m.is_nan() || m < 0.0 || !m.is_finite()) {
            return Err(GhpError::NotAMetric("masses must be finite and >= 0".into()));
        }
        for i in 0..n {
            if distances[i].len() != n {
                return Err(GhpError::NotAMetric("matrix is not square".into()));
            }
            if distances[i][i].abs() > METRIC_TOLERANCE {
                return Err(GhpError::NotAMetric("nonzero diagonal".into()));
            }
            for j in 0..n {
                if !distances[i][j].is_finite() || distances[i][j] < 0.0 {
                    return Err(GhpError::NotAMetric("invalid entry".into()));
                }
                if (distances[i][j] - distances[j][i]).abs() > METRIC_TOLERANCE {
                    return Err(GhpError::NotAMetric("not symmetric".into()));
                }
                for k in 0..n {
                    if distances[i][j] > distances[i][k] + distances[k][j] + METRIC_TOLERANCE {
                        return Err(GhpError::NotAMetric(format!(
                            "triangle inequality fails on ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetricMeasureSpace { distances, root, masses })
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distances[i][j]
    }

    /// Distance matrix as CSV rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in &self.distances {
            let cells: Vec<String> = row.iter().map(|d| format!("{d}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// The tree as a rooted measure space: graph distances scaled by
/// `sigma_p / (2 sqrt(n_total))`, every vertex carrying mass `1/n_total`.
pub fn scaled_tree_space(
    tree: &PlaneTree,
    n_total: u64,
    sigma_p: f64,
) -> FiniteMetricMeasureSpace {
    let n = tree.size() as usize;
    let scale = sigma_p / (2.0 * (n_total as f64).sqrt());
    // adjacency from the DFS parent structure
    let mut adjacency = vec![Vec::new(); n];
    let mut stack: Vec<(usize, u64)> = Vec::new();
    for (v, &c) in tree.children().iter().enumerate() {
        if let Some(&(p, _)) = stack.last() {
            adjacency[p].push(v);
            adjacency[v].push(p);
            let top = stack.last_mut().unwrap();
            top.1 -= 1;
            if top.1 == 0 {
                stack.pop();
            }
        }
        if c > 0 {
            stack.push((v, c));
        }
    }
    let mut distances = vec![vec![0.0; n]; n];
    for start in 0..n {
        let mut hops = vec![u64::MAX; n];
        hops[start] = 0;
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adjacency[v] {
                if hops[w] == u64::MAX {
                    hops[w] = hops[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        for (j, &h) in hops.iter().enumerate() {
            distances[start][j] = h as f64 * scale;
        }
    }
    let masses = vec![1.0 / n_total as f64; n];
    FiniteMetricMeasureSpace { distances, root: 0, masses }
}

/// Exact rooted Gromov–Hausdorff distance: half the minimum distortion over
/// all correspondences containing the root pair. Exponential search, capped
/// at [`GH_EXACT_CAP`] points per space.
pub fn rooted_gh_exact(
    a: &FiniteMetricMeasureSpace,
    b: &FiniteMetricMeasureSpace,
) -> Result<f64, GhpError> {
    for space in [a, b] {
        if space.len() > GH_EXACT_CAP {
            return Err(GhpError::TooLarge { n: space.len(), cap: GH_EXACT_CAP });
        }
    }
    // Candidate distortions: every |d_A(i,i') - d_B(j,j')|.
    let mut candidates = Vec::new();
    for i in 0..a.len() {
        for i2 in i..a.len() {
            for j in 0..b.len() {
                for j2 in j..b.len() {
                    candidates.push((a.distance(i, i2) - b.distance(j, j2)).abs());
                }
            }
        }
    }
    candidates.sort_by(|x, y| x.partial_cmp(y).unwrap());
    candidates.dedup();
    // Binary search for the least feasible candidate.
    let (mut lo, mut hi) = (0usize, candidates.len() - 1);
    debug_assert!(feasible(a, b, candidates[hi]));
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(a, b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo] / 2.0)
}

type PairFilter<'a> = dyn Fn(&[(usize, usize)], usize, usize) -> bool + 'a;

/// Is there a correspondence containing the root pair with distortion <= δ?
/// Builds one pair per uncovered element, backtracking on conflicts; every
/// minimal correspondence has this shape.
fn feasible(a: &FiniteMetricMeasureSpace, b: &FiniteMetricMeasureSpace, delta: f64) -> bool {
    let tol = delta + METRIC_TOLERANCE;
    let mut chosen: Vec<(usize, usize)> = vec![(a.root(), b.root())];
    let a_slots: Vec<usize> = (0..a.len()).filter(|&i| i != a.root()).collect();
    let compatible = |chosen: &[(usize, usize)], x: usize, y: usize| {
        chosen
            .iter()
            .all(|&(x2, y2)| (a.distance(x, x2) - b.distance(y, y2)).abs() <= tol)
    };

    fn cover_b(
        a: &FiniteMetricMeasureSpace,
        b: &FiniteMetricMeasureSpace,
        tol: f64,
        chosen: &mut Vec<(usize, usize)>,
        uncovered: &[usize],
    ) -> bool {
        let Some((&y, rest)) = uncovered.split_first() else {
            return true;
        };
        for x in 0..a.len() {
            let ok = chosen
                .iter()
                .all(|&(x2, y2)| (a.distance(x, x2) - b.distance(y, y2)).abs() <= tol);
            if ok {
                chosen.push((x, y));
                if cover_b(a, b, tol, chosen, rest) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    fn assign_a(
        a: &FiniteMetricMeasureSpace,
        b: &FiniteMetricMeasureSpace,
        tol: f64,
        chosen: &mut Vec<(usize, usize)>,
        slots: &[usize],
        compatible: &PairFilter,
    ) -> bool {
        let Some((&x, rest)) = slots.split_first() else {
            let covered: std::collections::BTreeSet<usize> =
                chosen.iter().map(|&(_, y)| y).collect();
            let uncovered: Vec<usize> = (0..b.len()).filter(|y| !covered.contains(y)).collect();
            return cover_b(a, b, tol, chosen, &uncovered);
        };
        for y in 0..b.len() {
            if compatible(chosen, x, y) {
                chosen.push((x, y));
                if assign_a(a, b, tol, chosen, rest, compatible) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    assign_a(a, b, tol, &mut chosen, &a_slots, &compatible)
}

/// A piecewise-linear function on `[0, T]` given by its breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseLinear {
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(times.len(), values.len());
        assert!(!times.is_empty());
        assert!(times.windows(2).all(|w| w[0] < w[1]));
        PiecewiseLinear { times, values }
    }

    /// Grid path on `[0, 1]`.
    pub fn from_grid_path(p: &GridPath) -> Self {
        let m = p.m() as f64;
        PiecewiseLinear {
            times: (0..=p.m()).map(|k| k as f64 / m).collect(),
            values: p.values().to_vec(),
        }
    }

    /// Lattice path with both axes rescaled: step `j` at time `j·time_scale`,
    /// value `W(j)·value_scale`.
    pub fn from_lattice_path(p: &LatticePath, time_scale: f64, value_scale: f64) -> Self {
        PiecewiseLinear {
            times: (0..=p.len()).map(|j| j as f64 * time_scale).collect(),
            values: p.values().iter().map(|&v| v as f64 * value_scale).collect(),
        }
    }

    /// Unit-speed contour of a tree whose edges have length `edge_scale`:
    /// time and value axes carry the same scale, so the coded real tree is
    /// the tree with edges of that length.
    pub fn from_contour(tree: &PlaneTree, edge_scale: f64) -> Self {
        let contour = tree.contour_values();
        PiecewiseLinear {
            times: (0..contour.len()).map(|j| j as f64 * edge_scale).collect(),
            values: contour.iter().map(|&v| v as f64 * edge_scale).collect(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= self.times[0] {
            return self.values[0];
        }
        if t >= *self.times.last().unwrap() {
            return *self.values.last().unwrap();
        }
        let idx = self.times.partition_point(|&x| x <= t) - 1;
        let (t0, t1) = (self.times[idx], self.times[idx + 1]);
        let (v0, v1) = (self.values[idx], self.values[idx + 1]);
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }

    /// `sup{t : f(t) > 0}`, zero for the zero function.
    pub fn support_end(&self) -> f64 {
        let n = self.times.len();
        if self.values[n - 1] > 0.0 {
            return self.times[n - 1];
        }
        for i in (0..n - 1).rev() {
            if self.values[i] > 0.0 {
                let (v0, v1) = (self.values[i], self.values[i + 1]);
                let (t0, t1) = (self.times[i], self.times[i + 1]);
                return t0 + (t1 - t0) * v0 / (v0 - v1);
            }
        }
        0.0
    }

    /// Exact sup-norm distance: the difference is piecewise linear with
    /// kinks only at breakpoints of either function.
    pub fn sup_distance(&self, other: &PiecewiseLinear) -> f64 {
        let mut sup = 0.0f64;
        for &t in self.times.iter().chain(&other.times) {
            sup = sup.max((self.eval(t) - other.eval(t)).abs());
        }
        sup
    }
}

/// Bound on the Gromov–Hausdorff–Prokhorov distance between the real trees
/// coded by `f` and `g`: `6‖f-g‖∞ + |σ_f - σ_g|`.
pub fn ghp_coding_bound(f: &PiecewiseLinear, g: &PiecewiseLinear) -> f64 {
    6.0 * f.sup_distance(g) + (f.support_end() - g.support_end()).abs()
}

/// Hausdorff and Prokhorov bounds of the coupling between a tree on `n`
/// vertices (scaled by `sigma_p/(2 sqrt(n))`, uniform vertex masses) and the
/// real tree coded by its contour: `d_H = sigma_p/(4 sqrt(n))` and
/// `d_P <= 1/n + sigma_p/(2 sqrt(n))`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CouplingBounds {
    pub d_h: f64,
    pub d_p_bound: f64,
}

pub fn discrete_coupling_bounds(n: u64, sigma_p: f64) -> CouplingBounds {
    let sqrt_n = (n as f64).sqrt();
    CouplingBounds {
        d_h: sigma_p / (4.0 * sqrt_n),
        d_p_bound: 1.0 / n as f64 + sigma_p / (2.0 * sqrt_n),
    }
}

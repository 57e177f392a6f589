//! Plane forests, the Lukasiewicz codec, marked-forest maps, decreasing
//! reordering, and per-tree metrics.
//!
//! A tree is its DFS child-count array; a forest is a non-empty sequence of
//! trees. Encoding concatenates the per-tree walks; decoding splits a
//! first-passage bridge at the times its running minimum reaches a new level.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::degrees::{DegreeError, DegreeSequence};
use crate::paths::{enumerate_fp_bridges_capped, multinomial, LatticePath, PathError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ForestError {
    #[error("path is not a first-passage bridge")]
    NotFirstPassage,
    #[error("child counts violate the Lukasiewicz tree condition")]
    NotATree,
    #[error("forest must contain at least one tree")]
    EmptyForest,
    #[error("vertex index {v} out of range 1..={n}")]
    IndexOutOfRange { v: usize, n: usize },
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Degree(#[from] DegreeError),
}

/// A rooted plane tree as the child counts of its vertices in DFS order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PlaneTree {
    children: Vec<u64>,
}

impl TryFrom<Vec<u64>> for PlaneTree {
    type Error = ForestError;

    fn try_from(children: Vec<u64>) -> Result<Self, ForestError> {
        PlaneTree::new(children)
    }
}

impl From<PlaneTree> for Vec<u64> {
    fn from(t: PlaneTree) -> Vec<u64> {
        t.children
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TreeMetrics {
    pub size: u64,
    pub height: u64,
    pub diameter: u64,
    pub sigma2: u64,
}

impl PlaneTree {
    /// Validates the Lukasiewicz condition: all strict prefix sums of
    /// `children_i - 1` exceed `-1` and the total equals `-1`.
    pub fn new(children: Vec<u64>) -> Result<Self, ForestError> {
        if children.is_empty() {
            return Err(ForestError::NotATree);
        }
        let mut acc = 0i64;
        for (i, &c) in children.iter().enumerate() {
            acc += c as i64 - 1;
            if acc <= -1 && i + 1 < children.len() {
                return Err(ForestError::NotATree);
            }
        }
        if acc != -1 {
            return Err(ForestError::NotATree);
        }
        Ok(PlaneTree { children })
    }

    pub fn children(&self) -> &[u64] {
        &self.children
    }

    pub fn size(&self) -> u64 {
        self.children.len() as u64
    }

    /// Parent index of each vertex; the root has no parent.
    fn parents(&self) -> Vec<Option<usize>> {
        let mut parents = vec![None; self.children.len()];
        // stack holds (vertex, remaining unexplored children)
        let mut stack: Vec<(usize, u64)> = Vec::new();
        for (v, &c) in self.children.iter().enumerate() {
            if let Some(&(p, _)) = stack.last() {
                parents[v] = Some(p);
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
        parents
    }

    fn depths(&self) -> Vec<u64> {
        let parents = self.parents();
        let mut depths = vec![0u64; parents.len()];
        for (v, p) in parents.iter().enumerate() {
            if let Some(p) = p {
                depths[v] = depths[*p] + 1;
            }
        }
        depths
    }

    pub fn height(&self) -> u64 {
        self.depths().into_iter().max().unwrap_or(0)
    }

    pub fn degree_histogram(&self) -> DegreeSequence {
        let mut counts = BTreeMap::new();
        for &c in &self.children {
            *counts.entry(c).or_insert(0u64) += 1;
        }
        DegreeSequence::validate(counts).expect("a tree always has c = 1")
    }

    pub fn max_degree(&self) -> u64 {
        self.children.iter().copied().max().unwrap_or(0)
    }

    /// Exact diameter via two farthest-vertex searches (valid on trees).
    pub fn diameter(&self) -> u64 {
        let n = self.children.len();
        if n == 1 {
            return 0;
        }
        let parents = self.parents();
        let mut adjacency = vec![Vec::new(); n];
        for (v, p) in parents.iter().enumerate() {
            if let Some(p) = p {
                adjacency[*p].push(v);
                adjacency[v].push(*p);
            }
        }
        let farthest = |start: usize| -> (usize, u64) {
            let mut dist = vec![u64::MAX; n];
            dist[start] = 0;
            let mut queue = std::collections::VecDeque::from([start]);
            let mut best = (start, 0);
            while let Some(v) = queue.pop_front() {
                for &w in &adjacency[v] {
                    if dist[w] == u64::MAX {
                        dist[w] = dist[v] + 1;
                        if dist[w] > best.1 {
                            best = (w, dist[w]);
                        }
                        queue.push_back(w);
                    }
                }
            }
            best
        };
        let (u, _) = farthest(0);
        farthest(u).1
    }

    pub fn metrics(&self) -> TreeMetrics {
        TreeMetrics {
            size: self.size(),
            height: self.height(),
            diameter: self.diameter(),
            sigma2: self.children.iter().map(|&c| c * c).sum(),
        }
    }

    /// Contour values at unit-speed steps: starts and ends at 0, has
    /// `2(size - 1)` increments of `±1`, and its maximum is the height.
    ///
    /// DFS order coincides with the order in which the exploring particle
    /// first reaches each vertex, so descending into "the next unvisited
    /// child" always means descending into the next vertex of the
    /// child-count array.
    pub fn contour_values(&self) -> Vec<i64> {
        let n = self.children.len();
        let mut values = Vec::with_capacity(2 * n.saturating_sub(1) + 1);
        values.push(0);
        let mut depth = 0i64;
        let mut cursor = 1usize;
        // stack of unexplored-child counts along the current root path
        let mut remaining = vec![self.children[0]];
        while let Some(r) = remaining.last_mut() {
            if *r > 0 {
                *r -= 1;
                depth += 1;
                values.push(depth);
                remaining.push(self.children[cursor]);
                cursor += 1;
            } else {
                remaining.pop();
                if !remaining.is_empty() {
                    depth -= 1;
                    values.push(depth);
                }
            }
        }
        values
    }

    /// Contour function as a lattice path of `±1` increments.
    pub fn contour_function(&self) -> LatticePath {
        let values = self.contour_values();
        let increments: Vec<i64> = values.windows(2).map(|w| w[1] - w[0]).collect();
        LatticePath::new(increments).expect("contour increments are ±1")
    }
}

/// An ordered sequence of plane trees.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawForest", into = "RawForest")]
pub struct PlaneForest {
    trees: Vec<PlaneTree>,
}

/// Wire form: `{"trees": [[2,0,0],[0]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawForest {
    trees: Vec<Vec<u64>>,
}

impl TryFrom<RawForest> for PlaneForest {
    type Error = ForestError;

    fn try_from(raw: RawForest) -> Result<Self, ForestError> {
        let trees = raw
            .trees
            .into_iter()
            .map(PlaneTree::new)
            .collect::<Result<Vec<_>, _>>()?;
        PlaneForest::new(trees)
    }
}

impl From<PlaneForest> for RawForest {
    fn from(f: PlaneForest) -> RawForest {
        RawForest {
            trees: f.trees.into_iter().map(Vec::from).collect(),
        }
    }
}

impl PlaneForest {
    pub fn new(trees: Vec<PlaneTree>) -> Result<Self, ForestError> {
        if trees.is_empty() {
            return Err(ForestError::EmptyForest);
        }
        Ok(PlaneForest { trees })
    }

    pub fn trees(&self) -> &[PlaneTree] {
        &self.trees
    }

    pub fn size(&self) -> u64 {
        self.trees.iter().map(PlaneTree::size).sum()
    }

    /// Aggregate degree sequence; its `c` equals the number of trees.
    pub fn degree_sequence(&self) -> DegreeSequence {
        let mut counts = BTreeMap::new();
        for t in &self.trees {
            for &c in t.children() {
                *counts.entry(c).or_insert(0u64) += 1;
            }
        }
        DegreeSequence::validate(counts).expect("forests have c >= 1")
    }

    /// Concatenated DFS child counts across trees.
    pub fn child_sequence(&self) -> Vec<u64> {
        self.trees
            .iter()
            .flat_map(|t| t.children().iter().copied())
            .collect()
    }

    /// Lukasiewicz path of the forest; inverse of [`decode`].
    pub fn encode(&self) -> LatticePath {
        LatticePath::walk_from_children(&self.child_sequence())
    }

    /// Trees in decreasing order of size, ties broken lexicographically on
    /// the child-count sequence, remaining ties keeping original order.
    pub fn sort_decreasing(&self) -> PlaneForest {
        let mut trees = self.trees.clone();
        trees.sort_by(|a, b| {
            b.size()
                .cmp(&a.size())
                .then_with(|| a.children().cmp(b.children()))
        });
        PlaneForest { trees }
    }

    /// DFS child counts rotated to start at the marked vertex (1-based).
    pub fn mark_to_child_sequence(&self, v: usize) -> Result<Vec<u64>, ForestError> {
        let seq = self.child_sequence();
        let n = seq.len();
        if v < 1 || v > n {
            return Err(ForestError::IndexOutOfRange { v, n });
        }
        let mut rotated = Vec::with_capacity(n);
        rotated.extend_from_slice(&seq[v - 1..]);
        rotated.extend_from_slice(&seq[..v - 1]);
        Ok(rotated)
    }
}

/// Splits a first-passage bridge into the forest it codes: tree boundaries
/// are the times the walk first reaches each new minimum level.
pub fn decode(path: &LatticePath) -> Result<PlaneForest, ForestError> {
    if !path.is_first_passage() {
        return Err(ForestError::NotFirstPassage);
    }
    let children = path.children();
    let mut trees = Vec::new();
    let mut acc = 0i64;
    let mut level = 0i64;
    let mut start = 0usize;
    for (i, &inc) in path.increments().iter().enumerate() {
        acc += inc;
        if acc == level - 1 {
            trees.push(PlaneTree {
                children: children[start..=i].to_vec(),
            });
            level -= 1;
            start = i + 1;
        }
    }
    PlaneForest::new(trees)
}

/// Result of exhaustively checking the marked-forest maps for a degree
/// sequence: `g` (read child counts from the mark) must be exactly c-to-1
/// onto the child sequences, and `h` (forget the mark) exactly n-to-1.
#[derive(Debug, Clone, Copy)]
pub struct MarkedMapCheck {
    pub g_c_to_1: bool,
    pub h_n_to_1: bool,
}

pub fn verify_marked_maps(s: &DegreeSequence) -> Result<MarkedMapCheck, ForestError> {
    verify_marked_maps_capped(s, crate::paths::DEFAULT_ENUMERATION_CAP)
}

pub fn verify_marked_maps_capped(
    s: &DegreeSequence,
    cap: u64,
) -> Result<MarkedMapCheck, ForestError> {
    let forests: Vec<PlaneForest> = enumerate_fp_bridges_capped(s, cap)?
        .iter()
        .map(decode)
        .collect::<Result<_, _>>()?;
    let n = s.n() as usize;
    let mut g_images: BTreeMap<Vec<u64>, u64> = BTreeMap::new();
    let mut marks_per_forest = Vec::with_capacity(forests.len());
    for f in &forests {
        let mut marks = 0u64;
        for v in 1..=n {
            *g_images.entry(f.mark_to_child_sequence(v)?).or_insert(0) += 1;
            marks += 1;
        }
        marks_per_forest.push(marks);
    }
    let g_c_to_1 = g_images.len() as u128 == multinomial(s)
        && g_images.values().all(|&k| k == s.c());
    let h_n_to_1 = marks_per_forest.iter().all(|&m| m == s.n());
    Ok(MarkedMapCheck { g_c_to_1, h_n_to_1 })
}

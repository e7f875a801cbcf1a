//! Brute-force path enumeration on tiny instances: composition-constrained
//! path sums, their exact expectations, and the closed-form moment bounds
//! they are sandwiched between. Deliberately exponential, guarded by a hard
//! budget; this exists to validate the fast implementations, not to scale.

use crate::sbm::{BlockModel, Graph};
use crate::{Error, Result};
use nalgebra::DMatrix;

/// Hard cap on |P_b| per enumeration call.
pub const PATH_BUDGET: u128 = 10_000_000;

/// A path composition: the block label of every position along a length-t
/// path, plus the fixed endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathComposition {
    blocks: Vec<usize>,
    endpoints: (u32, u32),
}

impl PathComposition {
    /// Builds a composition of length `blocks.len() - 1` steps; the first and
    /// last labels must match the endpoint labels under `labels`.
    pub fn new(blocks: Vec<usize>, endpoints: (u32, u32), labels: &[usize]) -> Result<Self> {
        if blocks.len() < 2 {
            return Err(Error::OutOfRange("composition needs t >= 1".into()));
        }
        let (i, j) = endpoints;
        if i as usize >= labels.len() || j as usize >= labels.len() {
            return Err(Error::OutOfRange("endpoint out of range".into()));
        }
        if labels[i as usize] != blocks[0] || labels[j as usize] != *blocks.last().unwrap() {
            return Err(Error::InvalidAssignment(
                "endpoint labels do not match the composition".into(),
            ));
        }
        Ok(PathComposition { blocks, endpoints })
    }

    /// Number of steps t.
    pub fn t(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn endpoints(&self) -> (u32, u32) {
        self.endpoints
    }
}

/// A path-sum value with the size of the path family it ranged over.
#[derive(Debug, Clone, PartialEq)]
pub struct PathStats {
    /// Value of Y_b (alpha-weighted when alpha != 1).
    pub y_b: f64,
    /// |P_b|: product of interior block sizes.
    pub path_count: u128,
    /// Exact expectation, when one was computed alongside.
    pub expectation: Option<f64>,
}

fn members_by_position(labels: &[usize], comp: &PathComposition) -> Vec<Vec<u32>> {
    comp.blocks
        .iter()
        .map(|&b| {
            labels
                .iter()
                .enumerate()
                .filter(|(_, &g)| g == b)
                .map(|(v, _)| v as u32)
                .collect()
        })
        .collect()
}

fn family_size(members: &[Vec<u32>]) -> u128 {
    members[1..members.len() - 1]
        .iter()
        .map(|m| m.len() as u128)
        .product()
}

/// Iterator over every path in P_b, in lexicographic tuple order.
pub struct PathEnumerator {
    members: Vec<Vec<u32>>,
    endpoints: (u32, u32),
    cursor: Vec<usize>,
    done: bool,
}

impl Iterator for PathEnumerator {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        if self.done {
            return None;
        }
        let t = self.members.len() - 1;
        let mut path = Vec::with_capacity(t + 1);
        path.push(self.endpoints.0);
        for (pos, &idx) in self.cursor.iter().enumerate() {
            path.push(self.members[pos + 1][idx]);
        }
        path.push(self.endpoints.1);
        // odometer increment, least significant position last
        let mut pos = self.cursor.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.cursor[pos] += 1;
            if self.cursor[pos] < self.members[pos + 1].len() {
                break;
            }
            self.cursor[pos] = 0;
        }
        Some(path)
    }
}

/// Streams every tuple `(i_0, ..., i_t)` with the endpoints and block labels
/// required by the composition, each exactly once.
pub fn enumerate_paths(labels: &[usize], comp: &PathComposition) -> Result<PathEnumerator> {
    let members = members_by_position(labels, comp);
    let count = family_size(&members);
    if count > PATH_BUDGET {
        return Err(Error::BudgetExceeded {
            count,
            budget: PATH_BUDGET,
        });
    }
    let interior = members.len() - 2;
    let done = count == 0;
    Ok(PathEnumerator {
        endpoints: comp.endpoints,
        cursor: vec![0; interior],
        members,
        done,
    })
}

/// Number of positions `l` in `[2, t]` with `path[l-2] == path[l]`.
pub fn backtrack_count(path: &[u32]) -> usize {
    (2..path.len())
        .filter(|&l| path[l - 2] == path[l])
        .count()
}

/// Realized weighted path sum `Y_{b,alpha} = sum_p prod(A_edges) alpha^n(p)`
/// on a concrete graph; `alpha = 1` gives the plain path count Y_b.
pub fn y_b(graph: &Graph, labels: &[usize], comp: &PathComposition, alpha: f64) -> Result<PathStats> {
    if alpha < 0.0 {
        return Err(Error::OutOfRange(format!("alpha = {alpha} must be >= 0")));
    }
    let members = members_by_position(labels, comp);
    let count = family_size(&members);
    if count > PATH_BUDGET {
        return Err(Error::BudgetExceeded {
            count,
            budget: PATH_BUDGET,
        });
    }
    fn walk(
        graph: &Graph,
        members: &[Vec<u32>],
        path: &mut Vec<u32>,
        weight: f64,
        alpha: f64,
        total: &mut f64,
    ) {
        let pos = path.len();
        let t = members.len() - 1;
        if pos == t {
            let target = members[t][0]; // endpoint slot holds exactly the endpoint
            let prev = *path.last().unwrap();
            if graph.has_edge(prev as usize, target as usize) {
                let mut w = weight;
                if pos >= 2 && path[pos - 2] == target {
                    w *= alpha;
                }
                *total += w;
            }
            return;
        }
        let prev = *path.last().unwrap();
        for &v in &members[pos] {
            if !graph.has_edge(prev as usize, v as usize) {
                continue;
            }
            let mut w = weight;
            if pos >= 2 && path[pos - 2] == v {
                w *= alpha;
            }
            if w == 0.0 {
                continue;
            }
            path.push(v);
            walk(graph, members, path, w, alpha, total);
            path.pop();
        }
    }

    let mut total = 0.0;
    if count > 0 {
        // pin the endpoint slots to the actual endpoints
        let mut pinned = members.clone();
        pinned[0] = vec![comp.endpoints.0];
        let t = comp.t();
        pinned[t] = vec![comp.endpoints.1];
        let mut path = vec![comp.endpoints.0];
        walk(graph, &pinned, &mut path, 1.0, alpha, &mut total);
    }
    Ok(PathStats {
        y_b: total,
        path_count: count,
        expectation: None,
    })
}

/// Exact `E Y_{b,alpha}` under independent edges with probabilities `p`:
/// each path contributes the product of `p` over its distinct undirected
/// edges times `alpha^n(p)`; self-loop edges are zeroed when
/// `zero_diagonal` is set, matching a model with an empty diagonal.
pub fn expected_y_b_alpha(
    p: &DMatrix<f64>,
    labels: &[usize],
    comp: &PathComposition,
    alpha: f64,
    zero_diagonal: bool,
) -> Result<f64> {
    if p.nrows() != labels.len() || p.ncols() != labels.len() {
        return Err(Error::DimensionMismatch(format!(
            "P is {}x{} for {} labels",
            p.nrows(),
            p.ncols(),
            labels.len()
        )));
    }
    let members = members_by_position(labels, comp);
    let count = family_size(&members);
    if count > PATH_BUDGET {
        return Err(Error::BudgetExceeded {
            count,
            budget: PATH_BUDGET,
        });
    }
    #[allow(clippy::too_many_arguments)]
    fn walk(
        p: &DMatrix<f64>,
        members: &[Vec<u32>],
        path: &mut Vec<u32>,
        seen: &mut Vec<(u32, u32)>,
        weight: f64,
        alpha: f64,
        zero_diagonal: bool,
        total: &mut f64,
    ) {
        let pos = path.len();
        let t = members.len() - 1;
        let prev = *path.last().unwrap();
        for &v in &members[pos] {
            if pos == t && v != members[t][0] {
                continue;
            }
            let edge = (prev.min(v), prev.max(v));
            let mut w = weight;
            if prev == v && zero_diagonal {
                continue;
            }
            if !seen.contains(&edge) {
                w *= p[(edge.0 as usize, edge.1 as usize)];
            }
            if pos >= 2 && path[pos - 2] == v {
                w *= alpha;
            }
            if w == 0.0 {
                continue;
            }
            if pos == t {
                *total += w;
                continue;
            }
            let inserted = if !seen.contains(&edge) {
                seen.push(edge);
                true
            } else {
                false
            };
            path.push(v);
            walk(p, members, path, seen, w, alpha, zero_diagonal, total);
            path.pop();
            if inserted {
                seen.pop();
            }
        }
    }

    let mut total = 0.0;
    if count > 0 {
        let mut pinned = members.clone();
        pinned[0] = vec![comp.endpoints.0];
        let t = comp.t();
        pinned[t] = vec![comp.endpoints.1];
        let mut path = vec![comp.endpoints.0];
        let mut seen = Vec::with_capacity(t);
        walk(
            p,
            &pinned,
            &mut path,
            &mut seen,
            1.0,
            alpha,
            zero_diagonal,
            &mut total,
        );
    }
    Ok(total)
}

/// Exact `E Y_b` (the alpha = 1 case).
pub fn expected_y_b(
    p: &DMatrix<f64>,
    labels: &[usize],
    comp: &PathComposition,
    zero_diagonal: bool,
) -> Result<f64> {
    expected_y_b_alpha(p, labels, comp, 1.0, zero_diagonal)
}

/// Closed-form moment bounds `(U_b, L_b)` for moment order `moment_k`:
/// `U_b = (prod n_{b_i} B_{b_{i-1} b_i}) B_{b_{t-1} b_t}` and `L_b` with each
/// interior size reduced by `moment_k (t - 1) + 1`, floored at zero.
pub fn u_b_l_b(model: &BlockModel, comp: &PathComposition, moment_k: usize) -> (f64, f64) {
    let b = model.b();
    let sizes = model.block_sizes();
    let t = comp.t();
    let reduction = (moment_k * (t - 1) + 1) as f64;
    let mut upper = 1.0;
    let mut lower = 1.0;
    for l in 1..t {
        let size = sizes[comp.blocks[l]] as f64;
        let edge = b[(comp.blocks[l - 1], comp.blocks[l])];
        upper *= size * edge;
        lower *= (size - reduction).max(0.0) * edge;
    }
    let last = b[(comp.blocks[t - 1], comp.blocks[t])];
    (upper * last, lower * last)
}

//! Stochastic block model: block densities, edge probabilities and graph sampling.

use crate::rng::stream_rng;
use crate::{Error, Result};
use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;

/// Stochastic block model with `K` communities.
///
/// Edge probabilities are `rho * b0[r][s]` for nodes in blocks `r` and `s`;
/// `rho` scales the overall sparsity of sampled graphs.
#[derive(Debug, Clone)]
pub struct BlockModel {
    k: usize,
    block_sizes: Vec<usize>,
    b0: DMatrix<f64>,
    rho: f64,
}

/// Validates and builds a [`BlockModel`].
pub fn build_block_model(
    k: usize,
    block_sizes: &[usize],
    b0: DMatrix<f64>,
    rho: f64,
) -> Result<BlockModel> {
    if k == 0 {
        return Err(Error::OutOfRange("K must be positive".into()));
    }
    if block_sizes.len() != k {
        return Err(Error::DimensionMismatch(format!(
            "expected {k} block sizes, got {}",
            block_sizes.len()
        )));
    }
    if block_sizes.iter().any(|&s| s == 0) {
        return Err(Error::OutOfRange("every block size must be >= 1".into()));
    }
    if b0.nrows() != k || b0.ncols() != k {
        return Err(Error::DimensionMismatch(format!(
            "B0 must be {k}x{k}, got {}x{}",
            b0.nrows(),
            b0.ncols()
        )));
    }
    for i in 0..k {
        for j in 0..k {
            let v = b0[(i, j)];
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::OutOfRange(format!(
                    "B0[{i}][{j}] = {v} is outside (0, 1]"
                )));
            }
            if (b0[(i, j)] - b0[(j, i)]).abs() > 0.0 {
                return Err(Error::NotSymmetric(format!(
                    "B0[{i}][{j}] != B0[{j}][{i}]"
                )));
            }
        }
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::OutOfRange(format!("rho = {rho} is outside [0, 1]")));
    }
    let max_b0 = b0.iter().cloned().fold(0.0_f64, f64::max);
    if rho * max_b0 > 1.0 {
        return Err(Error::OutOfRange(format!(
            "rho * max(B0) = {} exceeds 1",
            rho * max_b0
        )));
    }
    Ok(BlockModel {
        k,
        block_sizes: block_sizes.to_vec(),
        b0,
        rho,
    })
}

impl BlockModel {
    /// Number of communities.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Sizes of the communities; they sum to [`BlockModel::n`].
    pub fn block_sizes(&self) -> &[usize] {
        &self.block_sizes
    }

    /// Total node count.
    pub fn n(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    /// Base density matrix before sparsity scaling.
    pub fn b0(&self) -> &DMatrix<f64> {
        &self.b0
    }

    /// Sparsity scale.
    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Block density matrix `B = rho * B0`.
    pub fn b(&self) -> DMatrix<f64> {
        &self.b0 * self.rho
    }

    /// Edge probability between a node of block `r` and one of block `s`.
    pub fn edge_prob(&self, r: usize, s: usize) -> f64 {
        self.rho * self.b0[(r, s)]
    }

    /// Canonical assignment grouping nodes by block, block 0 first.
    pub fn grouped_assignment(&self) -> CommunityAssignment {
        let mut labels = Vec::with_capacity(self.n());
        for (r, &size) in self.block_sizes.iter().enumerate() {
            labels.extend(std::iter::repeat(r).take(size));
        }
        CommunityAssignment { labels, k: self.k }
    }
}

/// Community labels for the `n` nodes, consistent with some [`BlockModel`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityAssignment {
    labels: Vec<usize>,
    k: usize,
}

impl CommunityAssignment {
    /// Builds an assignment and checks label counts against the model's block sizes.
    pub fn new(labels: Vec<usize>, model: &BlockModel) -> Result<Self> {
        let mut counts = vec![0usize; model.k];
        for (i, &g) in labels.iter().enumerate() {
            if g >= model.k {
                return Err(Error::InvalidAssignment(format!(
                    "label {g} of node {i} is >= K = {}",
                    model.k
                )));
            }
            counts[g] += 1;
        }
        if counts != model.block_sizes {
            return Err(Error::InvalidAssignment(format!(
                "label counts {counts:?} do not match block sizes {:?}",
                model.block_sizes
            )));
        }
        Ok(CommunityAssignment {
            labels,
            k: model.k,
        })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    /// Community of node `i`.
    pub fn block_of(&self, i: usize) -> usize {
        self.labels[i]
    }
}

/// Membership matrix: one row per node, a single 1 in the column of its community.
pub fn membership_matrix(labels: &[usize], k: usize) -> Result<DMatrix<f64>> {
    let mut theta = DMatrix::zeros(labels.len(), k);
    for (i, &g) in labels.iter().enumerate() {
        if g >= k {
            return Err(Error::InvalidAssignment(format!(
                "label {g} of node {i} is >= K = {k}"
            )));
        }
        theta[(i, g)] = 1.0;
    }
    Ok(theta)
}

/// Symmetric matrix of edge probabilities, constant on block pairs.
///
/// The diagonal is included: `P[i][i] = rho * B0[g(i)][g(i)]`. Sampling still
/// forces an empty diagonal; the diagonal matters for the noiseless M-matrix,
/// which walks on the complete graph weighted by `P`.
#[derive(Debug, Clone)]
pub struct ProbabilityMatrix {
    entries: DMatrix<f64>,
}

impl ProbabilityMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }
}

/// Builds `P = Theta B Theta^T` from the model and an assignment.
pub fn edge_probability_matrix(
    model: &BlockModel,
    assignment: &CommunityAssignment,
) -> Result<ProbabilityMatrix> {
    if assignment.n() != model.n() || assignment.k() != model.k() {
        return Err(Error::InvalidAssignment(
            "assignment does not belong to this model".into(),
        ));
    }
    let n = model.n();
    let mut entries = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            entries[(i, j)] = model.edge_prob(assignment.block_of(i), assignment.block_of(j));
        }
    }
    Ok(ProbabilityMatrix { entries })
}

/// Undirected simple graph stored as sorted neighbor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    neighbors: Vec<Vec<u32>>,
    two_m: u64,
}

impl Graph {
    /// Builds a graph from undirected edges; rejects self-loops and duplicates.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self> {
        let mut neighbors = vec![Vec::new(); n];
        for &(i, j) in edges {
            if i == j {
                return Err(Error::InvalidAssignment(format!("self-loop at node {i}")));
            }
            if i as usize >= n || j as usize >= n {
                return Err(Error::OutOfRange(format!(
                    "edge ({i}, {j}) out of range for n = {n}"
                )));
            }
            neighbors[i as usize].push(j);
            neighbors[j as usize].push(i);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            if list.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidAssignment("duplicate edge".into()));
            }
        }
        let two_m = neighbors.iter().map(|l| l.len() as u64).sum();
        Ok(Graph { neighbors, two_m })
    }

    pub fn n(&self) -> usize {
        self.neighbors.len()
    }

    /// Number of undirected edges.
    pub fn m(&self) -> u64 {
        self.two_m / 2
    }

    /// Sum of all degrees (twice the edge count).
    pub fn two_m(&self) -> u64 {
        self.two_m
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors[v].len()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].binary_search(&(v as u32)).is_ok()
    }

    /// Edges as (i, j) with i < j, lexicographically sorted.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.m() as usize);
        for (i, list) in self.neighbors.iter().enumerate() {
            for &j in list {
                if (i as u32) < j {
                    out.push((i as u32, j));
                }
            }
        }
        out
    }

    /// Dense 0/1 adjacency matrix.
    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut a = DMatrix::zeros(n, n);
        for (i, list) in self.neighbors.iter().enumerate() {
            for &j in list {
                a[(i, j as usize)] = 1.0;
            }
        }
        a
    }

    /// Text fixture format: `n m` header then one `i j` line per edge, i < j.
    pub fn to_text(&self) -> String {
        let edges = self.edges();
        let mut s = format!("{} {}\n", self.n(), edges.len());
        for (i, j) in edges {
            s.push_str(&format!("{i} {j}\n"));
        }
        s
    }

    /// Parses the text fixture format produced by [`Graph::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidAssignment("empty graph text".into()))?;
        let mut it = header.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<usize> {
            tok.and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::InvalidAssignment("malformed graph header".into()))
        };
        let n = parse(it.next())?;
        let m = parse(it.next())?;
        let mut edges = Vec::with_capacity(m);
        for line in lines.take(m) {
            let mut it = line.split_whitespace();
            let i = parse(it.next())? as u32;
            let j = parse(it.next())? as u32;
            if i >= j {
                return Err(Error::InvalidAssignment(format!(
                    "edge line must have i < j, got {i} {j}"
                )));
            }
            edges.push((i, j));
        }
        if edges.len() != m {
            return Err(Error::InvalidAssignment(format!(
                "expected {m} edges, found {}",
                edges.len()
            )));
        }
        Graph::from_edges(n, &edges)
    }
}

/// Samples a graph from the model: independent Bernoulli edges on the upper
/// triangle, symmetrized, empty diagonal.
///
/// Row `i` draws from its own RNG stream, so the result is a pure function of
/// `(model, assignment, seed)` no matter how rows are scheduled across threads.
pub fn sample_graph(
    model: &BlockModel,
    assignment: &CommunityAssignment,
    seed: u64,
) -> Result<Graph> {
    if assignment.n() != model.n() || assignment.k() != model.k() {
        return Err(Error::InvalidAssignment(
            "assignment does not belong to this model".into(),
        ));
    }
    let n = model.n();
    let labels = assignment.labels();
    let b = model.b();
    let forward: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i as u64);
            let mut row = Vec::new();
            for j in (i + 1)..n {
                let p = b[(labels[i], labels[j])];
                if rng.random::<f64>() < p {
                    row.push(j as u32);
                }
            }
            row
        })
        .collect();

    let mut neighbors = vec![Vec::new(); n];
    for (i, row) in forward.iter().enumerate() {
        for &j in row {
            neighbors[i].push(j);
            neighbors[j as usize].push(i as u32);
        }
    }
    for list in &mut neighbors {
        list.sort_unstable();
    }
    let two_m = neighbors.iter().map(|l| l.len() as u64).sum();
    Ok(Graph { neighbors, two_m })
}

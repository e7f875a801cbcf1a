//! Random-walk generation: DeepWalk simple walks, node2vec second-order walks,
//! and the exact first-order chain on directed edges used for closed-form checks.

use crate::rng::stream_rng;
use crate::sbm::Graph;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const WALK_STREAM_BASE: u64 = 1 << 56;

/// Which walk kernel produced a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelKind {
    DeepWalk,
    Node2Vec,
}

impl std::fmt::Display for KernelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KernelKind::DeepWalk => write!(f, "deepwalk"),
            KernelKind::Node2Vec => write!(f, "node2vec"),
        }
    }
}

/// Generation parameters attached to a corpus.
#[derive(Debug, Clone, Copy)]
pub struct WalkParams {
    pub r: usize,
    pub l: usize,
    pub kernel: KernelKind,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
}

/// A batch of `r` walks of exactly `l` nodes each.
#[derive(Debug, Clone)]
pub struct WalkCorpus {
    walks: Vec<Vec<u32>>,
    n: usize,
    params: WalkParams,
    /// Times the alpha = 0 dead-end rule fired (forced backtrack at a
    /// degree-1 node). Zero whenever alpha > 0.
    dead_end_backtracks: u64,
}

impl WalkCorpus {
    pub fn walks(&self) -> &[Vec<u32>] {
        &self.walks
    }

    /// Node count of the source graph.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Test constructor bypassing the generators.
    #[cfg(test)]
    pub(crate) fn from_raw(walks: Vec<Vec<u32>>, n: usize, l: usize) -> WalkCorpus {
        WalkCorpus {
            walks,
            n,
            params: WalkParams {
                r: 0,
                l,
                kernel: KernelKind::DeepWalk,
                alpha: 1.0,
                beta: 1.0,
                seed: 0,
            },
            dead_end_backtracks: 0,
        }
    }

    pub fn params(&self) -> &WalkParams {
        &self.params
    }

    pub fn dead_end_backtracks(&self) -> u64 {
        self.dead_end_backtracks
    }

    /// Binary export: two little-endian u64 (r, l), then r*l little-endian
    /// u32 node ids in walk order.
    pub fn to_bytes(&self) -> Vec<u8> {
        let r = self.walks.len() as u64;
        let l = self.params.l as u64;
        let mut out = Vec::with_capacity(16 + self.walks.len() * self.params.l * 4);
        out.extend_from_slice(&r.to_le_bytes());
        out.extend_from_slice(&l.to_le_bytes());
        for walk in &self.walks {
            for &v in walk {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }
}

/// Cumulative degree table for exact integer sampling of the stationary law.
struct DegreeSampler {
    prefix: Vec<u64>,
}

impl DegreeSampler {
    fn new(graph: &Graph) -> Self {
        let mut prefix = Vec::with_capacity(graph.n() + 1);
        let mut acc = 0u64;
        prefix.push(0);
        for v in 0..graph.n() {
            acc += graph.degree(v) as u64;
            prefix.push(acc);
        }
        DegreeSampler { prefix }
    }

    /// Node v with probability deg(v) / two_m.
    fn sample_node(&self, rng: &mut ChaCha8Rng, two_m: u64) -> u32 {
        let x = rng.random_range(0..two_m);
        (self.prefix.partition_point(|&p| p <= x) - 1) as u32
    }

    /// Ordered edge (u, v) uniform over the 2m directed edges.
    fn sample_ordered_edge(&self, graph: &Graph, rng: &mut ChaCha8Rng) -> (u32, u32) {
        let x = rng.random_range(0..graph.two_m());
        let u = self.prefix.partition_point(|&p| p <= x) - 1;
        let offset = (x - self.prefix[u]) as usize;
        (u as u32, graph.neighbors(u)[offset])
    }
}

fn uniform_neighbor(graph: &Graph, v: u32, rng: &mut ChaCha8Rng) -> u32 {
    let list = graph.neighbors(v as usize);
    list[rng.random_range(0..list.len())]
}

/// DeepWalk corpus: start at the stationary law deg(v)/2m, step uniformly
/// over neighbors. Walks are generated on independent RNG streams indexed by
/// walk id, so output does not depend on the thread schedule.
pub fn deepwalk_walks(graph: &Graph, r: usize, l: usize, seed: u64) -> Result<WalkCorpus> {
    if graph.two_m() == 0 {
        return Err(Error::EdgelessGraph);
    }
    if l < 2 {
        return Err(Error::OutOfRange(format!("walk length l = {l} must be >= 2")));
    }
    let sampler = DegreeSampler::new(graph);
    let walks: Vec<Vec<u32>> = (0..r)
        .into_par_iter()
        .map(|m| {
            let mut rng = stream_rng(seed, WALK_STREAM_BASE | m as u64);
            let mut walk = Vec::with_capacity(l);
            let mut cur = sampler.sample_node(&mut rng, graph.two_m());
            walk.push(cur);
            for _ in 1..l {
                cur = uniform_neighbor(graph, cur, &mut rng);
                walk.push(cur);
            }
            walk
        })
        .collect();
    Ok(WalkCorpus {
        walks,
        n: graph.n(),
        params: WalkParams {
            r,
            l,
            kernel: KernelKind::DeepWalk,
            alpha: 1.0,
            beta: 1.0,
            seed,
        },
        dead_end_backtracks: 0,
    })
}

/// One second-order step. Returns the next node and whether the dead-end
/// rule fired.
fn node2vec_step(
    graph: &Graph,
    prev: u32,
    cur: u32,
    alpha: f64,
    beta: f64,
    rng: &mut ChaCha8Rng,
) -> (u32, bool) {
    let list = graph.neighbors(cur as usize);
    let weight_of = |w: u32| -> f64 {
        if w == prev {
            alpha
        } else if graph.has_edge(prev as usize, w as usize) {
            1.0
        } else {
            beta
        }
    };
    let total: f64 = list.iter().map(|&w| weight_of(w)).sum();
    if total <= 0.0 {
        // alpha = 0 at a degree-1 node whose only neighbor is `prev`: take the
        // alpha -> 0+ limit and backtrack with probability 1.
        return (prev, true);
    }
    let x = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for &w in list {
        acc += weight_of(w);
        if x < acc {
            return (w, false);
        }
    }
    (*list.last().unwrap(), false)
}

/// node2vec corpus: (w1, w2) uniform over ordered edges, then second-order
/// steps with weights alpha (backtrack), 1 (closing a triangle), beta
/// (leaving the previous node's neighborhood).
pub fn node2vec_walks(
    graph: &Graph,
    r: usize,
    l: usize,
    alpha: f64,
    beta: f64,
    seed: u64,
) -> Result<WalkCorpus> {
    if graph.two_m() == 0 {
        return Err(Error::EdgelessGraph);
    }
    if l < 2 {
        return Err(Error::OutOfRange(format!("walk length l = {l} must be >= 2")));
    }
    if alpha < 0.0 {
        return Err(Error::OutOfRange(format!("alpha = {alpha} must be >= 0")));
    }
    if beta <= 0.0 {
        return Err(Error::OutOfRange(format!("beta = {beta} must be > 0")));
    }
    let sampler = DegreeSampler::new(graph);
    let results: Vec<(Vec<u32>, u64)> = (0..r)
        .into_par_iter()
        .map(|m| {
            let mut rng = stream_rng(seed, WALK_STREAM_BASE | m as u64);
            let mut dead_ends = 0u64;
            let mut walk = Vec::with_capacity(l);
            let (w1, w2) = sampler.sample_ordered_edge(graph, &mut rng);
            walk.push(w1);
            walk.push(w2);
            let (mut prev, mut cur) = (w1, w2);
            for _ in 2..l {
                let (next, dead_end) = node2vec_step(graph, prev, cur, alpha, beta, &mut rng);
                if dead_end {
                    dead_ends += 1;
                }
                walk.push(next);
                prev = cur;
                cur = next;
            }
            (walk, dead_ends)
        })
        .collect();
    let dead_end_backtracks = results.iter().map(|(_, d)| d).sum();
    let walks = results.into_iter().map(|(w, _)| w).collect();
    Ok(WalkCorpus {
        walks,
        n: graph.n(),
        params: WalkParams {
            r,
            l,
            kernel: KernelKind::Node2Vec,
            alpha,
            beta,
            seed,
        },
        dead_end_backtracks,
    })
}

/// First-order Markov chain on the 2m ordered edges, equivalent to the
/// second-order node2vec walk.
#[derive(Debug, Clone)]
pub struct EdgeStateChain {
    states: Vec<(u32, u32)>,
    transition: DMatrix<f64>,
    initial: DVector<f64>,
}

impl EdgeStateChain {
    pub fn states(&self) -> &[(u32, u32)] {
        &self.states
    }

    /// Row-stochastic transition matrix in state order.
    pub fn transition(&self) -> &DMatrix<f64> {
        &self.transition
    }

    /// Uniform 1/(2m) start, matching the ordered-edge initialization.
    pub fn initial(&self) -> &DVector<f64> {
        &self.initial
    }

    pub fn state_index(&self, u: u32, v: u32) -> Option<usize> {
        self.states.binary_search(&(u, v)).ok()
    }
}

/// Builds the exact edge-state chain for a graph and node2vec parameters.
pub fn edge_state_chain(graph: &Graph, alpha: f64, beta: f64) -> Result<EdgeStateChain> {
    if graph.two_m() == 0 {
        return Err(Error::EdgelessGraph);
    }
    if alpha < 0.0 || beta <= 0.0 {
        return Err(Error::OutOfRange(
            "edge-state chain needs alpha >= 0 and beta > 0".into(),
        ));
    }
    let mut states = Vec::with_capacity(graph.two_m() as usize);
    for u in 0..graph.n() {
        for &v in graph.neighbors(u) {
            states.push((u as u32, v));
        }
    }
    let s = states.len();
    let mut transition = DMatrix::zeros(s, s);
    for (row, &(u, v)) in states.iter().enumerate() {
        let list = graph.neighbors(v as usize);
        let weight_of = |w: u32| -> f64 {
            if w == u {
                alpha
            } else if graph.has_edge(u as usize, w as usize) {
                1.0
            } else {
                beta
            }
        };
        let total: f64 = list.iter().map(|&w| weight_of(w)).sum();
        if total <= 0.0 {
            // dead end: forced backtrack, mirroring the walk generator
            let back = states.binary_search(&(v, u)).unwrap();
            transition[(row, back)] = 1.0;
            continue;
        }
        for &w in list {
            let col = states.binary_search(&(v, w)).unwrap();
            transition[(row, col)] = weight_of(w) / total;
        }
    }
    let initial = DVector::from_element(s, 1.0 / s as f64);
    Ok(EdgeStateChain {
        states,
        transition,
        initial,
    })
}

/// Applies the chain `steps` times to a distribution over states.
pub fn evolve_edge_distribution(
    chain: &EdgeStateChain,
    dist: &DVector<f64>,
    steps: usize,
) -> Result<DVector<f64>> {
    if dist.len() != chain.states.len() {
        return Err(Error::DimensionMismatch(format!(
            "distribution has {} entries, chain has {} states",
            dist.len(),
            chain.states.len()
        )));
    }
    let total: f64 = dist.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::OutOfRange(format!(
            "distribution sums to {total}, expected 1"
        )));
    }
    let mut cur = dist.clone();
    for _ in 0..steps {
        // row-stochastic transition applied to a row distribution
        cur = chain.transition.tr_mul(&cur);
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sbm::Graph;
    use approx::assert_relative_eq;

    fn triangle() -> Graph {
        Graph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    fn path3() -> Graph {
        // nodes 0 - 1 - 2
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn rejects_edgeless_and_short_walks() {
        let empty = Graph::from_edges(3, &[]).unwrap();
        assert!(matches!(
            deepwalk_walks(&empty, 1, 5, 0),
            Err(Error::EdgelessGraph)
        ));
        assert!(deepwalk_walks(&triangle(), 1, 1, 0).is_err());
        assert!(node2vec_walks(&triangle(), 1, 5, -0.1, 1.0, 0).is_err());
        assert!(node2vec_walks(&triangle(), 1, 5, 1.0, 0.0, 0).is_err());
    }

    #[test]
    fn walks_stay_on_edges_and_have_length_l() {
        let g = triangle();
        for corpus in [
            deepwalk_walks(&g, 50, 7, 11).unwrap(),
            node2vec_walks(&g, 50, 7, 0.5, 2.0, 11).unwrap(),
        ] {
            assert_eq!(corpus.walks().len(), 50);
            for walk in corpus.walks() {
                assert_eq!(walk.len(), 7);
                for pair in walk.windows(2) {
                    assert!(g.has_edge(pair[0] as usize, pair[1] as usize));
                }
            }
        }
    }

    #[test]
    fn deepwalk_ordered_edge_frequency_on_triangle() {
        // r = 1e5 walks of length 2: each directed edge should appear with
        // frequency near 1/6 (within 3 multinomial sigma).
        let g = triangle();
        let corpus = deepwalk_walks(&g, 100_000, 2, 42).unwrap();
        let mut counts = std::collections::HashMap::new();
        for walk in corpus.walks() {
            *counts.entry((walk[0], walk[1])).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 6);
        let p: f64 = 1.0 / 6.0;
        let sigma = (100_000.0 * p * (1.0 - p)).sqrt();
        for (_, &c) in counts.iter() {
            assert!((c as f64 - 100_000.0 * p).abs() <= 3.0 * sigma);
        }
    }

    #[test]
    fn deepwalk_start_law_on_path() {
        // middle node of 0-1-2 has stationary mass 2/4
        let g = path3();
        let corpus = deepwalk_walks(&g, 40_000, 2, 3).unwrap();
        let mid = corpus.walks().iter().filter(|w| w[0] == 1).count();
        let p = 0.5;
        let sigma = (40_000.0_f64 * p * (1.0 - p)).sqrt();
        assert!((mid as f64 - 40_000.0 * p).abs() <= 3.0 * sigma);
    }

    #[test]
    fn chain_rows_are_stochastic() {
        for (g, alpha, beta) in [
            (triangle(), 0.3, 1.0),
            (triangle(), 0.0, 2.5),
            (path3(), 0.5, 1.0),
        ] {
            let chain = edge_state_chain(&g, alpha, beta).unwrap();
            for row in 0..chain.states().len() {
                let sum: f64 = chain.transition().row(row).iter().sum();
                assert!((sum - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn chain_row_on_path_matches_hand_computation() {
        // state (0,1) with alpha = 0.5: back to (1,0) w.p. 1/3, on to (1,2) w.p. 2/3
        let chain = edge_state_chain(&path3(), 0.5, 1.0).unwrap();
        let row = chain.state_index(0, 1).unwrap();
        let back = chain.state_index(1, 0).unwrap();
        let fwd = chain.state_index(1, 2).unwrap();
        assert_relative_eq!(chain.transition()[(row, back)], 1.0 / 3.0);
        assert_relative_eq!(chain.transition()[(row, fwd)], 2.0 / 3.0);
    }

    #[test]
    fn triangle_uniform_is_invariant_for_beta_one() {
        for alpha in [0.0, 0.3, 1.0, 4.0] {
            let chain = edge_state_chain(&triangle(), alpha, 1.0).unwrap();
            let out = evolve_edge_distribution(&chain, chain.initial(), 1).unwrap();
            for i in 0..out.len() {
                assert!((out[i] - chain.initial()[i]).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn alpha_beta_one_reduces_to_simple_walk() {
        // marginalizing the chain step over the previous node gives the
        // uniform-neighbor law
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (1, 2), (2, 3)]).unwrap();
        let chain = edge_state_chain(&g, 1.0, 1.0).unwrap();
        for (row, &(_, v)) in chain.states().iter().enumerate() {
            for &w in g.neighbors(v as usize) {
                let col = chain.state_index(v, w).unwrap();
                assert_relative_eq!(
                    chain.transition()[(row, col)],
                    1.0 / g.degree(v as usize) as f64,
                    epsilon = 1e-15
                );
            }
        }
    }

    #[test]
    fn evolve_zero_steps_is_identity() {
        let chain = edge_state_chain(&triangle(), 0.7, 1.0).unwrap();
        let out = evolve_edge_distribution(&chain, chain.initial(), 0).unwrap();
        assert_eq!(out, *chain.initial());
    }

    #[test]
    fn evolve_rejects_non_distribution() {
        let chain = edge_state_chain(&triangle(), 1.0, 1.0).unwrap();
        let bad = DVector::from_element(chain.states().len(), 1.0);
        assert!(evolve_edge_distribution(&chain, &bad, 1).is_err());
    }

    #[test]
    fn alpha_zero_kills_backtracks_on_triangle() {
        let chain = edge_state_chain(&triangle(), 0.0, 1.0).unwrap();
        let mut dist = DVector::zeros(6);
        dist[chain.state_index(0, 1).unwrap()] = 1.0;
        let out = evolve_edge_distribution(&chain, &dist, 1).unwrap();
        assert_eq!(out[chain.state_index(1, 0).unwrap()], 0.0);
        assert_relative_eq!(out[chain.state_index(1, 2).unwrap()], 1.0);
    }

    #[test]
    fn dead_end_rule_counts_and_backtracks() {
        let edge = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let corpus = node2vec_walks(&edge, 10, 6, 0.0, 1.0, 5).unwrap();
        assert!(corpus.dead_end_backtracks() > 0);
        for walk in corpus.walks() {
            // the only possible walk alternates between the two endpoints
            for pair in walk.windows(2) {
                assert_ne!(pair[0], pair[1]);
            }
        }
        // the chain mirrors the forced backtrack
        let chain = edge_state_chain(&edge, 0.0, 1.0).unwrap();
        let row = chain.state_index(0, 1).unwrap();
        assert_relative_eq!(chain.transition()[(row, chain.state_index(1, 0).unwrap())], 1.0);
    }

    #[test]
    fn corpus_bytes_layout() {
        let g = triangle();
        let corpus = deepwalk_walks(&g, 2, 3, 0).unwrap();
        let bytes = corpus.to_bytes();
        assert_eq!(bytes.len(), 16 + 2 * 3 * 4);
        assert_eq!(u64::from_le_bytes(bytes[0..8].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 3);
        let first = u32::from_le_bytes(bytes[16..20].try_into().unwrap());
        assert_eq!(first, corpus.walks()[0][0]);
    }

    #[test]
    fn generation_is_deterministic_across_thread_counts() {
        let g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)]).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                (
                    deepwalk_walks(&g, 200, 9, 77).unwrap().walks().to_vec(),
                    node2vec_walks(&g, 200, 9, 0.2, 1.0, 77).unwrap().walks().to_vec(),
                )
            })
        };
        assert_eq!(run(1), run(4));
    }
}

//! The three M-matrices behind random-walk embeddings: the empirical
//! shifted-PMI matrix of a co-occurrence count, its infinite-corpus limit
//! computed from a graph, and the noiseless version computed from edge
//! probabilities. Also the SGNS objective whose maximizers factor the
//! empirical matrix.

use crate::cooccur::CooccurrenceMatrix;
use crate::sbm::{edge_probability_matrix, BlockModel, CommunityAssignment};
use crate::walks::KernelKind;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

/// Window normalizer: the number of position pairs per walk and offset,
/// summed over the window, divided by the walk count factor.
pub fn gamma(l: usize, t_l: usize, t_u: usize) -> f64 {
    ((2 * l - t_l - t_u) * (t_u - t_l + 1)) as f64 / 2.0
}

/// Provenance and parameters of an [`MMatrix`], carried for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MMeta {
    pub kernel: Option<KernelKind>,
    pub window: (usize, usize),
    pub l: Option<usize>,
    pub b: f64,
    pub alpha: Option<f64>,
}

/// Dense symmetric real matrix with a mask of pairs that never co-occur;
/// masked entries are stored as exact zeros.
#[derive(Debug, Clone)]
pub struct MMatrix {
    entries: DMatrix<f64>,
    mask: Vec<bool>,
    meta: MMeta,
}

impl MMatrix {
    fn new(entries: DMatrix<f64>, mask: Vec<bool>, meta: MMeta) -> Self {
        debug_assert_eq!(entries.nrows(), entries.ncols());
        debug_assert_eq!(mask.len(), entries.len());
        MMatrix {
            entries,
            mask,
            meta,
        }
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn meta(&self) -> &MMeta {
        &self.meta
    }

    /// True when the pair never co-occurs and the entry is a forced zero.
    pub fn is_masked(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.n() + j]
    }

    /// Number of masked (i, j) pairs, diagonal included.
    pub fn masked_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Text format: `n n` header, then n rows of 17-significant-digit entries.
    pub fn to_text(&self) -> String {
        let n = self.n();
        let mut s = format!("{n} {n}\n");
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .map(|j| format!("{:.16e}", self.entries[(i, j)]))
                .collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    /// Parallel 0/1 matrix marking masked pairs, same layout as [`MMatrix::to_text`].
    pub fn mask_to_text(&self) -> String {
        let n = self.n();
        let mut s = format!("{n} {n}\n");
        for i in 0..n {
            let row: Vec<&str> = (0..n)
                .map(|j| if self.mask[i * n + j] { "1" } else { "0" })
                .collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

/// Window-weighted joint law of `(w_1, w_{1+t})` summed over the window,
/// together with the stationary marginal of `w_1`.
#[derive(Debug, Clone)]
pub struct JointWindowTable {
    joint: DMatrix<f64>,
    marginal: DVector<f64>,
    window: (usize, usize),
    l: usize,
    kernel: KernelKind,
    alpha: f64,
}

impl JointWindowTable {
    /// `joint[i][j] = sum_t (l-t) (Pr(w1=i, w_{1+t}=j) + Pr(w1=j, w_{1+t}=i))`.
    pub fn joint(&self) -> &DMatrix<f64> {
        &self.joint
    }

    /// `marginal[i] = Pr(w1 = i)`, the stationary start law.
    pub fn marginal(&self) -> &DVector<f64> {
        &self.marginal
    }

    pub fn window(&self) -> (usize, usize) {
        self.window
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn kernel(&self) -> KernelKind {
        self.kernel
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

fn validate_weights(weights: &DMatrix<f64>) -> Result<(Vec<f64>, f64)> {
    let n = weights.nrows();
    if weights.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "weights must be square, got {}x{}",
            n,
            weights.ncols()
        )));
    }
    let mut max_abs = 0.0_f64;
    for v in weights.iter() {
        if *v < 0.0 {
            return Err(Error::OutOfRange("weights must be nonnegative".into()));
        }
        max_abs = max_abs.max(v.abs());
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (weights[(i, j)] - weights[(j, i)]).abs() > 1e-12 * max_abs.max(1.0) {
                return Err(Error::NotSymmetric(format!(
                    "weights[{i}][{j}] != weights[{j}][{i}]"
                )));
            }
        }
    }
    let row_sums: Vec<f64> = (0..n).map(|i| weights.row(i).sum()).collect();
    let total: f64 = row_sums.iter().sum();
    if total <= 0.0 {
        return Err(Error::EdgelessGraph);
    }
    Ok((row_sums, total))
}

fn validate_window(t_l: usize, t_u: usize, l: usize) -> Result<()> {
    if t_l < 1 || t_l > t_u || t_u >= l {
        return Err(Error::InvalidWindow { t_l, t_u, l });
    }
    Ok(())
}

/// Joint window table for the simple random walk on `weights` (an adjacency
/// matrix, or an edge-probability matrix for the noiseless case).
///
/// The start law is propagated through the one-step transition operator, one
/// matrix product per offset; rows with zero weight carry no mass and stay
/// all-zero in the joint.
pub fn deepwalk_joint(
    weights: &DMatrix<f64>,
    t_l: usize,
    t_u: usize,
    l: usize,
) -> Result<JointWindowTable> {
    validate_window(t_l, t_u, l)?;
    let (row_sums, total) = validate_weights(weights)?;
    let n = weights.nrows();

    // row-normalized transition; zero rows stay zero
    let mut step = weights.clone();
    for i in 0..n {
        if row_sums[i] > 0.0 {
            let inv = 1.0 / row_sums[i];
            for j in 0..n {
                step[(i, j)] *= inv;
            }
        }
    }
    let marginal = DVector::from_iterator(n, row_sums.iter().map(|&s| s / total));

    // q_s[i][j] = Pr(w1 = i, w_{1+s} = j) = marginal[i] * (step^s)[i][j]
    let mut q = DMatrix::<f64>::from_fn(n, n, |i, j| marginal[i] * step[(i, j)]);
    let mut windowed = DMatrix::<f64>::zeros(n, n);
    for s in 1..=t_u {
        if s > 1 {
            q = &q * &step;
        }
        if s >= t_l {
            windowed += q.scale((l - s) as f64);
        }
    }
    let joint = &windowed + windowed.transpose();
    Ok(JointWindowTable {
        joint,
        marginal,
        window: (t_l, t_u),
        l,
        kernel: KernelKind::DeepWalk,
        alpha: 1.0,
    })
}

/// Joint window table for the node2vec walk (beta = 1) on `weights`.
///
/// Computed exactly by dynamic programming over (previous, current) states
/// with step weight `weights[v][w] * alpha^{1[w = prev]} / (row_sum(v) - 1 + alpha)`,
/// which reproduces the edge-state chain when `weights` is a 0/1 adjacency
/// matrix. Cost is O(t n^3), acceptable at desk scale.
pub fn node2vec_joint(
    weights: &DMatrix<f64>,
    t_l: usize,
    t_u: usize,
    l: usize,
    alpha: f64,
) -> Result<JointWindowTable> {
    validate_window(t_l, t_u, l)?;
    if alpha < 0.0 {
        return Err(Error::OutOfRange(format!("alpha = {alpha} must be >= 0")));
    }
    let (row_sums, total) = validate_weights(weights)?;
    let n = weights.nrows();

    // normalizers; only rows that can carry mass need a positive one
    let mut inv_norm = vec![0.0_f64; n];
    if t_u >= 2 {
        for v in 0..n {
            if row_sums[v] > 0.0 {
                let norm = row_sums[v] - 1.0 + alpha;
                if norm <= 0.0 {
                    return Err(Error::ZeroNormalizer { node: v });
                }
                inv_norm[v] = 1.0 / norm;
            }
        }
    }
    let marginal = DVector::from_iterator(n, row_sums.iter().map(|&s| s / total));

    // One (prev, current) state table per source node, evolved in parallel.
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut contrib = vec![0.0_f64; n];
            if row_sums[i] == 0.0 {
                return contrib;
            }
            // xi[(u, v)] = Pr(w1 = i, w_s = u, w_{s+1} = v), row-major u*n+v
            let mut xi = vec![0.0_f64; n * n];
            for v in 0..n {
                xi[i * n + v] = weights[(i, v)] / total;
            }
            let mut next = vec![0.0_f64; n * n];
            let mut mass = vec![0.0_f64; n];
            for s in 1..=t_u {
                // mass[v] = Pr(w1 = i, w_{1+s} = v)
                for m in mass.iter_mut() {
                    *m = 0.0;
                }
                for u in 0..n {
                    let row = &xi[u * n..(u + 1) * n];
                    for (v, &x) in row.iter().enumerate() {
                        mass[v] += x;
                    }
                }
                if s >= t_l {
                    let w = (l - s) as f64;
                    for (c, &m) in contrib.iter_mut().zip(&mass) {
                        *c += w * m;
                    }
                }
                if s == t_u {
                    break;
                }
                for x in next.iter_mut() {
                    *x = 0.0;
                }
                for v in 0..n {
                    if mass[v] == 0.0 {
                        continue;
                    }
                    let inv = inv_norm[v];
                    let shifted = alpha - 1.0;
                    let out = &mut next[v * n..(v + 1) * n];
                    for (w, slot) in out.iter_mut().enumerate() {
                        let wt = weights[(v, w)];
                        if wt == 0.0 {
                            continue;
                        }
                        let backtracked = xi[w * n + v];
                        *slot = wt * inv * (mass[v] + shifted * backtracked);
                    }
                }
                std::mem::swap(&mut xi, &mut next);
            }
            contrib
        })
        .collect();

    let mut windowed = DMatrix::<f64>::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            windowed[(i, j)] = v;
        }
    }
    let joint = &windowed + windowed.transpose();
    Ok(JointWindowTable {
        joint,
        marginal,
        window: (t_l, t_u),
        l,
        kernel: KernelKind::Node2Vec,
        alpha,
    })
}

/// Empirical shifted-PMI matrix of a co-occurrence count:
/// `log(C_ij |C| / (|C_i*| |C_*j|)) - log b` where `C_ij > 0`, masked zero
/// elsewhere.
pub fn empirical_m(c: &CooccurrenceMatrix, b: f64) -> Result<MMatrix> {
    if b <= 0.0 {
        return Err(Error::OutOfRange(format!("b = {b} must be > 0")));
    }
    if c.total() == 0 {
        return Err(Error::EmptyCooccurrence);
    }
    let n = c.n();
    let log_b = b.ln();
    let total = c.total() as f64;
    let mut entries = DMatrix::zeros(n, n);
    let mut mask = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            let count = c.entry(i, j);
            if count == 0 {
                mask[i * n + j] = true;
            } else {
                let denom = c.row_sum(i) as f64 * c.row_sum(j) as f64;
                entries[(i, j)] = (count as f64 * total / denom).ln() - log_b;
            }
        }
    }
    Ok(MMatrix::new(
        entries,
        mask,
        MMeta {
            kernel: None,
            window: c.window(),
            l: None,
            b,
            alpha: None,
        },
    ))
}

/// Infinite-corpus limit of the empirical matrix, computed from a joint
/// window table: `log(joint_ij / (2 b gamma marginal_i marginal_j))` where
/// the joint is positive, masked zero elsewhere.
pub fn limit_m(table: &JointWindowTable, b: f64) -> Result<MMatrix> {
    if b <= 0.0 {
        return Err(Error::OutOfRange(format!("b = {b} must be > 0")));
    }
    let n = table.joint.nrows();
    let (t_l, t_u) = table.window;
    let g = gamma(table.l, t_l, t_u);
    let mut entries = DMatrix::zeros(n, n);
    let mut mask = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            let num = table.joint[(i, j)];
            if num > 0.0 {
                let denom = 2.0 * b * g * table.marginal[i] * table.marginal[j];
                entries[(i, j)] = (num / denom).ln();
            } else {
                mask[i * n + j] = true;
            }
        }
    }
    Ok(MMatrix::new(
        entries,
        mask,
        MMeta {
            kernel: Some(table.kernel),
            window: table.window,
            l: Some(table.l),
            b,
            alpha: Some(table.alpha),
        },
    ))
}

/// Noiseless M-matrix of a block model: the limit matrix of the walk on the
/// complete graph weighted by `P` (diagonal included). Never masked, since
/// every entry of `P` is positive.
#[allow(clippy::too_many_arguments)]
pub fn noiseless_m0(
    model: &BlockModel,
    assignment: &CommunityAssignment,
    kernel: KernelKind,
    t_l: usize,
    t_u: usize,
    l: usize,
    b: f64,
    alpha: f64,
) -> Result<MMatrix> {
    if model.rho() <= 0.0 {
        return Err(Error::OutOfRange(
            "noiseless matrix needs rho > 0".into(),
        ));
    }
    let p = edge_probability_matrix(model, assignment)?;
    let table = match kernel {
        KernelKind::DeepWalk => deepwalk_joint(p.entries(), t_l, t_u, l)?,
        KernelKind::Node2Vec => node2vec_joint(p.entries(), t_l, t_u, l, alpha)?,
    };
    limit_m(&table, b)
}

fn log_sigmoid(x: f64) -> f64 {
    // log(1 / (1 + e^{-x})) computed without overflow
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// SGNS objective
/// `sum_ij C_ij (log s(<f_i, f'_j>) + b E_{l ~ P_C} log s(-<f_i, f'_l>))`
/// with `P_C` the column-sum distribution of `C`.
pub fn sgns_objective(
    c: &CooccurrenceMatrix,
    f: &DMatrix<f64>,
    f_prime: &DMatrix<f64>,
    b: f64,
) -> Result<f64> {
    if b <= 0.0 {
        return Err(Error::OutOfRange(format!("b = {b} must be > 0")));
    }
    let n = c.n();
    if f.nrows() != n || f_prime.nrows() != n || f.ncols() != f_prime.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "embeddings must be {n}xd, got {}x{} and {}x{}",
            f.nrows(),
            f.ncols(),
            f_prime.nrows(),
            f_prime.ncols()
        )));
    }
    if c.total() == 0 {
        return Err(Error::EmptyCooccurrence);
    }
    let total = c.total() as f64;
    let inner = f * f_prime.transpose();
    let mut objective = 0.0;
    for i in 0..n {
        // E_{l ~ P_C} log s(-<f_i, f'_l>), shared by every j in row i
        let mut negative = 0.0;
        for l_idx in 0..n {
            let p_l = c.row_sum(l_idx) as f64 / total;
            if p_l > 0.0 {
                negative += p_l * log_sigmoid(-inner[(i, l_idx)]);
            }
        }
        for j in 0..n {
            let count = c.entry(i, j);
            if count > 0 {
                objective += count as f64 * (log_sigmoid(inner[(i, j)]) + b * negative);
            }
        }
    }
    Ok(objective)
}

/// Frobenius distance; masked entries participate as their stored zeros.
pub fn frobenius_distance(m1: &MMatrix, m2: &MMatrix) -> Result<f64> {
    if m1.n() != m2.n() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            m1.n(),
            m1.n(),
            m2.n(),
            m2.n()
        )));
    }
    let mut sum = 0.0;
    for (a, b) in m1.entries.iter().zip(m2.entries.iter()) {
        let d = a - b;
        sum += d * d;
    }
    Ok(sum.sqrt())
}

//! Spectral community recovery: top-K eigendecomposition, k-means++ with
//! restarts on the eigenvector rows, and permutation-minimal error scoring.

use crate::rng::stream_rng;
use crate::sbm::CommunityAssignment;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;

const KMEANS_STREAM_BASE: u64 = 2 << 56;

/// Top-K eigenpairs of a symmetric matrix, ordered by descending absolute
/// eigenvalue, with a deterministic sign convention on the vectors.
#[derive(Debug, Clone)]
pub struct SpectralEmbedding {
    eigenvalues: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl SpectralEmbedding {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// n x K matrix of orthonormal eigenvector columns.
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// Smallest |eigenvalue| among the selected K.
    pub fn min_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|l| l.abs())
            .fold(f64::MAX, f64::min)
    }
}

/// Top-K eigenpairs by absolute eigenvalue; ties break by signed value
/// descending, then original index. Each vector is flipped so its first
/// nonzero coordinate is positive.
pub fn top_k_eigen(m: &DMatrix<f64>, k: usize) -> Result<SpectralEmbedding> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix must be square, got {}x{}",
            n,
            m.ncols()
        )));
    }
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("K = {k} must be in [1, {n}]")));
    }
    let scale = m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())).max(1e-300);
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-10 * scale {
                return Err(Error::NotSymmetric(format!(
                    "entry ({i}, {j}) differs from its transpose beyond tolerance"
                )));
            }
        }
    }
    // exact symmetrization for solver stability
    let sym = (m + m.transpose()).scale(0.5);
    let frob = sym.iter().map(|v| v * v).sum::<f64>().sqrt();
    let eig = sym.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        let (la, lb) = (eig.eigenvalues[a], eig.eigenvalues[b]);
        lb.abs()
            .partial_cmp(&la.abs())
            .unwrap()
            .then(lb.partial_cmp(&la).unwrap())
            .then(a.cmp(&b))
    });
    let mut eigenvalues = Vec::with_capacity(k);
    let mut vectors = DMatrix::zeros(n, k);
    for (col, &idx) in order.iter().take(k).enumerate() {
        let lambda = eig.eigenvalues[idx];
        let mut v: DVector<f64> = eig.eigenvectors.column(idx).into();
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                v.neg_mut();
            }
        }
        // residual check: the pair must actually solve the eigenproblem
        let residual = (&sym * &v - v.scale(lambda)).norm();
        if residual > 1e-6 * frob.max(1e-300) {
            return Err(Error::EigenFailure(format!(
                "residual {residual:.3e} for eigenvalue {lambda:.6e}"
            )));
        }
        eigenvalues.push(lambda);
        vectors.set_column(col, &v);
    }
    // orthonormality of the selected block
    for a in 0..k {
        for b in a..k {
            let dot = vectors.column(a).dot(&vectors.column(b));
            let expect = if a == b { 1.0 } else { 0.0 };
            if (dot - expect).abs() > 1e-8 {
                return Err(Error::EigenFailure(format!(
                    "columns {a} and {b} not orthonormal: dot = {dot:.3e}"
                )));
            }
        }
    }
    Ok(SpectralEmbedding {
        eigenvalues,
        vectors,
    })
}

/// Result of k-means on embedding rows.
#[derive(Debug, Clone)]
pub struct ClusterResult {
    labels: Vec<usize>,
    membership: DMatrix<f64>,
    centers: DMatrix<f64>,
    objective: f64,
    repair_events: usize,
    pub error_rate: Option<f64>,
}

impl ClusterResult {
    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// n x K binary membership matrix.
    pub fn membership(&self) -> &DMatrix<f64> {
        &self.membership
    }

    /// K x d matrix of cluster centers.
    pub fn centers(&self) -> &DMatrix<f64> {
        &self.centers
    }

    /// Final k-means cost, sum of squared distances to assigned centers.
    pub fn objective(&self) -> f64 {
        self.objective
    }

    /// Number of empty-cluster repairs across the winning restart.
    pub fn repair_events(&self) -> usize {
        self.repair_events
    }
}

fn row_sq_dist(a: &DMatrix<f64>, i: usize, b: &DMatrix<f64>, j: usize) -> f64 {
    let mut s = 0.0;
    for c in 0..a.ncols() {
        let d = a[(i, c)] - b[(j, c)];
        s += d * d;
    }
    s
}

struct LloydRun {
    labels: Vec<usize>,
    centers: DMatrix<f64>,
    objective: f64,
    repair_events: usize,
}

fn lloyd_once(
    rows: &DMatrix<f64>,
    k: usize,
    max_iters: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> LloydRun {
    let n = rows.nrows();
    let d = rows.ncols();
    // k-means++ seeding
    let mut centers = DMatrix::zeros(k, d);
    let first = rng.random_range(0..n);
    centers.row_mut(0).copy_from(&rows.row(first));
    let mut best_dist = vec![f64::MAX; n];
    for c in 1..k {
        let mut sum = 0.0;
        for i in 0..n {
            let dist = row_sq_dist(rows, i, &centers, c - 1);
            if dist < best_dist[i] {
                best_dist[i] = dist;
            }
            sum += best_dist[i];
        }
        let chosen = if sum > 0.0 {
            let x = rng.random::<f64>() * sum;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (i, &w) in best_dist.iter().enumerate() {
                acc += w;
                if x < acc {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centers.row_mut(c).copy_from(&rows.row(chosen));
    }

    let mut labels = vec![0usize; n];
    let mut repair_events = 0usize;
    let mut prev_objective = f64::MAX;
    for _ in 0..max_iters {
        // assignment
        let mut changed = false;
        for i in 0..n {
            let mut best = 0;
            let mut best_d = row_sq_dist(rows, i, &centers, 0);
            for c in 1..k {
                let dist = row_sq_dist(rows, i, &centers, c);
                if dist < best_d {
                    best_d = dist;
                    best = c;
                }
            }
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        // empty-cluster repair: move the center onto the point farthest from
        // its assigned center
        let mut counts = vec![0usize; k];
        for &l in &labels {
            counts[l] += 1;
        }
        for c in 0..k {
            if counts[c] == 0 {
                let far = (0..n)
                    .max_by(|&a, &b| {
                        row_sq_dist(rows, a, &centers, labels[a])
                            .partial_cmp(&row_sq_dist(rows, b, &centers, labels[b]))
                            .unwrap()
                            .then(b.cmp(&a))
                    })
                    .unwrap();
                counts[labels[far]] -= 1;
                labels[far] = c;
                counts[c] = 1;
                centers.row_mut(c).copy_from(&rows.row(far));
                repair_events += 1;
                changed = true;
            }
        }
        // update
        let mut sums = DMatrix::<f64>::zeros(k, d);
        for i in 0..n {
            let mut row = sums.row_mut(labels[i]);
            row += rows.row(i);
        }
        for c in 0..k {
            if counts[c] > 0 {
                let mut row = sums.row_mut(c);
                row /= counts[c] as f64;
            } else {
                sums.row_mut(c).copy_from(&centers.row(c));
            }
        }
        centers = sums;
        let objective: f64 = (0..n)
            .map(|i| row_sq_dist(rows, i, &centers, labels[i]))
            .sum();
        assert!(
            objective <= prev_objective * (1.0 + 1e-12) + 1e-12,
            "k-means objective increased: {prev_objective} -> {objective}"
        );
        prev_objective = objective;
        if !changed {
            break;
        }
    }
    LloydRun {
        labels,
        centers,
        objective: prev_objective,
        repair_events,
    }
}

/// Best-of-restarts Lloyd's algorithm with k-means++ seeding.
///
/// Restarts run on independent RNG streams and the winner is the lowest
/// objective (ties to the lower restart index), so the result is a pure
/// function of `(rows, k, restarts, max_iters, seed)`.
pub fn kmeans_cluster(
    rows: &DMatrix<f64>,
    k: usize,
    restarts: usize,
    max_iters: usize,
    seed: u64,
) -> Result<ClusterResult> {
    let n = rows.nrows();
    if k == 0 || k > n {
        return Err(Error::OutOfRange(format!("K = {k} must be in [1, {n}]")));
    }
    if restarts == 0 {
        return Err(Error::OutOfRange("restarts must be >= 1".into()));
    }
    let best = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, KMEANS_STREAM_BASE | r as u64);
            (r, lloyd_once(rows, k, max_iters, &mut rng))
        })
        .min_by(|(ra, a), (rb, b)| {
            a.objective
                .partial_cmp(&b.objective)
                .unwrap()
                .then(ra.cmp(rb))
        })
        .map(|(_, run)| run)
        .expect("at least one restart");

    let mut membership = DMatrix::zeros(n, k);
    for (i, &l) in best.labels.iter().enumerate() {
        membership[(i, l)] = 1.0;
    }
    Ok(ClusterResult {
        labels: best.labels,
        membership,
        centers: best.centers,
        objective: best.objective,
        repair_events: best.repair_events,
        error_rate: None,
    })
}

/// Maximum-weight assignment on a square weight matrix (Hungarian method,
/// O(K^3)); returns the column matched to each row.
fn max_weight_assignment(weights: &[Vec<u64>]) -> Vec<usize> {
    let k = weights.len();
    // convert to min-cost with potentials; classic shortest augmenting path
    let max_w = weights
        .iter()
        .flat_map(|r| r.iter())
        .copied()
        .max()
        .unwrap_or(0) as i64;
    let cost = |i: usize, j: usize| max_w - weights[i][j] as i64;
    const INF: i64 = i64::MAX / 4;
    let mut u = vec![0i64; k + 1];
    let mut v = vec![0i64; k + 1];
    let mut match_col = vec![k; k + 1]; // row matched to column j
    for row in 0..k {
        let mut min_v = vec![INF; k + 1];
        let mut used = vec![false; k + 1];
        let mut way = vec![k; k + 1];
        let mut j0 = k;
        match_col[k] = row;
        loop {
            used[j0] = true;
            let i0 = match_col[j0];
            let mut delta = INF;
            let mut j1 = k;
            for j in 0..k {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < min_v[j] {
                        min_v[j] = cur;
                        way[j] = j0;
                    }
                    if min_v[j] < delta {
                        delta = min_v[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[match_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    min_v[j] -= delta;
                }
            }
            j0 = j1;
            if match_col[j0] == k {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            match_col[j0] = match_col[j1];
            j0 = j1;
            if j0 == k {
                break;
            }
        }
    }
    let mut row_to_col = vec![0usize; k];
    for j in 0..k {
        if match_col[j] < k {
            row_to_col[match_col[j]] = j;
        }
    }
    row_to_col
}

/// Proportion of misclassified nodes, minimized over permutations of the
/// predicted labels. Computed by maximum-weight assignment on the K x K
/// confusion matrix.
pub fn misclassification_rate(predicted: &[usize], truth: &[usize], k: usize) -> Result<f64> {
    if predicted.len() != truth.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} predictions vs {} true labels",
            predicted.len(),
            truth.len()
        )));
    }
    let n = predicted.len();
    if n == 0 {
        return Ok(0.0);
    }
    let mut confusion = vec![vec![0u64; k]; k];
    for (&p, &t) in predicted.iter().zip(truth) {
        if p >= k || t >= k {
            return Err(Error::OutOfRange(format!("label out of range for K = {k}")));
        }
        confusion[p][t] += 1;
    }
    let assignment = max_weight_assignment(&confusion);
    let matched: u64 = (0..k).map(|p| confusion[p][assignment[p]]).sum();
    Ok(1.0 - matched as f64 / n as f64)
}

/// Row geometry of the noiseless eigenvector matrix.
#[derive(Debug, Clone)]
pub struct GeometryReport {
    /// Max distance between rows of V0 within the same block.
    pub within_spread: f64,
    /// Per block pair (r, s) with r < s: max over node pairs of
    /// |observed row distance - sqrt(1/n_r + 1/n_s)|.
    pub cross_deviation: Vec<(usize, usize, f64)>,
}

impl GeometryReport {
    pub fn max_cross_deviation(&self) -> f64 {
        self.cross_deviation
            .iter()
            .map(|&(_, _, d)| d)
            .fold(0.0, f64::max)
    }
}

/// Measures how close the top-K eigenvector rows of a noiseless matrix come
/// to the ideal block geometry: identical rows within blocks, distance
/// sqrt(1/n_r + 1/n_s) across blocks.
pub fn eigen_geometry_report(
    m0: &crate::mmatrix::MMatrix,
    assignment: &CommunityAssignment,
) -> Result<GeometryReport> {
    let k = assignment.k();
    let embedding = top_k_eigen(m0.entries(), k)?;
    let v0 = embedding.vectors();
    let n = assignment.n();
    let labels = assignment.labels();
    let mut sizes = vec![0usize; k];
    for &g in labels {
        sizes[g] += 1;
    }
    let mut within: f64 = 0.0;
    let mut cross = vec![vec![0.0_f64; k]; k];
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = row_sq_dist(v0, i, v0, j).sqrt();
            let (gi, gj) = (labels[i], labels[j]);
            if gi == gj {
                within = within.max(dist);
            } else {
                let expected = (1.0 / sizes[gi] as f64 + 1.0 / sizes[gj] as f64).sqrt();
                let dev = (dist - expected).abs();
                let (a, b) = (gi.min(gj), gi.max(gj));
                cross[a][b] = cross[a][b].max(dev);
            }
        }
    }
    let mut cross_deviation = Vec::new();
    for r in 0..k {
        for s in (r + 1)..k {
            cross_deviation.push((r, s, cross[r][s]));
        }
    }
    Ok(GeometryReport {
        within_spread: within,
        cross_deviation,
    })
}

/// Smallest Frobenius distance `min_O ||V - V0 O||_F` over orthonormal `O`,
/// from the orthogonal Procrustes solution.
pub fn procrustes_distance(v: &DMatrix<f64>, v0: &DMatrix<f64>) -> Result<f64> {
    if v.shape() != v0.shape() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            v.shape(),
            v0.shape()
        )));
    }
    let product = v0.transpose() * v;
    let svd = product
        .svd_unordered(true, true);
    let o = svd.u.as_ref().unwrap() * svd.v_t.as_ref().unwrap();
    Ok((v - v0 * o).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mmatrix::noiseless_m0;
    use crate::sbm::build_block_model;
    use crate::walks::KernelKind;
    use approx::assert_relative_eq;

    #[test]
    fn identity_has_unit_eigenvalue() {
        let m = DMatrix::identity(2, 2);
        let e = top_k_eigen(&m, 1).unwrap();
        assert_relative_eq!(e.eigenvalues()[0], 1.0);
    }

    #[test]
    fn selection_is_by_absolute_value() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -5.0]));
        let e = top_k_eigen(&m, 1).unwrap();
        assert_relative_eq!(e.eigenvalues()[0], -5.0);
    }

    #[test]
    fn swap_matrix_eigenpairs() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let e = top_k_eigen(&m, 2).unwrap();
        let mut vals = e.eigenvalues().to_vec();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert_relative_eq!(vals[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(vals[1], -1.0, epsilon = 1e-12);
        let s = 1.0 / 2.0_f64.sqrt();
        // sign convention: first nonzero coordinate positive
        for col in 0..2 {
            let v = e.vectors().column(col);
            assert!(v[0] > 0.0);
            assert_relative_eq!(v[0].abs(), s, epsilon = 1e-12);
            assert_relative_eq!(v[1].abs(), s, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_asymmetric_and_oversized_k() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.0]);
        assert!(matches!(top_k_eigen(&m, 1), Err(Error::NotSymmetric(_))));
        let sym = DMatrix::identity(2, 2);
        assert!(top_k_eigen(&sym, 3).is_err());
    }

    #[test]
    fn kmeans_on_two_point_masses() {
        let rows = DMatrix::from_row_slice(6, 2, &[
            1.0, 0.0, 1.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 1.0, 0.0, 1.0,
        ]);
        let res = kmeans_cluster(&rows, 2, 4, 100, 7).unwrap();
        assert!(res.objective() <= 1e-18);
        assert_eq!(res.labels()[0], res.labels()[1]);
        assert_eq!(res.labels()[3], res.labels()[4]);
        assert_ne!(res.labels()[0], res.labels()[3]);
    }

    #[test]
    fn kmeans_identical_rows_repairs_empty_cluster() {
        let rows = DMatrix::from_element(5, 2, 0.3);
        let res = kmeans_cluster(&rows, 2, 1, 50, 3).unwrap();
        assert!(res.objective() <= 1e-18);
        assert!(res.repair_events() >= 1);
        // both clusters exist
        let mut counts = [0usize; 2];
        for &l in res.labels() {
            counts[l] += 1;
        }
        assert!(counts[0] >= 1 && counts[1] >= 1);
    }

    #[test]
    fn kmeans_objective_recomputes_from_parts() {
        let mut rng = crate::stream_rng(5, 0);
        use rand::Rng;
        let rows = DMatrix::from_fn(40, 3, |_, _| rng.random::<f64>());
        let res = kmeans_cluster(&rows, 4, 8, 100, 11).unwrap();
        let recomputed = (&res.membership().clone() * res.centers() - &rows).norm_squared();
        assert!((recomputed - res.objective()).abs() <= 1e-9);
    }

    #[test]
    fn kmeans_recovers_exact_block_embedding() {
        let model = build_block_model(
            2,
            &[6, 10],
            DMatrix::from_row_slice(2, 2, &[0.9, 0.2, 0.2, 0.7]),
            0.9,
        )
        .unwrap();
        let assignment = model.grouped_assignment();
        let m0 = noiseless_m0(&model, &assignment, KernelKind::DeepWalk, 2, 2, 10, 1.0, 1.0)
            .unwrap();
        let emb = top_k_eigen(m0.entries(), 2).unwrap();
        let res = kmeans_cluster(emb.vectors(), 2, 8, 100, 1).unwrap();
        assert!(res.objective() <= 1e-16);
        let err = misclassification_rate(res.labels(), assignment.labels(), 2).unwrap();
        assert_eq!(err, 0.0);
    }

    #[test]
    fn kmeans_is_deterministic_across_thread_counts() {
        let mut rng = crate::stream_rng(17, 0);
        use rand::Rng;
        let rows = DMatrix::from_fn(60, 2, |_, _| rng.random::<f64>());
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| kmeans_cluster(&rows, 3, 16, 100, 9).unwrap())
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.labels(), b.labels());
        assert_eq!(a.objective(), b.objective());
    }

    #[test]
    fn misclassification_basic_cases() {
        assert_eq!(
            misclassification_rate(&[0, 0, 1, 1], &[0, 0, 1, 1], 2).unwrap(),
            0.0
        );
        assert_eq!(
            misclassification_rate(&[1, 1, 0, 0], &[0, 0, 1, 1], 2).unwrap(),
            0.0
        );
        assert_relative_eq!(
            misclassification_rate(&[0, 1, 1, 1], &[0, 0, 1, 1], 2).unwrap(),
            0.25
        );
        assert!(misclassification_rate(&[0, 1], &[0], 2).is_err());
    }

    #[test]
    fn misclassification_matches_enumeration() {
        // Hungarian result equals brute-force permutation minimum
        fn brute(pred: &[usize], truth: &[usize], k: usize) -> f64 {
            fn perms(k: usize) -> Vec<Vec<usize>> {
                if k == 1 {
                    return vec![vec![0]];
                }
                let mut out = Vec::new();
                for p in perms(k - 1) {
                    for pos in 0..=p.len() {
                        let mut q = p.clone();
                        q.insert(pos, k - 1);
                        out.push(q);
                    }
                }
                out
            }
            let n = pred.len() as f64;
            perms(k)
                .into_iter()
                .map(|perm| {
                    let mism = pred
                        .iter()
                        .zip(truth)
                        .filter(|(&p, &t)| perm[p] != t)
                        .count();
                    mism as f64 / n
                })
                .fold(f64::MAX, f64::min)
        }
        let mut rng = crate::stream_rng(23, 0);
        use rand::Rng;
        for k in 2..=4usize {
            for _ in 0..25 {
                let n = 12;
                let pred: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
                let truth: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
                let fast = misclassification_rate(&pred, &truth, k).unwrap();
                assert_relative_eq!(fast, brute(&pred, &truth, k), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn geometry_of_deepwalk_m0() {
        let model = build_block_model(
            2,
            &[50, 50],
            DMatrix::from_row_slice(2, 2, &[0.8, 0.3, 0.3, 0.8]),
            0.9,
        )
        .unwrap();
        let assignment = model.grouped_assignment();
        let m0 = noiseless_m0(&model, &assignment, KernelKind::DeepWalk, 2, 2, 10, 1.0, 1.0)
            .unwrap();
        let report = eigen_geometry_report(&m0, &assignment).unwrap();
        assert!(report.within_spread <= 1e-8, "{}", report.within_spread);
        assert!(report.max_cross_deviation() <= 1e-8);
        // balanced two-block: cross distance is sqrt(2/50) = 0.2, so the
        // deviation being small pins the observed distance near 0.2
    }

    #[test]
    fn procrustes_distance_is_zero_under_rotation() {
        let mut rng = crate::stream_rng(31, 0);
        use rand::Rng;
        let v0 = DMatrix::from_fn(10, 2, |_, _| rng.random::<f64>());
        let theta: f64 = 0.7;
        let o = DMatrix::from_row_slice(2, 2, &[
            theta.cos(),
            -theta.sin(),
            theta.sin(),
            theta.cos(),
        ]);
        let v = &v0 * &o;
        assert!(procrustes_distance(&v, &v0).unwrap() <= 1e-10);
    }

    #[test]
    fn davis_kahan_bound_on_synthetic_perturbation() {
        let model = build_block_model(
            2,
            &[20, 20],
            DMatrix::from_row_slice(2, 2, &[0.9, 0.2, 0.2, 0.8]),
            0.9,
        )
        .unwrap();
        let assignment = model.grouped_assignment();
        let m0 = noiseless_m0(&model, &assignment, KernelKind::DeepWalk, 2, 2, 10, 1.0, 1.0)
            .unwrap();
        let e0 = top_k_eigen(m0.entries(), 2).unwrap();
        let min_lambda = e0.min_abs_eigenvalue();
        let mut rng = crate::stream_rng(41, 0);
        use rand::Rng;
        for scale in [1e-3, 1e-2, 1e-1] {
            let mut noise = DMatrix::from_fn(40, 40, |_, _| rng.random::<f64>() - 0.5);
            noise = (&noise + noise.transpose()).scale(0.5 * scale);
            let perturbed = m0.entries() + &noise;
            let e = top_k_eigen(&perturbed, 2).unwrap();
            let dist = procrustes_distance(e.vectors(), e0.vectors()).unwrap();
            let bound = (8.0 * 2.0_f64).sqrt() * noise.norm() / min_lambda;
            assert!(
                dist <= bound,
                "Davis-Kahan violated: {dist} > {bound} at scale {scale}"
            );
        }
    }
}

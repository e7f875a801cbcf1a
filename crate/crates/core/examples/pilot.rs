//! Scratch calibration runs; not part of the shipped artifact.

use blockwalk::mmatrix::{deepwalk_joint, frobenius_distance, limit_m, node2vec_joint, noiseless_m0};
use blockwalk::oracle::{expected_y_b_alpha, u_b_l_b, PathComposition};
use blockwalk::sbm::{build_block_model, edge_probability_matrix, sample_graph};
use blockwalk::spectral::{eigen_geometry_report, kmeans_cluster, misclassification_rate, top_k_eigen};
use blockwalk::walks::KernelKind;
use nalgebra::DMatrix;
use std::time::Instant;

fn b0_sym(k: usize, vals: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(k, k, vals)
}

fn main() {
    let section = std::env::args().nth(1).unwrap_or_else(|| "all".into());

    if section == "all" || section == "n2v-exact" {
        println!("== node2vec M0 exactness at odd t ==");
        for n in [60usize, 120, 240] {
            let model = build_block_model(2, &[n / 2, n / 2], b0_sym(2, &[0.9, 0.3, 0.3, 0.9]), 0.3).unwrap();
            let asn = model.grouped_assignment();
            let alpha = 1.0 / n as f64;
            let t0 = Instant::now();
            let m0 = noiseless_m0(&model, &asn, KernelKind::Node2Vec, 3, 3, 10, 1.0, alpha).unwrap();
            // within-block-pair entry spread
            let mut spread = 0.0_f64;
            let mut diag_dev = 0.0_f64;
            let off_ref = m0.entries()[(0, 1)];
            for i in 0..n {
                for j in 0..n {
                    let key = (asn.block_of(i), asn.block_of(j));
                    if i != j && key == (0, 0) {
                        spread = spread.max((m0.entries()[(i, j)] - off_ref).abs());
                    }
                    if i == j && key == (0, 0) {
                        diag_dev = diag_dev.max((m0.entries()[(i, i)] - off_ref).abs());
                    }
                }
            }
            let report = eigen_geometry_report(&m0, &asn).unwrap();
            println!(
                "n={n}: entry_spread={spread:.3e} diag_dev={diag_dev:.3e} v0_within={:.3e} v0_crossdev={:.3e}  ({:?})",
                report.within_spread,
                report.max_cross_deviation(),
                t0.elapsed()
            );
        }
        println!("== node2vec M0 with even t in window (t_l=3,t_u=4) ==");
        for n in [60usize, 120, 240] {
            let model = build_block_model(2, &[n / 2, n / 2], b0_sym(2, &[0.9, 0.3, 0.3, 0.9]), 0.3).unwrap();
            let asn = model.grouped_assignment();
            let alpha = 1.0 / n as f64;
            let m0 = noiseless_m0(&model, &asn, KernelKind::Node2Vec, 3, 4, 10, 1.0, alpha).unwrap();
            let off_ref = m0.entries()[(0, 1)];
            let mut diag_dev = 0.0_f64;
            for i in 0..n / 2 {
                diag_dev = diag_dev.max((m0.entries()[(i, i)] - off_ref).abs());
            }
            let report = eigen_geometry_report(&m0, &asn).unwrap();
            println!(
                "n={n}: diag_dev={diag_dev:.3e} v0_within={:.3e} v0_crossdev={:.3e}",
                report.within_spread,
                report.max_cross_deviation()
            );
        }
    }

    if section == "all" || section == "failure" {
        println!("== failure regime pilot: n=400, rho=n^-0.9, t=3 ==");
        let n = 400usize;
        let rho = (n as f64).powf(-0.9);
        println!("rho={rho:.5} n*rho={:.3} n^2 rho^3={:.4}", n as f64 * rho, (n as f64).powi(2) * rho.powi(3));
        let model = build_block_model(2, &[n / 2, n / 2], b0_sym(2, &[1.0, 0.15, 0.15, 1.0]), rho).unwrap();
        let asn = model.grouped_assignment();
        for kernel in [KernelKind::DeepWalk, KernelKind::Node2Vec] {
            let alpha = match kernel {
                KernelKind::DeepWalk => 1.0,
                KernelKind::Node2Vec => 1.0 / n as f64,
            };
            let m0 = noiseless_m0(&model, &asn, kernel, 3, 3, 10, 1.0, alpha).unwrap();
            for seed in 0..5u64 {
                let g = sample_graph(&model, &asn, seed).unwrap();
                let a = g.adjacency_matrix();
                let table = match kernel {
                    KernelKind::DeepWalk => deepwalk_joint(&a, 3, 3, 10),
                    KernelKind::Node2Vec => node2vec_joint(&a, 3, 3, 10, alpha),
                };
                match table {
                    Ok(tb) => {
                        let m = limit_m(&tb, 1.0).unwrap();
                        let frob = frobenius_distance(&m, &m0).unwrap();
                        println!(
                            "{kernel} seed={seed}: frob/n={:.3} masked/n^2={:.3}",
                            frob / n as f64,
                            m.masked_count() as f64 / (n * n) as f64
                        );
                    }
                    Err(e) => println!("{kernel} seed={seed}: joint error {e}"),
                }
            }
        }
    }

    if section == "all" || section == "recovery" {
        println!("== recovery pilot: n=500, rho=0.3 ==");
        let n = 500usize;
        let model = build_block_model(2, &[250, 250], b0_sym(2, &[0.9, 0.3, 0.3, 0.9]), 0.3).unwrap();
        let asn = model.grouped_assignment();
        for (kernel, t, alpha) in [
            (KernelKind::DeepWalk, 2usize, 1.0),
            (KernelKind::Node2Vec, 3, 1.0 / n as f64),
        ] {
            let t_all = Instant::now();
            let m0 = noiseless_m0(&model, &asn, kernel, t, t, 10, 1.0, alpha).unwrap();
            println!("  m0 built in {:?}", t_all.elapsed());
            for seed in 0..3u64 {
                let t_run = Instant::now();
                let g = sample_graph(&model, &asn, seed).unwrap();
                let a = g.adjacency_matrix();
                let table = match kernel {
                    KernelKind::DeepWalk => deepwalk_joint(&a, t, t, 10).unwrap(),
                    KernelKind::Node2Vec => node2vec_joint(&a, t, t, 10, alpha).unwrap(),
                };
                let m = limit_m(&table, 1.0).unwrap();
                let frob = frobenius_distance(&m, &m0).unwrap();
                let emb = top_k_eigen(m.entries(), 2).unwrap();
                let clus = kmeans_cluster(emb.vectors(), 2, 32, 100, seed).unwrap();
                let err = misclassification_rate(clus.labels(), asn.labels(), 2).unwrap();
                println!(
                    "{kernel} t={t} seed={seed}: err={err:.4} frob/n={:.3} masked={} in {:?}",
                    frob / n as f64,
                    m.masked_count(),
                    t_run.elapsed()
                );
            }
        }
    }

    if section == "all" || section == "backtrack" {
        println!("== backtracking advantage pilot: n=600, rho s.t. n^2 rho^3 ~ 50 ==");
        let n = 600usize;
        let rho = (50.0 / (n as f64).powi(2)).powf(1.0 / 3.0);
        println!("rho={rho:.5} n*rho^2={:.3} n^2rho^3={:.1} n*rho={:.1}",
            n as f64 * rho * rho, (n as f64).powi(2) * rho.powi(3), n as f64 * rho);
        let model = build_block_model(2, &[300, 300], b0_sym(2, &[0.9, 0.3, 0.3, 0.9]), rho).unwrap();
        let asn = model.grouped_assignment();
        for (kernel, alpha) in [
            (KernelKind::DeepWalk, 1.0),
            (KernelKind::Node2Vec, 1.0 / n as f64),
        ] {
            let m0 = noiseless_m0(&model, &asn, kernel, 3, 3, 10, 1.0, alpha).unwrap();
            let mut errs = Vec::new();
            for seed in 0..6u64 {
                let g = sample_graph(&model, &asn, seed).unwrap();
                let a = g.adjacency_matrix();
                let table = match kernel {
                    KernelKind::DeepWalk => deepwalk_joint(&a, 3, 3, 10).unwrap(),
                    KernelKind::Node2Vec => node2vec_joint(&a, 3, 3, 10, alpha).unwrap(),
                };
                let m = limit_m(&table, 1.0).unwrap();
                let emb = top_k_eigen(m.entries(), 2).unwrap();
                let clus = kmeans_cluster(emb.vectors(), 2, 32, 100, seed).unwrap();
                let err = misclassification_rate(clus.labels(), asn.labels(), 2).unwrap();
                let frob = frobenius_distance(&m, &m0).unwrap();
                errs.push(err);
                println!("{kernel} seed={seed}: err={err:.4} frob/n={:.3}", frob / n as f64);
            }
            errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            println!("{kernel}: median err = {:.4}", errs[errs.len() / 2]);
        }
    }

    if section == "all" || section == "sandwich" {
        println!("== k=1 sandwich candidate models ==");
        // candidate: K=2, sizes [4,4], dense-ish B
        for (rho, b) in [
            (1.0, b0_sym(2, &[0.95, 0.85, 0.85, 0.9])),
            (1.0, b0_sym(2, &[0.9, 0.75, 0.75, 0.85])),
            (0.9, b0_sym(2, &[0.9, 0.8, 0.8, 0.9])),
        ] {
            let model = build_block_model(2, &[4, 4], b.clone(), rho).unwrap();
            let asn = model.grouped_assignment();
            let labels = asn.labels().to_vec();
            let p = edge_probability_matrix(&model, &asn).unwrap();
            let mut worst: f64 = 0.0;
            let mut violations = 0usize;
            let mut checked = 0usize;
            for t in [2usize, 3] {
                let endpoint_pairs: Vec<(u32, u32)> = if t == 2 {
                    vec![(0, 1), (0, 4), (4, 5)]
                } else {
                    vec![(0, 1), (0, 4), (4, 5), (0, 0), (4, 4)]
                };
                for &(i, j) in &endpoint_pairs {
                    let interior = t - 1;
                    for mask in 0..(2usize.pow(interior as u32)) {
                        let mut blocks = vec![labels[i as usize]];
                        for bit in 0..interior {
                            blocks.push((mask >> bit) & 1);
                        }
                        blocks.push(labels[j as usize]);
                        let comp = PathComposition::new(blocks, (i, j), &labels).unwrap();
                        for alpha in [1.0, 0.5] {
                            let e = expected_y_b_alpha(&p.entries().clone(), &labels, &comp, alpha, true).unwrap();
                            let (u, lo) = u_b_l_b(&model, &comp, 1);
                            checked += 1;
                            if !(lo <= e + 1e-12 && e <= u + 1e-12) {
                                violations += 1;
                                let margin = (e - u).max(lo - e);
                                if margin > worst {
                                    worst = margin;
                                }
                                if violations < 8 {
                                    println!("  VIOLATION t={t} ij=({i},{j}) b={:?} alpha={alpha}: L={lo:.4} E={e:.4} U={u:.4}", comp.blocks());
                                }
                            }
                        }
                    }
                }
            }
            println!("model rho={rho}: {violations}/{checked} violations, worst margin {worst:.4}");
        }
    }
}

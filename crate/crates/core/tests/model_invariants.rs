//! Structural guarantees of the message-passing stack: relabeling
//! nodes permutes the output rows and changes nothing else, the
//! symmetric normalized operator is a contraction with top eigenvalue
//! exactly 1, and the mean aggregator is row-stochastic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use edge2node_core::{
    build_graph, build_mean_adjacency, build_normalized_adjacency, gnp_graph, ArchKind,
    CsrMatrix, Mat, ModelConfig, ModelParams,
};
use edge2node_testkit::{permute_graph, random_permutation};

const EQUIVARIANCE_TOL: f64 = 1e-10;

fn assert_equivariant(arch: ArchKind, num_layers: usize, classifier: bool, seed: u64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let n = rng.gen_range(4..=20);
    let g = gnp_graph(n, 0.3, seed);

    let mut cfg = ModelConfig::new(arch, seed);
    cfg.hidden = 8;
    cfg.num_layers = num_layers;
    let params = if classifier {
        ModelParams::<f64>::new_classifier(&cfg, n).unwrap()
    } else {
        ModelParams::<f64>::new_embedder(&cfg, n).unwrap()
    };

    let out = params
        .eval_output(&params.build_adjacency(&g), g.features(), &[])
        .unwrap();

    let perm = random_permutation(n, &mut rng);
    let pg = permute_graph(&g, &perm);
    let pout = params
        .eval_output(&params.build_adjacency(&pg), pg.features(), &[])
        .unwrap();

    assert_eq!(out.shape(), pout.shape());
    for u in 0..n {
        for c in 0..out.cols() {
            let diff = (out.row(u)[c] - pout.row(perm[u])[c]).abs();
            assert!(
                diff < EQUIVARIANCE_TOL,
                "arch {arch:?} node {u} col {c}: |{} - {}| = {diff}",
                out.row(u)[c],
                pout.row(perm[u])[c],
            );
        }
    }
}

#[test]
fn forward_is_permutation_equivariant() {
    for seed in 0..6u64 {
        for arch in [ArchKind::Gcn, ArchKind::Sage] {
            for num_layers in [2, 3] {
                assert_equivariant(arch, num_layers, true, seed);
                assert_equivariant(arch, num_layers, false, seed);
            }
        }
    }
}

fn l2_norm(x: &Mat<f64>) -> f64 {
    x.data().iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn random_unit(n: usize, rng: &mut ChaCha20Rng) -> Mat<f64> {
    let mut x = Mat::zeros(n, 1);
    for v in x.data_mut() {
        *v = rng.gen_range(-1.0..1.0);
    }
    let norm = l2_norm(&x);
    x.map(|v| v / norm)
}

/// Largest |eigenvalue| of a symmetric operator by power iteration;
/// every iterate's norm ratio is a lower bound on the spectral norm.
fn power_iteration(a: &CsrMatrix<f64>, rng: &mut ChaCha20Rng) -> f64 {
    let mut x = random_unit(a.rows(), rng);
    let mut lambda = 0.0;
    for _ in 0..500 {
        let y = a.spmm(&x);
        let norm = l2_norm(&y);
        if norm == 0.0 {
            return 0.0;
        }
        lambda = norm;
        x = y.map(|v| v / norm);
    }
    lambda
}

#[test]
fn normalized_adjacency_is_a_contraction_with_unit_top_eigenvalue() {
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    for seed in 0..8u64 {
        let n = 5 + (seed as usize) * 7;
        // low density so isolated nodes appear in the small graphs
        let g = gnp_graph(n, 0.15, seed);
        let a = build_normalized_adjacency::<f64>(&g);

        // operator norm <= 1: no unit vector may grow
        for _ in 0..50 {
            let x = random_unit(n, &mut rng);
            assert!(l2_norm(&a.spmm(&x)) <= 1.0 + 1e-12);
        }

        // ... and the bound is tight: eigenvalue 1 is attained
        let lambda = power_iteration(&a, &mut rng);
        assert!(lambda <= 1.0 + 1e-12, "lambda = {lambda}");
        assert!(lambda > 1.0 - 1e-6, "lambda = {lambda}");
    }
}

#[test]
fn normalized_adjacency_matches_dense_formula() {
    let g = build_graph(5, &[(0, 1), (0, 2), (1, 2), (2, 3)], Mat::identity(5))
        .unwrap()
        .graph;
    let a = build_normalized_adjacency::<f64>(&g);
    // dense D^{-1/2} (A + I) D^{-1/2} computed by hand
    let deg = [2.0_f64, 2.0, 3.0, 1.0, 0.0];
    let dense = a.spmm(&Mat::identity(5));
    for u in 0..5 {
        for v in 0..5 {
            let adj = u == v
                || g.has_edge(u, v).unwrap();
            let want = if adj {
                1.0 / ((deg[u] + 1.0).sqrt() * (deg[v] + 1.0).sqrt())
            } else {
                0.0
            };
            let got = dense.row(u)[v];
            assert!((got - want).abs() < 1e-15, "({u},{v}): {got} vs {want}");
        }
    }
}

#[test]
fn mean_adjacency_rows_are_stochastic_or_empty() {
    for seed in 0..6u64 {
        let g = gnp_graph(12, 0.2, seed);
        let a = build_mean_adjacency::<f64>(&g);
        for u in 0..g.num_nodes() {
            let row_sum: f64 = a.row(u).map(|(_, v)| v).sum();
            if g.neighbors(u).is_empty() {
                assert_eq!(row_sum, 0.0, "isolated node {u}");
            } else {
                assert!((row_sum - 1.0).abs() < 1e-12, "node {u}: {row_sum}");
            }
        }
    }
}

//! Seeded random-graph generators used by tests and fixtures.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::graph::{build_graph, Graph};
use crate::tensor::Mat;

/// Erdos-Renyi G(n, p) over canonical pairs, identity features.
pub fn gnp_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let edges = gnp_edges(n, p, &mut rng);
    build_graph(n, &edges, Mat::identity(n))
        .expect("generated edges are canonical")
        .graph
}

/// Edge set of G(n, p) drawn from an existing stream.
pub fn gnp_edges(n: usize, p: f64, rng: &mut ChaCha20Rng) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    edges
}

/// Two-block stochastic block model: blocks {0..block, block..2*block},
/// intra-block edge probability `p_in`, inter-block `p_out`. Identity
/// features, block id stored as the node label.
pub fn two_block_sbm(block: usize, p_in: f64, p_out: f64, seed: u64) -> Graph {
    let n = 2 * block;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if (u < block) == (v < block) { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(|u| usize::from(u >= block)).collect();
    build_graph(n, &edges, Mat::identity(n))
        .expect("generated edges are canonical")
        .graph
        .with_labels(labels)
        .expect("one label per node")
}

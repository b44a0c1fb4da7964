//! Deliberately naive reference implementations used as oracles in
//! tests. Everything here favors obviousness over speed: set unions
//! instead of CSR surgery, quadratic pair enumeration instead of rank
//! statistics. Production code must match these outputs, not the other
//! way around.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha20Rng;

use edge2node_core::{build_graph, Graph, Mat};

/// Set-theoretic construction of the augmented graph: original nodes
/// keep their ids, one fresh node per candidate in positive, negative,
/// evaluation order, each wired to its two endpoints. Labels: 0 on
/// original nodes, 1 on positive dummies, 2 on negative dummies, none
/// on evaluation dummies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteH {
    pub num_nodes: usize,
    pub edges: BTreeSet<(usize, usize)>,
    pub labels: Vec<Option<usize>>,
}

pub fn brute_build_h(
    n: usize,
    positives: &[(usize, usize)],
    negatives: &[(usize, usize)],
    evals: &[(usize, usize)],
    include_candidate_edges: bool,
) -> BruteH {
    let canon = |(u, v): (usize, usize)| (u.min(v), u.max(v));
    let mut edges: BTreeSet<(usize, usize)> = positives.iter().copied().map(canon).collect();
    if include_candidate_edges {
        edges.extend(negatives.iter().copied().map(canon));
    }
    let mut labels: Vec<Option<usize>> = vec![Some(0); n];
    let mut next = n;
    for (set, label) in [
        (positives, Some(1)),
        (negatives, Some(2)),
        (evals, None),
    ] {
        for &(u, v) in set {
            edges.insert(canon((u, next)));
            edges.insert(canon((v, next)));
            labels.push(label);
            next += 1;
        }
    }
    BruteH {
        num_nodes: next,
        edges,
        labels,
    }
}

/// ROC-AUC by enumerating every positive/negative pair. The numerator
/// u2 = 2*wins + ties is an exact integer, so this matches the rank
/// formulation bit for bit.
pub fn brute_auc(scores: &[f64], truth: &[bool]) -> f64 {
    let pos: Vec<f64> = scores
        .iter()
        .zip(truth)
        .filter(|&(_, &t)| t)
        .map(|(&s, _)| s)
        .collect();
    let neg: Vec<f64> = scores
        .iter()
        .zip(truth)
        .filter(|&(_, &t)| !t)
        .map(|(&s, _)| s)
        .collect();
    let mut wins = 0u64;
    let mut ties = 0u64;
    for &p in &pos {
        for &q in &neg {
            if p > q {
                wins += 1;
            } else if p == q {
                ties += 1;
            }
        }
    }
    let u2 = 2 * wins + ties;
    u2 as f64 / (2 * pos.len() as u64 * neg.len() as u64) as f64
}

/// Hits@K by counting, per positive, how many negatives tie or beat
/// it: a positive is a hit exactly when fewer than k negatives do.
pub fn brute_hits_at_k(pos: &[f64], neg: &[f64], k: usize) -> f64 {
    let hits = pos
        .iter()
        .filter(|&&p| neg.iter().filter(|&&q| q >= p).count() < k)
        .count();
    hits as f64 / pos.len() as f64
}

/// Relabel nodes by `perm` (node u becomes perm[u]), permuting the
/// feature rows to match.
pub fn permute_graph(g: &Graph, perm: &[usize]) -> Graph {
    let n = g.num_nodes();
    assert_eq!(perm.len(), n);
    let edges: Vec<(usize, usize)> = g.edges().map(|(u, v)| (perm[u], perm[v])).collect();
    let mut features = Mat::zeros(n, g.feature_dim());
    for u in 0..n {
        features.row_mut(perm[u]).copy_from_slice(g.features().row(u));
    }
    build_graph(n, &edges, features).expect("permutation preserves validity").graph
}

pub fn random_permutation(n: usize, rng: &mut ChaCha20Rng) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_h_single_edge() {
        let h = brute_build_h(2, &[(0, 1)], &[], &[], true);
        assert_eq!(h.num_nodes, 3);
        let expected: BTreeSet<_> = [(0, 1), (0, 2), (1, 2)].into_iter().collect();
        assert_eq!(h.edges, expected);
        assert_eq!(h.labels, vec![Some(0), Some(0), Some(1)]);
    }

    #[test]
    fn brute_h_excluding_candidate_edges() {
        let h = brute_build_h(3, &[(0, 1)], &[(1, 2)], &[(0, 2)], false);
        assert_eq!(h.num_nodes, 6);
        assert!(!h.edges.contains(&(1, 2)));
        assert!(h.edges.contains(&(1, 4)));
        assert!(h.edges.contains(&(2, 4)));
        assert_eq!(h.labels[4], Some(2));
        assert_eq!(h.labels[5], None);
    }

    #[test]
    fn brute_auc_examples() {
        assert_eq!(brute_auc(&[0.9, 0.1], &[true, false]), 1.0);
        assert_eq!(brute_auc(&[0.5, 0.5], &[true, false]), 0.5);
        assert_eq!(
            brute_auc(&[0.8, 0.5, 0.5, 0.2], &[true, true, false, false]),
            7.0 / 8.0
        );
    }

    #[test]
    fn brute_hits_examples() {
        assert_eq!(brute_hits_at_k(&[0.9, 0.8], &[0.1, 0.2], 1), 1.0);
        assert_eq!(brute_hits_at_k(&[0.1], &[0.5, 0.6], 2), 0.0);
        assert_eq!(brute_hits_at_k(&[0.9, 0.5, 0.4], &[0.6, 0.5, 0.1], 2), 1.0 / 3.0);
    }

    #[test]
    fn permutation_round_trip() {
        let g = edge2node_core::synthetic::gnp_graph(8, 0.4, 5);
        let perm: Vec<usize> = (0..8).rev().collect();
        let inv: Vec<usize> = (0..8).rev().collect();
        let back = permute_graph(&permute_graph(&g, &perm), &inv);
        assert_eq!(back.edge_list(), g.edge_list());
        assert_eq!(back.features(), g.features());
    }
}

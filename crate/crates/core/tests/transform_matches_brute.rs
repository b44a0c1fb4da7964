//! The production transform against an independent set-theoretic
//! builder: identical node counts, edge sets, and labels on randomized
//! inputs, plus the exact count identities and the candidate maps
//! being mutual inverses.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use edge2node_core::{
    build_graph, gnp_edges, transform, EdgeList, Graph, Mat, NodeLabel, TransformConfig,
};
use edge2node_testkit::brute_build_h;

struct Fixture {
    g: Graph,
    positives: EdgeList,
    negatives: EdgeList,
    evals: EdgeList,
}

/// Random graph with a random admissible candidate split: positives
/// are a subset of the edges, negatives a subset of the non-edges,
/// evaluation pairs a mix of held-back edges and further non-edges.
fn fixture(seed: u64, n: usize, p: f64) -> Fixture {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let edges = gnp_edges(n, p, &mut rng);
    let g = build_graph(n, &edges, Mat::identity(n))
        .expect("canonical edges")
        .graph;

    let mut positives = Vec::new();
    let mut evals = Vec::new();
    for &e in &edges {
        if rng.gen_bool(0.7) {
            positives.push(e);
        } else if rng.gen_bool(0.4) {
            evals.push(e);
        }
    }

    let edge_set: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
    let mut non_edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .filter(|e| !edge_set.contains(e))
        .collect();
    non_edges.shuffle(&mut rng);
    let take = non_edges.len().min(positives.len() + 2);
    let negatives: Vec<(usize, usize)> = non_edges[..take].to_vec();
    evals.extend(non_edges[take..].iter().take(3));

    Fixture {
        g,
        positives: EdgeList::from_pairs(positives).unwrap(),
        negatives: EdgeList::from_pairs(negatives).unwrap(),
        evals: EdgeList::from_pairs(evals).unwrap(),
    }
}

fn check_against_brute(fx: &Fixture, include_candidate_edges: bool) {
    let cfg = TransformConfig {
        include_candidate_edges,
        ..TransformConfig::default()
    };
    let res = transform(&fx.g, &fx.positives, &fx.negatives, &fx.evals, &cfg)
        .expect("admissible inputs");
    let brute = brute_build_h(
        fx.g.num_nodes(),
        fx.positives.as_slice(),
        fx.negatives.as_slice(),
        fx.evals.as_slice(),
        include_candidate_edges,
    );

    assert_eq!(res.h().num_nodes(), brute.num_nodes);
    let got: BTreeSet<(usize, usize)> = res.h().edges().collect();
    assert_eq!(got, brute.edges);
    let labels: Vec<Option<usize>> = res.labels().iter().map(|l| l.class_id()).collect();
    assert_eq!(labels, brute.labels);

    // count identities: fresh dummy ids rule out edge collisions
    let dummies = fx.positives.len() + fx.negatives.len() + fx.evals.len();
    assert_eq!(res.h().num_nodes(), fx.g.num_nodes() + dummies);
    assert_eq!(res.num_dummies(), dummies);
    let kept_negatives = if include_candidate_edges {
        fx.negatives.len()
    } else {
        0
    };
    assert_eq!(
        res.h().num_edges(),
        fx.positives.len() + kept_negatives + 2 * dummies
    );

    // the candidate maps invert each other and agree with the labels
    for (dummy, info) in res.candidates() {
        assert_eq!(res.edge_probability_index(info.u, info.v).unwrap(), dummy);
        assert_eq!(res.edge_of_dummy(dummy), Some(info));
        assert_eq!(res.h().degree(dummy).unwrap() >= 2, true);
    }
    assert_eq!(res.edge_of_dummy(fx.g.num_nodes() + dummies), None);

    // default mask: exactly the labeled dummies
    for (i, l) in res.labels().iter().enumerate() {
        let expect = matches!(l, NodeLabel::PositiveEdge | NodeLabel::NegativeEdge);
        assert_eq!(res.loss_mask()[i], expect, "node {i}");
    }

    // feature rows cover every node of H at the original width
    assert_eq!(res.h().features().rows(), res.h().num_nodes());
    assert_eq!(res.h().feature_dim(), fx.g.feature_dim());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn transform_equals_brute_builder(
        seed in any::<u64>(),
        n in 2usize..40,
        p in 0.05f64..0.6,
        include in any::<bool>(),
    ) {
        let fx = fixture(seed, n, p);
        check_against_brute(&fx, include);
    }
}

#[test]
fn transform_equals_brute_on_degenerate_inputs() {
    // no candidates at all
    let fx = Fixture {
        g: build_graph(3, &[(0, 1)], Mat::identity(3)).unwrap().graph,
        positives: EdgeList::empty(),
        negatives: EdgeList::empty(),
        evals: EdgeList::empty(),
    };
    check_against_brute(&fx, true);
    check_against_brute(&fx, false);

    // all edges positive, every non-edge negative
    let g = build_graph(4, &[(0, 1), (1, 2), (2, 3)], Mat::identity(4))
        .unwrap()
        .graph;
    let fx = Fixture {
        positives: g.edge_list(),
        negatives: EdgeList::from_pairs([(0, 2), (0, 3), (1, 3)]).unwrap(),
        evals: EdgeList::empty(),
        g,
    };
    check_against_brute(&fx, true);
    check_against_brute(&fx, false);
}

//! Ranking metrics against quadratic enumeration, bit for bit, plus
//! invariance under strictly monotone rescoring (the metrics are rank
//! statistics; nothing else about the scores may matter).

use proptest::prelude::*;

use edge2node_core::{compute_auc, compute_hits_at_k};
use edge2node_testkit::{brute_auc, brute_hits_at_k};

/// Scores drawn from a tiny lattice so ties are common.
fn tied_scores(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((0u8..12).prop_map(|q| q as f64 / 8.0), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn auc_matches_pair_enumeration(
        scores in tied_scores(40),
        truth in prop::collection::vec(any::<bool>(), 40),
    ) {
        prop_assume!(truth.iter().any(|&t| t) && truth.iter().any(|&t| !t));
        let fast = compute_auc(&scores, &truth).unwrap();
        let brute = brute_auc(&scores, &truth);
        prop_assert_eq!(fast.to_bits(), brute.to_bits());
    }

    #[test]
    fn hits_matches_pair_enumeration(
        pos in tied_scores(15),
        neg in tied_scores(25),
        k in 1usize..=25,
    ) {
        let fast = compute_hits_at_k(&pos, &neg, k).unwrap();
        let brute = brute_hits_at_k(&pos, &neg, k);
        prop_assert_eq!(fast.to_bits(), brute.to_bits());
    }

    #[test]
    fn metrics_are_invariant_under_monotone_rescoring(
        scores in tied_scores(30),
        truth in prop::collection::vec(any::<bool>(), 30),
        k in 1usize..=5,
    ) {
        prop_assume!(truth.iter().any(|&t| t) && truth.iter().any(|&t| !t));
        let monotone: [fn(f64) -> f64; 3] = [
            |x| 2.0 * x + 1.0,
            |x| x.exp(),
            |x| x * x * x,
        ];
        let base_auc = compute_auc(&scores, &truth).unwrap();
        let pos: Vec<f64> = scores.iter().zip(&truth).filter(|&(_, &t)| t).map(|(&s, _)| s).collect();
        let neg: Vec<f64> = scores.iter().zip(&truth).filter(|&(_, &t)| !t).map(|(&s, _)| s).collect();
        prop_assume!(k <= neg.len());
        let base_hits = compute_hits_at_k(&pos, &neg, k).unwrap();

        for f in monotone {
            let rescored: Vec<f64> = scores.iter().map(|&s| f(s)).collect();
            prop_assert_eq!(
                compute_auc(&rescored, &truth).unwrap().to_bits(),
                base_auc.to_bits()
            );
            let rp: Vec<f64> = pos.iter().map(|&s| f(s)).collect();
            let rn: Vec<f64> = neg.iter().map(|&s| f(s)).collect();
            prop_assert_eq!(
                compute_hits_at_k(&rp, &rn, k).unwrap().to_bits(),
                base_hits.to_bits()
            );
        }
    }
}

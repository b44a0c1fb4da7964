//! Ranking metrics for link prediction.
//!
//! Both metrics are pure functions of the score ordering, so any
//! strictly increasing rescaling of the scores leaves them unchanged.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("need at least one positive and one negative, got {positives} and {negatives}")]
    DegenerateTruth { positives: usize, negatives: usize },
    #[error("hits@{k} needs at least {k} negative scores, got {negatives}")]
    KOutOfRange { k: usize, negatives: usize },
    #[error("{scores} scores but {truth} truth entries")]
    LengthMismatch { scores: usize, truth: usize },
    #[error("scores must be finite, found {0}")]
    NonFiniteScore(f64),
}

/// ROC-AUC as the Mann-Whitney rank statistic: the probability that a
/// random positive outscores a random negative, ties counting 1/2.
///
/// Computed as u2 / (2 P N) where u2 = 2*concordant + tied, so the
/// numerator is an exactly representable integer and the result matches
/// a pairwise enumeration bit for bit.
pub fn compute_auc(scores: &[f64], truth: &[bool]) -> Result<f64, MetricError> {
    if scores.len() != truth.len() {
        return Err(MetricError::LengthMismatch {
            scores: scores.len(),
            truth: truth.len(),
        });
    }
    if let Some(&bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(MetricError::NonFiniteScore(bad));
    }
    let positives = truth.iter().filter(|&&t| t).count();
    let negatives = truth.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(MetricError::DegenerateTruth {
            positives,
            negatives,
        });
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Walk ascending tie groups. A positive beats every negative in a
    // strictly lower group and halves with negatives in its own group.
    let mut neg_below = 0u64;
    let mut u2 = 0u64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let pos_here = order[i..j].iter().filter(|&&k| truth[k]).count() as u64;
        let neg_here = (j - i) as u64 - pos_here;
        u2 += pos_here * (2 * neg_below + neg_here);
        neg_below += neg_here;
        i = j;
    }
    Ok(u2 as f64 / (2 * positives as u64 * negatives as u64) as f64)
}

/// Fraction of positives scoring strictly above the k-th largest
/// negative score.
pub fn compute_hits_at_k(
    pos_scores: &[f64],
    neg_scores: &[f64],
    k: usize,
) -> Result<f64, MetricError> {
    if k == 0 || k > neg_scores.len() {
        return Err(MetricError::KOutOfRange {
            k,
            negatives: neg_scores.len(),
        });
    }
    if pos_scores.is_empty() {
        return Err(MetricError::DegenerateTruth {
            positives: 0,
            negatives: neg_scores.len(),
        });
    }
    if let Some(&bad) = pos_scores
        .iter()
        .chain(neg_scores)
        .find(|s| !s.is_finite())
    {
        return Err(MetricError::NonFiniteScore(bad));
    }
    let mut negs = neg_scores.to_vec();
    negs.sort_by(|a, b| b.total_cmp(a));
    let threshold = negs[k - 1];
    let hits = pos_scores.iter().filter(|&&s| s > threshold).count();
    Ok(hits as f64 / pos_scores.len() as f64)
}

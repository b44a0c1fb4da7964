//! Reduction of link prediction to 3-class node classification.
//!
//! Every candidate pair `(u, v)`, whether kept positive edge, sampled
//! negative, or held-out evaluation pair, gets one dummy node `t` wired to its
//! endpoints by the two edges `(t, u)` and `(t, v)`. Original nodes keep
//! label 0; dummies for kept positives are labeled 1, dummies for
//! sampled negatives 2, evaluation dummies stay unlabeled and outside
//! the loss. The class-1 probability of a candidate's dummy node is the
//! model's edge-existence score for that pair.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{build_graph, EdgeList, Graph, GraphError};
use crate::tensor::Mat;

#[derive(Debug, Error, PartialEq)]
pub enum TransformError {
    #[error("candidate ({u}, {v}) listed as positive but absent from the graph")]
    NotAnEdge { u: usize, v: usize },
    #[error("candidate ({u}, {v}) listed as negative but present in the graph")]
    AlreadyAnEdge { u: usize, v: usize },
    #[error("candidate ({u}, {v}) appears in more than one candidate set")]
    OverlappingCandidates { u: usize, v: usize },
    #[error("pair ({u}, {v}) was not a candidate when the graph was transformed")]
    UnknownCandidate { u: usize, v: usize },
    #[error("halved-concatenation dummy features require an even feature width, got {width}")]
    OddFeatureWidth { width: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// How dummy nodes receive their feature rows. Nothing in the reduction
/// itself pins this down, so it stays a config knob.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DummyFeatureStrategy {
    /// Elementwise mean of the endpoint features. Width-preserving and
    /// symmetric in `(u, v)`, which unordered edges require.
    #[default]
    Mean,
    /// Each endpoint vector is folded to half width by averaging its
    /// aligned halves, then the two folds are concatenated in canonical
    /// endpoint order. Requires an even feature width.
    ConcatHalved,
    Zeros,
    /// One shared trainable row used by every dummy node; the transform
    /// writes a zero placeholder and the model substitutes its parameter.
    LearnedConstant,
}

/// Which nodes of the augmented graph contribute to the training loss.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LossMaskStrategy {
    /// Only labeled dummy nodes. Original nodes all share label 0 and
    /// carry no discriminative signal.
    #[default]
    DummiesOnly,
    /// Original nodes too, with inverse-frequency class weights applied
    /// by the trainer to offset the label-0 majority.
    AllNodes,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformConfig {
    pub dummy_feature_strategy: DummyFeatureStrategy,
    /// Keep the candidate pairs themselves as message-passing edges.
    /// `true` matches the augmented graph being built on top of the
    /// graph that already contains the sampled negatives; `false` exists
    /// so leakage of negative-candidate edges can be ablated. Held-out
    /// evaluation pairs never become edges regardless.
    pub include_candidate_edges: bool,
    pub loss_mask_strategy: LossMaskStrategy,
}

impl Default for TransformConfig {
    fn default() -> Self {
        TransformConfig {
            dummy_feature_strategy: DummyFeatureStrategy::Mean,
            include_candidate_edges: true,
            loss_mask_strategy: LossMaskStrategy::DummiesOnly,
        }
    }
}

/// Where a candidate pair came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateOrigin {
    Positive,
    Negative,
    Eval,
}

/// Label of a node in the augmented graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeLabel {
    Original,
    PositiveEdge,
    NegativeEdge,
    /// Evaluation dummies: label withheld, excluded from the loss.
    Unlabeled,
}

impl NodeLabel {
    pub fn class_id(self) -> Option<usize> {
        match self {
            NodeLabel::Original => Some(0),
            NodeLabel::PositiveEdge => Some(1),
            NodeLabel::NegativeEdge => Some(2),
            NodeLabel::Unlabeled => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DummyInfo {
    pub u: usize,
    pub v: usize,
    pub origin: CandidateOrigin,
}

/// The augmented graph with labels, loss mask, and the bidirectional
/// candidate-edge <-> dummy-node maps.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformResult {
    h: Graph,
    labels: Vec<NodeLabel>,
    loss_mask: Vec<bool>,
    dummy_of_edge: BTreeMap<(usize, usize), usize>,
    dummies: Vec<DummyInfo>,
    eval_dummies: Vec<usize>,
    num_original: usize,
    config: TransformConfig,
}

/// Build the augmented graph from kept positive edges, sampled
/// negatives, and held-out evaluation candidates.
///
/// Dummy ids are assigned deterministically: positives first, then
/// negatives, then evaluation pairs, each set in canonical edge order.
pub fn transform(
    g: &Graph,
    positives: &EdgeList,
    negatives: &EdgeList,
    eval_candidates: &EdgeList,
    cfg: &TransformConfig,
) -> Result<TransformResult, TransformError> {
    for (u, v) in positives.iter() {
        if !g.has_edge(u, v)? {
            return Err(TransformError::NotAnEdge { u, v });
        }
    }
    for (u, v) in negatives.iter() {
        if g.has_edge(u, v)? {
            return Err(TransformError::AlreadyAnEdge { u, v });
        }
    }
    for (u, v) in eval_candidates.iter() {
        g.check_node(u)?;
        g.check_node(v)?;
    }
    if let Some((u, v)) = [
        first_common(positives, negatives),
        first_common(positives, eval_candidates),
        first_common(negatives, eval_candidates),
    ]
    .into_iter()
    .flatten()
    .next()
    {
        return Err(TransformError::OverlappingCandidates { u, v });
    }

    let n = g.num_nodes();
    let d = g.feature_dim();
    let num_dummies = positives.len() + negatives.len() + eval_candidates.len();
    let num_h_nodes = n + num_dummies;

    let mut h_edges: Vec<(usize, usize)> = positives.iter().collect();
    if cfg.include_candidate_edges {
        h_edges.extend(negatives.iter());
    }

    let mut features = Mat::zeros(num_h_nodes, d);
    for u in 0..n {
        features.row_mut(u).copy_from_slice(g.features().row(u));
    }

    let mut labels = vec![NodeLabel::Original; n];
    let mut dummy_of_edge = BTreeMap::new();
    let mut dummies = Vec::with_capacity(num_dummies);
    let mut eval_dummies = Vec::new();

    let candidate_sets = [
        (positives, CandidateOrigin::Positive, NodeLabel::PositiveEdge),
        (negatives, CandidateOrigin::Negative, NodeLabel::NegativeEdge),
        (eval_candidates, CandidateOrigin::Eval, NodeLabel::Unlabeled),
    ];
    for (set, origin, label) in candidate_sets {
        for (u, v) in set.iter() {
            let dummy = n + dummies.len();
            h_edges.push((dummy, u));
            h_edges.push((dummy, v));
            let row = dummy_features(g, u, v, cfg.dummy_feature_strategy)?;
            features.row_mut(dummy).copy_from_slice(&row);
            labels.push(label);
            dummy_of_edge.insert((u, v), dummy);
            dummies.push(DummyInfo { u, v, origin });
            if origin == CandidateOrigin::Eval {
                eval_dummies.push(dummy);
            }
        }
    }

    let loss_mask: Vec<bool> = labels
        .iter()
        .map(|l| match l {
            NodeLabel::Original => cfg.loss_mask_strategy == LossMaskStrategy::AllNodes,
            NodeLabel::PositiveEdge | NodeLabel::NegativeEdge => true,
            NodeLabel::Unlabeled => false,
        })
        .collect();

    let built = build_graph(num_h_nodes, &h_edges, features)?;
    debug_assert_eq!(built.self_loops_dropped, 0);
    debug_assert_eq!(built.duplicates_dropped, 0);

    Ok(TransformResult {
        h: built.graph,
        labels,
        loss_mask,
        dummy_of_edge,
        dummies,
        eval_dummies,
        num_original: n,
        config: *cfg,
    })
}

fn first_common(a: &EdgeList, b: &EdgeList) -> Option<(usize, usize)> {
    a.iter().find(|&(u, v)| b.contains(u, v))
}

/// Feature row for the dummy node of candidate `(u, v)`.
pub fn dummy_features(
    g: &Graph,
    u: usize,
    v: usize,
    strategy: DummyFeatureStrategy,
) -> Result<Vec<f64>, TransformError> {
    g.check_node(u)?;
    g.check_node(v)?;
    let d = g.feature_dim();
    let (lo, hi) = (u.min(v), u.max(v));
    let xu = g.features().row(lo);
    let xv = g.features().row(hi);
    match strategy {
        DummyFeatureStrategy::Mean => {
            Ok(xu.iter().zip(xv).map(|(&a, &b)| (a + b) / 2.0).collect())
        }
        DummyFeatureStrategy::Zeros | DummyFeatureStrategy::LearnedConstant => Ok(vec![0.0; d]),
        DummyFeatureStrategy::ConcatHalved => {
            if d % 2 != 0 {
                return Err(TransformError::OddFeatureWidth { width: d });
            }
            let half = d / 2;
            let fold = |x: &[f64]| -> Vec<f64> {
                (0..half).map(|i| (x[i] + x[i + half]) / 2.0).collect()
            };
            let mut out = fold(xu);
            out.extend(fold(xv));
            Ok(out)
        }
    }
}

impl TransformResult {
    pub fn h(&self) -> &Graph {
        &self.h
    }

    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }

    pub fn loss_mask(&self) -> &[bool] {
        &self.loss_mask
    }

    /// Class ids for the loss; unlabeled rows carry 0 but are always
    /// masked out.
    pub fn class_ids(&self) -> Vec<usize> {
        self.labels
            .iter()
            .map(|l| l.class_id().unwrap_or(0))
            .collect()
    }

    /// The node whose class-1 probability is the existence score of the
    /// candidate edge `(u, v)`.
    pub fn edge_probability_index(&self, u: usize, v: usize) -> Result<usize, TransformError> {
        let key = (u.min(v), u.max(v));
        self.dummy_of_edge
            .get(&key)
            .copied()
            .ok_or(TransformError::UnknownCandidate { u: key.0, v: key.1 })
    }

    /// The candidate edge a dummy node stands for.
    pub fn edge_of_dummy(&self, dummy: usize) -> Option<DummyInfo> {
        dummy
            .checked_sub(self.num_original)
            .and_then(|i| self.dummies.get(i))
            .copied()
    }

    pub fn eval_dummies(&self) -> &[usize] {
        &self.eval_dummies
    }

    pub fn num_original(&self) -> usize {
        self.num_original
    }

    pub fn num_dummies(&self) -> usize {
        self.dummies.len()
    }

    /// All dummy node ids, in creation order.
    pub fn dummy_rows(&self) -> Vec<usize> {
        (self.num_original..self.h.num_nodes()).collect()
    }

    pub fn candidates(&self) -> impl Iterator<Item = (usize, DummyInfo)> + '_ {
        self.dummies
            .iter()
            .enumerate()
            .map(|(i, info)| (self.num_original + i, *info))
    }

    pub fn config(&self) -> &TransformConfig {
        &self.config
    }
}

//! Link prediction reduced to node classification.
//!
//! A candidate edge (u, v) of a graph G is represented by a dummy node
//! wired to u and v inside an augmented graph H. Original nodes carry
//! label 0, dummies for kept edges label 1, dummies for sampled
//! non-edges label 2. Any node-classification GNN trained on H then
//! scores a candidate edge by the class-1 probability of its dummy
//! node.
//!
//! Crate layout, bottom up: [`tensor`] (dense/sparse matrices plus a
//! reverse-mode tape), [`graph`] (canonical edge lists, CSR graphs),
//! [`sample`] (negative sampling and splits), [`transform`] (the graph
//! augmentation itself), [`nn`] (GCN/SAGE models and the dot-product
//! baseline), [`train`] (Adam loop, prediction, evaluation),
//! [`metrics`] (AUC, Hits@K), [`gradcheck`] (finite-difference
//! verification), [`synthetic`] (seeded generators).

pub mod gradcheck;
pub mod graph;
pub mod metrics;
pub mod nn;
pub mod sample;
pub mod synthetic;
pub mod tensor;
pub mod train;
pub mod transform;

pub use gradcheck::{run_gradcheck, CheckResult, GradcheckReport};
pub use graph::{build_graph, EdgeList, Graph, GraphBuild, GraphError};
pub use metrics::{compute_auc, compute_hits_at_k, MetricError};
pub use nn::{
    build_mean_adjacency, build_normalized_adjacency, dot_product_baseline, ArchKind, Dense,
    GraphLayer, InitMeta, ModelConfig, ModelError, ModelParams,
};
pub use synthetic::{gnp_edges, gnp_graph, two_block_sbm};
pub use sample::{
    sample_negatives, sample_negatives_count, split_edges, SampleError, SamplerConfig, PRNG_NAME,
};
pub use tensor::{CsrMatrix, Mat, Scalar, Tape, Tensor, TensorError};
pub use train::{
    baseline_metrics, baseline_scores, evaluate, predict_edges, train, train_baseline, EpochRecord,
    EvalReport, TrainConfig, TrainError, TrainOutcome,
};
pub use transform::{
    dummy_features, transform, CandidateOrigin, DummyFeatureStrategy, LossMaskStrategy, NodeLabel,
    TransformConfig, TransformError, TransformResult,
};

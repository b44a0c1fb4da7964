//! Full-batch training with Adam and early stopping, plus prediction
//! and evaluation that read edge scores off dummy-node class-1
//! probabilities.

use std::collections::BTreeMap;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeList, Graph};
use crate::metrics::{compute_auc, compute_hits_at_k, MetricError};
use crate::nn::{dot_product_baseline, ModelError, ModelParams};
use crate::tensor::{softmax_row, Mat, Scalar, Tape, Tensor, TensorError};
use crate::transform::{LossMaskStrategy, TransformError, TransformResult};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("loss became non-finite at epoch {epoch} (learning rate {learning_rate})")]
    Diverged { epoch: usize, learning_rate: f64 },
    #[error("invalid training setup: {0}")]
    BadConfig(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// L2 penalty folded into the gradient, applied to weight matrices
    /// only (never biases or the shared dummy row).
    pub weight_decay: f64,
    pub max_epochs: usize,
    /// Epochs without a new best validation AUC before stopping.
    pub patience: usize,
    pub seed: u64,
}

impl TrainConfig {
    pub fn new(seed: u64) -> Self {
        TrainConfig {
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            weight_decay: 5e-4,
            max_epochs: 200,
            patience: 20,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |msg: &str| Err(TrainError::BadConfig(msg.to_string()));
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be finite and non-negative");
        }
        for (name, b) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(b > 0.0 && b < 1.0) {
                return Err(TrainError::BadConfig(format!("{name} must lie in (0, 1)")));
            }
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return bad("epsilon must be positive");
        }
        if !(self.weight_decay >= 0.0 && self.weight_decay.is_finite()) {
            return bad("weight_decay must be finite and non-negative");
        }
        if self.max_epochs == 0 {
            return bad("max_epochs must be at least 1");
        }
        if self.patience == 0 || self.patience > self.max_epochs {
            return bad("patience must lie in 1..=max_epochs");
        }
        Ok(())
    }
}

/// One row of the training trace. `loss` is measured at the parameters
/// entering the epoch, `val_auc` at the parameters leaving it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub loss: f64,
    pub val_auc: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome<S: Scalar> {
    /// Best-validation parameters, or the final ones when training ran
    /// without validation.
    pub params: ModelParams<S>,
    pub trace: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val_auc: Option<f64>,
}

/// Link-prediction evaluation summary. `runtime_seconds` is excluded
/// from serialization so that reports from identical runs are
/// byte-identical.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EvalReport {
    pub auc: f64,
    pub hits_at_k: BTreeMap<usize, f64>,
    /// Argmax accuracy over loss-masked nodes of the augmented graph.
    pub accuracy: f64,
    /// confusion[true_class][predicted_class] over loss-masked nodes.
    pub confusion: [[usize; 3]; 3],
    #[serde(skip)]
    pub runtime_seconds: f64,
    pub config: serde_json::Value,
}

struct AdamState<S: Scalar> {
    t: u64,
    m: Vec<Mat<S>>,
    v: Vec<Mat<S>>,
}

impl<S: Scalar> AdamState<S> {
    fn new(shapes: &[(usize, usize)]) -> Self {
        AdamState {
            t: 0,
            m: shapes.iter().map(|&(r, c)| Mat::zeros(r, c)).collect(),
            v: shapes.iter().map(|&(r, c)| Mat::zeros(r, c)).collect(),
        }
    }

    fn step(
        &mut self,
        params: &mut ModelParams<S>,
        grads: &[Mat<S>],
        decay: &[bool],
        cfg: &TrainConfig,
    ) {
        self.t += 1;
        let lr = S::from_f64(cfg.learning_rate);
        let b1 = S::from_f64(cfg.beta1);
        let b2 = S::from_f64(cfg.beta2);
        let eps = S::from_f64(cfg.epsilon);
        let wd = S::from_f64(cfg.weight_decay);
        let one = S::one();
        let bc1 = S::from_f64(1.0 - cfg.beta1.powi(self.t as i32));
        let bc2 = S::from_f64(1.0 - cfg.beta2.powi(self.t as i32));
        for (i, p) in params.mats_mut().into_iter().enumerate() {
            let m = self.m[i].data_mut();
            let v = self.v[i].data_mut();
            for (j, x) in p.data_mut().iter_mut().enumerate() {
                let mut g = grads[i].data()[j];
                if decay[i] {
                    g += wd * *x;
                }
                m[j] = b1 * m[j] + (one - b1) * g;
                v[j] = b2 * v[j] + (one - b2) * g * g;
                let m_hat = m[j] / bc1;
                let v_hat = v[j] / bc2;
                *x -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
    }
}

/// Shared epoch driver: build the loss, backprop, step, validate,
/// early-stop on validation AUC.
fn run_loop<S: Scalar>(
    mut params: ModelParams<S>,
    cfg: &TrainConfig,
    mut build_loss: impl FnMut(
        &ModelParams<S>,
        &Tape<S>,
        &mut ChaCha20Rng,
    ) -> Result<(Tensor, Vec<Tensor>), TrainError>,
    mut validate: impl FnMut(&ModelParams<S>) -> Result<Option<f64>, TrainError>,
) -> Result<TrainOutcome<S>, TrainError> {
    let shapes: Vec<(usize, usize)> = params.mats().iter().map(|m| (m.rows(), m.cols())).collect();
    let decay: Vec<bool> = params.slots().into_iter().map(|(_, d)| d).collect();
    let mut adam = AdamState::new(&shapes);
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let mut trace = Vec::new();
    let mut best: Option<(f64, usize, ModelParams<S>)> = None;
    let mut since_best = 0usize;

    for epoch in 0..cfg.max_epochs {
        let tape = Tape::new();
        let (loss_t, param_tensors) = build_loss(&params, &tape, &mut rng)?;
        let loss = tape.value(loss_t)[(0, 0)].to_f64();
        if !loss.is_finite() {
            return Err(TrainError::Diverged {
                epoch,
                learning_rate: cfg.learning_rate,
            });
        }
        tape.backward(loss_t)?;
        let grads: Vec<Mat<S>> = param_tensors
            .iter()
            .zip(&shapes)
            .map(|(&t, &(r, c))| tape.grad(t).unwrap_or_else(|| Mat::zeros(r, c)))
            .collect();
        adam.step(&mut params, &grads, &decay, cfg);

        let val_auc = validate(&params)?;
        trace.push(EpochRecord {
            epoch,
            loss,
            val_auc,
        });
        if let Some(auc) = val_auc {
            // strict improvement keeps the earliest maximum, so the
            // outcome is deterministic under ties
            if best.as_ref().map_or(true, |(b, _, _)| auc > *b) {
                best = Some((auc, epoch, params.clone()));
                since_best = 0;
            } else {
                since_best += 1;
                if since_best >= cfg.patience {
                    break;
                }
            }
        }
    }

    Ok(match best {
        Some((auc, epoch, p)) => TrainOutcome {
            params: p,
            trace,
            best_epoch: epoch,
            best_val_auc: Some(auc),
        },
        None => {
            let last = trace.len().saturating_sub(1);
            TrainOutcome {
                params,
                trace,
                best_epoch: last,
                best_val_auc: None,
            }
        }
    })
}

/// Inverse-frequency class weights when original nodes join the loss;
/// the dummies-only mask stays unweighted.
fn class_weights(res: &TransformResult) -> Option<Vec<f64>> {
    match res.config().loss_mask_strategy {
        LossMaskStrategy::DummiesOnly => None,
        LossMaskStrategy::AllNodes => {
            let labels = res.class_ids();
            let mut counts = [0usize; 3];
            for (i, &m) in res.loss_mask().iter().enumerate() {
                if m {
                    counts[labels[i]] += 1;
                }
            }
            let total: usize = counts.iter().sum();
            let present = counts.iter().filter(|&&c| c > 0).count();
            Some(
                counts
                    .iter()
                    .map(|&c| {
                        if c == 0 {
                            0.0
                        } else {
                            total as f64 / (present * c) as f64
                        }
                    })
                    .collect(),
            )
        }
    }
}

/// Train a 3-class classifier on the augmented graph. With validation
/// candidates present, early-stops on validation AUC and returns the
/// best parameters; without, runs all epochs and returns the final
/// ones.
pub fn train<S: Scalar>(
    res: &TransformResult,
    init: ModelParams<S>,
    cfg: &TrainConfig,
    validation: Option<(&EdgeList, &EdgeList)>,
) -> Result<TrainOutcome<S>, TrainError> {
    cfg.validate()?;
    if !res.loss_mask().iter().any(|&b| b) {
        return Err(TrainError::BadConfig(
            "loss mask selects no nodes; nothing to train on".into(),
        ));
    }
    if let Some((vp, vn)) = validation {
        if vp.len() == 0 || vn.len() == 0 {
            return Err(TrainError::BadConfig(
                "validation needs at least one positive and one negative candidate".into(),
            ));
        }
        for (u, v) in vp.iter().chain(vn.iter()) {
            res.edge_probability_index(u, v)?;
        }
    }

    let h = res.h();
    let features = Mat::<S>::from_f64_mat(h.features());
    let adj = init.build_adjacency(h);
    let dummy_rows = if init.dummy_row.is_some() {
        res.dummy_rows()
    } else {
        Vec::new()
    };
    let labels = res.class_ids();
    let mask = res.loss_mask().to_vec();
    let weights = class_weights(res);

    run_loop(
        init,
        cfg,
        |params, tape, rng| {
            let fwd = params.forward(tape, &adj, &features, &dummy_rows, true, rng)?;
            let loss = tape.masked_cross_entropy(fwd.output, &labels, &mask, weights.as_deref())?;
            Ok((loss, fwd.param_tensors))
        },
        |params| match validation {
            Some((vp, vn)) => {
                let logits = eval_logits(params, res)?;
                Ok(Some(auc_from_logits(&logits, res, vp, vn)?))
            }
            None => Ok(None),
        },
    )
}

fn eval_logits<S: Scalar>(
    params: &ModelParams<S>,
    res: &TransformResult,
) -> Result<Mat<S>, TrainError> {
    let h = res.h();
    let features = Mat::<S>::from_f64_mat(h.features());
    let adj = params.build_adjacency(h);
    let dummy_rows = if params.dummy_row.is_some() {
        res.dummy_rows()
    } else {
        Vec::new()
    };
    Ok(params.eval_output(&adj, &features, &dummy_rows)?)
}

fn scores_from_logits<S: Scalar>(
    logits: &Mat<S>,
    res: &TransformResult,
    candidates: &EdgeList,
) -> Result<Vec<f64>, TrainError> {
    let mut buf = vec![S::zero(); logits.cols()];
    candidates
        .iter()
        .map(|(u, v)| {
            let row = res.edge_probability_index(u, v)?;
            softmax_row(logits.row(row), &mut buf);
            Ok(buf[1].to_f64())
        })
        .collect()
}

fn auc_from_logits<S: Scalar>(
    logits: &Mat<S>,
    res: &TransformResult,
    pos: &EdgeList,
    neg: &EdgeList,
) -> Result<f64, TrainError> {
    let mut scores = scores_from_logits(logits, res, pos)?;
    let split = scores.len();
    scores.extend(scores_from_logits(logits, res, neg)?);
    let truth: Vec<bool> = (0..scores.len()).map(|i| i < split).collect();
    Ok(compute_auc(&scores, &truth)?)
}

/// Edge-existence scores: softmax(logits at the candidate's dummy
/// node)[class 1].
pub fn predict_edges<S: Scalar>(
    params: &ModelParams<S>,
    res: &TransformResult,
    candidates: &EdgeList,
) -> Result<Vec<f64>, TrainError> {
    let logits = eval_logits(params, res)?;
    scores_from_logits(&logits, res, candidates)
}

/// Score held-out candidates and summarize ranking quality plus the
/// node-classification view of the masked nodes.
pub fn evaluate<S: Scalar>(
    params: &ModelParams<S>,
    res: &TransformResult,
    test_pos: &EdgeList,
    test_neg: &EdgeList,
    ks: &[usize],
    config_echo: serde_json::Value,
) -> Result<EvalReport, TrainError> {
    let start = Instant::now();
    let logits = eval_logits(params, res)?;
    let pos_scores = scores_from_logits(&logits, res, test_pos)?;
    let neg_scores = scores_from_logits(&logits, res, test_neg)?;

    let mut all = pos_scores.clone();
    all.extend(neg_scores.iter().copied());
    let truth: Vec<bool> = (0..all.len()).map(|i| i < pos_scores.len()).collect();
    let auc = compute_auc(&all, &truth)?;

    let mut hits_at_k = BTreeMap::new();
    for &k in ks {
        if k >= 1 && k <= neg_scores.len() {
            hits_at_k.insert(k, compute_hits_at_k(&pos_scores, &neg_scores, k)?);
        }
    }

    let labels = res.class_ids();
    let mut confusion = [[0usize; 3]; 3];
    for r in 0..logits.rows() {
        if res.loss_mask()[r] {
            confusion[labels[r]][argmax(logits.row(r))] += 1;
        }
    }
    let total: usize = confusion.iter().flatten().sum();
    let correct: usize = (0..3).map(|c| confusion[c][c]).sum();
    let accuracy = if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    };

    Ok(EvalReport {
        auc,
        hits_at_k,
        accuracy,
        confusion,
        runtime_seconds: start.elapsed().as_secs_f64(),
        config: config_echo,
    })
}

fn argmax<S: Scalar>(row: &[S]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}

/// Train the pairwise dot-product embedder on the original (training)
/// graph with binary cross-entropy over positive and negative pairs.
pub fn train_baseline<S: Scalar>(
    g: &Graph,
    train_pos: &EdgeList,
    train_neg: &EdgeList,
    init: ModelParams<S>,
    cfg: &TrainConfig,
    validation: Option<(&EdgeList, &EdgeList)>,
) -> Result<TrainOutcome<S>, TrainError> {
    cfg.validate()?;
    if init.head.is_some() {
        return Err(TrainError::BadConfig(
            "baseline expects an embedder without a classification head".into(),
        ));
    }
    if train_pos.len() == 0 || train_neg.len() == 0 {
        return Err(TrainError::BadConfig(
            "baseline training needs positive and negative pairs".into(),
        ));
    }
    let features = Mat::<S>::from_f64_mat(g.features());
    let adj = init.build_adjacency(g);
    let pairs: Vec<(usize, usize)> = train_pos.iter().chain(train_neg.iter()).collect();
    let mut targets = vec![1.0; train_pos.len()];
    targets.extend(vec![0.0; train_neg.len()]);

    run_loop(
        init,
        cfg,
        |params, tape, rng| {
            let fwd = params.forward(tape, &adj, &features, &[], true, rng)?;
            let dots = tape.pair_dot(fwd.output, &pairs)?;
            let loss = tape.bce_with_logits(dots, &targets)?;
            Ok((loss, fwd.param_tensors))
        },
        |params| match validation {
            Some((vp, vn)) => {
                let z = params.eval_output(&adj, &features, &[])?;
                let mut scores: Vec<f64> = Vec::with_capacity(vp.len() + vn.len());
                for (u, v) in vp.iter().chain(vn.iter()) {
                    scores.push(dot_product_baseline(&z, u, v)?);
                }
                let truth: Vec<bool> = (0..scores.len()).map(|i| i < vp.len()).collect();
                Ok(Some(compute_auc(&scores, &truth)?))
            }
            None => Ok(None),
        },
    )
}

/// Baseline scores for candidate pairs from a trained embedder.
pub fn baseline_scores<S: Scalar>(
    params: &ModelParams<S>,
    g: &Graph,
    candidates: &EdgeList,
) -> Result<Vec<f64>, TrainError> {
    let features = Mat::<S>::from_f64_mat(g.features());
    let adj = params.build_adjacency(g);
    let z = params.eval_output(&adj, &features, &[])?;
    candidates
        .iter()
        .map(|(u, v)| Ok(dot_product_baseline(&z, u, v)?))
        .collect()
}

/// AUC and Hits@K for the baseline on held-out candidates.
pub fn baseline_metrics<S: Scalar>(
    params: &ModelParams<S>,
    g: &Graph,
    test_pos: &EdgeList,
    test_neg: &EdgeList,
    ks: &[usize],
) -> Result<(f64, BTreeMap<usize, f64>), TrainError> {
    let pos = baseline_scores(params, g, test_pos)?;
    let neg = baseline_scores(params, g, test_neg)?;
    let mut all = pos.clone();
    all.extend(neg.iter().copied());
    let truth: Vec<bool> = (0..all.len()).map(|i| i < pos.len()).collect();
    let auc = compute_auc(&all, &truth)?;
    let mut hits = BTreeMap::new();
    for &k in ks {
        if k >= 1 && k <= neg.len() {
            hits.insert(k, compute_hits_at_k(&pos, &neg, k)?);
        }
    }
    Ok((auc, hits))
}

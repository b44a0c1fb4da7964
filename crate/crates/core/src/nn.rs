//! Message-passing models over the augmented graph: a GCN variant, a
//! GraphSAGE variant with mean aggregation, and the dot-product scorer
//! they are compared against. A classifier ends in a linear 3-class
//! head; an embedder ends in a linear graph layer and exposes node
//! embeddings for pairwise scoring.

use std::rc::Rc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::tensor::{sigmoid_f64, CsrMatrix, Mat, Scalar, Tape, Tensor, TensorError};

pub const NUM_CLASSES: usize = 3;
pub const INIT_SCHEME: &str = "glorot_uniform";

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("model expects feature width {expected}, got {got}")]
    FeatureWidth { expected: usize, got: usize },
    #[error("unsupported layer count {0}; this implementation covers 2..=3")]
    UnsupportedDepth(usize),
    #[error("dropout keep probability {0} outside (0, 1]")]
    BadKeepProb(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchKind {
    Gcn,
    Sage,
}

impl ArchKind {
    pub fn name(self) -> &'static str {
        match self {
            ArchKind::Gcn => "gcn",
            ArchKind::Sage => "sage",
        }
    }
}

/// How the parameters were initialized; kept so checkpoints describe
/// themselves and runs can be reproduced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitMeta {
    pub scheme: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dense<S: Scalar> {
    pub weight: Mat<S>,
    pub bias: Mat<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GraphLayer<S: Scalar> {
    /// x -> A_hat x W + b with A_hat the renormalized adjacency.
    Gcn { weight: Mat<S>, bias: Mat<S> },
    /// x -> x W_self + mean_neigh(x) W_neigh + b; degree-0 rows
    /// aggregate to the zero vector, so they reduce to the self term.
    Sage {
        self_weight: Mat<S>,
        neigh_weight: Mat<S>,
        bias: Mat<S>,
    },
}

/// Hyperparameters fixed before initialization.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub arch: ArchKind,
    pub hidden: usize,
    /// Total trainable depth. A classifier with `num_layers = L` has
    /// L-1 graph layers and the linear head; an embedder has L graph
    /// layers, the last one linear.
    pub num_layers: usize,
    pub dropout_keep: f64,
    /// Replace dummy feature rows with one shared trainable row.
    pub learned_dummy: bool,
    pub seed: u64,
}

impl ModelConfig {
    pub fn new(arch: ArchKind, seed: u64) -> Self {
        ModelConfig {
            arch,
            hidden: 64,
            num_layers: 2,
            dropout_keep: 0.5,
            learned_dummy: false,
            seed,
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        if !(2..=3).contains(&self.num_layers) {
            return Err(ModelError::UnsupportedDepth(self.num_layers));
        }
        if !(self.dropout_keep > 0.0 && self.dropout_keep <= 1.0) {
            return Err(ModelError::BadKeepProb(self.dropout_keep));
        }
        Ok(())
    }
}

/// All trainable state of one model plus the metadata needed to rebuild
/// it exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<S: Scalar> {
    pub arch: ArchKind,
    pub in_dim: usize,
    pub hidden: usize,
    pub dropout_keep: f64,
    pub layers: Vec<GraphLayer<S>>,
    /// Linear 3-class head; `None` for an embedder.
    pub head: Option<Dense<S>>,
    /// Shared trainable dummy-feature row (1 x in_dim), if configured.
    pub dummy_row: Option<Mat<S>>,
    pub init: InitMeta,
}

/// One forward pass bound to a tape: the output tensor plus the leaf
/// tensors in the same order as [`ModelParams::mats`].
pub struct ForwardPass {
    pub output: Tensor,
    pub param_tensors: Vec<Tensor>,
}

fn glorot<S: Scalar>(rows: usize, cols: usize, rng: &mut ChaCha20Rng) -> Mat<S> {
    let limit = (6.0 / (rows + cols) as f64).sqrt();
    let mut m = Mat::zeros(rows, cols);
    for v in m.data_mut() {
        *v = S::from_f64(rng.gen_range(-limit..limit));
    }
    m
}

impl<S: Scalar> ModelParams<S> {
    /// Fresh 3-class node classifier.
    pub fn new_classifier(cfg: &ModelConfig, in_dim: usize) -> Result<Self, ModelError> {
        cfg.validate()?;
        let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
        let mut layers = Vec::new();
        let mut width = in_dim;
        for _ in 0..cfg.num_layers - 1 {
            layers.push(Self::new_layer(cfg.arch, width, cfg.hidden, &mut rng));
            width = cfg.hidden;
        }
        let head = Dense {
            weight: glorot(width, NUM_CLASSES, &mut rng),
            bias: Mat::zeros(1, NUM_CLASSES),
        };
        let dummy_row = cfg.learned_dummy.then(|| Mat::zeros(1, in_dim));
        Ok(ModelParams {
            arch: cfg.arch,
            in_dim,
            hidden: cfg.hidden,
            dropout_keep: cfg.dropout_keep,
            layers,
            head: Some(head),
            dummy_row,
            init: InitMeta {
                scheme: INIT_SCHEME.to_string(),
                seed: cfg.seed,
            },
        })
    }

    /// Fresh embedder for the pairwise-dot baseline: graph layers only,
    /// the last one linear, output width = hidden.
    pub fn new_embedder(cfg: &ModelConfig, in_dim: usize) -> Result<Self, ModelError> {
        cfg.validate()?;
        let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
        let mut layers = Vec::new();
        let mut width = in_dim;
        for _ in 0..cfg.num_layers {
            layers.push(Self::new_layer(cfg.arch, width, cfg.hidden, &mut rng));
            width = cfg.hidden;
        }
        Ok(ModelParams {
            arch: cfg.arch,
            in_dim,
            hidden: cfg.hidden,
            dropout_keep: cfg.dropout_keep,
            layers,
            head: None,
            dummy_row: None,
            init: InitMeta {
                scheme: INIT_SCHEME.to_string(),
                seed: cfg.seed,
            },
        })
    }

    fn new_layer(arch: ArchKind, d_in: usize, d_out: usize, rng: &mut ChaCha20Rng) -> GraphLayer<S> {
        match arch {
            ArchKind::Gcn => GraphLayer::Gcn {
                weight: glorot(d_in, d_out, rng),
                bias: Mat::zeros(1, d_out),
            },
            ArchKind::Sage => GraphLayer::Sage {
                self_weight: glorot(d_in, d_out, rng),
                neigh_weight: glorot(d_in, d_out, rng),
                bias: Mat::zeros(1, d_out),
            },
        }
    }

    /// Output width: 3 for classifiers, hidden for embedders.
    pub fn out_dim(&self) -> usize {
        match &self.head {
            Some(h) => h.weight.cols(),
            None => match self.layers.last() {
                Some(GraphLayer::Gcn { weight, .. }) => weight.cols(),
                Some(GraphLayer::Sage { self_weight, .. }) => self_weight.cols(),
                None => self.in_dim,
            },
        }
    }

    /// Parameter names and weight-decay eligibility, in the fixed
    /// traversal order shared by [`Self::mats`] and [`Self::mats_mut`].
    /// Biases and the shared dummy row are exempt from decay.
    pub fn slots(&self) -> Vec<(String, bool)> {
        let mut out = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            match layer {
                GraphLayer::Gcn { .. } => {
                    out.push((format!("layer{i}.weight"), true));
                    out.push((format!("layer{i}.bias"), false));
                }
                GraphLayer::Sage { .. } => {
                    out.push((format!("layer{i}.self_weight"), true));
                    out.push((format!("layer{i}.neigh_weight"), true));
                    out.push((format!("layer{i}.bias"), false));
                }
            }
        }
        if self.head.is_some() {
            out.push(("head.weight".to_string(), true));
            out.push(("head.bias".to_string(), false));
        }
        if self.dummy_row.is_some() {
            out.push(("dummy_row".to_string(), false));
        }
        out
    }

    pub fn mats(&self) -> Vec<&Mat<S>> {
        let mut out: Vec<&Mat<S>> = Vec::new();
        for layer in &self.layers {
            match layer {
                GraphLayer::Gcn { weight, bias } => out.extend([weight, bias]),
                GraphLayer::Sage {
                    self_weight,
                    neigh_weight,
                    bias,
                } => out.extend([self_weight, neigh_weight, bias]),
            }
        }
        if let Some(h) = &self.head {
            out.extend([&h.weight, &h.bias]);
        }
        if let Some(d) = &self.dummy_row {
            out.push(d);
        }
        out
    }

    pub fn mats_mut(&mut self) -> Vec<&mut Mat<S>> {
        let mut out: Vec<&mut Mat<S>> = Vec::new();
        for layer in &mut self.layers {
            match layer {
                GraphLayer::Gcn { weight, bias } => out.extend([weight, bias]),
                GraphLayer::Sage {
                    self_weight,
                    neigh_weight,
                    bias,
                } => out.extend([self_weight, neigh_weight, bias]),
            }
        }
        if let Some(h) = &mut self.head {
            out.extend([&mut h.weight, &mut h.bias]);
        }
        if let Some(d) = &mut self.dummy_row {
            out.push(d);
        }
        out
    }

    /// Bind parameters to `tape` as leaves and run the forward pass.
    ///
    /// `adj` must come from [`build_normalized_adjacency`] for GCN and
    /// [`build_mean_adjacency`] for SAGE. `dummy_rows` lists the rows
    /// replaced by the shared trainable row; pass `&[]` unless the
    /// learned-constant strategy is active. Dropout fires only when
    /// `train` is set, drawing its masks from `rng`.
    pub fn forward(
        &self,
        tape: &Tape<S>,
        adj: &Rc<CsrMatrix<S>>,
        features: &Mat<S>,
        dummy_rows: &[usize],
        train: bool,
        rng: &mut ChaCha20Rng,
    ) -> Result<ForwardPass, ModelError> {
        if features.cols() != self.in_dim {
            return Err(ModelError::FeatureWidth {
                expected: self.in_dim,
                got: features.cols(),
            });
        }
        let mut params = Vec::new();
        let mut x = tape.leaf(features.clone(), false);

        let dummy_tensor = self.dummy_row.as_ref().map(|r| tape.leaf(r.clone(), true));
        if let Some(shared) = dummy_tensor {
            if !dummy_rows.is_empty() {
                x = tape.overwrite_rows_broadcast(x, shared, dummy_rows)?;
            }
        }

        let num_layers = self.layers.len();
        for (i, layer) in self.layers.iter().enumerate() {
            x = match layer {
                GraphLayer::Gcn { weight, bias } => {
                    let w = tape.leaf(weight.clone(), true);
                    let b = tape.leaf(bias.clone(), true);
                    params.extend([w, b]);
                    let agg = tape.spmm(adj, x)?;
                    tape.add_bias(tape.matmul(agg, w)?, b)?
                }
                GraphLayer::Sage {
                    self_weight,
                    neigh_weight,
                    bias,
                } => {
                    let ws = tape.leaf(self_weight.clone(), true);
                    let wn = tape.leaf(neigh_weight.clone(), true);
                    let b = tape.leaf(bias.clone(), true);
                    params.extend([ws, wn, b]);
                    let own = tape.matmul(x, ws)?;
                    let agg = tape.matmul(tape.spmm(adj, x)?, wn)?;
                    tape.add_bias(tape.add(own, agg)?, b)?
                }
            };
            let linear_tail = self.head.is_none() && i + 1 == num_layers;
            if !linear_tail {
                x = tape.relu(x);
                x = tape.dropout(x, self.dropout_keep, train, rng)?;
            }
        }

        if let Some(head) = &self.head {
            let w = tape.leaf(head.weight.clone(), true);
            let b = tape.leaf(head.bias.clone(), true);
            params.extend([w, b]);
            x = tape.add_bias(tape.matmul(x, w)?, b)?;
        }
        if let Some(shared) = dummy_tensor {
            params.push(shared);
        }
        debug_assert_eq!(params.len(), self.mats().len());
        Ok(ForwardPass {
            output: x,
            param_tensors: params,
        })
    }

    /// Deterministic eval-mode output (logits or embeddings) as a
    /// plain matrix.
    pub fn eval_output(
        &self,
        adj: &Rc<CsrMatrix<S>>,
        features: &Mat<S>,
        dummy_rows: &[usize],
    ) -> Result<Mat<S>, ModelError> {
        let tape = Tape::new();
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let fwd = self.forward(&tape, adj, features, dummy_rows, false, &mut rng)?;
        Ok(tape.value(fwd.output))
    }

    /// The propagation operator matching this architecture.
    pub fn build_adjacency(&self, g: &Graph) -> Rc<CsrMatrix<S>> {
        Rc::new(match self.arch {
            ArchKind::Gcn => build_normalized_adjacency(g),
            ArchKind::Sage => build_mean_adjacency(g),
        })
    }
}

/// A_hat = D^{-1/2} (A + I) D^{-1/2} with D = diag(deg + 1). Symmetric,
/// entries positive, isolated nodes get the single entry 1.
pub fn build_normalized_adjacency<S: Scalar>(g: &Graph) -> CsrMatrix<S> {
    let n = g.num_nodes();
    let inv_sqrt: Vec<f64> = (0..n)
        .map(|u| 1.0 / ((g.neighbors(u).len() + 1) as f64).sqrt())
        .collect();
    let rows: Vec<Vec<(usize, S)>> = (0..n)
        .map(|u| {
            let mut entries: Vec<(usize, S)> = g
                .neighbors(u)
                .iter()
                .map(|&v| (v, S::from_f64(inv_sqrt[u] * inv_sqrt[v])))
                .collect();
            let self_entry = (u, S::from_f64(inv_sqrt[u] * inv_sqrt[u]));
            let pos = entries.partition_point(|&(c, _)| c < u);
            entries.insert(pos, self_entry);
            entries
        })
        .collect();
    CsrMatrix::from_rows(n, n, &rows)
}

/// Row-stochastic mean aggregator: row u holds 1/deg(u) at each
/// neighbor, no self entry; degree-0 rows are empty so they aggregate
/// to zero.
pub fn build_mean_adjacency<S: Scalar>(g: &Graph) -> CsrMatrix<S> {
    let n = g.num_nodes();
    let rows: Vec<Vec<(usize, S)>> = (0..n)
        .map(|u| {
            let neigh = g.neighbors(u);
            if neigh.is_empty() {
                return Vec::new();
            }
            let w = S::from_f64(1.0 / neigh.len() as f64);
            neigh.iter().map(|&v| (v, w)).collect()
        })
        .collect();
    CsrMatrix::from_rows(n, n, &rows)
}

/// sigmoid(<z_u, z_v>) on rows of an embedding matrix.
pub fn dot_product_baseline<S: Scalar>(
    embeddings: &Mat<S>,
    u: usize,
    v: usize,
) -> Result<f64, ModelError> {
    let n = embeddings.rows();
    for id in [u, v] {
        if id >= n {
            return Err(ModelError::Graph(GraphError::NodeOutOfRange {
                id,
                num_nodes: n,
            }));
        }
    }
    let dot: f64 = embeddings
        .row(u)
        .iter()
        .zip(embeddings.row(v))
        .map(|(&a, &b)| a.to_f64() * b.to_f64())
        .sum();
    Ok(sigmoid_f64(dot))
}

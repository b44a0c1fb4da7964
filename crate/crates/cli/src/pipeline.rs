//! The glue every train-like subcommand shares: loading a split
//! directory, synthesizing or reading features, rebuilding the
//! augmented graph, and running training at either precision. All of
//! it is deterministic given the artifacts and the resolved config, so
//! `transform`, `train`, `evaluate`, and `baseline` agree on H without
//! passing it between processes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use edge2node_core::{
    build_graph, train, transform, ArchKind, EdgeList, EpochRecord, Graph, Mat, ModelConfig,
    ModelParams, Scalar, TrainConfig, TrainOutcome, TransformConfig, TransformResult,
};

use crate::config::{FeatureSynthesis, ResolvedConfig};
use crate::error::CliError;
use crate::io::{atomic_write, load_features, read_dense_edges, sha256_file};
use crate::manifest::{
    self, FileStamp, NegativesManifest, SplitCounts, SplitManifest,
};

/// Split-directory artifacts: positives always, negatives when the
/// sampling step has run.
pub struct SplitData {
    pub dir: PathBuf,
    pub split: SplitManifest,
    pub train_pos: EdgeList,
    pub valid_pos: EdgeList,
    pub test_pos: EdgeList,
    pub negatives: Option<NegativeData>,
}

pub struct NegativeData {
    pub manifest: NegativesManifest,
    pub train_neg: EdgeList,
    pub valid_neg: EdgeList,
    pub test_neg: EdgeList,
}

pub fn load_split(dir: &Path) -> Result<SplitData, CliError> {
    let split: SplitManifest = manifest::read_json(&dir.join(manifest::SPLIT_MANIFEST))?;
    let data = SplitData {
        train_pos: read_dense_edges(&dir.join(manifest::TRAIN_EDGES))?,
        valid_pos: read_dense_edges(&dir.join(manifest::VALID_EDGES))?,
        test_pos: read_dense_edges(&dir.join(manifest::TEST_EDGES))?,
        negatives: load_negatives(dir)?,
        split,
        dir: dir.to_path_buf(),
    };
    for (name, edges, expected) in [
        ("train", &data.train_pos, data.split.counts.train),
        ("valid", &data.valid_pos, data.split.counts.valid),
        ("test", &data.test_pos, data.split.counts.test),
    ] {
        if edges.len() != expected {
            return Err(CliError::new(
                "json_error",
                format!(
                    "{}: {name} split holds {} edges but the manifest says {expected}",
                    dir.display(),
                    edges.len()
                ),
            ));
        }
    }
    Ok(data)
}

fn load_negatives(dir: &Path) -> Result<Option<NegativeData>, CliError> {
    let path = dir.join(manifest::NEGATIVES_MANIFEST);
    if !path.exists() {
        return Ok(None);
    }
    Ok(Some(NegativeData {
        manifest: manifest::read_json(&path)?,
        train_neg: read_dense_edges(&dir.join(manifest::TRAIN_NEGATIVES))?,
        valid_neg: read_dense_edges(&dir.join(manifest::VALID_NEGATIVES))?,
        test_neg: read_dense_edges(&dir.join(manifest::TEST_NEGATIVES))?,
    }))
}

impl SplitData {
    pub fn require_negatives(&self) -> Result<&NegativeData, CliError> {
        self.negatives.as_ref().ok_or_else(|| {
            CliError::new(
                "missing_input",
                format!(
                    "{}: no negatives found; run 'sample-negatives' first",
                    self.dir.display()
                ),
            )
        })
    }
}

/// Node features for the training graph: an explicit file wins,
/// otherwise the configured synthesis.
pub fn resolve_features(
    num_nodes: usize,
    features: Option<&Path>,
    synthesis: FeatureSynthesis,
) -> Result<(Mat<f64>, String), CliError> {
    match features {
        Some(path) => Ok((load_features(path, num_nodes)?, path.display().to_string())),
        None => Ok(match synthesis {
            FeatureSynthesis::Identity => (Mat::identity(num_nodes), "identity".to_string()),
            FeatureSynthesis::Ones => (
                Mat::from_elem(num_nodes, 1, 1.0),
                "ones".to_string(),
            ),
        }),
    }
}

/// The training graph plus the augmented graph every subcommand
/// derives from the same artifacts and config.
pub struct Prepared {
    pub graph: Graph,
    pub res: TransformResult,
    pub feature_source: String,
}

pub fn prepare(data: &SplitData, cfg: &ResolvedConfig) -> Result<Prepared, CliError> {
    let neg = data.require_negatives()?;
    let (features, feature_source) =
        resolve_features(data.split.num_nodes, cfg.features.as_deref(), cfg.feature_synthesis)?;
    let graph = build_graph(data.split.num_nodes, data.train_pos.as_slice(), features)?.graph;
    let evals = data
        .valid_pos
        .union(&data.test_pos)
        .union(&neg.valid_neg)
        .union(&neg.test_neg);
    let res = transform(
        &graph,
        &data.train_pos,
        &neg.train_neg,
        &evals,
        &TransformConfig {
            dummy_feature_strategy: cfg.dummy_feature_strategy,
            include_candidate_edges: cfg.include_candidate_edges,
            loss_mask_strategy: cfg.loss_mask_strategy,
        },
    )?;
    Ok(Prepared {
        graph,
        res,
        feature_source,
    })
}

pub fn model_config(cfg: &ResolvedConfig) -> ModelConfig {
    ModelConfig {
        arch: cfg.arch,
        hidden: cfg.hidden,
        num_layers: cfg.num_layers,
        dropout_keep: cfg.dropout_keep,
        learned_dummy: matches!(
            cfg.dummy_feature_strategy,
            edge2node_core::DummyFeatureStrategy::LearnedConstant
        ),
        seed: cfg.seed,
    }
}

pub fn train_config(cfg: &ResolvedConfig) -> TrainConfig {
    let mut t = TrainConfig::new(cfg.seed);
    t.learning_rate = cfg.learning_rate;
    t.weight_decay = cfg.weight_decay;
    t.max_epochs = cfg.max_epochs;
    t.patience = cfg.patience;
    t
}

/// Train the classifier on the prepared data, early-stopping on the
/// validation candidates when the split has any.
pub fn run_training<S: Scalar>(
    data: &SplitData,
    prepared: &Prepared,
    cfg: &ResolvedConfig,
) -> Result<TrainOutcome<S>, CliError> {
    let neg = data.require_negatives()?;
    let init = ModelParams::<S>::new_classifier(&model_config(cfg), prepared.graph.feature_dim())?;
    let validation = (!data.valid_pos.is_empty() && !neg.valid_neg.is_empty())
        .then_some((&data.valid_pos, &neg.valid_neg));
    Ok(train(&prepared.res, init, &train_config(cfg), validation)?)
}

/// The trace CSV: epoch, training loss, validation AUC (blank when no
/// validation ran). `{}` on f64 prints the shortest round-trip form,
/// so identical runs serialize identically byte for byte.
pub fn write_trace(path: &Path, trace: &[EpochRecord]) -> Result<(), CliError> {
    let mut out = String::from("epoch,loss,val_auc\n");
    for r in trace {
        let val = r.val_auc.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!("{},{},{}\n", r.epoch, r.loss, val));
    }
    atomic_write(path, out.as_bytes())
}

/// Content hashes of every artifact a training run consumed.
pub fn input_stamps(data: &SplitData, cfg: &ResolvedConfig) -> Result<BTreeMap<String, FileStamp>, CliError> {
    let mut stamps = BTreeMap::new();
    let mut add = |name: &str, path: &Path| -> Result<(), CliError> {
        stamps.insert(
            name.to_string(),
            FileStamp {
                path: path.display().to_string(),
                sha256: sha256_file(path)?,
            },
        );
        Ok(())
    };
    for name in [
        manifest::SPLIT_MANIFEST,
        manifest::TRAIN_EDGES,
        manifest::VALID_EDGES,
        manifest::TEST_EDGES,
        manifest::NEGATIVES_MANIFEST,
        manifest::TRAIN_NEGATIVES,
        manifest::VALID_NEGATIVES,
        manifest::TEST_NEGATIVES,
    ] {
        add(name, &data.dir.join(name))?;
    }
    if let Some(features) = &cfg.features {
        add("features", features)?;
    }
    Ok(stamps)
}

pub fn negative_counts(neg: &NegativeData) -> SplitCounts {
    SplitCounts {
        train: neg.train_neg.len(),
        valid: neg.valid_neg.len(),
        test: neg.test_neg.len(),
    }
}

/// Evaluation needs every test candidate to carry a dummy; arch of the
/// checkpoint must match the propagation operator the config asks for.
pub fn check_arch(expected: ArchKind, actual: ArchKind) -> Result<(), CliError> {
    if expected != actual {
        return Err(CliError::new(
            "bad_checkpoint",
            format!(
                "checkpoint architecture {} does not match configured {}",
                actual.name(),
                expected.name()
            ),
        ));
    }
    Ok(())
}

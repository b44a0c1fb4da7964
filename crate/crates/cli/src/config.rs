//! Configuration: an optional JSON file of defaults merged under
//! explicit command-line flags. The fully resolved snapshot is what a
//! run manifest records, and that snapshot parses back as a config
//! file, so a recorded run can be replayed verbatim.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use edge2node_core::{ArchKind, DummyFeatureStrategy, LossMaskStrategy};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F32,
    F64,
}

impl Precision {
    pub fn name(self) -> &'static str {
        match self {
            Precision::F32 => "f32",
            Precision::F64 => "f64",
        }
    }
}

/// Fallback node features when no feature file is given.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSynthesis {
    /// One-hot rows, d = n.
    Identity,
    /// A single constant-1 column.
    Ones,
}

/// Mirrors of core enums so clap can parse them with the exact
/// spellings the JSON config uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ArchFlag {
    Gcn,
    Sage,
}

impl ArchFlag {
    pub fn core(self) -> ArchKind {
        match self {
            ArchFlag::Gcn => ArchKind::Gcn,
            ArchFlag::Sage => ArchKind::Sage,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum DummyFeatFlag {
    Mean,
    Zeros,
    ConcatHalved,
    LearnedConstant,
}

impl DummyFeatFlag {
    pub fn core(self) -> DummyFeatureStrategy {
        match self {
            DummyFeatFlag::Mean => DummyFeatureStrategy::Mean,
            DummyFeatFlag::Zeros => DummyFeatureStrategy::Zeros,
            DummyFeatFlag::ConcatHalved => DummyFeatureStrategy::ConcatHalved,
            DummyFeatFlag::LearnedConstant => DummyFeatureStrategy::LearnedConstant,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum LossMaskFlag {
    DummiesOnly,
    AllNodes,
}

impl LossMaskFlag {
    pub fn core(self) -> LossMaskStrategy {
        match self {
            LossMaskFlag::DummiesOnly => LossMaskStrategy::DummiesOnly,
            LossMaskFlag::AllNodes => LossMaskStrategy::AllNodes,
        }
    }
}

/// Everything a config file may set; flags override field by field.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub seed: Option<u64>,
    pub precision: Option<Precision>,
    pub out: Option<PathBuf>,
    pub fractions: Option<[f64; 3]>,
    pub ratio: Option<f64>,
    pub arch: Option<ArchKind>,
    pub hidden: Option<usize>,
    pub num_layers: Option<usize>,
    pub dropout_keep: Option<f64>,
    pub dummy_feature_strategy: Option<DummyFeatureStrategy>,
    pub include_candidate_edges: Option<bool>,
    pub loss_mask_strategy: Option<LossMaskStrategy>,
    pub feature_synthesis: Option<FeatureSynthesis>,
    pub features: Option<PathBuf>,
    pub learning_rate: Option<f64>,
    pub weight_decay: Option<f64>,
    pub max_epochs: Option<usize>,
    pub patience: Option<usize>,
    pub ks: Option<Vec<usize>>,
}

impl PipelineConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(PipelineConfig::default());
        };
        let text = fs::read_to_string(path).map_err(|e| CliError::missing_input(path, &e))?;
        serde_json::from_str(&text).map_err(|e| {
            CliError::new(
                "invalid_config",
                format!("{}: {e}", path.display()),
            )
        })
    }
}

/// The concrete values one run actually used. Serializes with every
/// field present; feeding it back via `--config` replays the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub seed: u64,
    pub precision: Precision,
    pub ratio: f64,
    pub arch: ArchKind,
    pub hidden: usize,
    pub num_layers: usize,
    pub dropout_keep: f64,
    pub dummy_feature_strategy: DummyFeatureStrategy,
    pub include_candidate_edges: bool,
    pub loss_mask_strategy: LossMaskStrategy,
    pub feature_synthesis: FeatureSynthesis,
    pub features: Option<PathBuf>,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub max_epochs: usize,
    pub patience: usize,
    pub ks: Vec<usize>,
}

/// Flag-or-file resolution for the settings train-like subcommands
/// share. The `seed` handed in has already passed [`require_seed`].
#[allow(clippy::too_many_arguments)]
pub fn resolve_train_settings(
    cfg: &PipelineConfig,
    seed: u64,
    precision: Option<Precision>,
    arch: Option<ArchFlag>,
    dummy_feat: Option<DummyFeatFlag>,
    include_candidate_edges: Option<bool>,
    loss_mask: Option<LossMaskFlag>,
    feature_synthesis: Option<FeatureSynthesis>,
    features: Option<PathBuf>,
    ks: Option<Vec<usize>>,
) -> ResolvedConfig {
    ResolvedConfig {
        seed,
        precision: precision.or(cfg.precision).unwrap_or(Precision::F32),
        ratio: cfg.ratio.unwrap_or(1.0),
        arch: arch.map(ArchFlag::core).or(cfg.arch).unwrap_or(ArchKind::Gcn),
        hidden: cfg.hidden.unwrap_or(64),
        num_layers: cfg.num_layers.unwrap_or(2),
        dropout_keep: cfg.dropout_keep.unwrap_or(0.5),
        dummy_feature_strategy: dummy_feat
            .map(DummyFeatFlag::core)
            .or(cfg.dummy_feature_strategy)
            .unwrap_or_default(),
        include_candidate_edges: include_candidate_edges
            .or(cfg.include_candidate_edges)
            .unwrap_or(true),
        loss_mask_strategy: loss_mask
            .map(LossMaskFlag::core)
            .or(cfg.loss_mask_strategy)
            .unwrap_or_default(),
        feature_synthesis: feature_synthesis
            .or(cfg.feature_synthesis)
            .unwrap_or(FeatureSynthesis::Identity),
        features: features.or_else(|| cfg.features.clone()),
        learning_rate: cfg.learning_rate.unwrap_or(0.01),
        weight_decay: cfg.weight_decay.unwrap_or(5e-4),
        max_epochs: cfg.max_epochs.unwrap_or(200),
        patience: cfg.patience.unwrap_or(20),
        ks: ks.or_else(|| cfg.ks.clone()).unwrap_or_else(|| vec![10, 20, 50]),
    }
}

/// Stochastic subcommands refuse to guess a seed.
pub fn require_seed(flag: Option<u64>, cfg: &PipelineConfig, command: &str) -> Result<u64, CliError> {
    flag.or(cfg.seed).ok_or_else(|| {
        CliError::new(
            "missing_seed",
            format!("'{command}' is stochastic; pass --seed or set \"seed\" in the config"),
        )
    })
}

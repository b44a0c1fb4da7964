//! `evaluate`: score the held-out test candidates with a trained
//! checkpoint and write the evaluation report. The augmented graph is
//! re-derived from the split artifacts and the settings recorded in the
//! run manifest next to the checkpoint, so the model scores the same
//! graph it was trained on; explicit flags still override.

use std::path::PathBuf;

use clap::Args;

use edge2node_core::evaluate;

use crate::checkpoint::{load_checkpoint, LoadedCheckpoint};
use crate::config::{
    resolve_train_settings, DummyFeatFlag, FeatureSynthesis, LossMaskFlag, PipelineConfig,
    ResolvedConfig,
};
use crate::error::CliError;
use crate::io::emit;
use crate::manifest::{self, RunManifest};
use crate::pipeline::{load_split, prepare};

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Directory holding the split artifacts (negatives included).
    #[arg(long)]
    pub split: PathBuf,
    /// Trained model; defaults to model.ckpt in the split directory.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Hits@K cutoffs, comma-separated.
    #[arg(long = "k", value_delimiter = ',')]
    pub ks: Option<Vec<usize>>,
    #[arg(long = "dummy-feat", value_enum)]
    pub dummy_feat: Option<DummyFeatFlag>,
    #[arg(long)]
    pub include_candidate_edges: Option<bool>,
    #[arg(long, value_enum)]
    pub loss_mask: Option<LossMaskFlag>,
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub feature_synthesis: Option<FeatureSynthesis>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory; defaults to the split directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &EvaluateArgs) -> Result<(), CliError> {
    let cfg = PipelineConfig::load(args.config.as_deref())?;
    let ckpt_path = args
        .checkpoint
        .clone()
        .unwrap_or_else(|| args.split.join(manifest::CHECKPOINT));
    // Base settings come from the run manifest next to the checkpoint;
    // without one (hand-carried checkpoint) fall back to flags/config.
    let trained: Option<RunManifest> = ckpt_path
        .parent()
        .and_then(|d| manifest::read_json(&d.join(manifest::RUN_MANIFEST)).ok());
    let settings = match trained {
        Some(m) => apply_overrides(m.config, &cfg, args),
        None => resolve_train_settings(
            &cfg,
            cfg.seed.unwrap_or(0),
            None,
            None,
            args.dummy_feat,
            args.include_candidate_edges,
            args.loss_mask,
            args.feature_synthesis,
            args.features.clone(),
            args.ks.clone(),
        ),
    };
    let data = load_split(&args.split)?;
    let prepared = prepare(&data, &settings)?;
    let neg = data.require_negatives()?;
    let loaded = load_checkpoint(&ckpt_path)?;

    // File name only: keeping the directory out of the report lets
    // identical runs in different locations produce identical bytes.
    let ckpt_name = ckpt_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let echo = serde_json::json!({
        "checkpoint": ckpt_name,
        "precision": loaded.precision_name(),
        "settings": settings,
    });
    let report = match &loaded {
        LoadedCheckpoint::F64(params) => evaluate(
            params,
            &prepared.res,
            &data.test_pos,
            &neg.test_neg,
            &settings.ks,
            echo,
        )?,
        LoadedCheckpoint::F32(params) => evaluate(
            params,
            &prepared.res,
            &data.test_pos,
            &neg.test_neg,
            &settings.ks,
            echo,
        )?,
    };

    let out = args.out.clone().unwrap_or_else(|| args.split.clone());
    manifest::write_json(&out.join(manifest::EVAL_REPORT), &report)?;
    emit(serde_json::to_string_pretty(&report)?);
    Ok(())
}

/// Replace recorded training settings with any the user gave explicitly.
/// Only graph-shaping knobs and the Hits@K cutoffs make sense here; the
/// architecture and precision are fixed by the checkpoint itself.
fn apply_overrides(
    mut s: ResolvedConfig,
    cfg: &PipelineConfig,
    args: &EvaluateArgs,
) -> ResolvedConfig {
    if let Some(v) = args
        .dummy_feat
        .map(DummyFeatFlag::core)
        .or(cfg.dummy_feature_strategy)
    {
        s.dummy_feature_strategy = v;
    }
    if let Some(v) = args.include_candidate_edges.or(cfg.include_candidate_edges) {
        s.include_candidate_edges = v;
    }
    if let Some(v) = args.loss_mask.map(LossMaskFlag::core).or(cfg.loss_mask_strategy) {
        s.loss_mask_strategy = v;
    }
    if let Some(v) = args.feature_synthesis.or(cfg.feature_synthesis) {
        s.feature_synthesis = v;
    }
    if let Some(v) = args.features.clone().or_else(|| cfg.features.clone()) {
        s.features = Some(v);
    }
    if let Some(v) = args.ks.clone().or_else(|| cfg.ks.clone()) {
        s.ks = v;
    }
    s
}

//! `baseline`: the paired comparison. Train the dummy-node classifier
//! and the dot-product embedder on the identical split and negatives,
//! evaluate both on the identical test candidates, and write one
//! report holding both scores.

use std::path::{Path, PathBuf};

use clap::Args;

use edge2node_core::{
    baseline_metrics, evaluate, train_baseline, ModelParams, Scalar,
};

use crate::config::{
    resolve_train_settings, require_seed, ArchFlag, DummyFeatFlag, FeatureSynthesis,
    LossMaskFlag, PipelineConfig, Precision, ResolvedConfig,
};
use crate::error::CliError;
use crate::io::emit;
use crate::manifest;
use crate::pipeline::{load_split, model_config, prepare, run_training, train_config, Prepared, SplitData};

#[derive(Args, Debug)]
pub struct BaselineArgs {
    /// Directory holding the split artifacts (negatives included).
    #[arg(long)]
    pub split: PathBuf,
    #[arg(long, value_enum)]
    pub arch: Option<ArchFlag>,
    #[arg(long, value_enum)]
    pub precision: Option<Precision>,
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
    /// Hits@K cutoffs, comma-separated.
    #[arg(long = "k", value_delimiter = ',')]
    pub ks: Option<Vec<usize>>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; defaults to the split directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &BaselineArgs) -> Result<(), CliError> {
    let cfg = PipelineConfig::load(args.config.as_deref())?;
    let seed = require_seed(args.seed, &cfg, "baseline")?;
    let settings = resolve_train_settings(
        &cfg,
        seed,
        args.precision,
        args.arch,
        args.dummy_feat,
        args.include_candidate_edges,
        args.loss_mask,
        args.feature_synthesis,
        args.features.clone(),
        args.ks.clone(),
    );
    let data = load_split(&args.split)?;
    let prepared = prepare(&data, &settings)?;
    let out = args.out.clone().unwrap_or_else(|| args.split.clone());

    match settings.precision {
        Precision::F64 => finish::<f64>(&data, &prepared, &settings, &out),
        Precision::F32 => finish::<f32>(&data, &prepared, &settings, &out),
    }
}

fn finish<S: Scalar>(
    data: &SplitData,
    prepared: &Prepared,
    settings: &ResolvedConfig,
    out: &Path,
) -> Result<(), CliError> {
    let neg = data.require_negatives()?;

    let outcome = run_training::<S>(data, prepared, settings)?;
    let e2n_report = evaluate(
        &outcome.params,
        &prepared.res,
        &data.test_pos,
        &neg.test_neg,
        &settings.ks,
        serde_json::json!("edge2node"),
    )?;

    let embedder = ModelParams::<S>::new_embedder(&model_config(settings), prepared.graph.feature_dim())?;
    let validation = (!data.valid_pos.is_empty() && !neg.valid_neg.is_empty())
        .then_some((&data.valid_pos, &neg.valid_neg));
    let base_out = train_baseline(
        &prepared.graph,
        &data.train_pos,
        &neg.train_neg,
        embedder,
        &train_config(settings),
        validation,
    )?;
    let (base_auc, base_hits) = baseline_metrics(
        &base_out.params,
        &prepared.graph,
        &data.test_pos,
        &neg.test_neg,
        &settings.ks,
    )?;

    let comparison = serde_json::json!({
        "edge2node": { "auc": e2n_report.auc, "hits_at_k": e2n_report.hits_at_k },
        "baseline": { "auc": base_auc, "hits_at_k": base_hits },
        "config": settings,
    });
    manifest::write_json(&out.join(manifest::COMPARISON_REPORT), &comparison)?;
    emit(serde_json::to_string_pretty(&comparison)?);
    Ok(())
}

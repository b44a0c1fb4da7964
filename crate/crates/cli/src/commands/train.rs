//! `train`: fit the dummy-node classifier on the split artifacts and
//! persist checkpoint, per-epoch trace, and the run manifest that can
//! replay the whole thing.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;

use edge2node_core::{Scalar, PRNG_NAME};

use crate::checkpoint::save_checkpoint;
use crate::config::{
    resolve_train_settings, require_seed, ArchFlag, DummyFeatFlag, FeatureSynthesis,
    LossMaskFlag, PipelineConfig, Precision, ResolvedConfig,
};
use crate::error::CliError;
use crate::io::emit;
use crate::manifest::{self, RunManifest};
use crate::pipeline::{
    input_stamps, load_split, negative_counts, prepare, run_training, write_trace, Prepared,
    SplitData,
};

#[derive(Args, Debug)]
pub struct TrainArgs {
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
    /// Hits@K cutoffs recorded for evaluation, comma-separated.
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

pub fn run(args: &TrainArgs) -> Result<(), CliError> {
    let cfg = PipelineConfig::load(args.config.as_deref())?;
    let seed = require_seed(args.seed, &cfg, "train")?;
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
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| args.split.clone());

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
    let outcome = run_training::<S>(data, prepared, settings)?;

    let ckpt_path = out.join(manifest::CHECKPOINT);
    save_checkpoint(&ckpt_path, &outcome.params)?;
    write_trace(&out.join(manifest::TRACE), &outcome.trace)?;

    let run_manifest = RunManifest {
        version: manifest::VERSION.to_string(),
        command: "train".to_string(),
        prng: PRNG_NAME.to_string(),
        num_nodes: data.split.num_nodes,
        positives: data.split.counts,
        negatives: negative_counts(data.require_negatives()?),
        config: settings.clone(),
        inputs: input_stamps(data, settings)?,
        outputs: BTreeMap::from([
            (
                "checkpoint".to_string(),
                ckpt_path.display().to_string(),
            ),
            (
                "trace".to_string(),
                out.join(manifest::TRACE).display().to_string(),
            ),
        ]),
    };
    manifest::write_json(&out.join(manifest::RUN_MANIFEST), &run_manifest)?;

    match outcome.best_val_auc {
        Some(auc) => emit(format!(
            "train: {} epochs, best epoch {} with validation AUC {auc}",
            outcome.trace.len(),
            outcome.best_epoch
        )),
        None => emit(format!(
            "train: {} epochs (no validation split)",
            outcome.trace.len()
        )),
    }
    Ok(())
}

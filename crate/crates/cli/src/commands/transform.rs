//! `transform`: build the augmented graph from the split artifacts and
//! write a line-per-node audit manifest of it. Training re-derives the
//! same graph from the same settings, so this artifact exists to be
//! read, diffed, and checked, not to be fed back in.

use std::path::PathBuf;

use clap::Args;

use edge2node_core::{CandidateOrigin, TransformResult};

use crate::config::{
    resolve_train_settings, DummyFeatFlag, FeatureSynthesis, LossMaskFlag, PipelineConfig,
};
use crate::error::CliError;
use crate::io::{atomic_write, emit};
use crate::manifest::{self, HCounts, TransformManifest};
use crate::pipeline::{load_split, prepare};

#[derive(Args, Debug)]
pub struct TransformArgs {
    /// Directory holding the split artifacts (negatives included).
    #[arg(long)]
    pub split: PathBuf,
    /// How dummy nodes get their feature rows.
    #[arg(long = "dummy-feat", value_enum)]
    pub dummy_feat: Option<DummyFeatFlag>,
    /// Keep sampled negative pairs as message-passing edges.
    #[arg(long)]
    pub include_candidate_edges: Option<bool>,
    /// Which nodes the training loss covers.
    #[arg(long, value_enum)]
    pub loss_mask: Option<LossMaskFlag>,
    /// Node feature file; absent means synthesized features.
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

fn origin_name(origin: CandidateOrigin) -> &'static str {
    match origin {
        CandidateOrigin::Positive => "positive",
        CandidateOrigin::Negative => "negative",
        CandidateOrigin::Eval => "eval",
    }
}

/// One row per node of H: id, class label ('-' when withheld), loss
/// mask bit, and for dummies the candidate pair they stand for.
pub fn render_h_manifest(res: &TransformResult) -> String {
    let mut out = String::from("# node\tlabel\tmasked\torigin\tu\tv\n");
    for node in 0..res.h().num_nodes() {
        let label = res.labels()[node]
            .class_id()
            .map(|c| c.to_string())
            .unwrap_or_else(|| "-".to_string());
        let masked = u8::from(res.loss_mask()[node]);
        match res.edge_of_dummy(node) {
            Some(info) => out.push_str(&format!(
                "{node}\t{label}\t{masked}\t{}\t{}\t{}\n",
                origin_name(info.origin),
                info.u,
                info.v
            )),
            None => out.push_str(&format!("{node}\t{label}\t{masked}\t-\t-\t-\n")),
        }
    }
    out
}

pub fn run(args: &TransformArgs) -> Result<(), CliError> {
    let cfg = PipelineConfig::load(args.config.as_deref())?;
    // the transform itself is deterministic; the seed is only echoed
    let settings = resolve_train_settings(
        &cfg,
        cfg.seed.unwrap_or(0),
        None,
        None,
        args.dummy_feat,
        args.include_candidate_edges,
        args.loss_mask,
        args.feature_synthesis,
        args.features.clone(),
        None,
    );
    let data = load_split(&args.split)?;
    let prepared = prepare(&data, &settings)?;
    let out = args.out.clone().unwrap_or_else(|| args.split.clone());

    atomic_write(
        &out.join(manifest::H_MANIFEST),
        render_h_manifest(&prepared.res).as_bytes(),
    )?;
    let res = &prepared.res;
    let tm = TransformManifest {
        version: manifest::VERSION.to_string(),
        dummy_feature_strategy: settings.dummy_feature_strategy,
        include_candidate_edges: settings.include_candidate_edges,
        loss_mask_strategy: settings.loss_mask_strategy,
        feature_source: prepared.feature_source.clone(),
        counts: HCounts {
            original_nodes: res.num_original(),
            dummies: res.num_dummies(),
            h_nodes: res.h().num_nodes(),
            h_edges: res.h().num_edges(),
        },
    };
    manifest::write_json(&out.join(manifest::TRANSFORM_MANIFEST), &tm)?;

    emit(format!(
        "transform: {} original nodes + {} dummies -> {} nodes, {} edges",
        res.num_original(),
        res.num_dummies(),
        res.h().num_nodes(),
        res.h().num_edges()
    ));
    Ok(())
}

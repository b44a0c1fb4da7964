//! `sample-negatives`: draw absent pairs for all three splits with
//! every positive edge forbidden, so no split's negatives are another
//! split's positives, and the three negative sets stay disjoint.

use std::path::PathBuf;

use clap::Args;

use edge2node_core::{
    build_graph, sample_negatives, sample_negatives_count, EdgeList, Mat, SamplerConfig,
    PRNG_NAME,
};

use crate::config::{require_seed, PipelineConfig};
use crate::error::CliError;
use crate::io::{emit, write_dense_edges};
use crate::manifest::{self, NegativesManifest, SplitCounts};
use crate::pipeline::load_split;

/// Rejection-sampling attempt budget per requested negative.
const MAX_ATTEMPTS_FACTOR: usize = 1000;

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// Directory holding the split artifacts.
    #[arg(long)]
    pub split: PathBuf,
    /// Negatives per training positive.
    #[arg(long)]
    pub ratio: Option<f64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; defaults to the split directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &SampleArgs) -> Result<(), CliError> {
    let cfg = PipelineConfig::load(args.config.as_deref())?;
    let seed = require_seed(args.seed, &cfg, "sample-negatives")?;
    let ratio = args.ratio.or(cfg.ratio).unwrap_or(1.0);
    let data = load_split(&args.split)?;
    let out = args.out.clone().unwrap_or_else(|| args.split.clone());

    // features are irrelevant to sampling; a 1-column stub avoids the
    // n x n identity allocation
    let g = build_graph(
        data.split.num_nodes,
        data.train_pos.as_slice(),
        Mat::from_elem(data.split.num_nodes, 1, 1.0),
    )?
    .graph;

    let held = data.valid_pos.union(&data.test_pos);
    let train_neg = sample_negatives(&g, &SamplerConfig::new(seed).with_ratio(ratio), &held)?;
    // empty valid/test splits are legal; training just skips validation
    let forbid = held.union(&train_neg);
    let valid_neg = if data.valid_pos.is_empty() {
        EdgeList::empty()
    } else {
        sample_negatives_count(
            &g,
            data.valid_pos.len(),
            seed.wrapping_add(1),
            MAX_ATTEMPTS_FACTOR,
            &forbid,
        )?
    };
    let forbid = forbid.union(&valid_neg);
    let test_neg = if data.test_pos.is_empty() {
        EdgeList::empty()
    } else {
        sample_negatives_count(
            &g,
            data.test_pos.len(),
            seed.wrapping_add(2),
            MAX_ATTEMPTS_FACTOR,
            &forbid,
        )?
    };

    write_dense_edges(&out.join(manifest::TRAIN_NEGATIVES), &train_neg)?;
    write_dense_edges(&out.join(manifest::VALID_NEGATIVES), &valid_neg)?;
    write_dense_edges(&out.join(manifest::TEST_NEGATIVES), &test_neg)?;
    let negatives = NegativesManifest {
        version: manifest::VERSION.to_string(),
        prng: PRNG_NAME.to_string(),
        seed,
        ratio,
        counts: SplitCounts {
            train: train_neg.len(),
            valid: valid_neg.len(),
            test: test_neg.len(),
        },
    };
    manifest::write_json(&out.join(manifest::NEGATIVES_MANIFEST), &negatives)?;

    emit(format!(
        "sample-negatives: train {} / valid {} / test {} (ratio {ratio})",
        train_neg.len(),
        valid_neg.len(),
        test_neg.len()
    ));
    Ok(())
}

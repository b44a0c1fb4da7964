//! `split`: ingest a raw edge file (arbitrary string node tokens),
//! remap to dense ids, and partition the edges into train/valid/test.

use std::path::PathBuf;

use clap::Args;

use edge2node_core::{split_edges, PRNG_NAME};

use crate::config::{require_seed, PipelineConfig};
use crate::error::CliError;
use crate::io::{emit, load_edge_list, sha256_file, write_dense_edges, write_id_map};
use crate::manifest::{self, FileStamp, SplitCounts, SplitManifest};

#[derive(Args, Debug)]
pub struct SplitArgs {
    /// Raw edge list: one edge per line, two whitespace-separated node
    /// tokens; '#' starts a comment.
    #[arg(long)]
    pub edges: PathBuf,
    /// Train, valid, test fractions summing to 1, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub fractions: Option<Vec<f64>>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Directory the split artifacts are written into.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &SplitArgs) -> Result<(), CliError> {
    let cfg = PipelineConfig::load(args.config.as_deref())?;
    let seed = require_seed(args.seed, &cfg, "split")?;
    let fractions = match &args.fractions {
        Some(v) if v.len() == 3 => [v[0], v[1], v[2]],
        Some(v) => {
            return Err(CliError::new(
                "invalid_config",
                format!("--fractions needs three values, got {}", v.len()),
            ));
        }
        None => cfg.fractions.unwrap_or([0.85, 0.05, 0.10]),
    };

    let loaded = load_edge_list(&args.edges)?;
    if loaded.duplicates > 0 {
        eprintln!(
            "warning: {} duplicate edge line(s) collapsed",
            loaded.duplicates
        );
    }
    let (train, valid, test) =
        split_edges(&loaded.edges, (fractions[0], fractions[1], fractions[2]), seed)?;

    write_dense_edges(&args.out.join(manifest::TRAIN_EDGES), &train)?;
    write_dense_edges(&args.out.join(manifest::VALID_EDGES), &valid)?;
    write_dense_edges(&args.out.join(manifest::TEST_EDGES), &test)?;
    write_id_map(&args.out.join(manifest::ID_MAP), &loaded.id_map)?;
    let split = SplitManifest {
        version: manifest::VERSION.to_string(),
        prng: PRNG_NAME.to_string(),
        seed,
        fractions,
        num_nodes: loaded.num_nodes,
        duplicates_dropped: loaded.duplicates,
        source: FileStamp {
            path: args.edges.display().to_string(),
            sha256: sha256_file(&args.edges)?,
        },
        counts: SplitCounts {
            train: train.len(),
            valid: valid.len(),
            test: test.len(),
        },
    };
    manifest::write_json(&args.out.join(manifest::SPLIT_MANIFEST), &split)?;

    emit(format!(
        "split: {} nodes, {} edges -> train {} / valid {} / test {}",
        loaded.num_nodes,
        loaded.edges.len(),
        train.len(),
        valid.len(),
        test.len()
    ));
    Ok(())
}

//! JSON sidecar artifacts. Every file a subcommand writes is described
//! by one of these structs, and every struct round-trips through serde,
//! so downstream subcommands and tests read artifacts through the same
//! types that produced them.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::ResolvedConfig;
use crate::error::CliError;
use crate::io::atomic_write;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

// fixed artifact names inside a split directory
pub const SPLIT_MANIFEST: &str = "split.json";
pub const TRAIN_EDGES: &str = "train.edges";
pub const VALID_EDGES: &str = "valid.edges";
pub const TEST_EDGES: &str = "test.edges";
pub const ID_MAP: &str = "id_map.tsv";
pub const NEGATIVES_MANIFEST: &str = "negatives.json";
pub const TRAIN_NEGATIVES: &str = "train.negatives";
pub const VALID_NEGATIVES: &str = "valid.negatives";
pub const TEST_NEGATIVES: &str = "test.negatives";
pub const TRANSFORM_MANIFEST: &str = "transform.json";
pub const H_MANIFEST: &str = "h_manifest.tsv";
pub const CHECKPOINT: &str = "model.ckpt";
pub const TRACE: &str = "trace.csv";
pub const RUN_MANIFEST: &str = "run_manifest.json";
pub const EVAL_REPORT: &str = "eval_report.json";
pub const COMPARISON_REPORT: &str = "comparison_report.json";
pub const GRADCHECK_REPORT: &str = "gradcheck.json";

/// A file plus its content hash, pinning a run's inputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileStamp {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub valid: usize,
    pub test: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub version: String,
    pub prng: String,
    pub seed: u64,
    pub fractions: [f64; 3],
    pub num_nodes: usize,
    pub duplicates_dropped: usize,
    pub source: FileStamp,
    pub counts: SplitCounts,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NegativesManifest {
    pub version: String,
    pub prng: String,
    pub seed: u64,
    pub ratio: f64,
    pub counts: SplitCounts,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HCounts {
    pub original_nodes: usize,
    pub dummies: usize,
    pub h_nodes: usize,
    pub h_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformManifest {
    pub version: String,
    pub dummy_feature_strategy: edge2node_core::DummyFeatureStrategy,
    pub include_candidate_edges: bool,
    pub loss_mask_strategy: edge2node_core::LossMaskStrategy,
    pub feature_source: String,
    pub counts: HCounts,
}

/// Everything needed to re-execute a training run bit-identically:
/// the resolved config (a valid `--config` payload), the PRNG family,
/// and content hashes of every input artifact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub command: String,
    pub prng: String,
    pub num_nodes: usize,
    pub positives: SplitCounts,
    pub negatives: SplitCounts,
    pub config: ResolvedConfig,
    pub inputs: BTreeMap<String, FileStamp>,
    pub outputs: BTreeMap<String, String>,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    atomic_write(path, text.as_bytes())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::missing_input(path, &e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::new("json_error", format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_manifest_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(SPLIT_MANIFEST);
        let m = SplitManifest {
            version: VERSION.into(),
            prng: "chacha20".into(),
            seed: 3,
            fractions: [0.85, 0.05, 0.10],
            num_nodes: 34,
            duplicates_dropped: 1,
            source: FileStamp {
                path: "karate.edges".into(),
                sha256: "deadbeef".into(),
            },
            counts: SplitCounts {
                train: 66,
                valid: 4,
                test: 8,
            },
        };
        write_json(&path, &m).unwrap();
        let back: SplitManifest = read_json(&path).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn unreadable_manifest_reports_json_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(SPLIT_MANIFEST);
        fs::write(&path, "{not json").unwrap();
        let err = read_json::<SplitManifest>(&path).unwrap_err();
        assert_eq!(err.code, "json_error");
    }
}

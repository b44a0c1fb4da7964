//! `gradcheck`: run the central finite-difference suite over every
//! differentiable op and both full models; exit nonzero if anything
//! disagrees with its analytic gradient.

use std::path::PathBuf;

use clap::Args;

use edge2node_core::run_gradcheck;

use crate::config::{require_seed, PipelineConfig};
use crate::error::CliError;
use crate::io::emit;
use crate::manifest;

#[derive(Args, Debug)]
pub struct GradcheckArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Also write the report as JSON into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &GradcheckArgs) -> Result<(), CliError> {
    let cfg = PipelineConfig::load(args.config.as_deref())?;
    let seed = require_seed(args.seed, &cfg, "gradcheck")?;
    let report = run_gradcheck(seed)?;

    for check in &report.checks {
        emit(format!(
            "{:<40} max rel err {:>10.3e}  (tol {:.0e})  {}",
            check.name,
            check.max_rel_error,
            check.tolerance,
            if check.passed { "ok" } else { "FAIL" }
        ));
    }
    emit(format!(
        "gradcheck: {} checks, max relative error {:.3e}",
        report.checks.len(),
        report.max_rel_error
    ));
    if let Some(out) = &args.out {
        manifest::write_json(&out.join(manifest::GRADCHECK_REPORT), &report)?;
    }
    if !report.passed {
        return Err(CliError::new(
            "gradcheck_failed",
            format!("max relative error {:.3e}", report.max_rel_error),
        ));
    }
    Ok(())
}

//! Command-line pipeline for link prediction via dummy-node
//! classification: split raw edge lists, sample negatives, build the
//! augmented graph, train, evaluate, compare against the dot-product
//! baseline, and verify gradients.
//!
//! Subcommands communicate through files in a split directory; every
//! failure exits nonzero with `{"error":{"code","message"}}` on
//! stderr.

pub mod checkpoint;
pub mod commands;
pub mod config;
pub mod error;
pub mod io;
pub mod manifest;
pub mod pipeline;

use clap::{Parser, Subcommand};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "edge2node",
    version,
    about = "Link prediction as 3-class node classification on a dummy-node augmented graph"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Partition a raw edge list into train/valid/test splits.
    Split(commands::split::SplitArgs),
    /// Sample absent pairs as negatives for every split.
    SampleNegatives(commands::sample::SampleArgs),
    /// Build the augmented graph and write its audit manifest.
    Transform(commands::transform::TransformArgs),
    /// Train the dummy-node classifier.
    Train(commands::train::TrainArgs),
    /// Score held-out candidates with a trained checkpoint.
    Evaluate(commands::evaluate::EvaluateArgs),
    /// Finite-difference checks of every gradient, then exit.
    Gradcheck(commands::gradcheck::GradcheckArgs),
    /// Paired dot-product baseline on the identical split.
    Baseline(commands::baseline::BaselineArgs),
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Split(args) => commands::split::run(args),
        Command::SampleNegatives(args) => commands::sample::run(args),
        Command::Transform(args) => commands::transform::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Gradcheck(args) => commands::gradcheck::run(args),
        Command::Baseline(args) => commands::baseline::run(args),
    }
}

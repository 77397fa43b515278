//! Command-line front end for the texfrac pipeline.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "texfrac",
    about = "Texture descriptors from fractal measures of LBP maps",
    version
)]
struct Cli {
    /// Worker threads (default: logical cores). Results do not depend
    /// on this value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute descriptor vectors for every image in a manifest.
    Extract {
        /// Run configuration file (key = value sections).
        #[arg(long)]
        config: Option<PathBuf>,
        /// Dataset manifest CSV (path,label,group).
        #[arg(long)]
        manifest: PathBuf,
        /// Output feature CSV.
        #[arg(long)]
        out: PathBuf,
    },
    /// Split, train PCA + LDA, and score a feature table.
    Classify {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Feature CSV produced by `extract`.
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// Output directory for results and confusion files.
        #[arg(long)]
        out: PathBuf,
        /// Overrides the protocol seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Also write one serialized model per split.
        #[arg(long)]
        save_models: bool,
    },
    /// Emit alpha/beta curves of the random-point coverage model.
    #[command(name = "simulate-model")]
    SimulateModel {
        /// Measure: boxes, length, or both.
        #[arg(long, default_value = "both")]
        kind: String,
        /// Self-similar dimensions, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1.1,1.5,1.9")]
        ds: Vec<f64>,
        /// Point counts, comma separated.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "10,100,1000,10000,100000,1000000"
        )]
        np: Vec<f64>,
        /// Number of scale samples.
        #[arg(long, default_value_t = 20)]
        scale_count: usize,
        /// Smallest scale.
        #[arg(long, default_value_t = 1e-3)]
        scale_lo: f64,
        /// Largest scale.
        #[arg(long, default_value_t = 1e-1)]
        scale_hi: f64,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in analytic fixtures and report pass/fail.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot size thread pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = match &cli.command {
        Command::Extract {
            config,
            manifest,
            out,
        } => commands::cmd_extract(config, manifest, out),
        Command::Classify {
            config,
            features,
            manifest,
            out,
            seed,
            save_models,
        } => commands::cmd_classify(config, features, manifest, out, *seed, *save_models),
        Command::SimulateModel {
            kind,
            ds,
            np,
            scale_count,
            scale_lo,
            scale_hi,
            out,
        } => commands::cmd_simulate_model(
            kind,
            ds,
            np,
            *scale_count,
            *scale_lo,
            *scale_hi,
            out.as_deref(),
        ),
        Command::Selftest => commands::cmd_selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

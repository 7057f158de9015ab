use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use beurling_core::experiments::{exit_code, resolve_config, run, Subcommand};

/// Reproducible experiments on iterated Beurling transforms.
///
/// Outputs go to `<out>/<run_id>/`: CSV tables plus `manifest.json` with
/// one verdict per check. Exit code 0 means every verdict passed, 1 that
/// at least one failed, 2 that the configuration is invalid.
#[derive(Parser, Debug)]
#[command(name = "beurling-lab", version)]
struct Cli {
    /// identities, lemma, decay, counterexample, cotlar, theorem-b,
    /// spectral-validate or all
    subcommand: String,

    /// Flat `key = value` config file; command-line pairs take precedence.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory (default: $BEURLING_LAB_OUT, else ./runs).
    #[arg(long)]
    out: Option<PathBuf>,

    /// Seed for randomized inputs.
    #[arg(long)]
    seed: Option<u64>,

    /// Overrides such as `alphas=8,16,32` or `tol=1e-9`.
    #[arg(value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = cli
        .subcommand
        .parse::<Subcommand>()
        .and_then(|sub| resolve_config(sub, cli.config.as_deref(), &cli.overrides, cli.out, cli.seed))
        .and_then(|cfg| run(&cfg));
    match &outcome {
        Ok((manifest, dir)) => {
            for v in &manifest.verdicts {
                let mark = if v.passed { "PASS" } else { "FAIL" };
                println!("{mark} {}: expected {}, got {} (tolerance {})", v.name, v.expected, v.actual, v.tolerance);
            }
            println!("wrote {}", dir.display());
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&outcome) as u8)
}

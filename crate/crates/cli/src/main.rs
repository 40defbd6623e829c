use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use sinr_cli::{execute, CliError, Kind, Overrides};

/// SINR distribution experiments for MMSE receivers in Poisson interference.
#[derive(Debug, Parser)]
#[command(name = "nhpp-sinr", version, about)]
struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    kind: Kind,
    /// JSON experiment file.
    #[arg(long)]
    config: PathBuf,
    /// Random seed (overrides `sim.seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo trials (overrides `sim.trials`).
    #[arg(long)]
    trials: Option<usize>,
    /// Output CSV (overrides `output_path`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Relative quadrature tolerance (overrides `quadrature.rel_tol`).
    #[arg(long)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let msg = e.to_string();
            let body = msg.split("Usage:").next().unwrap_or_default();
            let line = body.split_whitespace().collect::<Vec<_>>().join(" ");
            return fail(&CliError::validation(format!("arguments: {}", line.trim_start_matches("error: "))));
        }
    };
    let overrides = Overrides { seed: args.seed, trials: args.trials, out: args.out, tol: args.tol };
    match execute(args.kind, &args.config, &overrides) {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("{}", serde_json::json!({ "warning": w }));
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json_line());
    ExitCode::from(e.exit_code() as u8)
}

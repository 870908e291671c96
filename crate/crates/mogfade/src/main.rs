use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mogfade::job::{self, CommandKind, Overrides};

#[derive(Parser)]
#[command(
    name = "mogfade",
    version,
    about = "Gaussian-mixture fading models: fit, evaluate, simulate"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct JobArgs {
    /// Job description (JSON). Its `command` field must match the subcommand.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the job's sampling seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory to place the artifact in, keeping its file name.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Fit a fixed-size mixture to envelope draws from a channel.
    Fit(JobArgs),
    /// Fit over a range of mixture sizes and keep the best by BIC.
    Select(JobArgs),
    /// Closed-form metrics for a model, cross-checked by quadrature.
    Eval(JobArgs),
    /// Monte Carlo estimates from a channel or a fitted model.
    Simulate(JobArgs),
    /// Detection ROC: series curve plus empirical spot checks.
    Roc(JobArgs),
    /// Self-check the built-in reference models; fails on any gate breach.
    Validate(JobArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.cmd {
        Cmd::Fit(a) => (CommandKind::Fit, a),
        Cmd::Select(a) => (CommandKind::Select, a),
        Cmd::Eval(a) => (CommandKind::Eval, a),
        Cmd::Simulate(a) => (CommandKind::Simulate, a),
        Cmd::Roc(a) => (CommandKind::Roc, a),
        Cmd::Validate(a) => (CommandKind::Validate, a),
    };
    let ov = Overrides {
        seed: args.seed,
        out_dir: args.out.clone(),
    };
    match job::run_job(&args.config, kind, &ov) {
        Ok(path) => {
            println!("{}", path.display());
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("mogfade {}: {err}", kind.as_str());
            ExitCode::from(job::exit_code(&err) as u8)
        }
    }
}

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use proxtr_cli::commands;
use proxtr_cli::config::{ExperimentConfig, FlagOverrides};

/// Trust-region solver for nonsmooth regularized problems, with a
/// hard-instance generator that pins down the solver's worst-case iteration
/// count.
#[derive(Parser)]
#[command(name = "proxtr", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the hard instance and check the iteration count against its
    /// closed-form prediction; exit 0 only on an exact match.
    Verify(CommonArgs),
    /// Solve a builtin problem (quadratic, lasso, box_quadratic).
    Solve(SolveArgs),
    /// Write CSV samples of the hard instance for external plotting.
    Emit(EmitArgs),
    /// Print worst-case iteration bounds next to observed counts.
    Bounds(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON experiment configuration; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Stopping tolerance (also the hard-instance tolerance).
    #[arg(long)]
    epsilon: Option<f64>,
    /// Hessian growth exponent in [0, 1).
    #[arg(long)]
    p: Option<f64>,
    /// Step-size constant alpha.
    #[arg(long)]
    alpha: Option<f64>,
    /// Effective-radius constant beta.
    #[arg(long)]
    beta: Option<f64>,
    /// Radius growth factor on very successful iterations.
    #[arg(long)]
    gamma3: Option<f64>,
    /// Radius cap.
    #[arg(long = "delta-max")]
    delta_max: Option<f64>,
    /// Outer iteration cap.
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    /// Output path (history CSV for solve, directory for emit).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Builtin problem name.
    #[arg(long)]
    problem: Option<String>,
}

#[derive(Args)]
struct EmitArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of uniform sample points for the objective CSVs.
    #[arg(long)]
    samples: Option<usize>,
}

fn load(common: &CommonArgs) -> Result<(ExperimentConfig, FlagOverrides), proxtr::SolverError> {
    let cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let flags = FlagOverrides {
        epsilon: common.epsilon,
        p: common.p,
        alpha: common.alpha,
        beta: common.beta,
        gamma3: common.gamma3,
        delta_max: common.delta_max,
        max_iter: common.max_iter,
        out: common.out.clone(),
        problem: None,
        samples: None,
    };
    Ok((cfg, flags))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();

    let code = match &cli.command {
        Command::Verify(args) => match load(args) {
            Ok((cfg, flags)) => commands::cmd_verify(&cfg, &flags, &mut out),
            Err(e) => usage_error(&mut out, &e),
        },
        Command::Solve(args) => match load(&args.common) {
            Ok((cfg, mut flags)) => {
                flags.problem = args.problem.clone();
                commands::cmd_solve(&cfg, &flags, &mut out)
            }
            Err(e) => usage_error(&mut out, &e),
        },
        Command::Emit(args) => match load(&args.common) {
            Ok((cfg, mut flags)) => {
                flags.samples = args.samples;
                commands::cmd_emit(&cfg, &flags, &mut out)
            }
            Err(e) => usage_error(&mut out, &e),
        },
        Command::Bounds(args) => match load(args) {
            Ok((cfg, flags)) => commands::cmd_bounds(&cfg, &flags, &mut out),
            Err(e) => usage_error(&mut out, &e),
        },
    };
    ExitCode::from(code as u8)
}

fn usage_error(out: &mut dyn Write, err: &proxtr::SolverError) -> i32 {
    let _ = writeln!(out, "error: {err}");
    commands::EXIT_MISMATCH
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use channel_lab::cli::{
    cmd_analyze, cmd_dfs, cmd_montecarlo, cmd_optimize, cmd_qecc, CliError, CommandOptions,
};
use channel_lab::report::ReportDocument;

/// Purity and fidelity analysis of quantum channels in Kraus form.
#[derive(Parser)]
#[command(name = "channel-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Spectral survey: Hamiltonian spectra, bounds, averages, invariant subspace.
    Analyze(CommonArgs),
    /// Extremize purity or fidelity over product states of the subspace.
    Optimize(OptimizeArgs),
    /// Check a subspace for decoherence freedom (or discover candidates).
    Dfs(CommonArgs),
    /// Check the error-correction condition and the code purity identity.
    Qecc(CommonArgs),
    /// Monte-Carlo Haar average with analytic cross-check.
    Montecarlo(MonteCarloArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Channel spec file (JSON).
    #[arg(long)]
    spec: PathBuf,
    /// Write the structured report to this path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed; overrides the spec file's `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte-Carlo sample count; overrides the spec file's `samples`.
    #[arg(long)]
    samples: Option<usize>,
    /// Tolerance override for the command's acceptance checks.
    #[arg(long)]
    tol: Option<f64>,
    /// Optimizer restart count.
    #[arg(long)]
    restarts: Option<usize>,
}

#[derive(Args)]
struct OptimizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum, default_value_t = DirectionArg::Min)]
    direction: DirectionArg,
    #[arg(long, value_enum, default_value_t = QuantityArg::Purity)]
    quantity: QuantityArg,
}

#[derive(Args)]
struct MonteCarloArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, value_enum, default_value_t = QuantityArg::Purity)]
    quantity: QuantityArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Min,
    Max,
}

#[derive(Clone, Copy, ValueEnum)]
enum QuantityArg {
    Purity,
    Fidelity,
}

impl CommonArgs {
    fn options(&self) -> CommandOptions {
        CommandOptions {
            seed: self.seed,
            samples: self.samples,
            tol: self.tol,
            restarts: self.restarts,
        }
    }
}

fn emit(report: &ReportDocument, out: &Option<PathBuf>) -> Result<(), CliError> {
    print!("{}", report.render_human());
    if let Some(path) = out {
        std::fs::write(path, report.to_json())
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn run() -> Result<i32, CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze(args) => {
            let report = cmd_analyze(&args.spec, &args.options())?;
            emit(&report, &args.out)?;
            Ok(0)
        }
        Command::Optimize(args) => {
            let direction = match args.direction {
                DirectionArg::Min => channel_lab::cli::Direction::Min,
                DirectionArg::Max => channel_lab::cli::Direction::Max,
            };
            let quantity = match args.quantity {
                QuantityArg::Purity => channel_lab::cli::Quantity::Purity,
                QuantityArg::Fidelity => channel_lab::cli::Quantity::Fidelity,
            };
            let report = cmd_optimize(&args.common.spec, direction, quantity, &args.common.options())?;
            emit(&report, &args.common.out)?;
            Ok(0)
        }
        Command::Dfs(args) => {
            let report = cmd_dfs(&args.spec, &args.options())?;
            emit(&report, &args.out)?;
            Ok(0)
        }
        Command::Qecc(args) => {
            let (report, exit) = cmd_qecc(&args.spec, &args.options())?;
            emit(&report, &args.out)?;
            if exit != 0 {
                eprintln!("error-correction condition violated; see report");
            }
            Ok(exit)
        }
        Command::Montecarlo(args) => {
            let quantity = match args.quantity {
                QuantityArg::Purity => channel_lab::cli::Quantity::Purity,
                QuantityArg::Fidelity => channel_lab::cli::Quantity::Fidelity,
            };
            let report = cmd_montecarlo(&args.common.spec, quantity, &args.common.options())?;
            emit(&report, &args.common.out)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("channel-lab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

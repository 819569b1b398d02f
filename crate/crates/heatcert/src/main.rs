use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use heatcert::{run, Command, Overrides, Problem, RunOptions};

#[derive(Parser)]
#[command(name = "heatcert", version, about = "Constants, certificates and solutions for nonlocal heat systems")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// m, c1, c2, C1, C2 with thresholds and slopes
    Constants(Args),
    /// Evaluate the selected certificates
    Certify(Args),
    /// Multi-start Picard solve
    Solve(Args),
    /// Sweep the subdomain D = [b, L - b]
    Scan(Args),
    /// constants, certify and solve (and scan when configured)
    All(Args),
    /// Validate a problem file and print it normalized
    Check {
        config: PathBuf,
    },
}

#[derive(clap::Args)]
struct Args {
    /// Problem file
    config: PathBuf,
    /// Sine modes for the constants
    #[arg(long = "modes", value_name = "K")]
    modes: Option<usize>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    nt: Option<usize>,
    /// Picard tolerance
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
    /// JSON report path (default: standard output)
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Directory for CSV exports
    #[arg(long, value_name = "DIR")]
    csv: Option<PathBuf>,
    /// Seed of the random starting profiles
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Number of scan points
    #[arg(long)]
    steps: Option<usize>,
    /// Exit with status 2 when a certificate fails
    #[arg(long)]
    strict: bool,
}

fn execute(command: Command, args: Args) -> anyhow::Result<ExitCode> {
    let loaded = Problem::load(&args.config)?;
    let overrides = Overrides {
        modes: args.modes,
        nx: args.nx,
        nt: args.nt,
        tol: args.tol,
        seed: args.seed,
        steps: args.steps,
    };
    let loaded = overrides.apply(&loaded.problem)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    let opts = RunOptions {
        threads: args.threads,
        csv_dir: args.csv,
    };
    let report = run(command, &loaded, &opts)?;
    heatcert::run::write_report(&report, args.out.as_deref())?;
    if args.strict && report.failed_certificates().next().is_some() {
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Cmd::Constants(a) => execute(Command::Constants, a),
        Cmd::Certify(a) => execute(Command::Certify, a),
        Cmd::Solve(a) => execute(Command::Solve, a),
        Cmd::Scan(a) => execute(Command::Scan, a),
        Cmd::All(a) => execute(Command::All, a),
        Cmd::Check { config } => Problem::load(&config).map_err(Into::into).map(|loaded| {
            for w in &loaded.warnings {
                eprintln!("warning: {w}");
            }
            print!("{}", loaded.problem);
            ExitCode::SUCCESS
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

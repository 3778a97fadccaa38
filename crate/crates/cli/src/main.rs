use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dirac_cli::{run_scenario, selftest, write_csv, CliError, Mode, ScenarioConfig, Snapshots};
use dirac_core::par;

#[derive(Parser)]
#[command(name = "dirac", version, about = "Free and kicked Dirac packets with their integrals of motion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace <x> and <p> (or the configured list) along the run.
    Evolve(RunArgs),
    /// Trace the configured invariants.
    Invariants(RunArgs),
    /// Trace raw and kicked-invariant momentum through the kick schedule.
    Kick(RunArgs),
    /// Positive-energy packet: <x>, Newton-Wigner <Q> and the printed-form deviation.
    Nw(RunArgs),
    /// Run the oracle matrix and print a check table.
    Selftest(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the numerical kernels.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Write an SPNF snapshot every K samples (needs --out).
    #[arg(long, value_name = "K")]
    snapshot_every: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

fn output(out: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn scenario(mode: Mode, args: &RunArgs) -> Result<(), CliError> {
    let cfg = ScenarioConfig::from_file(&args.config)?;
    let snaps = match (args.snapshot_every, &args.common.out) {
        (None, _) => None,
        (Some(0), _) => return Err(CliError::config(None, "--snapshot-every must be at least 1")),
        (Some(_), None) => return Err(CliError::config(None, "--snapshot-every needs --out")),
        (Some(every), Some(out)) => Some(Snapshots { every, base: out.clone() }),
    };
    let trace = run_scenario(&cfg, mode, snaps.as_ref())?;
    if trace.any_flagged() {
        log::warn!("some samples failed the boundary-decay guard (decay_flag = 1)");
    }
    let mut w = output(&args.common.out)?;
    write_csv(&mut w, &trace)?;
    w.flush()?;
    Ok(())
}

fn run_selftest(args: &CommonArgs) -> Result<(), CliError> {
    let checks = selftest::run_checks()?;
    let mut w = output(&args.out)?;
    selftest::write_csv(&mut w, &checks)?;
    w.flush()?;
    let failed = checks.iter().filter(|c| !c.passed()).count();
    if failed > 0 {
        return Err(CliError::SelftestFailed(failed));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let threads = match &cli.command {
        Command::Evolve(a) | Command::Invariants(a) | Command::Kick(a) | Command::Nw(a) => a.common.threads,
        Command::Selftest(a) => a.threads,
    };
    let run = || match &cli.command {
        Command::Evolve(a) => scenario(Mode::Evolve, a),
        Command::Invariants(a) => scenario(Mode::Invariants, a),
        Command::Kick(a) => scenario(Mode::Kick, a),
        Command::Nw(a) => scenario(Mode::Nw, a),
        Command::Selftest(a) => run_selftest(a),
    };
    let result = match threads {
        Some(0) => Err(CliError::config(None, "--threads must be at least 1")),
        Some(n) => par::with_threads(n, run),
        None => run(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dirac: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

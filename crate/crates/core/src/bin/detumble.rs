use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use detumble::cli::{self, EXIT_VALIDATION};
use detumble::config::RunSpec;

#[derive(Parser)]
#[command(name = "detumble", version, about = "Magnetic detumbling simulator and pre-flight stability checks")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Run configuration (TOML, dotted keys).
    #[arg(long)]
    config: PathBuf,
    /// Output file (CSV for simulate/sweep/portrait, key=value for check).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides sim.seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one closed-loop detumble and write telemetry.
    Simulate(Common),
    /// Run a 1-D or 2-D parameter sweep.
    Sweep(Common),
    /// Evaluate the entry criteria (exit 0 = enter, 3 = refused).
    Check(Common),
    /// Sample the B-dot phase portrait and its equilibria.
    Portrait(Common),
}

fn main() -> ExitCode {
    let args = Args::parse();
    let (common, run): (&Common, fn(&RunSpec, Option<&std::path::Path>) -> cli::Outcome) = match &args.command {
        Command::Simulate(c) => (c, cli::cmd_simulate),
        Command::Sweep(c) => (c, cli::cmd_sweep),
        Command::Check(c) => (c, cli::cmd_check),
        Command::Portrait(c) => (c, cli::cmd_portrait),
    };
    if let Some(n) = common.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    }
    let mut spec = match RunSpec::from_path(&common.config) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    };
    if let Some(seed) = common.seed {
        spec.sim.seed = seed;
    }
    let outcome = run(&spec, common.out.as_deref());
    if outcome.code == cli::EXIT_OK || outcome.code == cli::EXIT_REFUSED {
        print!("{}", outcome.report);
    } else {
        eprint!("{}", outcome.report);
    }
    ExitCode::from(outcome.code as u8)
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use otoc_cli::{execute, Command, RunArgs};

#[derive(Parser)]
#[command(name = "otoc", version, about = "OTOC randomized-measurement simulations")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Exact O(t) and modified O_M(t) per period.
    Exact(Common),
    /// Randomized-measurement estimate of the OTOC.
    Protocol(Common),
    /// Frame potentials of the design-Hamiltonian ensemble.
    FramePotential(Common),
    /// Solve and verify the refocusing pulse timing.
    Compile(Common),
}

#[derive(Args)]
struct Common {
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed for every random stream.
    #[arg(long)]
    seed: u64,
    /// Worker threads; 0 uses all cores, 1 runs sequentially.
    #[arg(long, default_value_t = 0)]
    workers: usize,
    /// Output directory; a manifest.json with checksums is written alongside.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a configuration key (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (cmd, common) = match cli.command {
        Sub::Exact(c) => (Command::Exact, c),
        Sub::Protocol(c) => (Command::Protocol, c),
        Sub::FramePotential(c) => (Command::FramePotential, c),
        Sub::Compile(c) => (Command::Compile, c),
    };
    let args = RunArgs {
        config: common.config,
        seed: common.seed,
        workers: common.workers,
        out: common.out,
        overrides: common.set,
    };
    match execute(cmd, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

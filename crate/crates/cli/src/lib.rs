//! Driver behind the `otoc` binary.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;

use std::path::{Path, PathBuf};

use otoc_core::Execution;

pub use commands::{Command, CommandResult};
pub use config::Config;
pub use error::CliError;
pub use manifest::Manifest;

/// Settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunArgs {
    pub config: Option<PathBuf>,
    pub seed: u64,
    /// 0 uses every core, 1 runs sequentially.
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub overrides: Vec<String>,
}

pub fn load_config(args: &RunArgs) -> Result<Config, CliError> {
    let mut cfg = match &args.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    for o in &args.overrides {
        cfg.apply_override(o)?;
    }
    Ok(cfg)
}

/// Runs `cmd`; with `--out` every output goes to that directory next to a
/// manifest, otherwise the first output is printed.
pub fn execute(cmd: Command, args: &RunArgs) -> Result<(), CliError> {
    let cfg = load_config(args)?;
    let result = commands::run(cmd, &cfg, args.seed, Execution::from_workers(args.workers))?;
    if let Some(report) = &result.report {
        print!("{report}");
    }
    match &args.out {
        Some(dir) => {
            write_outputs(cmd, args, &cfg, &result, dir)?;
        }
        None if result.report.is_none() => {
            if let Some(first) = result.outputs.first() {
                print!("{}", first.contents);
            }
            if result.outputs.len() > 1 {
                eprintln!(
                    "note: {} further outputs are written only with --out",
                    result.outputs.len() - 1
                );
            }
        }
        None => {}
    }
    Ok(())
}

fn write_outputs(
    cmd: Command,
    args: &RunArgs,
    cfg: &Config,
    result: &CommandResult,
    dir: &Path,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut manifest = Manifest::new(cmd.name(), args.seed, args.workers, cfg.resolved());
    for o in &result.outputs {
        let path = manifest.write_output(dir, &o.name, &o.contents)?;
        eprintln!("wrote {}", path.display());
    }
    manifest.save(dir)?;
    Ok(())
}

//! The four subcommands. Each returns its output files as strings; writing
//! them and the manifest is left to the caller.

use std::fmt::Write as _;

use otoc_core::kicked_ising::{Boundary, KickedIsingParams};
use otoc_core::molecule::MoleculeSpec;
use otoc_core::otoc::{estimate_otoc, exact_series, sample_distribution, scatter_csv, OtocConfig};
use otoc_core::pulse::compile_and_verify;
use otoc_core::random_unitary::{
    frame_potential_trace, frame_potentials, CouplingRule, DesignScheme, FramePotentials, PairEstimator,
    RandomizationScheme, UnitaryEnsemble,
};
use otoc_core::{Execution, Pauli, PulseError};

use crate::config::Config;
use crate::error::CliError;

pub const EXACT_CSV_HEADER: &str = "n,t,exact,exact_modified";
pub const COMPILE_CSV_HEADER: &str =
    "jt,tau_ms,tau1_ms,tau2_ms,alpha1,alpha2,alpha3,alpha4,fidelity_nearest_neighbour,fidelity_full";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Exact,
    Protocol,
    FramePotential,
    Compile,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Exact => "exact",
            Command::Protocol => "protocol",
            Command::FramePotential => "frame-potential",
            Command::Compile => "compile",
        }
    }
}

/// One file a command produced.
#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub name: String,
    pub contents: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CommandResult {
    pub outputs: Vec<Output>,
    /// Human-readable summary for standard output.
    pub report: Option<String>,
}

pub fn run(cmd: Command, cfg: &Config, seed: u64, exec: Execution) -> Result<CommandResult, CliError> {
    match cmd {
        Command::Exact => cmd_exact(cfg, seed, exec),
        Command::Protocol => cmd_protocol(cfg, seed, exec),
        Command::FramePotential => cmd_frame_potential(cfg, seed, exec),
        Command::Compile => cmd_compile(cfg),
    }
}

fn pauli(cfg: &Config, key: &str) -> Result<Pauli, CliError> {
    cfg.raw(key)
        .parse::<Pauli>()
        .map_err(|e| cfg.invalid(key, e.to_string()))
}

/// Converts a 1-based site to 0-based.
fn site(cfg: &Config, key: &str, n_spins: usize, default: usize) -> Result<usize, CliError> {
    let one_based = if cfg.raw(key).is_empty() {
        default
    } else {
        cfg.parsed::<usize>(key)?
    };
    if one_based == 0 || one_based > n_spins {
        return Err(cfg.invalid(key, format!("site {one_based} outside 1..={n_spins}")));
    }
    Ok(one_based - 1)
}

pub fn kicked_ising(cfg: &Config) -> Result<KickedIsingParams, CliError> {
    let boundary = match cfg.raw("boundary") {
        "open" => Boundary::Open,
        "periodic" => Boundary::Periodic,
        other => return Err(cfg.invalid("boundary", format!("expected open or periodic, got {other:?}"))),
    };
    let p = KickedIsingParams {
        n_spins: cfg.parsed("n_spins")?,
        j: cfg.f64("j")?,
        h_x: cfg.f64("h_x")?,
        h_z: cfg.f64("h_z")?,
        jt: cfg.f64("jt")?,
        boundary,
    };
    p.validate()?;
    Ok(p)
}

pub fn molecule(cfg: &Config) -> Result<MoleculeSpec, CliError> {
    let Some(path) = cfg.path("molecule") else {
        return Ok(MoleculeSpec::crotonic_default());
    };
    let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
    MoleculeSpec::parse(&text).map_err(|e| match e {
        PulseError::Parse { line, message } => CliError::Config {
            origin: format!("{}:{line}", path.display()),
            message,
        },
        other => CliError::Config {
            origin: path.display().to_string(),
            message: other.to_string(),
        },
    })
}

pub fn design_scheme(cfg: &Config) -> Result<DesignScheme, CliError> {
    let rule = cfg.raw("coupling_rule");
    let scheme = DesignScheme {
        period_ms: cfg.f64("period_ms")?,
        n_segments: cfg.parsed("n_segments")?,
        molecule: molecule(cfg)?,
        coupling_rule: CouplingRule::from_name(rule)
            .ok_or_else(|| cfg.invalid("coupling_rule", format!("expected refocused or linear, got {rule:?}")))?,
    };
    scheme.validate()?;
    Ok(scheme)
}

pub fn randomization(cfg: &Config) -> Result<RandomizationScheme, CliError> {
    Ok(match cfg.raw("scheme") {
        "global-haar" => RandomizationScheme::GlobalHaar,
        "local-haar" => RandomizationScheme::LocalHaar,
        "local-axis-angle" => RandomizationScheme::LocalAxisAngle,
        "design-hamiltonian" => RandomizationScheme::DesignHamiltonian(design_scheme(cfg)?),
        other => return Err(cfg.invalid("scheme", format!("unknown scheme {other:?}"))),
    })
}

pub fn otoc_config(cfg: &Config, seed: u64, scheme: RandomizationScheme) -> Result<OtocConfig, CliError> {
    let params = kicked_ising(cfg)?;
    let n = params.n_spins;
    let initial_state = match cfg.raw("initial_state") {
        "" => "0".repeat(n),
        s => s.to_string(),
    };
    let config = OtocConfig {
        params,
        w_site: site(cfg, "w_site", n, n)?,
        v_site: site(cfg, "v_site", n, 1)?,
        w_pauli: pauli(cfg, "w_pauli")?,
        v_pauli: pauli(cfg, "v_pauli")?,
        n_periods_max: cfg.parsed("n_periods")?,
        n_unitaries: cfg.parsed("n_unitaries")?,
        scheme,
        initial_state,
        seed,
        subset_weight_base: cfg.f64("subset_weight_base")?,
    };
    config.validate()?;
    Ok(config)
}

fn cmd_exact(cfg: &Config, seed: u64, exec: Execution) -> Result<CommandResult, CliError> {
    let config = otoc_config(cfg, seed, RandomizationScheme::GlobalHaar)?;
    let series = exact_series(&config, exec)?;
    let mut csv = String::new();
    let _ = writeln!(csv, "{EXACT_CSV_HEADER}");
    for r in &series.rows {
        let _ = writeln!(csv, "{},{},{},{}", r.n, r.t, r.exact, r.exact_modified);
    }
    Ok(CommandResult {
        outputs: vec![Output {
            name: "exact.csv".into(),
            contents: csv,
        }],
        report: None,
    })
}

fn cmd_protocol(cfg: &Config, seed: u64, exec: Execution) -> Result<CommandResult, CliError> {
    let config = otoc_config(cfg, seed, randomization(cfg)?)?;
    let scatter: Vec<u32> = cfg.list("scatter_periods")?;
    if let Some(&bad) = scatter.iter().find(|&&n| n > config.n_periods_max) {
        return Err(cfg.invalid(
            "scatter_periods",
            format!("period {bad} exceeds n_periods = {}", config.n_periods_max),
        ));
    }
    eprintln!(
        "protocol: {} periods x {} unitaries, scheme {}",
        config.n_periods_max,
        config.n_unitaries,
        config.scheme.name()
    );
    let series = estimate_otoc(&config, exec)?;
    for n in series.unreliable_periods() {
        eprintln!("warning: n = {n}: estimator denominator vanished, estimate undefined");
    }
    let mut outputs = vec![Output {
        name: "series.csv".into(),
        contents: series.to_csv(),
    }];
    if cfg.parsed::<bool>("export_ensemble")? {
        let ensemble = UnitaryEnsemble::generate(
            config.scheme.clone(),
            config.params.n_spins,
            seed,
            config.n_unitaries,
            exec,
        )?;
        outputs.push(Output {
            name: "ensemble.txt".into(),
            contents: ensemble.to_text(),
        });
    }
    for n in scatter {
        let points = sample_distribution(&config, n, exec)?;
        outputs.push(Output {
            name: format!("scatter_n{n}.csv"),
            contents: scatter_csv(&points),
        });
    }
    Ok(CommandResult { outputs, report: None })
}

fn estimator(cfg: &Config) -> Result<PairEstimator, CliError> {
    match cfg.raw("fp_estimator") {
        "distinct" => Ok(PairEstimator::DistinctPairs),
        "all" => Ok(PairEstimator::AllPairs),
        other => Err(cfg.invalid("fp_estimator", format!("expected distinct or all, got {other:?}"))),
    }
}

fn cmd_frame_potential(cfg: &Config, seed: u64, exec: Execution) -> Result<CommandResult, CliError> {
    let base = design_scheme(cfg)?;
    let est = estimator(cfg)?;
    let n_spins = base.n_spins();
    let samples: usize = cfg.parsed("fp_samples")?;
    let mut rows: Vec<(f64, FramePotentials)> = Vec::new();
    let mode = cfg.raw("fp_mode");
    let column = match mode {
        "period" => {
            for period_ms in cfg.list::<f64>("fp_periods_ms")? {
                let scheme = DesignScheme {
                    period_ms,
                    ..base.clone()
                };
                eprintln!("frame-potential: T = {period_ms} ms, {samples} samples");
                let members =
                    RandomizationScheme::DesignHamiltonian(scheme).sample_many(n_spins, seed, samples, exec)?;
                rows.push((period_ms, frame_potentials(&members, est, exec)?));
            }
            "period_ms"
        }
        "samples" => {
            let sizes: Vec<usize> = cfg.list("fp_sample_sizes")?;
            let largest = sizes.iter().copied().max().unwrap_or(0);
            eprintln!("frame-potential: T = {} ms, pool of {largest}", base.period_ms);
            let pool =
                RandomizationScheme::DesignHamiltonian(base.clone()).sample_many(n_spins, seed, largest, exec)?;
            for size in sizes {
                rows.push((size as f64, frame_potentials(&pool[..size], est, exec)?));
            }
            "samples"
        }
        "time" => {
            let times: Vec<f64> = cfg.list("fp_times_ms")?;
            eprintln!("frame-potential: trace over {} times, {samples} samples", times.len());
            for point in frame_potential_trace(&base, &times, samples, seed, est, exec)? {
                rows.push((point.t_ms, point.potentials));
            }
            "time_ms"
        }
        other => return Err(cfg.invalid("fp_mode", format!("expected period, samples or time, got {other:?}"))),
    };
    let mut csv = String::new();
    let _ = writeln!(csv, "{column},f1,f2");
    for (x, fp) in rows {
        let _ = writeln!(csv, "{x},{},{}", fp.f1, fp.f2);
    }
    Ok(CommandResult {
        outputs: vec![Output {
            name: format!("frame_potential_{mode}.csv"),
            contents: csv,
        }],
        report: None,
    })
}

fn cmd_compile(cfg: &Config) -> Result<CommandResult, CliError> {
    let m = molecule(cfg)?;
    let jt = cfg.f64("jt")?;
    let r = compile_and_verify(&m, jt)?;
    let t = &r.timing;
    let worst = r.residual_z_phases.iter().fold(0.0f64, |a, p| a.max(p.abs()));
    let mut report = String::new();
    let _ = writeln!(report, "JT                 {jt}");
    let _ = writeln!(report, "tau                {:.4} ms", t.tau_ms);
    let _ = writeln!(report, "tau1 (spin 3 flip) {:.4} ms", t.tau1_ms);
    let _ = writeln!(report, "tau2 (spin 4 flip) {:.4} ms", t.tau2_ms);
    for (i, a) in t.alphas.iter().enumerate() {
        let _ = writeln!(report, "alpha{}             {a:.6} rad", i + 1);
    }
    let _ = writeln!(
        report,
        "fidelity (nearest-neighbour couplings) {:.12}",
        r.fidelity_nearest_neighbour
    );
    let _ = writeln!(report, "fidelity (full coupling table)         {:.12}", r.fidelity_full);
    let _ = writeln!(report, "max residual z phase                   {worst:.3e} rad");

    let mut csv = String::new();
    let _ = writeln!(csv, "{COMPILE_CSV_HEADER}");
    let alphas: Vec<String> = t.alphas.iter().map(f64::to_string).collect();
    let _ = writeln!(
        csv,
        "{jt},{},{},{},{},{},{}",
        t.tau_ms,
        t.tau1_ms,
        t.tau2_ms,
        alphas.join(","),
        r.fidelity_nearest_neighbour,
        r.fidelity_full
    );
    Ok(CommandResult {
        outputs: vec![Output {
            name: "compile.csv".into(),
            contents: csv,
        }],
        report: Some(report),
    })
}

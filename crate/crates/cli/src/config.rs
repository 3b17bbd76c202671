//! Flat `key = value` configuration with command-line overrides.
//!
//! Every key has a default, so an empty file is a valid configuration.
//! Unknown keys are rejected with the line they appear on.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Keys, defaults and a one-line description. An empty default is resolved
/// from other keys (see [`Config::resolved`]).
pub const KEYS: &[(&str, &str, &str)] = &[
    ("n_spins", "4", "chain length"),
    ("j", "1", "ZZ coupling J"),
    ("h_x", "1", "transverse kick field"),
    ("h_z", "0.809", "longitudinal field"),
    ("jt", "1.6", "dimensionless period J·T; also the compiled block phase"),
    ("boundary", "open", "open | periodic"),
    ("w_site", "", "1-based site of W (default: last spin)"),
    ("v_site", "1", "1-based site of V"),
    ("w_pauli", "Z", "X | Y | Z"),
    ("v_pauli", "Z", "X | Y | Z"),
    ("n_periods", "23", "largest period index n"),
    ("n_unitaries", "50", "sampled unitaries per run"),
    (
        "scheme",
        "global-haar",
        "global-haar | local-haar | local-axis-angle | design-hamiltonian",
    ),
    (
        "initial_state",
        "",
        "basis label of the reference state (default: all zeros)",
    ),
    ("subset_weight_base", "1", "weight base^|A| in the modified OTOC"),
    ("scatter_periods", "", "comma list of n for raw scatter output"),
    (
        "export_ensemble",
        "false",
        "also write the sampled unitaries as ensemble.txt",
    ),
    ("molecule", "", "molecule file (default: built-in four-carbon chain)"),
    ("period_ms", "20", "design-Hamiltonian period T in ms"),
    ("n_segments", "4", "design-Hamiltonian segments per unitary"),
    ("coupling_rule", "refocused", "refocused | linear"),
    ("fp_mode", "period", "period | samples | time"),
    ("fp_estimator", "distinct", "distinct | all (include self-pairs)"),
    ("fp_samples", "50", "ensemble size for period and time sweeps"),
    (
        "fp_periods_ms",
        "2,4,6,8,10,12,14,16,18,20",
        "periods for the period sweep",
    ),
    ("fp_sample_sizes", "10,20,50,100,200", "sizes for the sample sweep"),
    (
        "fp_times_ms",
        "0,2.5,5,7.5,10,12.5,15,17.5,20,22.5,25,27.5,30,32.5,35,37.5,40,50,60,70,80",
        "times for the time trace",
    ),
];

#[derive(Clone, Debug, PartialEq)]
enum Origin {
    Default,
    File { path: PathBuf, line: usize },
    Override,
}

#[derive(Clone, Debug)]
struct Entry {
    value: String,
    origin: Origin,
}

#[derive(Clone, Debug)]
pub struct Config {
    entries: BTreeMap<String, Entry>,
}

fn known(key: &str) -> bool {
    KEYS.iter().any(|(k, _, _)| *k == key)
}

fn split_pair(text: &str) -> Option<(String, String)> {
    let (k, v) = text.split_once('=')?;
    let k = k.trim();
    if k.is_empty() {
        return None;
    }
    Some((k.to_string(), v.trim().to_string()))
}

impl Default for Config {
    fn default() -> Self {
        let entries = KEYS
            .iter()
            .map(|(k, v, _)| {
                (
                    k.to_string(),
                    Entry {
                        value: v.to_string(),
                        origin: Origin::Default,
                    },
                )
            })
            .collect();
        Self { entries }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut seen = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let origin = || format!("{}:{line}", path.display());
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = split_pair(body).ok_or_else(|| CliError::Config {
                origin: origin(),
                message: format!("expected `key = value`, got {body:?}"),
            })?;
            if !known(&key) {
                return Err(CliError::Config {
                    origin: origin(),
                    message: format!("unknown key {key:?}"),
                });
            }
            if let Some(first) = seen.insert(key.clone(), line) {
                return Err(CliError::Config {
                    origin: origin(),
                    message: format!("duplicate key {key:?} (first set on line {first})"),
                });
            }
            cfg.entries.insert(
                key,
                Entry {
                    value,
                    origin: Origin::File {
                        path: path.to_path_buf(),
                        line,
                    },
                },
            );
        }
        Ok(cfg)
    }

    /// Applies a `key=value` override from the command line.
    pub fn apply_override(&mut self, text: &str) -> Result<(), CliError> {
        let (key, value) = split_pair(text).ok_or_else(|| CliError::Config {
            origin: "--set".into(),
            message: format!("expected `key=value`, got {text:?}"),
        })?;
        if !known(&key) {
            return Err(CliError::Config {
                origin: "--set".into(),
                message: format!("unknown key {key:?}"),
            });
        }
        self.entries.insert(
            key,
            Entry {
                value,
                origin: Origin::Override,
            },
        );
        Ok(())
    }

    fn entry(&self, key: &str) -> &Entry {
        self.entries.get(key).expect("every key has a default")
    }

    pub fn raw(&self, key: &str) -> &str {
        &self.entry(key).value
    }

    fn origin(&self, key: &str) -> String {
        match &self.entry(key).origin {
            Origin::Default => format!("default for {key}"),
            Origin::File { path, line } => format!("{}:{line}", path.display()),
            Origin::Override => format!("--set {key}"),
        }
    }

    pub fn invalid(&self, key: &str, message: impl Into<String>) -> CliError {
        CliError::Config {
            origin: self.origin(key),
            message: format!("{key}: {}", message.into()),
        }
    }

    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<T, CliError> {
        let raw = self.raw(key);
        raw.parse::<T>()
            .map_err(|_| self.invalid(key, format!("cannot parse {raw:?}")))
    }

    pub fn f64(&self, key: &str) -> Result<f64, CliError> {
        let v: f64 = self.parsed(key)?;
        if !v.is_finite() {
            return Err(self.invalid(key, "must be finite"));
        }
        Ok(v)
    }

    pub fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Vec<T>, CliError> {
        self.raw(key)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<T>()
                    .map_err(|_| self.invalid(key, format!("cannot parse list item {s:?}")))
            })
            .collect()
    }

    /// Path value; relative paths from a config file resolve against the
    /// file's directory, others against the working directory.
    pub fn path(&self, key: &str) -> Option<PathBuf> {
        let entry = self.entry(key);
        if entry.value.is_empty() {
            return None;
        }
        let p = PathBuf::from(&entry.value);
        match &entry.origin {
            Origin::File { path, .. } if p.is_relative() => Some(path.parent().map(|d| d.join(&p)).unwrap_or(p)),
            _ => Some(p),
        }
    }

    /// All keys with derived defaults filled in, for the run manifest.
    pub fn resolved(&self) -> BTreeMap<String, String> {
        let mut out: BTreeMap<String, String> =
            self.entries.iter().map(|(k, e)| (k.clone(), e.value.clone())).collect();
        let n: usize = self.raw("n_spins").parse().unwrap_or(0);
        if self.raw("w_site").is_empty() {
            out.insert("w_site".into(), n.to_string());
        }
        if self.raw("initial_state").is_empty() {
            out.insert("initial_state".into(), "0".repeat(n));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = Config::parse("", Path::new("x.conf")).unwrap();
        assert_eq!(cfg.raw("jt"), "1.6");
        assert_eq!(cfg.resolved()["w_site"], "4");
        assert_eq!(cfg.resolved()["initial_state"], "0000");
    }

    #[test]
    fn comments_and_whitespace() {
        let cfg = Config::parse(
            "# header\n  jt = 0.8  # inline\n\nscheme=local-haar\n",
            Path::new("x.conf"),
        )
        .unwrap();
        assert_eq!(cfg.f64("jt").unwrap(), 0.8);
        assert_eq!(cfg.raw("scheme"), "local-haar");
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = Config::parse("jt = 1\nbogus = 2\n", Path::new("a.conf")).unwrap_err();
        assert!(err.to_string().starts_with("a.conf:2:"), "{err}");
        let err = Config::parse("jt = 1\n\njt = 2\n", Path::new("a.conf")).unwrap_err();
        assert!(
            err.to_string().contains("a.conf:3") && err.to_string().contains("line 1"),
            "{err}"
        );
        let err = Config::parse("just words\n", Path::new("a.conf")).unwrap_err();
        assert!(err.to_string().starts_with("a.conf:1:"), "{err}");
        let cfg = Config::parse("\n\nh_z = abc\n", Path::new("a.conf")).unwrap();
        let err = cfg.f64("h_z").unwrap_err();
        assert!(err.to_string().starts_with("a.conf:3:"), "{err}");
    }

    #[test]
    fn overrides_win_and_are_validated() {
        let mut cfg = Config::parse("jt = 1\n", Path::new("a.conf")).unwrap();
        cfg.apply_override("jt=2.5").unwrap();
        assert_eq!(cfg.f64("jt").unwrap(), 2.5);
        assert!(cfg.apply_override("nope=1").is_err());
        assert!(cfg.apply_override("novalue").is_err());
        cfg.apply_override("n_unitaries=x").unwrap();
        assert!(cfg
            .parsed::<usize>("n_unitaries")
            .unwrap_err()
            .to_string()
            .contains("--set"));
    }

    #[test]
    fn lists_and_paths() {
        let cfg = Config::parse(
            "fp_periods_ms = 1, 2 ,3\nmolecule = mol/a.mol\n",
            Path::new("/tmp/cfg/run.conf"),
        )
        .unwrap();
        assert_eq!(cfg.list::<f64>("fp_periods_ms").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(cfg.path("molecule").unwrap(), PathBuf::from("/tmp/cfg/mol/a.mol"));
        assert!(cfg.list::<u32>("scatter_periods").unwrap().is_empty());
    }
}

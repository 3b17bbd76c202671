//! Reproducible ensembles and their text export format.
//!
//! ```text
//! otoc-ensemble 1
//! dim 16
//! count 50
//! seed 42
//! scheme design-hamiltonian period_ms=20 n_segments=4 coupling=refocused offsets_hz=612,-437,291,-158 couplings_hz=41.64,0,0,69.67,0,72.44
//! member 0
//! <dim lines, each holding dim "re im" pairs separated by spaces>
//! member 1
//! ...
//! ```
//!
//! `couplings_hz` lists the upper triangle row by row (J12, J13, …, J23, …).
//! Numbers use Rust's shortest round-trip formatting, so import reproduces
//! the exported bits exactly.

use std::fmt::Write as _;

use crate::error::EnsembleError;
use crate::molecule::MoleculeSpec;
use crate::operator::{qubits_for_dim, Operator, C64};
use crate::parallel::Execution;

use super::design::{CouplingRule, DesignScheme};
use super::RandomizationScheme;

const MAGIC: &str = "otoc-ensemble 1";

#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryEnsemble {
    pub members: Vec<Operator>,
    pub scheme: RandomizationScheme,
    pub seed: u64,
}

impl UnitaryEnsemble {
    /// Member `i` comes from stream `i` of `seed`, so the ensemble is the same
    /// for every execution strategy.
    pub fn generate(
        scheme: RandomizationScheme,
        n_spins: usize,
        seed: u64,
        count: usize,
        exec: Execution,
    ) -> Result<Self, EnsembleError> {
        let members = scheme.sample_many(n_spins, seed, count, exec)?;
        Ok(Self { members, scheme, seed })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.members.first().map(Operator::dim)
    }

    pub fn to_text(&self) -> String {
        let dim = self.dim().unwrap_or(0);
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "dim {dim}");
        let _ = writeln!(out, "count {}", self.members.len());
        let _ = writeln!(out, "seed {}", self.seed);
        let _ = writeln!(out, "scheme {}", describe_scheme(&self.scheme));
        for (i, m) in self.members.iter().enumerate() {
            let _ = writeln!(out, "member {i}");
            for r in 0..dim {
                let row: Vec<String> = (0..dim)
                    .map(|c| {
                        let z = m.get(r, c);
                        format!("{:e} {:e}", z.re, z.im)
                    })
                    .collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, EnsembleError> {
        let mut rd = Reader::new(text);
        let (ln, magic) = rd.next("header")?;
        if magic != MAGIC {
            return Err(parse_err(ln, format!("expected {MAGIC:?}")));
        }
        let (ln, dim) = rd.field("dim")?;
        let dim: usize = dim.parse().map_err(|_| parse_err(ln, "invalid dim".into()))?;
        if dim == 0 || qubits_for_dim(dim).is_none() {
            return Err(parse_err(ln, format!("dim {dim} is not a power of two")));
        }
        let (ln, count) = rd.field("count")?;
        let count: usize = count.parse().map_err(|_| parse_err(ln, "invalid count".into()))?;
        let (ln, seed) = rd.field("seed")?;
        let seed: u64 = seed.parse().map_err(|_| parse_err(ln, "invalid seed".into()))?;
        let (ln, scheme) = rd.field("scheme")?;
        let scheme = parse_scheme(scheme).map_err(|m| parse_err(ln, m))?;

        let mut members = Vec::with_capacity(count);
        for i in 0..count {
            let (ln, header) = rd.field("member")?;
            if header != i.to_string() {
                return Err(parse_err(ln, format!("expected member {i}")));
            }
            let mut entries = Vec::with_capacity(dim * dim);
            for _ in 0..dim {
                let (ln, row) = rd.next("matrix row")?;
                let nums = row
                    .split_whitespace()
                    .map(|w| {
                        w.parse::<f64>()
                            .map_err(|_| parse_err(ln, format!("invalid number {w:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                if nums.len() != 2 * dim {
                    return Err(parse_err(
                        ln,
                        format!("row needs {} numbers, got {}", 2 * dim, nums.len()),
                    ));
                }
                entries.extend(nums.chunks(2).map(|p| C64::new(p[0], p[1])));
            }
            members.push(Operator::from_row_slice(dim, &entries)?);
        }
        if let Ok((ln, extra)) = rd.next("") {
            return Err(parse_err(ln, format!("trailing content {extra:?}")));
        }
        Ok(Self { members, scheme, seed })
    }

    /// Regenerates the ensemble from its recorded scheme and seed.
    pub fn regenerate(&self, exec: Execution) -> Result<Self, EnsembleError> {
        let n = self.dim().and_then(qubits_for_dim).ok_or(EnsembleError::Empty)?;
        Self::generate(self.scheme.clone(), n, self.seed, self.members.len(), exec)
    }
}

fn parse_err(line: usize, message: String) -> EnsembleError {
    EnsembleError::Parse { line, message }
}

struct Reader<'a> {
    lines: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Reader<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            lines: text.lines().enumerate(),
            last: 0,
        }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str), EnsembleError> {
        for (i, l) in self.lines.by_ref() {
            self.last = i + 1;
            let l = l.trim();
            if !l.is_empty() {
                return Ok((i + 1, l));
            }
        }
        Err(parse_err(
            self.last + 1,
            format!("unexpected end of file, expected {what}"),
        ))
    }

    fn field(&mut self, key: &str) -> Result<(usize, &'a str), EnsembleError> {
        let (ln, line) = self.next(key)?;
        let rest = line
            .strip_prefix(key)
            .filter(|r| r.starts_with(' '))
            .ok_or_else(|| parse_err(ln, format!("expected `{key} ...`")))?;
        Ok((ln, rest.trim()))
    }
}

fn join(values: impl Iterator<Item = f64>) -> String {
    values.map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Single-line scheme descriptor used in ensemble headers and CSV output.
pub fn describe_scheme(scheme: &RandomizationScheme) -> String {
    match scheme {
        RandomizationScheme::DesignHamiltonian(d) => {
            let n = d.molecule.n_spins();
            let upper = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
            format!(
                "{} period_ms={} n_segments={} coupling={} offsets_hz={} couplings_hz={}",
                scheme.name(),
                d.period_ms,
                d.n_segments,
                d.coupling_rule.name(),
                join(d.molecule.offsets_hz().iter().copied()),
                join(upper.map(|(i, j)| d.molecule.coupling_hz(i, j))),
            )
        }
        other => other.name().to_string(),
    }
}

pub fn parse_scheme(descriptor: &str) -> Result<RandomizationScheme, String> {
    let mut words = descriptor.split_whitespace();
    match words.next() {
        Some("global-haar") => Ok(RandomizationScheme::GlobalHaar),
        Some("local-haar") => Ok(RandomizationScheme::LocalHaar),
        Some("local-axis-angle") => Ok(RandomizationScheme::LocalAxisAngle),
        Some("design-hamiltonian") => {
            let mut period = None;
            let mut segments = None;
            let mut rule = CouplingRule::default();
            let mut offsets: Option<Vec<f64>> = None;
            let mut couplings: Option<Vec<f64>> = None;
            let list = |v: &str| -> Result<Vec<f64>, String> {
                v.split(',')
                    .map(|x| x.parse::<f64>().map_err(|_| format!("invalid number {x:?}")))
                    .collect()
            };
            for w in words {
                let (k, v) = w
                    .split_once('=')
                    .ok_or_else(|| format!("expected key=value, got {w:?}"))?;
                match k {
                    "period_ms" => period = Some(v.parse::<f64>().map_err(|_| format!("invalid period {v:?}"))?),
                    "n_segments" => {
                        segments = Some(v.parse::<usize>().map_err(|_| format!("invalid n_segments {v:?}"))?)
                    }
                    "coupling" => {
                        rule = CouplingRule::from_name(v).ok_or_else(|| format!("unknown coupling rule {v:?}"))?
                    }
                    "offsets_hz" => offsets = Some(list(v)?),
                    "couplings_hz" => couplings = Some(list(v)?),
                    other => return Err(format!("unknown scheme key {other:?}")),
                }
            }
            let offsets = offsets.ok_or("missing offsets_hz")?;
            let couplings = couplings.ok_or("missing couplings_hz")?;
            let n = offsets.len();
            if couplings.len() != n * n.saturating_sub(1) / 2 {
                return Err(format!(
                    "expected {} couplings for {n} spins",
                    n * n.saturating_sub(1) / 2
                ));
            }
            let mut pairs = Vec::new();
            let mut it = couplings.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    pairs.push((i, j, it.next().expect("length checked")));
                }
            }
            let molecule = MoleculeSpec::from_pairs(offsets, &pairs).map_err(|e| e.to_string())?;
            Ok(RandomizationScheme::DesignHamiltonian(DesignScheme {
                period_ms: period.ok_or("missing period_ms")?,
                n_segments: segments.ok_or("missing n_segments")?,
                molecule,
                coupling_rule: rule,
            }))
        }
        Some(other) => Err(format!("unknown scheme {other:?}")),
        None => Err("empty scheme descriptor".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::UNITARY_TOL;
    use proptest::prelude::*;

    fn schemes() -> Vec<RandomizationScheme> {
        vec![
            RandomizationScheme::GlobalHaar,
            RandomizationScheme::LocalHaar,
            RandomizationScheme::LocalAxisAngle,
            RandomizationScheme::DesignHamiltonian(DesignScheme::standard()),
        ]
    }

    #[test]
    fn generation_is_deterministic_across_execution() {
        for scheme in schemes() {
            let a = UnitaryEnsemble::generate(scheme.clone(), 4, 11, 12, Execution::Sequential).unwrap();
            let b = UnitaryEnsemble::generate(scheme.clone(), 4, 11, 12, Execution::Workers(5)).unwrap();
            assert_eq!(a, b, "{}", scheme.name());
            assert!(a.members.iter().all(|m| m.is_unitary(UNITARY_TOL)));
            let c = UnitaryEnsemble::generate(scheme, 4, 12, 12, Execution::Sequential).unwrap();
            assert_ne!(a.members, c.members);
        }
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        for scheme in schemes() {
            let ens = UnitaryEnsemble::generate(scheme, 4, 3, 3, Execution::Sequential).unwrap();
            let back = UnitaryEnsemble::parse(&ens.to_text()).unwrap();
            assert_eq!(back, ens);
            assert_eq!(back.regenerate(Execution::Parallel).unwrap(), ens);
        }
    }

    #[test]
    fn header_layout() {
        let ens = UnitaryEnsemble::generate(RandomizationScheme::GlobalHaar, 1, 9, 2, Execution::Sequential).unwrap();
        let text = ens.to_text();
        let head: Vec<&str> = text.lines().take(6).collect();
        assert_eq!(
            head,
            vec![
                "otoc-ensemble 1",
                "dim 2",
                "count 2",
                "seed 9",
                "scheme global-haar",
                "member 0"
            ]
        );
    }

    #[test]
    fn parse_errors_report_lines() {
        let line_of = |text: &str| match UnitaryEnsemble::parse(text) {
            Err(EnsembleError::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(line_of("nope\n"), 1);
        assert_eq!(line_of("otoc-ensemble 1\ndim 3\n"), 2);
        assert_eq!(line_of("otoc-ensemble 1\ndim 2\ncount 1\nseed 1\nscheme warp\n"), 5);
        assert_eq!(
            line_of("otoc-ensemble 1\ndim 2\ncount 1\nseed 1\nscheme global-haar\nmember 0\n1 0 0\n"),
            7
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn descriptor_round_trip(period in 0.0f64..100.0, half_segments in 1usize..5, offsets in proptest::collection::vec(-2000.0f64..2000.0, 4)) {
            let molecule = MoleculeSpec::crotonic_default().with_offsets(offsets).unwrap();
            let scheme = RandomizationScheme::DesignHamiltonian(DesignScheme {
                period_ms: period,
                n_segments: 2 * half_segments,
                molecule,
                coupling_rule: CouplingRule::Linear,
            });
            prop_assert_eq!(parse_scheme(&describe_scheme(&scheme)).unwrap(), scheme);
        }
    }
}

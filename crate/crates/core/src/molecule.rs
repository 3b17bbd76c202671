//! Spin-system constants and the natural NMR Hamiltonian.
//!
//! Frequencies are stored in Hz; Hamiltonians are returned in rad/s so that
//! `e^{-iHt}` takes `t` in seconds.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::PulseError;
use crate::operator::{Operator, C64};

/// Offset frequencies and the symmetric J-coupling table of an n-spin
/// molecule, all in Hz.
#[derive(Clone, Debug, PartialEq)]
pub struct MoleculeSpec {
    offsets_hz: Vec<f64>,
    couplings_hz: Vec<Vec<f64>>,
}

impl MoleculeSpec {
    pub fn new(offsets_hz: Vec<f64>, couplings_hz: Vec<Vec<f64>>) -> Result<Self, PulseError> {
        let n = offsets_hz.len();
        if n < 2 {
            return Err(PulseError::TooFewSpins(n));
        }
        if couplings_hz.len() != n || couplings_hz.iter().any(|row| row.len() != n) {
            return Err(PulseError::ShapeMismatch);
        }
        for (i, row) in couplings_hz.iter().enumerate() {
            if row[i] != 0.0 {
                return Err(PulseError::DiagonalCoupling(i + 1));
            }
            for (j, &value) in row.iter().enumerate().take(i) {
                if value != couplings_hz[j][i] {
                    return Err(PulseError::AsymmetricCoupling(i + 1, j + 1));
                }
            }
        }
        Ok(Self {
            offsets_hz,
            couplings_hz,
        })
    }

    /// Builds from offsets plus a list of `(i, j, J)` couplings (0-based).
    pub fn from_pairs(offsets_hz: Vec<f64>, pairs: &[(usize, usize, f64)]) -> Result<Self, PulseError> {
        let n = offsets_hz.len();
        let mut table = vec![vec![0.0; n]; n];
        for &(i, j, value) in pairs {
            if i >= n || j >= n || i == j {
                return Err(PulseError::ShapeMismatch);
            }
            table[i][j] = value;
            table[j][i] = value;
        }
        Self::new(offsets_hz, table)
    }

    /// Four-carbon chain whose nearest-neighbour couplings give the refocusing
    /// times (τ = 12.23 ms, τ₁ = 9.77 ms,
    /// τ₂ = 7.17 ms at JT = 1.6). Long-range couplings are zero. The offsets
    /// are synthetic values of a few hundred Hz; any incommensurate set of
    /// that size breaks the parity symmetries of the pure-coupling segments.
    pub fn crotonic_default() -> Self {
        Self::from_pairs(
            CROTONIC_OFFSETS_HZ.to_vec(),
            &[
                (0, 1, CROTONIC_J12_HZ),
                (1, 2, CROTONIC_J23_HZ),
                (2, 3, CROTONIC_J34_HZ),
            ],
        )
        .expect("static molecule is valid")
    }

    pub fn n_spins(&self) -> usize {
        self.offsets_hz.len()
    }

    pub fn offsets_hz(&self) -> &[f64] {
        &self.offsets_hz
    }

    pub fn offset_hz(&self, spin: usize) -> f64 {
        self.offsets_hz[spin]
    }

    /// Angular offset ω_i = 2π·f_i in rad/s.
    pub fn omega(&self, spin: usize) -> f64 {
        2.0 * PI * self.offsets_hz[spin]
    }

    pub fn coupling_hz(&self, i: usize, j: usize) -> f64 {
        self.couplings_hz[i][j]
    }

    pub fn couplings_hz(&self) -> &[Vec<f64>] {
        &self.couplings_hz
    }

    pub fn with_offsets(&self, offsets_hz: Vec<f64>) -> Result<Self, PulseError> {
        Self::new(offsets_hz, self.couplings_hz.clone())
    }

    /// Copy with every non-nearest-neighbour coupling set to zero.
    pub fn nearest_neighbour_only(&self) -> Self {
        let n = self.n_spins();
        let mut table = self.couplings_hz.clone();
        for (i, row) in table.iter_mut().enumerate() {
            for (j, value) in row.iter_mut().enumerate() {
                if i.abs_diff(j) != 1 {
                    *value = 0.0;
                }
            }
        }
        debug_assert_eq!(table.len(), n);
        Self {
            offsets_hz: self.offsets_hz.clone(),
            couplings_hz: table,
        }
    }

    /// Parses the flat molecule file format (see [`MoleculeSpec::to_text`]).
    pub fn parse(text: &str) -> Result<Self, PulseError> {
        #[derive(PartialEq)]
        enum Section {
            Header,
            Offsets,
            Couplings,
        }
        let err = |line: usize, message: String| PulseError::Parse { line, message };
        let mut units_seen = false;
        let mut spins: Option<usize> = None;
        let mut offsets = Vec::new();
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut section = Section::Header;
        let mut last_line = 0;

        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            last_line = line_no;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lower = line.to_ascii_lowercase();
            let mut words = lower.split_whitespace();
            let head = words.next().unwrap_or("");
            match head {
                "units" => {
                    match words.next() {
                        Some("hz") => units_seen = true,
                        other => {
                            return Err(err(
                                line_no,
                                format!("unsupported units {:?}; only Hz is accepted", other.unwrap_or("")),
                            ))
                        }
                    }
                    continue;
                }
                "spins" => {
                    let n = words
                        .next()
                        .and_then(|w| w.parse::<usize>().ok())
                        .ok_or_else(|| err(line_no, "expected `spins <count>`".into()))?;
                    if n < 2 {
                        return Err(err(line_no, format!("need at least 2 spins, got {n}")));
                    }
                    spins = Some(n);
                    continue;
                }
                "offsets" => {
                    section = Section::Offsets;
                    continue;
                }
                "couplings" => {
                    section = Section::Couplings;
                    continue;
                }
                _ => {}
            }
            let n = spins.ok_or_else(|| err(line_no, "`spins` must precede data lines".into()))?;
            let values = line
                .split_whitespace()
                .map(|w| {
                    w.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| err(line_no, format!("invalid number {w:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            match section {
                Section::Header => return Err(err(line_no, format!("unexpected line {line:?} before a section"))),
                Section::Offsets => {
                    if values.len() != 1 {
                        return Err(err(line_no, "offset lines hold exactly one value".into()));
                    }
                    if offsets.len() == n {
                        return Err(err(line_no, format!("more than {n} offsets")));
                    }
                    offsets.push(values[0]);
                }
                Section::Couplings => {
                    let expected = rows.len() + 1;
                    if expected >= n {
                        return Err(err(line_no, format!("more than {} coupling rows", n - 1)));
                    }
                    if values.len() != expected {
                        return Err(err(
                            line_no,
                            format!(
                                "coupling row for spin {} needs {expected} values, got {}",
                                expected + 1,
                                values.len()
                            ),
                        ));
                    }
                    rows.push(values);
                }
            }
        }
        if !units_seen {
            return Err(err(1, "missing `units hz` header".into()));
        }
        let n = spins.ok_or_else(|| err(last_line, "missing `spins` header".into()))?;
        if offsets.len() != n {
            return Err(err(last_line, format!("expected {n} offsets, got {}", offsets.len())));
        }
        if rows.len() != n - 1 {
            return Err(err(
                last_line,
                format!("expected {} coupling rows, got {}", n - 1, rows.len()),
            ));
        }
        let mut table = vec![vec![0.0; n]; n];
        for (r, row) in rows.iter().enumerate() {
            let i = r + 1;
            for (j, &value) in row.iter().enumerate() {
                table[i][j] = value;
                table[j][i] = value;
            }
        }
        Self::new(offsets, table)
    }

    /// Renders the molecule file: a `units hz` header, the spin count, one
    /// offset per line, then the strictly lower triangle of the coupling
    /// table with row `i` holding `J_i1 … J_i,i-1`.
    pub fn to_text(&self) -> String {
        let n = self.n_spins();
        let mut out = String::new();
        let _ = writeln!(out, "units hz");
        let _ = writeln!(out, "spins {n}");
        let _ = writeln!(out, "offsets");
        for f in &self.offsets_hz {
            let _ = writeln!(out, "{f}");
        }
        let _ = writeln!(out, "couplings");
        for i in 1..n {
            let row: Vec<String> = (0..i).map(|j| self.couplings_hz[i][j].to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }
}

pub const CROTONIC_J12_HZ: f64 = 41.64;
pub const CROTONIC_J23_HZ: f64 = 69.67;
pub const CROTONIC_J34_HZ: f64 = 72.44;
pub const CROTONIC_OFFSETS_HZ: [f64; 4] = [612.0, -437.0, 291.0, -158.0];

/// Diagonal of the natural Hamiltonian in rad/s.
pub fn nmr_energies(m: &MoleculeSpec) -> Vec<f64> {
    let n = m.n_spins();
    (0..1usize << n)
        .map(|basis| {
            let z = |q: usize| if basis >> (n - 1 - q) & 1 == 0 { 1.0 } else { -1.0 };
            let shifts: f64 = (0..n).map(|i| -0.5 * m.omega(i) * z(i)).sum();
            let mut couplings = 0.0;
            for i in 0..n {
                for j in i + 1..n {
                    couplings += PI * 0.5 * m.coupling_hz(i, j) * z(i) * z(j);
                }
            }
            shifts + couplings
        })
        .collect()
}

/// `−Σ(ω_i/2)σ^z_i + πΣ_{i<j}(J_ij/2)σ^z_iσ^z_j` in rad/s.
pub fn nmr_hamiltonian(m: &MoleculeSpec) -> Operator {
    let diag: Vec<C64> = nmr_energies(m).into_iter().map(|e| C64::new(e, 0.0)).collect();
    Operator::diagonal(&diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{Pauli, PauliString};

    fn embed(s: &str) -> Operator {
        s.parse::<PauliString>().unwrap().embed()
    }

    #[test]
    fn zero_molecule_has_zero_hamiltonian() {
        let m = MoleculeSpec::from_pairs(vec![0.0; 4], &[]).unwrap();
        assert_eq!(nmr_hamiltonian(&m).max_abs(), 0.0);
    }

    #[test]
    fn two_spin_coupling_only() {
        let m = MoleculeSpec::from_pairs(vec![0.0, 0.0], &[(0, 1, 50.0)]).unwrap();
        let expected = embed("ZZ").scale_real(PI * 25.0);
        assert!(nmr_hamiltonian(&m).max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn matches_pauli_sum() {
        let m = MoleculeSpec::from_pairs(vec![100.0, -30.0, 7.5], &[(0, 1, 10.0), (0, 2, 2.0), (1, 2, 40.0)]).unwrap();
        let mut h = Operator::zeros(8);
        for i in 0..3 {
            let z = PauliString::single(3, i, Pauli::Z).unwrap().embed();
            h = &h + &z.scale_real(-m.omega(i) / 2.0);
            for j in i + 1..3 {
                let zz = PauliString::from_sites(3, &[(i, Pauli::Z), (j, Pauli::Z)])
                    .unwrap()
                    .embed();
                h = &h + &zz.scale_real(PI * m.coupling_hz(i, j) / 2.0);
            }
        }
        assert!(nmr_hamiltonian(&m).max_abs_diff(&h) < 1e-9);
    }

    #[test]
    fn crotonic_default_is_hermitian_and_diagonal() {
        let h = nmr_hamiltonian(&MoleculeSpec::crotonic_default());
        assert!(h.is_hermitian(1e-12));
        assert!(h.is_diagonal(0.0));
    }

    #[test]
    fn rejects_invalid_tables() {
        assert_eq!(
            MoleculeSpec::new(vec![0.0], vec![vec![0.0]]),
            Err(PulseError::TooFewSpins(1))
        );
        assert_eq!(
            MoleculeSpec::new(vec![0.0, 0.0], vec![vec![0.0, 1.0], vec![2.0, 0.0]]),
            Err(PulseError::AsymmetricCoupling(2, 1))
        );
        assert_eq!(
            MoleculeSpec::new(vec![0.0, 0.0], vec![vec![1.0, 0.0], vec![0.0, 0.0]]),
            Err(PulseError::DiagonalCoupling(1))
        );
        assert_eq!(
            MoleculeSpec::new(vec![0.0, 0.0], vec![vec![0.0, 0.0]]),
            Err(PulseError::ShapeMismatch)
        );
    }

    #[test]
    fn nearest_neighbour_projection() {
        let m = MoleculeSpec::from_pairs(vec![0.0; 4], &[(0, 1, 1.0), (0, 2, 2.0), (1, 3, 3.0), (2, 3, 4.0)]).unwrap();
        let nn = m.nearest_neighbour_only();
        assert_eq!(nn.coupling_hz(0, 2), 0.0);
        assert_eq!(nn.coupling_hz(3, 1), 0.0);
        assert_eq!(nn.coupling_hz(0, 1), 1.0);
        assert_eq!(nn.coupling_hz(3, 2), 4.0);
    }

    #[test]
    fn file_round_trip() {
        let m = MoleculeSpec::from_pairs(
            vec![612.5, -1.25e3, 0.0, 3.0],
            &[(0, 1, 41.64), (0, 3, 7.1), (2, 3, 72.44)],
        )
        .unwrap();
        assert_eq!(MoleculeSpec::parse(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn parses_commented_file() {
        let text = "# four carbons\nunits Hz\nspins 3\noffsets\n  10.0  # C1\n-5\n0\ncouplings\n40\n1.5 70\n";
        let m = MoleculeSpec::parse(text).unwrap();
        assert_eq!(m.offsets_hz(), &[10.0, -5.0, 0.0]);
        assert_eq!(m.coupling_hz(0, 1), 40.0);
        assert_eq!(m.coupling_hz(2, 0), 1.5);
        assert_eq!(m.coupling_hz(1, 2), 70.0);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let line_of = |text: &str| match MoleculeSpec::parse(text) {
            Err(PulseError::Parse { line, .. }) => line,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(line_of("units khz\n"), 1);
        assert_eq!(line_of("units hz\nspins 2\noffsets\n1\nabc\n"), 5);
        assert_eq!(line_of("units hz\nspins 2\noffsets\n1\n2\ncouplings\n1 2\n"), 7);
        assert_eq!(line_of("units hz\n10\n"), 2);
        assert_eq!(line_of("spins 2\noffsets\n1\n2\ncouplings\n3\n"), 1);
    }
}

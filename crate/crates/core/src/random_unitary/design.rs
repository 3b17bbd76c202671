//! Pseudorandom unitaries from random refocusing sequences.
//!
//! Each segment evolves for half a period under the time-averaged natural
//! Hamiltonian of a random refocusing sequence. Segments alternate between
//! the Z basis and the X basis (the latter obtained by a collective basis
//! change), and every segment draws fresh refocusing parameters λ ∈ [0, 1)^N.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::EnsembleError;
use crate::molecule::MoleculeSpec;
use crate::operator::{Operator, Pauli, PauliString, C64};

/// Basis of a refocusing segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentBasis {
    Z,
    X,
}

impl SegmentBasis {
    /// Bases alternate Z, X, Z, X, … starting from segment 0.
    pub fn for_segment(m: usize) -> Self {
        if m.is_multiple_of(2) {
            SegmentBasis::Z
        } else {
            SegmentBasis::X
        }
    }
}

/// How the refocusing parameters rescale a coupling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CouplingRule {
    /// `1 − 2|λ_i − λ_j|`: the exact time average of a single inversion per
    /// spin. Agrees with the piecewise pulse simulation.
    #[default]
    Refocused,
    /// `1 − |λ_i − λ_j|`, kept for comparison runs.
    Linear,
}

impl CouplingRule {
    pub fn factor(self, li: f64, lj: f64) -> f64 {
        match self {
            CouplingRule::Refocused => 1.0 - 2.0 * (li - lj).abs(),
            CouplingRule::Linear => 1.0 - (li - lj).abs(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CouplingRule::Refocused => "refocused",
            CouplingRule::Linear => "linear",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "refocused" => Some(CouplingRule::Refocused),
            "linear" => Some(CouplingRule::Linear),
            _ => None,
        }
    }
}

/// Parameters of the design-Hamiltonian ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignScheme {
    /// Driving period T in ms; each segment lasts T/2.
    pub period_ms: f64,
    pub n_segments: usize,
    pub molecule: MoleculeSpec,
    pub coupling_rule: CouplingRule,
}

impl DesignScheme {
    /// T = 20 ms, four segments, crotonic-acid default constants.
    pub fn standard() -> Self {
        Self {
            period_ms: 20.0,
            n_segments: 4,
            molecule: MoleculeSpec::crotonic_default(),
            coupling_rule: CouplingRule::Refocused,
        }
    }

    pub fn validate(&self) -> Result<(), EnsembleError> {
        if self.n_segments == 0 || !self.n_segments.is_multiple_of(2) {
            return Err(EnsembleError::OddSegments(self.n_segments));
        }
        if !self.period_ms.is_finite() || self.period_ms < 0.0 {
            return Err(EnsembleError::BadPeriod(self.period_ms));
        }
        Ok(())
    }

    pub fn segment_seconds(&self) -> f64 {
        0.5 * self.period_ms * 1e-3
    }

    pub fn n_spins(&self) -> usize {
        self.molecule.n_spins()
    }
}

/// Refocusing parameters, one row of λ per segment.
#[derive(Clone, Debug, PartialEq)]
pub struct RefocusSchedule {
    rows: Vec<Vec<f64>>,
}

impl RefocusSchedule {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self, EnsembleError> {
        if let Some(&bad) = rows.iter().flatten().find(|&&l| !(0.0..1.0).contains(&l)) {
            return Err(EnsembleError::LambdaOutOfRange(bad));
        }
        Ok(Self { rows })
    }

    /// Draws `n_segments` rows of i.i.d. uniform λ, row by row.
    pub fn draw<R: Rng + ?Sized>(n_segments: usize, n_spins: usize, rng: &mut R) -> Self {
        let rows = (0..n_segments)
            .map(|_| (0..n_spins).map(|_| rng.random::<f64>()).collect())
            .collect();
        Self { rows }
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn n_segments(&self) -> usize {
        self.rows.len()
    }
}

/// Diagonal (Z-basis) energies of the effective Hamiltonian in rad/s.
fn effective_energies(lambdas: &[f64], molecule: &MoleculeSpec, rule: CouplingRule) -> Vec<f64> {
    let n = molecule.n_spins();
    assert_eq!(lambdas.len(), n, "one λ per spin");
    (0..1usize << n)
        .map(|basis| {
            let z = |q: usize| if basis >> (n - 1 - q) & 1 == 0 { 1.0 } else { -1.0 };
            let mut e = 0.0;
            for i in 0..n {
                e -= 0.5 * (1.0 - 2.0 * lambdas[i]) * molecule.omega(i) * z(i);
                for j in i + 1..n {
                    let j_eff = rule.factor(lambdas[i], lambdas[j]) * molecule.coupling_hz(i, j);
                    e += PI * 0.5 * j_eff * z(i) * z(j);
                }
            }
            e
        })
        .collect()
}

/// `−Σ(ω_i^eff/2)σ_i^b + πΣ_{i<j}(J_ij^eff/2)σ_i^bσ_j^b` with
/// `ω^eff = (1 − 2λ_i)ω_i`, in rad/s. The ½ factors match
/// [`crate::molecule::nmr_hamiltonian`], whose time average this is.
pub fn effective_hamiltonian(
    lambdas: &[f64],
    basis: SegmentBasis,
    molecule: &MoleculeSpec,
    rule: CouplingRule,
) -> Operator {
    let n = molecule.n_spins();
    let letter = match basis {
        SegmentBasis::Z => Pauli::Z,
        SegmentBasis::X => Pauli::X,
    };
    let mut h = Operator::zeros(1 << n);
    for i in 0..n {
        let w_eff = (1.0 - 2.0 * lambdas[i]) * molecule.omega(i);
        let single = PauliString::single(n, i, letter).expect("site in range").embed();
        h = &h + &single.scale_real(-0.5 * w_eff);
        for j in i + 1..n {
            let j_eff = rule.factor(lambdas[i], lambdas[j]) * molecule.coupling_hz(i, j);
            if j_eff != 0.0 {
                let pair = PauliString::from_sites(n, &[(i, letter), (j, letter)])
                    .expect("sites in range")
                    .embed();
                h = &h + &pair.scale_real(PI * 0.5 * j_eff);
            }
        }
    }
    h
}

/// `H^{⊗n}`, mapping Z-basis operators to X-basis ones.
pub fn hadamard_layer(n: usize) -> Operator {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Operator::from_fn(1 << n, |r, c| {
        let sign = if (r & c).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        C64::new(sign * s.powi(n as i32), 0.0)
    })
}

/// `exp(−i H^(m) t)` for one segment, `t` in seconds. Z segments are
/// diagonal; X segments are the same diagonal conjugated by Hadamards.
pub fn segment_unitary(
    lambdas: &[f64],
    basis: SegmentBasis,
    molecule: &MoleculeSpec,
    rule: CouplingRule,
    seconds: f64,
) -> Operator {
    let phases: Vec<C64> = effective_energies(lambdas, molecule, rule)
        .into_iter()
        .map(|e| C64::from_polar(1.0, -e * seconds))
        .collect();
    let diag = Operator::diagonal(&phases);
    match basis {
        SegmentBasis::Z => diag,
        SegmentBasis::X => {
            let h = hadamard_layer(molecule.n_spins());
            &(&h * &diag) * &h
        }
    }
}

/// Ordered product of the segment evolutions for a given schedule, the first
/// segment acting first.
pub fn design_unitary(scheme: &DesignScheme, schedule: &RefocusSchedule) -> Operator {
    design_unitary_at(scheme, schedule, f64::INFINITY)
}

/// Trajectory truncated at `t_ms`: whole segments before it, and the
/// segment in progress for its elapsed fraction.
pub fn design_unitary_at(scheme: &DesignScheme, schedule: &RefocusSchedule, t_ms: f64) -> Operator {
    let segment_ms = 0.5 * scheme.period_ms;
    let mut u = Operator::identity(1 << scheme.n_spins());
    for (m, row) in schedule.rows().iter().enumerate() {
        let start = m as f64 * segment_ms;
        if t_ms <= start {
            break;
        }
        let elapsed_ms = (t_ms - start).min(segment_ms);
        let seg = segment_unitary(
            row,
            SegmentBasis::for_segment(m),
            &scheme.molecule,
            scheme.coupling_rule,
            elapsed_ms * 1e-3,
        );
        u = &seg * &u;
    }
    u
}

/// Draws a fresh schedule and returns its design unitary.
pub fn sample_design_unitary<R: Rng + ?Sized>(scheme: &DesignScheme, rng: &mut R) -> Result<Operator, EnsembleError> {
    scheme.validate()?;
    let schedule = RefocusSchedule::draw(scheme.n_segments, scheme.n_spins(), rng);
    Ok(design_unitary(scheme, &schedule))
}

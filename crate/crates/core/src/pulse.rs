//! Refocusing compiler for the nearest-neighbour ZZ block of a 4-spin chain.
//!
//! Spin 1 and spin 2 evolve freely for the whole block of length τ. Spin 3 is
//! inverted at τ₁ and spin 4 at τ₂, which rescales the 2–3 and 3–4 couplings
//! until every bond accumulates the same phase `JT/2`. Residual chemical-shift
//! phases are undone by a final layer of z rotations.
//!
//! Spins are 0-based in this module; error messages use 1-based labels.

use std::f64::consts::{PI, TAU};

use crate::error::PulseError;
use crate::molecule::{nmr_energies, MoleculeSpec};
use crate::operator::{process_fidelity, Operator, Pauli, PauliString, C64};

/// Solved block timing plus the z-rotation angles that cancel the shifts.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseTiming {
    pub tau_ms: f64,
    pub tau1_ms: f64,
    pub tau2_ms: f64,
    /// Per-spin `R_z` angles in radians, reduced to `[0, 2π)`.
    pub alphas: Vec<f64>,
}

impl PulseTiming {
    fn seconds(&self) -> (f64, f64, f64) {
        (self.tau_ms * 1e-3, self.tau1_ms * 1e-3, self.tau2_ms * 1e-3)
    }
}

fn chain_couplings(m: &MoleculeSpec) -> Result<[f64; 3], PulseError> {
    if m.n_spins() != 4 {
        return Err(PulseError::NotFourSpins(m.n_spins()));
    }
    let mut out = [0.0; 3];
    for (k, value) in out.iter_mut().enumerate() {
        let j = m.coupling_hz(k, k + 1);
        if !j.is_finite() || j <= 0.0 {
            return Err(PulseError::NonPositiveCoupling(k + 1, k + 2, j));
        }
        *value = j;
    }
    Ok(out)
}

/// Solves the three bond conditions
///
/// ```text
/// π J12 τ / 2           = JT/2
/// (2τ₁ − τ) J23         = J12 τ
/// (2(τ₂ − τ₁) + τ) J34  = J12 τ
/// ```
///
/// Both flips must land inside the block, otherwise the circuit cannot
/// realise the block and the violated condition is reported.
pub fn solve_timing(m: &MoleculeSpec, jt: f64) -> Result<PulseTiming, PulseError> {
    let [j12, j23, j34] = chain_couplings(m)?;
    if !jt.is_finite() || jt < 0.0 {
        return Err(PulseError::BadPeriod(jt));
    }
    let tau = jt / (PI * j12);
    let tau1 = 0.5 * (j12 * tau / j23 + tau);
    let tau2 = tau1 + 0.5 * (j12 * tau / j34 - tau);
    let ms = |s: f64| s * 1e3;
    // equal couplings put a flip exactly on the block edge; allow rounding
    let slack = tau * 1e-12;
    if tau1 > tau + slack {
        return Err(PulseError::Infeasible {
            equation: "(2τ₁ − τ)J23 = J12τ",
            detail: format!("τ₁ = {:.4} ms exceeds τ = {:.4} ms (J23 < J12)", ms(tau1), ms(tau)),
        });
    }
    if !(-slack..=tau + slack).contains(&tau2) {
        return Err(PulseError::Infeasible {
            equation: "(2(τ₂ − τ₁) + τ)J34 = J12τ",
            detail: format!("τ₂ = {:.4} ms outside [0, {:.4}] ms", ms(tau2), ms(tau)),
        });
    }
    let mut timing = PulseTiming {
        tau_ms: ms(tau),
        tau1_ms: ms(tau1.min(tau)),
        tau2_ms: ms(tau2.clamp(0.0, tau)),
        alphas: Vec::new(),
    };
    timing.alphas = z_corrections(m, &timing);
    Ok(timing)
}

/// Left-minus-right of the three bond conditions, dimensionless.
pub fn timing_residuals(m: &MoleculeSpec, jt: f64, t: &PulseTiming) -> Result<[f64; 3], PulseError> {
    let [j12, j23, j34] = chain_couplings(m)?;
    let (tau, tau1, tau2) = t.seconds();
    Ok([
        0.5 * PI * j12 * tau - 0.5 * jt,
        (2.0 * tau1 - tau) * j23 - j12 * tau,
        (2.0 * (tau2 - tau1) + tau) * j34 - j12 * tau,
    ])
}

/// `α_i = ω_i · (signed time spin i spends un-inverted)`, mod 2π:
/// `ω₁τ, ω₂τ, ω₃(2τ₁ − τ), ω₄(2τ₂ − τ)`.
pub fn z_corrections(m: &MoleculeSpec, t: &PulseTiming) -> Vec<f64> {
    let (tau, tau1, tau2) = t.seconds();
    let exposure = [tau, tau, 2.0 * tau1 - tau, 2.0 * tau2 - tau];
    exposure
        .iter()
        .enumerate()
        .map(|(i, &s)| (m.omega(i) * s).rem_euclid(TAU))
        .collect()
}

/// `Π_i exp(−i α_i σ^z_i / 2)`.
pub fn z_rotation_layer(alphas: &[f64]) -> Operator {
    let n = alphas.len();
    let phases: Vec<C64> = (0..1usize << n)
        .map(|basis| {
            let angle: f64 = (0..n)
                .map(|q| {
                    let z = if basis >> (n - 1 - q) & 1 == 0 { 1.0 } else { -1.0 };
                    -0.5 * alphas[q] * z
                })
                .sum();
            C64::from_polar(1.0, angle)
        })
        .collect();
    Operator::diagonal(&phases)
}

/// `exp(−i (JT/2) Σ_nn σ^zσ^z)` on an open chain of `n` spins.
pub fn nearest_neighbour_target(n: usize, jt: f64) -> Operator {
    let phases: Vec<C64> = (0..1usize << n)
        .map(|basis| {
            let z = |q: usize| if basis >> (n - 1 - q) & 1 == 0 { 1.0 } else { -1.0 };
            let sum: f64 = (0..n.saturating_sub(1)).map(|q| z(q) * z(q + 1)).sum();
            C64::from_polar(1.0, -0.5 * jt * sum)
        })
        .collect();
    Operator::diagonal(&phases)
}

/// One instantaneous π pulse about x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Flip {
    pub time_ms: f64,
    pub spin: usize,
}

/// Free evolution under the natural Hamiltonian for `block_ms`, interrupted
/// by ideal π pulses. Spins flipped an odd number of times receive a closing
/// pulse at the end of the block, so the net operation is diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSequence {
    pub block_ms: f64,
    pub flips: Vec<Flip>,
}

impl PulseSequence {
    /// Spin 3 inverted at τ₁, spin 4 at τ₂.
    pub fn refocusing(t: &PulseTiming) -> Self {
        Self {
            block_ms: t.tau_ms,
            flips: vec![
                Flip {
                    time_ms: t.tau1_ms,
                    spin: 2,
                },
                Flip {
                    time_ms: t.tau2_ms,
                    spin: 3,
                },
            ],
        }
    }

    /// Every spin inverted at the start and again at `λ_i · block`, so spin
    /// `i` precesses backwards for the fraction `λ_i` of the block.
    pub fn random_refocusing(lambdas: &[f64], block_ms: f64) -> Self {
        let mut flips: Vec<Flip> = (0..lambdas.len()).map(|spin| Flip { time_ms: 0.0, spin }).collect();
        flips.extend(lambdas.iter().enumerate().map(|(spin, &l)| Flip {
            time_ms: l * block_ms,
            spin,
        }));
        Self { block_ms, flips }
    }

    /// Piecewise simulation of the sequence on molecule `m`.
    pub fn simulate(&self, m: &MoleculeSpec) -> Result<Operator, PulseError> {
        let n = m.n_spins();
        for f in &self.flips {
            if !(0.0..=self.block_ms).contains(&f.time_ms) {
                return Err(PulseError::PulseOutsideBlock {
                    time_ms: f.time_ms,
                    block_ms: self.block_ms,
                });
            }
            if f.spin >= n {
                return Err(PulseError::ShapeMismatch);
            }
        }
        let energies = nmr_energies(m);
        let free = |ms: f64| {
            let s = ms * 1e-3;
            let phases: Vec<C64> = energies.iter().map(|e| C64::from_polar(1.0, -e * s)).collect();
            Operator::diagonal(&phases)
        };
        let x = |spin: usize| -> Result<Operator, PulseError> { Ok(PauliString::single(n, spin, Pauli::X)?.embed()) };
        let mut flips = self.flips.clone();
        flips.sort_by(|a, b| a.time_ms.total_cmp(&b.time_ms));
        let mut u = Operator::identity(1 << n);
        let mut now = 0.0;
        let mut parity = vec![false; n];
        for f in &flips {
            if f.time_ms > now {
                u = &free(f.time_ms - now) * &u;
                now = f.time_ms;
            }
            u = &x(f.spin)? * &u;
            parity[f.spin] ^= true;
        }
        if self.block_ms > now {
            u = &free(self.block_ms - now) * &u;
        }
        for (spin, &odd) in parity.iter().enumerate() {
            if odd {
                u = &x(spin)? * &u;
            }
        }
        Ok(u)
    }
}

/// Outcome of [`compile_and_verify`].
#[derive(Clone, Debug, PartialEq)]
pub struct FidelityReport {
    pub timing: PulseTiming,
    /// Fidelity with long-range couplings removed from the molecule.
    pub fidelity_nearest_neighbour: f64,
    /// Fidelity under the full coupling table.
    pub fidelity_full: f64,
    /// Single-spin z phases (radians, in `(−π, π]`) left over in the
    /// nearest-neighbour run after the correction layer.
    pub residual_z_phases: Vec<f64>,
}

/// Solves the timing, simulates sequence plus z corrections, and compares
/// with `exp(−i (JT/2) Σ_nn σ^zσ^z)` using `|Tr(U†V)|/dim`.
pub fn compile_and_verify(m: &MoleculeSpec, jt: f64) -> Result<FidelityReport, PulseError> {
    let timing = solve_timing(m, jt)?;
    let sequence = PulseSequence::refocusing(&timing);
    let correction = z_rotation_layer(&timing.alphas);
    let target = nearest_neighbour_target(m.n_spins(), jt);
    let run =
        |molecule: &MoleculeSpec| -> Result<Operator, PulseError> { Ok(&correction * &sequence.simulate(molecule)?) };
    let nn = run(&m.nearest_neighbour_only())?;
    let full = run(m)?;
    let residual_z_phases = residual_z_phases(&(&nn * &target.adjoint()));
    Ok(FidelityReport {
        fidelity_nearest_neighbour: process_fidelity(&target, &nn),
        fidelity_full: process_fidelity(&target, &full),
        residual_z_phases,
        timing,
    })
}

/// Angle θ_i of a leftover `exp(−i θ_i σ^z_i / 2)` factor in a diagonal
/// operator, from the phase ratio of basis states differing only in spin i.
pub fn residual_z_phases(d: &Operator) -> Vec<f64> {
    let n = d.n_qubits().unwrap_or(0);
    (0..n)
        .map(|q| {
            let bit = 1usize << (n - 1 - q);
            let acc: C64 = (0..d.dim())
                .filter(|b| b & bit == 0)
                .map(|b| d.get(b, b) * d.get(b | bit, b | bit).conj())
                .sum();
            -acc.arg()
        })
        .collect()
}

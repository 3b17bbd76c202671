//! Kicked Ising Floquet dynamics.
//!
//! One period is `e^{-i(T/2)(JΣZZ + h_zΣZ)} · e^{-i(T/2)h_xΣX}`, the transverse
//! kick acting first. The first factor is diagonal and is built directly from
//! its energies.

use crate::error::ModelError;
use crate::operator::{Operator, Pauli, PauliString, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// Model constants; `h_x`, `h_z` are in the same energy units as `j`, and
/// `jt` is the dimensionless product J·T.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KickedIsingParams {
    pub n_spins: usize,
    pub j: f64,
    pub h_x: f64,
    pub h_z: f64,
    pub jt: f64,
    pub boundary: Boundary,
}

impl KickedIsingParams {
    /// The chaotic point used throughout: h_x = J, h_z = 0.809 J, JT = 1.6.
    pub fn standard(n_spins: usize) -> Self {
        Self {
            n_spins,
            j: 1.0,
            h_x: 1.0,
            h_z: 0.809,
            jt: 1.6,
            boundary: Boundary::Open,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n_spins < 2 {
            return Err(ModelError::TooFewSpins(self.n_spins));
        }
        for (name, v) in [("J", self.j), ("h_x", self.h_x), ("h_z", self.h_z), ("JT", self.jt)] {
            if !v.is_finite() {
                return Err(ModelError::NonFinite(name));
            }
        }
        if self.jt <= 0.0 || self.j == 0.0 {
            return Err(ModelError::NonPositivePeriod(self.jt));
        }
        Ok(())
    }

    /// Period T in units of 1/J.
    pub fn period(&self) -> f64 {
        self.jt / self.j
    }

    pub fn dim(&self) -> usize {
        1 << self.n_spins
    }

    /// Nearest-neighbour bonds (0-based). Open chains have `n_spins - 1`.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.n_spins;
        let mut bonds: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        if self.boundary == Boundary::Periodic && n > 2 {
            bonds.push((n - 1, 0));
        }
        bonds
    }

    /// `JΣ σ^z_i σ^z_{i+1}`.
    pub fn coupling_generator(&self) -> Operator {
        let n = self.n_spins;
        self.bonds().iter().fold(Operator::zeros(self.dim()), |acc, &(a, b)| {
            let zz = PauliString::from_sites(n, &[(a, Pauli::Z), (b, Pauli::Z)])
                .expect("bond sites inside register")
                .embed();
            &acc + &zz.scale_real(self.j)
        })
    }

    /// `h_z Σ σ^z_i`.
    pub fn field_generator(&self) -> Operator {
        self.single_site_sum(Pauli::Z, self.h_z)
    }

    /// `h_x Σ σ^x_i`.
    pub fn kick_generator(&self) -> Operator {
        self.single_site_sum(Pauli::X, self.h_x)
    }

    fn single_site_sum(&self, letter: Pauli, coeff: f64) -> Operator {
        (0..self.n_spins).fold(Operator::zeros(self.dim()), |acc, q| {
            let p = PauliString::single(self.n_spins, q, letter).expect("site inside register");
            &acc + &p.embed().scale_real(coeff)
        })
    }

    /// Diagonal of `JΣZZ + h_zΣZ` in the computational basis.
    fn diagonal_energies(&self) -> Vec<f64> {
        let n = self.n_spins;
        let bonds = self.bonds();
        (0..self.dim())
            .map(|basis| {
                let z = |q: usize| if basis >> (n - 1 - q) & 1 == 0 { 1.0 } else { -1.0 };
                let coupling: f64 = bonds.iter().map(|&(a, b)| z(a) * z(b)).sum();
                let field: f64 = (0..n).map(z).sum();
                self.j * coupling + self.h_z * field
            })
            .collect()
    }
}

/// One Floquet period U(T).
pub fn floquet_step(p: &KickedIsingParams) -> Result<Operator, ModelError> {
    p.validate()?;
    let half = 0.5 * p.period();
    let phases: Vec<C64> = p
        .diagonal_energies()
        .into_iter()
        .map(|e| C64::from_polar(1.0, -half * e))
        .collect();
    let diag = Operator::diagonal(&phases);

    // the transverse kick factorizes into identical single-qubit rotations
    let angle = half * p.h_x;
    let rot = Operator::from_row_slice(
        2,
        &[
            C64::new(angle.cos(), 0.0),
            C64::new(0.0, -angle.sin()),
            C64::new(0.0, -angle.sin()),
            C64::new(angle.cos(), 0.0),
        ],
    )?;
    let mut kick = rot.clone();
    for _ in 1..p.n_spins {
        kick = kick.kron(&rot)?;
    }
    Ok(&diag * &kick)
}

/// `U(nT) = U(T)^n`.
pub fn evolve(p: &KickedIsingParams, n_periods: u32) -> Result<Operator, ModelError> {
    Ok(floquet_step(p)?.pow(n_periods))
}

/// `[U(0), U(T), …, U(n_max·T)]` by successive multiplication.
pub fn evolution_series(p: &KickedIsingParams, n_max: u32) -> Result<Vec<Operator>, ModelError> {
    let step = floquet_step(p)?;
    let mut out = Vec::with_capacity(n_max as usize + 1);
    out.push(Operator::identity(p.dim()));
    for n in 1..=n_max as usize {
        out.push(&step * &out[n - 1]);
    }
    Ok(out)
}

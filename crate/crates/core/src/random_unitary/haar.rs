use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::OperatorError;
use crate::operator::{Operator, C64};

/// Haar-distributed unitary from the circular unitary ensemble.
///
/// QR of a complex Ginibre matrix, with each column of `Q` rescaled by the
/// phase of the matching diagonal entry of `R`; without that correction the
/// result is orthonormal but not Haar.
pub fn sample_haar<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    assert!(dim >= 1, "dimension must be positive");
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let ginibre = DMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * scale, im * scale)
    });
    let qr = ginibre.qr();
    let mut q = qr.q();
    let r = qr.r();
    for (k, mut col) in q.column_iter_mut().enumerate() {
        let d = r[(k, k)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { C64::new(1.0, 0.0) };
        col *= phase;
    }
    Operator::from_matrix(q).expect("square by construction")
}

/// Single-qubit rotation `exp(−i(θ/2) n̂·σ)` with `n̂` uniform on the sphere
/// and `θ` uniform on `[0, 2π)`. Not Haar: it over-weights small rotations.
pub fn sample_axis_angle<R: Rng + ?Sized>(rng: &mut R) -> Operator {
    let cos_polar: f64 = rng.random_range(-1.0..=1.0);
    let azimuth: f64 = rng.random_range(0.0..2.0 * PI);
    let theta: f64 = rng.random_range(0.0..2.0 * PI);
    let sin_polar = (1.0 - cos_polar * cos_polar).max(0.0).sqrt();
    let (nx, ny, nz) = (sin_polar * azimuth.cos(), sin_polar * azimuth.sin(), cos_polar);
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    // cI − i s (nx X + ny Y + nz Z)
    Operator::from_row_slice(
        2,
        &[
            C64::new(c, -s * nz),
            C64::new(-s * ny, -s * nx),
            C64::new(s * ny, -s * nx),
            C64::new(c, s * nz),
        ],
    )
    .expect("2x2")
}

/// Single-qubit factor distributions for product unitaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalMode {
    Haar,
    AxisAngle,
}

/// The independent 2×2 factors of a local product unitary, qubit 0 first.
pub fn sample_local_factors<R: Rng + ?Sized>(n_spins: usize, mode: LocalMode, rng: &mut R) -> Vec<Operator> {
    (0..n_spins)
        .map(|_| match mode {
            LocalMode::Haar => sample_haar(2, rng),
            LocalMode::AxisAngle => sample_axis_angle(rng),
        })
        .collect()
}

/// `u₁ ⊗ u₂ ⊗ ⋯ ⊗ u_N`.
pub fn sample_local_product<R: Rng + ?Sized>(
    n_spins: usize,
    mode: LocalMode,
    rng: &mut R,
) -> Result<Operator, OperatorError> {
    assert!(n_spins >= 1, "need at least one spin");
    let factors = sample_local_factors(n_spins, mode, rng);
    factors[1..].iter().try_fold(factors[0].clone(), |acc, f| acc.kron(f))
}

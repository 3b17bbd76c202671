//! Random-unitary ensembles: Haar (CUE), local products, and design
//! Hamiltonians, plus frame-potential certification.

pub mod design;
pub mod ensemble;
pub mod frame;
pub mod haar;

use rand::Rng;

use crate::error::EnsembleError;
use crate::operator::Operator;
use crate::parallel::{stream_rng, Execution};

pub use design::{
    design_unitary, design_unitary_at, effective_hamiltonian, sample_design_unitary, segment_unitary, CouplingRule,
    DesignScheme, RefocusSchedule, SegmentBasis,
};
pub use ensemble::UnitaryEnsemble;
pub use frame::{frame_potential, frame_potential_trace, frame_potentials, FramePotentials, PairEstimator, TracePoint};
pub use haar::{sample_axis_angle, sample_haar, sample_local_factors, sample_local_product, LocalMode};

/// Which ensemble a protocol run draws its unitaries from.
#[derive(Clone, Debug, PartialEq)]
pub enum RandomizationScheme {
    GlobalHaar,
    LocalHaar,
    LocalAxisAngle,
    DesignHamiltonian(DesignScheme),
}

impl RandomizationScheme {
    pub fn name(&self) -> &'static str {
        match self {
            RandomizationScheme::GlobalHaar => "global-haar",
            RandomizationScheme::LocalHaar => "local-haar",
            RandomizationScheme::LocalAxisAngle => "local-axis-angle",
            RandomizationScheme::DesignHamiltonian(_) => "design-hamiltonian",
        }
    }

    pub fn validate(&self, n_spins: usize) -> Result<(), EnsembleError> {
        if let RandomizationScheme::DesignHamiltonian(d) = self {
            d.validate()?;
            if d.n_spins() != n_spins {
                return Err(EnsembleError::MoleculeMismatch {
                    molecule: d.n_spins(),
                    register: n_spins,
                });
            }
        }
        Ok(())
    }

    /// One member acting on `n_spins` qubits.
    pub fn sample<R: Rng + ?Sized>(&self, n_spins: usize, rng: &mut R) -> Result<Operator, EnsembleError> {
        self.validate(n_spins)?;
        Ok(match self {
            RandomizationScheme::GlobalHaar => sample_haar(1 << n_spins, rng),
            RandomizationScheme::LocalHaar => sample_local_product(n_spins, LocalMode::Haar, rng)?,
            RandomizationScheme::LocalAxisAngle => sample_local_product(n_spins, LocalMode::AxisAngle, rng)?,
            RandomizationScheme::DesignHamiltonian(d) => sample_design_unitary(d, rng)?,
        })
    }

    /// Member `index` of the ensemble seeded by `seed`.
    pub fn sample_indexed(&self, n_spins: usize, seed: u64, index: usize) -> Result<Operator, EnsembleError> {
        self.sample(n_spins, &mut stream_rng(seed, index as u64))
    }

    /// `count` members, each from its own derived stream.
    pub fn sample_many(
        &self,
        n_spins: usize,
        seed: u64,
        count: usize,
        exec: Execution,
    ) -> Result<Vec<Operator>, EnsembleError> {
        self.validate(n_spins)?;
        exec.map_indexed(count, |i| self.sample_indexed(n_spins, seed, i))
            .into_iter()
            .collect()
    }
}

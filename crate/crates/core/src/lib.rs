//! Numerical core for randomized-measurement OTOC experiments on small spin
//! chains: dense operators, kicked-Ising Floquet dynamics, random-unitary
//! ensembles, OTOC oracles and estimators, and an NMR refocusing compiler.

pub mod error;
pub mod kicked_ising;
pub mod molecule;
pub mod operator;
pub mod otoc;
pub mod parallel;
pub mod pulse;
pub mod random_unitary;
pub mod stats;

pub use error::{EnsembleError, ModelError, OperatorError, OtocError, PulseError};
pub use kicked_ising::{evolution_series, evolve, floquet_step, Boundary, KickedIsingParams};
pub use molecule::{nmr_hamiltonian, MoleculeSpec};
pub use operator::{process_fidelity, Operator, Pauli, PauliString, PureState, C64};
pub use otoc::{estimate_otoc, exact_modified_otoc, exact_otoc, exact_series, OtocConfig, OtocRow, OtocSeries};
pub use parallel::Execution;
pub use pulse::{compile_and_verify, solve_timing, z_corrections, FidelityReport, PulseSequence, PulseTiming};
pub use random_unitary::{RandomizationScheme, UnitaryEnsemble};

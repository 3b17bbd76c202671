use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("register of dimension {dim} exceeds the {max_qubits}-qubit limit")]
    RegisterTooLarge { dim: usize, max_qubits: usize },
    #[error("operator is not Hermitian (max |H - H†| = {defect:e})")]
    NotHermitian { defect: f64 },
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("invalid Pauli letter {0:?}")]
    InvalidPauli(char),
    #[error("empty Pauli string")]
    EmptyPauliString,
    #[error("state is not normalized (norm² = {norm_sq})")]
    NotNormalized { norm_sq: f64 },
    #[error("invalid computational basis label {0:?}")]
    InvalidBasisLabel(String),
    #[error("expectation value has imaginary residue {0:e}")]
    ImaginaryResidue(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("kicked Ising chain needs at least 2 spins, got {0}")]
    TooFewSpins(usize),
    #[error("J·T must be positive, got {0}")]
    NonPositivePeriod(f64),
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnsembleError {
    #[error("ensemble is empty")]
    Empty,
    #[error("frame potential order must be 1 or 2, got {0}")]
    UnsupportedOrder(u32),
    #[error("distinct-pair estimator needs at least 2 members, got {0}")]
    TooFewMembers(usize),
    #[error("ensemble members have mixed dimensions ({0} vs {1})")]
    MixedDimensions(usize, usize),
    #[error("design-Hamiltonian scheme needs an even, positive segment count, got {0}")]
    OddSegments(usize),
    #[error("design period must be finite and non-negative, got {0} ms")]
    BadPeriod(f64),
    #[error("molecule has {molecule} spins but the register has {register}")]
    MoleculeMismatch { molecule: usize, register: usize },
    #[error("refocusing parameter {0} outside [0, 1)")]
    LambdaOutOfRange(f64),
    #[error("times must be sorted ascending and non-negative")]
    UnsortedTimes,
    #[error("ensemble file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OtocError {
    #[error("site {site} outside a {n_spins}-spin register")]
    SiteOutOfRange { site: usize, n_spins: usize },
    #[error("need at least 2 unitaries, got {0}")]
    TooFewUnitaries(usize),
    #[error("initial state {label:?} does not match {n_spins} spins")]
    InitialState { label: String, n_spins: usize },
    #[error("subset weight base must be positive and finite, got {0}")]
    BadWeight(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PulseError {
    #[error("molecule needs at least 2 spins, got {0}")]
    TooFewSpins(usize),
    #[error("coupling table is not symmetric at ({0}, {1})")]
    AsymmetricCoupling(usize, usize),
    #[error("coupling table has non-zero diagonal at spin {0}")]
    DiagonalCoupling(usize),
    #[error("molecule arrays disagree on the spin count")]
    ShapeMismatch,
    #[error("timing solution needs a 4-spin chain, got {0} spins")]
    NotFourSpins(usize),
    #[error("coupling J{0}{1} must be positive, got {2} Hz")]
    NonPositiveCoupling(usize, usize, f64),
    #[error("J·T must be finite and non-negative, got {0}")]
    BadPeriod(f64),
    #[error("infeasible timing: {equation} ({detail})")]
    Infeasible { equation: &'static str, detail: String },
    #[error("pulse at {time_ms} ms lies outside the {block_ms} ms block")]
    PulseOutsideBlock { time_ms: f64, block_ms: f64 },
    #[error("molecule file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

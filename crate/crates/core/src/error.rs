use thiserror::Error;

use crate::kernel::Phase;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Pauli label character {ch:?} at position {pos} (expected I, X, Y or Z)")]
    PauliParse { pos: usize, ch: char },

    #[error("empty Pauli label")]
    EmptyLabel,

    #[error("qubit count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("{what} needs at most {max} qubits, got {n_qubits}")]
    TooManyQubits {
        what: &'static str,
        n_qubits: usize,
        max: usize,
    },

    #[error("operator with phase {0} is not Hermitian")]
    NonHermitian(Phase),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("invalid qubit subset: {0}")]
    InvalidSubset(String),

    #[error(
        "{n_qubits} qubits exceeds the dense cap of {cap}; use Pauli-level operations or exclude this size"
    )]
    DenseCap { n_qubits: usize, cap: usize },

    #[error("state amplitudes have length {len}, expected {expected}")]
    AmplitudeLength { len: usize, expected: usize },

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("lattice side N={0} must be even and >= 2 so the plaquettes two-color")]
    OddLattice(usize),

    #[error("plaquette id {id} out of range ({count} plaquettes)")]
    InvalidPlaquette { id: usize, count: usize },

    #[error("site {site} out of range ({count} sites)")]
    InvalidSite { site: usize, count: usize },

    #[error("{name} = {value} outside its valid range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid molecule: {0}")]
    InvalidMolecule(String),

    #[error("coupling matrix is not symmetric: J[{j}][{k}] != J[{k}][{j}]")]
    AsymmetricCoupling { j: usize, k: usize },

    #[error("compilation needs a nonzero {0} coupling")]
    MissingCoupling(&'static str),

    #[error("target is not unitary (||U^dag U - I|| = {0:e})")]
    NonUnitaryTarget(f64),

    #[error("matrix dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("tomography plan is incomplete; missing coefficients: {}", missing.join(", "))]
    IncompleteCoverage { missing: Vec<String> },

    #[error("expected {expected} measurement records, got {got}")]
    RecordCount { expected: usize, got: usize },

    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },

    #[error("config: {0}")]
    Config(String),

    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Innermost error behind any stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

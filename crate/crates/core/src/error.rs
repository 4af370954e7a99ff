use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{n_qubits} qubits exceeds the configured maximum of {max_qubits} (dimension 2^{n_qubits})")]
    DimensionCap { n_qubits: usize, max_qubits: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid Pauli term: {0}")]
    InvalidTerm(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian: max |H - H^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("eigensolver did not converge on block of size {block} (operator fingerprint {fingerprint:016x})")]
    NoConvergence { block: usize, fingerprint: u64 },

    #[error("spectrum width {width:e} is too small to normalize")]
    DegenerateSpectrum { width: f64 },

    #[error("projector family is incomplete: trace deficit {deficit:e}")]
    IncompleteProjectors { deficit: f64 },

    #[error("state is not normalized: norm {norm}")]
    NotNormalized { norm: f64 },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("imaginary residue {residue:e} in an expectation that must be real")]
    ImaginaryResidue { residue: f64 },

    #[error("outside the small-angle regime: {0}")]
    OutOfRegime(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

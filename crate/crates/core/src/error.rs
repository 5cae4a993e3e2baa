use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("{0} qubits exceeds the 64-qubit Pauli mask width")]
    TooManyQubits(usize),

    #[error("invalid Pauli token `{0}`")]
    InvalidPauli(String),

    #[error("coefficient must be real, got imaginary part {0}")]
    ComplexCoefficient(f64),

    #[error("group {group}: terms {first} and {second} do not commute")]
    NonCommutingGroup {
        group: usize,
        first: usize,
        second: usize,
    },

    #[error("group {0} is empty")]
    EmptyGroup(usize),

    #[error("Hamiltonian has no groups")]
    NoGroups,

    #[error("group index {index} out of range ({groups} groups)")]
    GroupOutOfRange { index: usize, groups: usize },

    #[error("{n_qubits} qubits exceeds the dense limit of {limit}")]
    DimensionTooLarge { n_qubits: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("order {order} exceeds the supported maximum {max}")]
    OrderTooLarge { order: usize, max: usize },

    #[error("product-formula order must be even, got {0}")]
    OddOrder(usize),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("slope fit left the asymptotic regime: error {error:e} at s = {s:e}")]
    NonAsymptoticGrid { s: f64, error: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("upper cutoff {upper} is below lower cutoff {lower}")]
    CutoffOrder { lower: f64, upper: f64 },

    #[error("invalid cutoff chain: {0}")]
    InvalidChain(String),

    #[error("projector onto energies <= {0} is empty")]
    EmptySubspace(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no Trotter number r <= {cap} reaches the target error")]
    RNotFoundWithinBudget { cap: u64 },

    #[error("Trotter-number search hit a non-monotone bracket at r = {0}")]
    NonMonotone(u64),
}

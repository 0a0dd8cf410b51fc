use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("length {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("input has zero L2 norm")]
    ZeroNorm,

    #[error("matrix is not unitary (max |U^dagger U - I| = {residual:.3e})")]
    NonUnitary { residual: f64 },

    #[error("qubit {0} used as both target and control")]
    QubitCollision(usize),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("invalid register layout: {0}")]
    InvalidLayout(String),

    #[error("ancilla qubit {qubit} is not in basis state |{expected}> (off-branch weight {weight:.3e})")]
    AncillaNotInBasisState {
        qubit: usize,
        expected: u8,
        weight: f64,
    },

    #[error("register `{register}` is not in |0> (residual norm {residual:.3e})")]
    RegisterNotZero { register: String, residual: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:.3e})")]
    EigenNotConverged { sweeps: usize, residual: f64 },

    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("block-encoding cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

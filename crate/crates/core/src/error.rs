use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("matrix is not unitary: ||U^dag U - I||_F = {residual:e}")]
    NotUnitary { residual: f64 },

    #[error("matrix is not Hermitian: ||H - H^dag||_F = {residual:e}")]
    NotHermitian { residual: f64 },

    #[error("target is not special unitary: |det - 1| = {residual:e}")]
    NotSpecialUnitary { residual: f64 },

    #[error(
        "too few vertices for {n_qubits} qubits: 2*N*nu = {params} < 2^(2N) - 1 = {group_dim} \
         (need 2*N*nu >= 2^(2N) - 1)"
    )]
    VertexCondition {
        n_qubits: usize,
        n_vertices: usize,
        params: usize,
        group_dim: usize,
    },

    #[error("unknown gate `{0}`")]
    UnknownGate(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("Hermitian eigendecomposition did not converge")]
    Eigendecomposition,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

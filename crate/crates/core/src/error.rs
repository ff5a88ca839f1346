use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |m_ij - conj(m_ji)| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("unexpected complex root {re:e}{im:+e}i in spectrum")]
    UnexpectedComplexSpectrum { re: f64, im: f64 },

    #[error("dimension mismatch: {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("invalid quantum state: {0}")]
    InvalidState(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("component index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("state carries no tau to lose: fidelity {fidelity} <= 1/{d}")]
    NoEntanglement { d: usize, fidelity: f64 },

    #[error("bound violated: {lhs:e} > {rhs:e} ({context})")]
    BoundViolation { context: &'static str, lhs: f64, rhs: f64 },

    #[error("{0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// True when the error describes an invalid input object (state, channel,
    /// matrix) rather than a numerical or bookkeeping failure.
    pub fn is_invalid_object(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian { .. }
                | Error::NotPsd { .. }
                | Error::NonFinite(_)
                | Error::InvalidState(_)
                | Error::InvalidChannel(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

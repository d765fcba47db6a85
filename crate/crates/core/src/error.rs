use thiserror::Error;

use crate::instruments::Label;

/// Errors raised by the linear algebra, instrument and heat analytics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is outside the supported range 1..=64")]
    UnsupportedDimension(usize),

    #[error("hermiticity violated: max deviation {deviation:e} exceeds tolerance {tol:e}")]
    NonHermitian { deviation: f64, tol: f64 },

    #[error(
        "eigensolver did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("trace violated: trace is {trace}, expected 1 within {tol:e}")]
    InvalidTrace { trace: f64, tol: f64 },

    #[error("positivity violated: smallest eigenvalue {min_eigenvalue:e} below -{tol:e}")]
    NotPsd { min_eigenvalue: f64, tol: f64 },

    #[error("basis is incomplete or not orthonormal: deviation {deviation:e} from identity")]
    IncompleteBasis { deviation: f64 },

    #[error("basis vector {index} is not an eigenvector of the state (residual {residual:e})")]
    BasisNotEigen { index: usize, residual: f64 },

    #[error("instrument has no outcome labelled {0}")]
    UnknownLabel(Label),

    #[error("instrument must have at least one outcome, each with at least one Kraus operator")]
    EmptyInstrument,

    #[error(
        "instrument is not trace-non-increasing: sum of K^dag K exceeds identity by {excess:e}"
    )]
    NotTraceNonIncreasing { excess: f64 },

    #[error("cannot sample from an empty distribution")]
    EmptyDistribution,

    #[error("moment order {0} is outside the supported range 1..=16")]
    InvalidOrder(usize),

    #[error("state has no two-dimensional degenerate eigenspace to parameterise")]
    NoDegenerateBlock,

    #[error("problem does not provide an eigenbasis")]
    MissingBasis,

    #[error("cluster {cluster} has dimension {dim}, but the supplied unitary is {found}x{found}")]
    BlockMismatch {
        cluster: usize,
        dim: usize,
        found: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

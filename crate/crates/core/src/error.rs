use thiserror::Error;

use crate::refelem::{CellShape, SchemeOrder};

#[derive(Debug, Error)]
pub enum Error {
    #[error("{order:?} is not defined on {shape:?}")]
    UndefinedCombination { shape: CellShape, order: SchemeOrder },
    #[error("basis index {index} out of range (count {count})")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("non-conforming mesh: {0}")]
    NonConforming(String),
    #[error("cell {cell} is inverted or degenerate (det = {det:e})")]
    InvertedCell { cell: usize, det: f64 },
    #[error("cell {cell} is not an affine image of the reference cell (deviation {deviation:e})")]
    NonAffineCell { cell: usize, deviation: f64 },
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown mesh family `{0}`")]
    UnknownFamily(String),

    #[error("conductivity is singular at {point:?}")]
    SingularConductivity { point: [f64; 3] },
    #[error("conductivity violates declared bounds at {point:?}: {reason}")]
    InvalidConductivity { point: [f64; 3], reason: String },
    #[error("mass block for cluster {cluster} is not symmetric positive definite")]
    NonSpdBlock { cluster: usize },

    #[error("conjugate gradients did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("singular saddle-point system")]
    SingularSystem,
    #[error("singular local post-processing system on cell {cell}")]
    SingularLocalSystem { cell: usize },
    #[error("degenerate convergence sequence: {0}")]
    DegenerateSequence(String),

    #[error("unknown case `{0}`")]
    UnknownCase(String),
    #[error("incompatible input: {0}")]
    Incompatible(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Failures of the numerical solution process, as opposed to invalid
    /// input.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::NonSpdBlock { .. }
                | Error::NoConvergence { .. }
                | Error::SingularSystem
                | Error::SingularLocalSystem { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

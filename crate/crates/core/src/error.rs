use crate::geometry::Geometry;
use thiserror::Error;

/// Errors produced by grid construction, functional evaluation and flows.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is too small, need n >= 8")]
    GridTooSmall(usize),

    #[error("Legendre root solve did not converge for node {0}")]
    RootConvergence(usize),

    #[error("operation requires {expected:?} geometry, field is {got:?}")]
    GeometryMismatch { expected: Geometry, got: Geometry },

    #[error("field values must be finite")]
    NonFiniteField,

    #[error("operator is defined on mean-zero fields, got mean {0:e}")]
    NonzeroMean(f64),

    #[error("max field value {0:.1} would overflow exp; recenter by subtracting a constant")]
    ExpOverflow(f64),

    #[error("inadmissible input: {0}")]
    Inadmissible(String),

    #[error("positivity lost: {0}")]
    PositivityLoss(String),

    #[error("mass mismatch: {0}")]
    MassMismatch(String),

    #[error("time step fell below dt_min at t = {0:e}")]
    StepUnderflow(f64),

    #[error("blow-up detected at t = {0:e}")]
    BlowUp(f64),

    #[error("root finding failed: {0}")]
    RootFind(String),

    #[error(transparent)]
    Parse(#[from] crate::expr::ParseError),

    #[error(transparent)]
    Eval(#[from] crate::expr::EvalError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

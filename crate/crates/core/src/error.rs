//! Crate-wide error type.

use crate::expr::{EvalError, ParseError};
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    /// Problem data violates the method's hypotheses (wrong order, f depends
    /// on t for a first-order problem, non-positive initial value, ...).
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    /// A g-choice that cannot be used with the given problem order, or a
    /// malformed configuration value (step size, stop rule, dimension).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The transform's denominator fell below the guard threshold. Under the
    /// method's sign assumptions this cannot happen along a genuine blow-up
    /// trajectory, so it is surfaced as an error rather than clamped.
    #[error("singular transform at parameter {param}: |denominator| = {denominator:e} below guard (x = {x}, y = {y}{})",
            t.map(|v| format!(", t = {v}")).unwrap_or_default())]
    SingularTransform {
        param: f64,
        x: f64,
        y: f64,
        t: Option<f64>,
        denominator: f64,
    },

    /// A state component became non-finite during integration.
    #[error("non-finite state reached at parameter {param}")]
    NonFiniteState { param: f64 },

    /// The right-hand side failed before a single step completed.
    #[error("integration made no progress: {0}")]
    NoSteps(Box<Error>),

    #[error("too few samples: have {have}, need {need}")]
    TooFewSamples { have: usize, need: usize },

    #[error("x-samples are not monotone: decrease at index {index}")]
    NonMonotoneX { index: usize },

    #[error("power-law fit window has {have} usable samples, needs {need}")]
    FitWindowTooSmall { have: usize, need: usize },

    #[error("x* = {x_star} does not exceed the largest sample x = {x_last}")]
    XStarNotBeyondData { x_star: f64, x_last: f64 },

    #[error("fitted exponent beta = {beta} is not positive")]
    NonPositiveExponent { beta: f64 },

    #[error("unknown problem id: {0:?}")]
    UnknownProblem(String),

    #[error("invalid problem parameter: {0}")]
    BadParameter(String),

    /// The requested exact solution is not recorded for this transform of
    /// this problem.
    #[error("transform not applicable: {0}")]
    NotApplicable(String),
}

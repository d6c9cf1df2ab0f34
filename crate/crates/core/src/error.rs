use alloc::string::String;
use alloc::vec::Vec;

use crate::poly::Polynomial;

/// Non-exact one-form handed to the homotopy integrator: `∂ω_a/∂x^b ≠ ∂ω_b/∂x^a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotClosed {
    pub first: usize,
    pub second: usize,
    /// `∂ω_first/∂x^second − ∂ω_second/∂x^first`, never zero.
    pub difference: Polynomial,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("chart dimension {dim} outside 1..={max}")]
    Dimension { dim: usize, max: usize },

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown variable `{name}` at byte {offset}")]
    UnknownVariable { name: String, offset: usize },

    #[error("one-form not closed: d/dx{} of component {} differs from d/dx{} of component {} by {}",
        .0.second + 1, .0.first + 1, .0.first + 1, .0.second + 1, .0.difference)]
    NotClosed(NotClosed),

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("expected {expected} components, got {got}")]
    ComponentCount { expected: usize, got: usize },

    #[error("connection not symmetric in its lower indices at {index:?}")]
    AsymmetricConnection { index: [usize; 3] },

    #[error("metric is not symmetric")]
    AsymmetricMetric,

    #[error("input is not a solution: residual entry {index:?} = {value}")]
    NotASolution { index: Vec<usize>, value: Polynomial },

    #[error("{condition} fails at {index:?}: {value}")]
    ConditionFailed {
        condition: &'static str,
        index: Vec<usize>,
        value: Polynomial,
    },

    #[error("truncation orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },

    #[error("tower built to order {available}, order {requested} requested")]
    OrderTooHigh { requested: usize, available: usize },

    #[error("no sample point with an invertible Jacobian")]
    NoUsablePoints,

    #[error("vanishing denominator in a flow coefficient")]
    ZeroDenominator,

    #[error("flow {flow} is not defined on {target}")]
    UnsupportedFlow { flow: String, target: String },
}

impl From<NotClosed> for Error {
    fn from(e: NotClosed) -> Self {
        Error::NotClosed(e)
    }
}

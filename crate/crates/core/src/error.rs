use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid linear system: {0}")]
    Validation(String),
    #[error("degenerate system: {0}")]
    Degenerate(&'static str),
    #[error("MPRK22 undefined at alpha=0")]
    ZeroAlpha,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular matrix: pivot {pivot:e} in column {column}")]
    Singular { column: usize, pivot: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("non-finite contribution at (i={i}, j={j}, k={k})")]
    Assembly { i: usize, j: usize, k: usize },
    #[error("non-finite sigma weight at component {0}")]
    Sigma(usize),
    #[error("y_{} = {value} is not strictly positive", index + 1)]
    NonPositive { index: usize, value: f64 },
    #[error("y_{} = {value:e} is below the underflow guard 1e-300", index + 1)]
    Underflow { index: usize, value: f64 },
    #[error("probe {direction} of column {column} failed: {source}")]
    Probe {
        column: usize,
        direction: &'static str,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
    #[error("step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_step(self, step: usize) -> Self {
        Error::Step {
            step,
            source: alloc::boxed::Box::new(self),
        }
    }
}

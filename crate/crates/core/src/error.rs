use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum HolantError {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("enumeration needs {needed:.3e} term evaluations but the budget is {budget}; use the approximation engine or raise --budget")]
    BudgetExceeded { needed: f64, budget: u64 },

    #[error("model outside the certified region: {0}")]
    OutsideRegion(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("tensor at vertex {vertex} has degree {tensor_degree} but the vertex has degree {graph_degree}")]
    DegreeMismatch {
        vertex: usize,
        tensor_degree: usize,
        graph_degree: usize,
    },

    #[error("symmetric decomposition failed at pivot {pivot}; supply U explicitly")]
    DecompositionFailed { pivot: usize },

    #[error("root finder did not converge after {iterations} iterations")]
    NonConvergence {
        iterations: usize,
        partial: Vec<Complex64>,
    },

    #[error("partition function vanishes: {0}")]
    ZeroPartition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = HolantError> = std::result::Result<T, E>;

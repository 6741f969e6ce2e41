use crate::algebra::CMatrix;

/// Errors raised by the library.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    /// The matrix lies (numerically) outside the set admitting a generalized
    /// Gauss decomposition: the leading block minor ending with `block` is
    /// ill-conditioned.
    #[error("not Gauss-decomposable: leading minor through block {block} has sigma_min = {sigma_min:e} (threshold {threshold:e})")]
    NotDecomposable {
        block: usize,
        sigma_min: f64,
        threshold: f64,
    },

    /// A nonlinear integration escaped to infinity or stopped resolving.
    #[error("integration diverged at {coordinate:?}")]
    Divergence {
        coordinate: Vec<f64>,
        last_state: Box<CMatrix>,
    },

    /// Gauss decomposition of a linear-flow sample failed, or the flow crossed
    /// the non-decomposable set between two samples.
    #[error("blow-up at node {node} (coordinate {coordinate:?}, block {block})")]
    BlowupAtNode {
        node: usize,
        coordinate: Vec<f64>,
        block: usize,
    },

    /// A closed-form expression hit a singular factor.
    #[error("closed form singular at {coordinate:?}")]
    Blowup { coordinate: Vec<f64> },

    #[error("field is not integrable: residual {residual:e} exceeds {tolerance:e}")]
    NotIntegrable { residual: f64, tolerance: f64 },

    #[error("integrability condition violated ({detail}): residual {residual:e} exceeds {tolerance:e}")]
    Integrability {
        detail: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("Gauss decomposition failed at {} grid point(s), first at {:?}", points.len(), points.first())]
    NotDecomposableOnGrid { points: Vec<Vec<f64>> },

    #[error("axis {axis} needs at least {needed} nodes, found {found}")]
    TooFewNodes {
        axis: usize,
        needed: usize,
        found: usize,
    },

    #[error("evaluation failed: {0}")]
    Evaluation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

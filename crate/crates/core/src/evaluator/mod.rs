//! Drag evaluation: an analytic frontal-area proxy, baseline-set
//! statistics and a client for an external CFD adapter.

mod baseline;
mod external;
mod proxy;

use thiserror::Error;

use crate::geometry::{EvalResult, GeometryError, TriMesh};

pub use baseline::{compute_baseline, BaselineStats, PENALTY_FACTOR};
pub use external::{ExternalCfdConfig, ExternalCfdEvaluator};
pub use proxy::{ProxyCoefficients, ProxyEvaluator, DEFAULT_NOISE_SIGMA};

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("evaluation failed: {0}")]
    Failed(String),
    #[error("degenerate baseline: {0}")]
    DegenerateBaseline(String),
    #[error("invalid evaluator settings: {0}")]
    BadConfig(String),
    #[error("baseline file {path}: {message}")]
    BaselineFile { path: String, message: String },
}

/// Scores a validated, axis-aligned mesh (flow along +x). The returned
/// result carries the raw drag coefficient; normalization is left to the
/// caller.
pub trait DragEvaluator: Send + Sync {
    fn id(&self) -> &str;

    fn evaluate(&self, mesh: &TriMesh) -> Result<EvalResult, EvaluationError>;
}

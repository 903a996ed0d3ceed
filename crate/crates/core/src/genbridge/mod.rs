//! Prompt-to-mesh generators.

mod external;
mod synthetic;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::TriMesh;

pub use external::{ExternalGenerator, ExternalGeneratorConfig, DEFAULT_GENERATION_TIMEOUT};
pub use synthetic::{canonical_words, synthetic_shape_params, ShapeParams, SyntheticGenerator, KEYWORDS};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationRequest {
    pub prompt: String,
    pub seed: u64,
    pub batch_size: usize,
}

impl GenerationRequest {
    pub fn new(prompt: impl Into<String>, seed: u64) -> Self {
        Self {
            prompt: prompt.into(),
            seed,
            batch_size: 1,
        }
    }

    pub fn with_batch(mut self, batch_size: usize) -> Self {
        self.batch_size = batch_size;
        self
    }

    pub fn validate(&self) -> Result<(), GenerationError> {
        if self.prompt.trim().is_empty() {
            return Err(GenerationError::InvalidRequest("prompt is empty".into()));
        }
        if self.batch_size == 0 {
            return Err(GenerationError::InvalidRequest("batch_size must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct GenerationResult {
    pub meshes: Vec<TriMesh>,
    pub generator_id: String,
    pub latency: Duration,
}

#[derive(Debug, Error)]
pub enum GenerationError {
    #[error("invalid generation request: {0}")]
    InvalidRequest(String),
    #[error("generation failed: {0}")]
    Failed(String),
}

/// Turns a prompt into meshes. Implementations must tolerate concurrent
/// calls from several worker threads.
pub trait ShapeGenerator: Send + Sync {
    fn id(&self) -> &str;

    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResult, GenerationError>;
}

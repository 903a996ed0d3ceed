use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Backends, OrchestratorError};
use crate::geometry::{EvalResult, TriMesh};
use crate::genbridge::GenerationRequest;
use crate::lexicon::ScoredWord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignStatus {
    Ok,
    GenerationFailed,
    EvaluationFailed,
}

/// One candidate of one generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignRecord {
    pub generation: usize,
    pub index: usize,
    pub genome: Vec<f64>,
    pub prompt: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjective: Option<ScoredWord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noun: Option<ScoredWord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tokens: Option<Vec<u32>>,
    pub status: DesignStatus,
    /// Present when the design was evaluated.
    pub result: Option<EvalResult>,
    /// Normalized drag, or the penalty for failed designs.
    pub fitness: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

pub(crate) struct Outcome {
    pub status: DesignStatus,
    pub result: Option<EvalResult>,
    pub mesh: Option<TriMesh>,
    pub message: Option<String>,
}

/// Generate, validate, align and evaluate a single design.
pub(crate) fn generate_and_evaluate(backends: &Backends, prompt: &str, seed: u64) -> Outcome {
    let failed = |status, message: String| Outcome {
        status,
        result: None,
        mesh: None,
        message: Some(message),
    };
    let mesh = match backends
        .generator
        .generate(&GenerationRequest::new(prompt, seed))
        .map_err(|e| e.to_string())
        .and_then(|mut r| r.meshes.drain(..).next().ok_or_else(|| "generator returned no mesh".to_owned()))
        .and_then(|m| m.validate().and_then(|m| m.align_to_axes()).map_err(|e| e.to_string()))
    {
        Ok(mesh) => mesh,
        Err(message) => return failed(DesignStatus::GenerationFailed, message),
    };
    match backends.evaluator.evaluate(&mesh) {
        Ok(result) if result.cd.is_finite() => Outcome {
            status: DesignStatus::Ok,
            result: Some(result),
            mesh: Some(mesh),
            message: None,
        },
        Ok(result) => failed(DesignStatus::EvaluationFailed, format!("non-finite drag {}", result.cd)),
        Err(e) => failed(DesignStatus::EvaluationFailed, e.to_string()),
    }
}

/// Evaluates `(prompt, seed)` jobs on a pool of `workers` threads (0 = one
/// per core). Results come back in job order.
pub(crate) fn evaluate_all(
    backends: &Backends,
    jobs: &[(String, u64)],
    workers: usize,
) -> Result<Vec<Outcome>, OrchestratorError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| OrchestratorError::Config(format!("worker pool: {e}")))?;
    Ok(pool.install(|| {
        jobs.par_iter()
            .map(|(prompt, seed)| generate_and_evaluate(backends, prompt, *seed))
            .collect()
    }))
}

//! The optimization loop and the analyses built on the same
//! generate-and-evaluate pipeline.
//!
//! Each generation: ask CMA-ES for λ genomes, decode them to prompts,
//! generate and evaluate the designs on a worker pool (results are
//! collected by candidate index), normalize drag by the baseline span,
//! replace failures with the penalty fitness and tell CMA-ES.

mod analysis;
mod artifacts;
mod codec;
mod config;
mod pipeline;
mod report;
mod run;

use std::sync::Arc;
use std::time::Duration;

use thiserror::Error;

use crate::cmaes::CmaError;
use crate::evaluator::{
    DragEvaluator, EvaluationError, ExternalCfdConfig, ExternalCfdEvaluator, ProxyEvaluator,
};
use crate::genbridge::{ExternalGenerator, ExternalGeneratorConfig, ShapeGenerator, SyntheticGenerator};
use crate::lexicon::LexiconError;
use crate::tokenizer::VocabError;

pub use analysis::{compute_reference_set, prepare_baseline, similarity_sweep, ReferenceSet, SimilarityRow};
pub use artifacts::{RunDir, BASELINE_FILE, CONFIG_FILE, GENERATIONS_FILE, RECORDS_FILE, RUNLOG_FILE, SIMILARITY_FILE};
pub use codec::{Codec, Decoded};
pub use config::{
    BaselineSection, BaselineSource, BowSection, CmaSection, EvaluatorBackend, EvaluatorSection, ExecutionSection,
    GeneratorBackend, GeneratorSection, Representation, RunConfig, SimilaritySection, TokenSection,
};
pub use pipeline::{DesignRecord, DesignStatus};
pub use report::{export_report, GENERATIONS_CSV, GENOME_CSV, DESIGNS_CSV, SIMILARITY_CSV};
pub use run::{run_optimization, GenerationStats, RunLog, RunOutcome};

#[derive(Debug, Error)]
pub enum OrchestratorError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Lexicon(#[from] LexiconError),
    #[error(transparent)]
    Vocab(#[from] VocabError),
    #[error(transparent)]
    Cma(#[from] CmaError),
    #[error(transparent)]
    Evaluation(#[from] EvaluationError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Report(String),
}

impl OrchestratorError {
    /// True for problems the user can fix in the configuration file.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Self::Config(_) | Self::Lexicon(_) | Self::Vocab(_))
            || matches!(self, Self::Cma(CmaError::BadConfig(_)))
            || matches!(self, Self::Evaluation(EvaluationError::BadConfig(_) | EvaluationError::BaselineFile { .. }))
    }
}

pub(crate) fn io_error(path: &std::path::Path, source: std::io::Error) -> OrchestratorError {
    OrchestratorError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// The generator and evaluator a run talks to.
#[derive(Clone)]
pub struct Backends {
    pub generator: Arc<dyn ShapeGenerator>,
    pub evaluator: Arc<dyn DragEvaluator>,
}

impl Backends {
    pub fn new(generator: Arc<dyn ShapeGenerator>, evaluator: Arc<dyn DragEvaluator>) -> Self {
        Self { generator, evaluator }
    }

    pub fn from_config(config: &RunConfig) -> Result<Self, OrchestratorError> {
        config.validate()?;
        let g = &config.generator;
        let generator: Arc<dyn ShapeGenerator> = match g.backend {
            GeneratorBackend::Synthetic => Arc::new(SyntheticGenerator { jitter: g.jitter }),
            GeneratorBackend::External => {
                let mut c = ExternalGeneratorConfig::new(g.command.clone());
                c.timeout = Duration::from_secs(g.timeout_secs);
                c.pool_size = g.pool_size;
                Arc::new(ExternalGenerator::new(c))
            }
        };
        let e = &config.evaluator;
        let evaluator: Arc<dyn DragEvaluator> = match e.backend {
            EvaluatorBackend::Proxy => Arc::new(ProxyEvaluator::new(config.proxy_coefficients(), e.grid_resolution)?),
            EvaluatorBackend::Cfd => Arc::new(ExternalCfdEvaluator::new(ExternalCfdConfig {
                command: e.command.clone(),
                case: e.case.clone(),
                timeout: Duration::from_secs(e.timeout_secs),
                startup_timeout: Duration::from_secs(e.timeout_secs),
                workers: e.workers,
                scratch_dir: config
                    .run
                    .scratch_dir
                    .clone()
                    .unwrap_or_else(|| std::env::temp_dir().join("promptevo")),
                grid_resolution: e.grid_resolution,
            })?),
        };
        Ok(Self { generator, evaluator })
    }
}

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::OrchestratorError;
use crate::cmaes::{CmaConfig, Strategy};
use crate::evaluator::{ProxyCoefficients, DEFAULT_NOISE_SIGMA};
use crate::geometry::DEFAULT_GRID_RESOLUTION;
use crate::tokenizer::{DEFAULT_TOKEN_DIMENSION, DEFAULT_VOCAB_LIMIT};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Representation {
    #[default]
    Bow,
    Token,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorBackend {
    #[default]
    Synthetic,
    External,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvaluatorBackend {
    #[default]
    Proxy,
    Cfd,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineSource {
    /// Generate and evaluate the reference set at the start of the run.
    #[default]
    Compute,
    /// Read stats written by an earlier `baseline` run.
    File,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Master seed for CMA-ES sampling and word-pool sampling.
    pub seed: u64,
    pub output_dir: PathBuf,
    pub representation: Representation,
    pub cma: CmaSection,
    pub bow: BowSection,
    pub token: TokenSection,
    pub generator: GeneratorSection,
    pub evaluator: EvaluatorSection,
    pub baseline: BaselineSection,
    pub similarity: SimilaritySection,
    pub run: ExecutionSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CmaSection {
    pub strategy: Strategy,
    pub lambda: usize,
    pub mu: usize,
    /// Initial step size; when absent 0.25 is used for bag-of-words runs
    /// and 3000 for token runs.
    pub sigma0: Option<f64>,
    pub max_generations: usize,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BowSection {
    /// Taxonomy JSON file; the bundled one when absent.
    pub taxonomy: Option<PathBuf>,
    pub reference_adjective: String,
    pub reference_noun: String,
    /// Words sampled per part of speech.
    pub pool_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TokenSection {
    /// BPE vocabulary JSON file; the bundled fixture when absent.
    pub vocab: Option<PathBuf>,
    pub dimension: usize,
    pub vocab_limit: u32,
    /// Encoded to give the initial mean.
    pub initial_text: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorSection {
    pub backend: GeneratorBackend,
    pub seed: u64,
    /// Use `seed + candidate index` instead of one seed for every design.
    pub seed_per_candidate: bool,
    /// Synthetic backend: log-normal jitter of width and height per seed.
    pub jitter: f64,
    /// External backend: bridge program and arguments.
    pub command: Vec<String>,
    pub timeout_secs: u64,
    pub pool_size: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluatorSection {
    pub backend: EvaluatorBackend,
    pub c0: f64,
    pub c1: f64,
    pub noise_sigma: f64,
    pub seed: u64,
    pub grid_resolution: usize,
    /// CFD backend: adapter program and arguments.
    pub command: Vec<String>,
    pub case: String,
    pub timeout_secs: u64,
    pub workers: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineSection {
    pub source: BaselineSource,
    /// Stats file for `source = "file"`.
    pub path: Option<PathBuf>,
    pub prompt: String,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimilaritySection {
    pub reference: String,
    pub word_count: usize,
    /// Surface samples per mesh for the Chamfer distance.
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExecutionSection {
    /// Evaluation threads; 0 uses one per core.
    pub workers: usize,
    pub save_meshes: bool,
    /// Mesh saving stops once this many bytes have been written.
    pub mesh_budget_bytes: u64,
    /// Scratch space for external backends.
    pub scratch_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            output_dir: PathBuf::from("runs"),
            representation: Representation::Bow,
            cma: CmaSection::default(),
            bow: BowSection::default(),
            token: TokenSection::default(),
            generator: GeneratorSection::default(),
            evaluator: EvaluatorSection::default(),
            baseline: BaselineSection::default(),
            similarity: SimilaritySection::default(),
            run: ExecutionSection::default(),
        }
    }
}

impl Default for CmaSection {
    fn default() -> Self {
        let d = CmaConfig::default();
        Self {
            strategy: d.strategy,
            lambda: d.lambda,
            mu: d.mu,
            sigma0: None,
            max_generations: d.max_generations,
            tolerance: d.tolerance,
        }
    }
}

impl Default for BowSection {
    fn default() -> Self {
        Self {
            taxonomy: None,
            reference_adjective: "fast".into(),
            reference_noun: "wing".into(),
            pool_size: 300,
        }
    }
}

impl Default for TokenSection {
    fn default() -> Self {
        Self {
            vocab: None,
            dimension: DEFAULT_TOKEN_DIMENSION,
            vocab_limit: DEFAULT_VOCAB_LIMIT,
            initial_text: " wing".into(),
        }
    }
}

impl Default for GeneratorSection {
    fn default() -> Self {
        Self {
            backend: GeneratorBackend::Synthetic,
            seed: 0,
            seed_per_candidate: false,
            jitter: 0.1,
            command: Vec::new(),
            timeout_secs: 300,
            pool_size: 1,
        }
    }
}

impl Default for EvaluatorSection {
    fn default() -> Self {
        let p = ProxyCoefficients::default();
        Self {
            backend: EvaluatorBackend::Proxy,
            c0: p.c0,
            c1: p.c1,
            noise_sigma: DEFAULT_NOISE_SIGMA,
            seed: p.seed,
            grid_resolution: DEFAULT_GRID_RESOLUTION,
            command: Vec::new(),
            case: String::new(),
            timeout_secs: 3600,
            workers: 1,
        }
    }
}

impl Default for BaselineSection {
    fn default() -> Self {
        Self {
            source: BaselineSource::Compute,
            path: None,
            prompt: "A car".into(),
            count: 300,
        }
    }
}

impl Default for SimilaritySection {
    fn default() -> Self {
        Self {
            reference: "car".into(),
            word_count: 300,
            points: 4096,
        }
    }
}

impl Default for ExecutionSection {
    fn default() -> Self {
        Self {
            workers: 0,
            save_meshes: false,
            mesh_budget_bytes: 256 * 1024 * 1024,
            scratch_dir: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, OrchestratorError> {
        let config: Self = toml::from_str(text).map_err(|e| OrchestratorError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, OrchestratorError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| OrchestratorError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text).map_err(|e| match e {
            OrchestratorError::Config(m) => OrchestratorError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn dimension(&self) -> usize {
        match self.representation {
            Representation::Bow => 2,
            Representation::Token => self.token.dimension,
        }
    }

    pub fn sigma0(&self) -> f64 {
        self.cma.sigma0.unwrap_or(match self.representation {
            Representation::Bow => 0.25,
            Representation::Token => 3000.0,
        })
    }

    pub fn cma_config(&self) -> CmaConfig {
        CmaConfig {
            dimension: self.dimension(),
            lambda: self.cma.lambda,
            mu: self.cma.mu,
            sigma0: self.sigma0(),
            max_generations: self.cma.max_generations,
            strategy: self.cma.strategy,
            seed: self.seed,
            tolerance: self.cma.tolerance,
        }
    }

    pub fn proxy_coefficients(&self) -> ProxyCoefficients {
        ProxyCoefficients {
            c0: self.evaluator.c0,
            c1: self.evaluator.c1,
            noise_sigma: self.evaluator.noise_sigma,
            seed: self.evaluator.seed,
        }
    }

    /// Checks everything that can be checked without starting a backend.
    pub fn validate(&self) -> Result<(), OrchestratorError> {
        let bad = |m: String| Err(OrchestratorError::Config(m));
        self.cma_config()
            .validate()
            .map_err(|e| OrchestratorError::Config(format!("[cma] {e}")))?;
        if self.representation == Representation::Token {
            if self.token.dimension == 0 {
                return bad("[token] dimension must be at least 1".into());
            }
            if self.token.vocab_limit == 0 {
                return bad("[token] vocab_limit must be at least 1".into());
            }
        }
        if self.representation == Representation::Bow && self.bow.pool_size == 0 {
            return bad("[bow] pool_size must be at least 1".into());
        }
        if self.generator.backend == GeneratorBackend::External && self.generator.command.is_empty() {
            return bad("[generator] backend \"external\" needs a command".into());
        }
        if !(self.generator.jitter >= 0.0 && self.generator.jitter.is_finite()) {
            return bad(format!("[generator] jitter must be non-negative, got {}", self.generator.jitter));
        }
        if self.generator.pool_size == 0 || self.evaluator.workers == 0 {
            return bad("[generator] pool_size and [evaluator] workers must be at least 1".into());
        }
        if self.evaluator.backend == EvaluatorBackend::Cfd && self.evaluator.command.is_empty() {
            return bad("[evaluator] backend \"cfd\" needs a command".into());
        }
        self.proxy_coefficients()
            .validate()
            .map_err(|e| OrchestratorError::Config(format!("[evaluator] {e}")))?;
        if self.evaluator.grid_resolution < crate::geometry::MIN_GRID_RESOLUTION {
            return bad(format!(
                "[evaluator] grid_resolution must be at least {}",
                crate::geometry::MIN_GRID_RESOLUTION
            ));
        }
        match self.baseline.source {
            BaselineSource::File if self.baseline.path.is_none() => {
                return bad("[baseline] source \"file\" needs a path".into());
            }
            BaselineSource::Compute if self.baseline.count < 2 => {
                return bad("[baseline] count must be at least 2".into());
            }
            _ => {}
        }
        if self.baseline.prompt.trim().is_empty() {
            return bad("[baseline] prompt must not be empty".into());
        }
        if self.similarity.word_count == 0 || self.similarity.points == 0 {
            return bad("[similarity] word_count and points must be at least 1".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_roundtrip_through_toml() {
        let config = RunConfig::default();
        let text = config.to_toml();
        assert_eq!(RunConfig::from_toml(&text).unwrap(), config);
    }

    #[test]
    fn empty_document_is_all_defaults() {
        assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    }

    #[test]
    fn sigma_defaults_follow_representation() {
        let mut c = RunConfig::default();
        assert_eq!(c.sigma0(), 0.25);
        c.representation = Representation::Token;
        assert_eq!(c.sigma0(), 3000.0);
        assert_eq!(c.cma_config().dimension, 3);
        c.cma.sigma0 = Some(7.0);
        assert_eq!(c.sigma0(), 7.0);
    }

    #[test]
    fn unknown_keys_and_bad_values_rejected() {
        assert!(matches!(RunConfig::from_toml("sed = 3"), Err(OrchestratorError::Config(_))));
        assert!(RunConfig::from_toml("[cma]\nlamda = 3").is_err());
        assert!(RunConfig::from_toml("[cma]\nmu = 20").is_err());
        assert!(RunConfig::from_toml("representation = \"words\"").is_err());
        assert!(RunConfig::from_toml("[generator]\nbackend = \"external\"").is_err());
        assert!(RunConfig::from_toml("[baseline]\nsource = \"file\"").is_err());
        assert!(RunConfig::from_toml("[evaluator]\nc1 = -1.0").is_err());
    }

    #[test]
    fn partial_sections_keep_other_defaults() {
        let c = RunConfig::from_toml("seed = 7\n[cma]\nstrategy = \"plus\"\nmax_generations = 30\n").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.cma.strategy, Strategy::Plus);
        assert_eq!(c.cma.lambda, 10);
        assert_eq!(c.bow.reference_noun, "wing");
    }
}

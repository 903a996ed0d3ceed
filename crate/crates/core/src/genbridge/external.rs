use std::path::PathBuf;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{GenerationError, GenerationRequest, GenerationResult, ShapeGenerator};
use crate::geometry::io::load_obj;
use crate::process::ProcessPool;

pub const DEFAULT_GENERATION_TIMEOUT: Duration = Duration::from_secs(300);

#[derive(Clone, Debug)]
pub struct ExternalGeneratorConfig {
    /// Program and arguments of the bridge process.
    pub command: Vec<String>,
    pub timeout: Duration,
    /// Time allowed for the `ready` handshake; model loading can be slow.
    pub startup_timeout: Duration,
    pub pool_size: usize,
}

impl ExternalGeneratorConfig {
    pub fn new(command: Vec<String>) -> Self {
        Self {
            command,
            timeout: DEFAULT_GENERATION_TIMEOUT,
            startup_timeout: DEFAULT_GENERATION_TIMEOUT,
            pool_size: 1,
        }
    }
}

#[derive(Serialize)]
struct BridgeRequest<'a> {
    id: String,
    prompt: &'a str,
    seed: u64,
    batch: usize,
}

#[derive(Deserialize)]
struct BridgeResponse {
    status: String,
    #[serde(default)]
    mesh_paths: Vec<PathBuf>,
    #[serde(default)]
    message: String,
}

/// Client for a text-to-3D model running as a child process that speaks
/// newline-delimited JSON. Meshes come back as OBJ files in a scratch
/// directory shared with the bridge.
pub struct ExternalGenerator {
    pool: ProcessPool,
}

impl ExternalGenerator {
    pub const ID: &'static str = "external";

    pub fn new(config: ExternalGeneratorConfig) -> Self {
        Self {
            pool: ProcessPool::new(
                "gen",
                config.command,
                config.pool_size,
                config.timeout,
                config.startup_timeout,
            ),
        }
    }
}

impl ShapeGenerator for ExternalGenerator {
    fn id(&self) -> &str {
        Self::ID
    }

    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResult, GenerationError> {
        request.validate()?;
        let start = Instant::now();
        let (resp, model): (BridgeResponse, _) = self
            .pool
            .call(|id| BridgeRequest {
                id,
                prompt: &request.prompt,
                seed: request.seed,
                batch: request.batch_size,
            })
            .map_err(|e| GenerationError::Failed(e.to_string()))?;
        if resp.status != "ok" {
            return Err(GenerationError::Failed(format!("bridge reported {}: {}", resp.status, resp.message)));
        }
        if resp.mesh_paths.len() != request.batch_size {
            return Err(GenerationError::Failed(format!(
                "asked for {} meshes, bridge returned {}",
                request.batch_size,
                resp.mesh_paths.len()
            )));
        }
        let meshes = resp
            .mesh_paths
            .iter()
            .map(|path| {
                let mesh = load_obj(path).map_err(|e| GenerationError::Failed(format!("{}: {e}", path.display())))?;
                mesh.validate()
                    .map_err(|e| GenerationError::Failed(format!("{}: {e}", path.display())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GenerationResult {
            meshes,
            generator_id: match model {
                Some(m) => format!("{}:{m}", Self::ID),
                None => Self::ID.to_owned(),
            },
            latency: start.elapsed(),
        })
    }
}

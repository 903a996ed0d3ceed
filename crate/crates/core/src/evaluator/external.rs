use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{DragEvaluator, EvaluationError};
use crate::geometry::io::save_obj;
use crate::geometry::{projected_frontal_area, EvalResult, TriMesh};
use crate::process::ProcessPool;

#[derive(Clone, Debug)]
pub struct ExternalCfdConfig {
    pub command: Vec<String>,
    /// Opaque case description passed through to the adapter.
    pub case: String,
    pub timeout: Duration,
    pub startup_timeout: Duration,
    /// Maximum number of designs simulated at once.
    pub workers: usize,
    /// Where meshes are written for the adapter to read.
    pub scratch_dir: PathBuf,
    pub grid_resolution: usize,
}

#[derive(Serialize)]
struct CfdRequest<'a> {
    id: String,
    mesh_path: &'a str,
    case: &'a str,
}

#[derive(Deserialize)]
struct CfdResponse {
    status: String,
    cd: Option<f64>,
    #[serde(default)]
    message: String,
}

/// Sends each mesh as an OBJ file to a solver adapter process and reads the
/// drag coefficient back. Frontal area and dimensions are still measured
/// locally.
pub struct ExternalCfdEvaluator {
    config: ExternalCfdConfig,
    pool: ProcessPool,
    counter: AtomicU64,
}

impl ExternalCfdEvaluator {
    pub const ID: &'static str = "cfd";

    pub fn new(config: ExternalCfdConfig) -> Result<Self, EvaluationError> {
        std::fs::create_dir_all(&config.scratch_dir).map_err(|e| {
            EvaluationError::BadConfig(format!("scratch directory {}: {e}", config.scratch_dir.display()))
        })?;
        let pool = ProcessPool::new(
            "cfd",
            config.command.clone(),
            config.workers,
            config.timeout,
            config.startup_timeout,
        );
        Ok(Self {
            config,
            pool,
            counter: AtomicU64::new(0),
        })
    }
}

impl DragEvaluator for ExternalCfdEvaluator {
    fn id(&self) -> &str {
        Self::ID
    }

    fn evaluate(&self, mesh: &TriMesh) -> Result<EvalResult, EvaluationError> {
        let frontal_area = projected_frontal_area(mesh, self.config.grid_resolution)?;
        let n = self.counter.fetch_add(1, Ordering::Relaxed);
        let path = self
            .config
            .scratch_dir
            .join(format!("cfd-{:016x}-{n}.obj", mesh.content_hash()));
        save_obj(mesh, &path).map_err(|e| EvaluationError::Failed(format!("{}: {e}", path.display())))?;
        let mesh_path = path.to_string_lossy();
        let outcome = self.pool.call(|id| CfdRequest {
            id,
            mesh_path: &mesh_path,
            case: &self.config.case,
        });
        let _ = std::fs::remove_file(&path);
        let (resp, _): (CfdResponse, _) = outcome.map_err(|e| EvaluationError::Failed(e.to_string()))?;
        if resp.status != "ok" {
            return Err(EvaluationError::Failed(format!("solver reported {}: {}", resp.status, resp.message)));
        }
        let cd = resp
            .cd
            .filter(|cd| cd.is_finite())
            .ok_or_else(|| EvaluationError::Failed("response has no finite cd".into()))?;
        Ok(EvalResult {
            cd,
            cd_normalized: None,
            frontal_area,
            dims: mesh.bounding_dims(),
        })
    }
}

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{DragEvaluator, EvaluationError};
use crate::geometry::{projected_frontal_area, EvalResult, TriMesh, DEFAULT_GRID_RESOLUTION};

/// Calibrated with `examples/calibrate_proxy.rs` so that 300 synthetic
/// "A car" designs give an area/drag R² close to 0.84.
pub const DEFAULT_NOISE_SIGMA: f64 = 0.0068;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProxyCoefficients {
    pub c0: f64,
    /// Drag increase per unit of frontal area.
    pub c1: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for ProxyCoefficients {
    fn default() -> Self {
        Self {
            c0: 0.10,
            c1: 0.30,
            noise_sigma: DEFAULT_NOISE_SIGMA,
            seed: 0,
        }
    }
}

impl ProxyCoefficients {
    pub fn validate(&self) -> Result<(), EvaluationError> {
        if !(self.c1 > 0.0 && self.c1.is_finite()) {
            return Err(EvaluationError::BadConfig(format!("c1 must be positive, got {}", self.c1)));
        }
        if !self.c0.is_finite() {
            return Err(EvaluationError::BadConfig(format!("c0 must be finite, got {}", self.c0)));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(EvaluationError::BadConfig(format!(
                "noise_sigma must be non-negative, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// `cd = c0 + c1 * frontal_area + noise`, where the noise is drawn from a
/// stream keyed by the coefficient seed and the mesh content, so the same
/// mesh always gets the same value.
#[derive(Clone, Debug)]
pub struct ProxyEvaluator {
    coefficients: ProxyCoefficients,
    grid_resolution: usize,
}

impl ProxyEvaluator {
    pub const ID: &'static str = "proxy";

    pub fn new(coefficients: ProxyCoefficients, grid_resolution: usize) -> Result<Self, EvaluationError> {
        coefficients.validate()?;
        Ok(Self {
            coefficients,
            grid_resolution,
        })
    }

    pub fn coefficients(&self) -> &ProxyCoefficients {
        &self.coefficients
    }

    fn noise(&self, mesh: &TriMesh) -> f64 {
        let sigma = self.coefficients.noise_sigma;
        if sigma == 0.0 {
            return 0.0;
        }
        let digest = Sha256::new()
            .chain_update(self.coefficients.seed.to_le_bytes())
            .chain_update(mesh.content_hash().to_le_bytes())
            .finalize();
        let key: [u8; 32] = digest[..].try_into().expect("32-byte digest");
        let mut rng = ChaCha8Rng::from_seed(key);
        Normal::new(0.0, sigma).expect("sigma validated").sample(&mut rng)
    }
}

impl Default for ProxyEvaluator {
    fn default() -> Self {
        Self::new(ProxyCoefficients::default(), DEFAULT_GRID_RESOLUTION).expect("defaults are valid")
    }
}

impl DragEvaluator for ProxyEvaluator {
    fn id(&self) -> &str {
        Self::ID
    }

    fn evaluate(&self, mesh: &TriMesh) -> Result<EvalResult, EvaluationError> {
        let frontal_area = projected_frontal_area(mesh, self.grid_resolution)?;
        let c = &self.coefficients;
        Ok(EvalResult {
            cd: c.c0 + c.c1 * frontal_area + self.noise(mesh),
            cd_normalized: None,
            frontal_area,
            dims: mesh.bounding_dims(),
        })
    }
}

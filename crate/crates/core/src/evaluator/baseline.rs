use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EvaluationError;
use crate::geometry::{normalize_cd, EvalResult, GeometryError};

/// Failed designs are scored as this multiple of the worst baseline drag.
pub const PENALTY_FACTOR: f64 = 1.2;

/// Summary of a reference set of designs, used for normalization and as
/// the performance baseline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BaselineStats {
    pub count: usize,
    pub cd_min: f64,
    pub cd_max: f64,
    pub cd_mean: f64,
    /// `1.96 * sd / sqrt(n)` with the sample standard deviation.
    pub ci95_halfwidth: f64,
    /// Coefficient of determination of a least-squares line of cd on frontal area.
    pub r_squared: f64,
}

impl BaselineStats {
    pub fn span(&self) -> f64 {
        self.cd_max - self.cd_min
    }

    pub fn normalize(&self, cd: f64) -> Result<f64, GeometryError> {
        normalize_cd(cd, self.cd_min, self.cd_max)
    }

    /// Raw drag assigned to designs that could not be generated or evaluated.
    pub fn penalty_cd(&self) -> f64 {
        PENALTY_FACTOR * self.cd_max
    }

    pub fn penalty_normalized(&self) -> Result<f64, GeometryError> {
        self.normalize(self.penalty_cd())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), EvaluationError> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self).expect("stats serialize");
        std::fs::write(path, text + "\n").map_err(|e| file_error(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EvaluationError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| file_error(path, e))?;
        let stats: Self = serde_json::from_str(&text).map_err(|e| file_error(path, e))?;
        if !(stats.span() > 0.0) || stats.count < 2 {
            return Err(EvaluationError::DegenerateBaseline(format!(
                "{} has count {} and span {}",
                path.display(),
                stats.count,
                stats.span()
            )));
        }
        Ok(stats)
    }
}

fn file_error(path: &Path, e: impl std::fmt::Display) -> EvaluationError {
    EvaluationError::BaselineFile {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

pub fn compute_baseline(results: &[EvalResult]) -> Result<BaselineStats, EvaluationError> {
    let n = results.len();
    if n < 2 {
        return Err(EvaluationError::DegenerateBaseline(format!("need at least 2 designs, got {n}")));
    }
    let nf = n as f64;
    let cd_min = results.iter().map(|r| r.cd).fold(f64::INFINITY, f64::min);
    let cd_max = results.iter().map(|r| r.cd).fold(f64::NEG_INFINITY, f64::max);
    if !(cd_max - cd_min > 0.0) {
        return Err(EvaluationError::DegenerateBaseline(format!("zero drag span ({cd_min}..{cd_max})")));
    }
    let cd_mean = results.iter().map(|r| r.cd).sum::<f64>() / nf;
    let area_mean = results.iter().map(|r| r.frontal_area).sum::<f64>() / nf;

    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for r in results {
        let dx = r.frontal_area - area_mean;
        let dy = r.cd - cd_mean;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if !(sxx > 0.0) {
        return Err(EvaluationError::DegenerateBaseline("frontal area has no variance".into()));
    }
    let sd = (syy / (nf - 1.0)).sqrt();
    Ok(BaselineStats {
        count: n,
        cd_min,
        cd_max,
        cd_mean,
        ci95_halfwidth: 1.96 * sd / nf.sqrt(),
        r_squared: (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0),
    })
}

//! Triangle meshes, point clouds and the shape measurements the drag
//! evaluator and the similarity analysis are built on.
//!
//! Everything here is a pure function over immutable inputs.

mod area;
mod chamfer;
pub mod io;
mod mesh;
mod sampling;

pub use area::{projected_frontal_area, DEFAULT_GRID_RESOLUTION, MIN_GRID_RESOLUTION};
pub use chamfer::chamfer_distance;
pub use mesh::{BoundingDims, Point, TriMesh, DEGENERATE_AREA, EXTENT_TIE_TOLERANCE};
pub use sampling::{sample_surface, PointCloud};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("mesh has no valid faces")]
    EmptyMesh,
    #[error("projected bounding rectangle has zero area")]
    ZeroProjection,
    #[error("baseline span must be positive (max - min = {0})")]
    DegenerateBaseline(f64),
    #[error("point cloud is empty or contains non-finite coordinates")]
    InvalidCloud,
    #[error("grid resolution {0} is below the minimum of {MIN_GRID_RESOLUTION}")]
    GridTooCoarse(usize),
}

/// Drag evaluation of one design.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub cd: f64,
    /// Filled in once a baseline span is known.
    pub cd_normalized: Option<f64>,
    pub frontal_area: f64,
    pub dims: BoundingDims,
}

impl EvalResult {
    pub fn with_normalization(mut self, span: f64) -> Result<Self, GeometryError> {
        self.cd_normalized = Some(normalize_cd_by_span(self.cd, span)?);
        Ok(self)
    }
}

/// Drag coefficient divided by the span of the baseline set.
pub fn normalize_cd(cd: f64, baseline_min: f64, baseline_max: f64) -> Result<f64, GeometryError> {
    normalize_cd_by_span(cd, baseline_max - baseline_min)
}

fn normalize_cd_by_span(cd: f64, span: f64) -> Result<f64, GeometryError> {
    if !(span > 0.0) || !span.is_finite() {
        return Err(GeometryError::DegenerateBaseline(span));
    }
    Ok(cd / span)
}

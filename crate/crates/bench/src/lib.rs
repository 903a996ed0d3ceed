//! Shared inputs for the criterion benchmarks.

use promptevo::geometry::{sample_surface, PointCloud, TriMesh};

pub fn sphere(resolution: usize) -> TriMesh {
    TriMesh::uv_sphere(1.0, resolution, 2 * resolution)
}

pub fn sphere_cloud(points: usize, seed: u64) -> PointCloud {
    sample_surface(&sphere(32), points, seed).expect("sphere mesh is valid")
}

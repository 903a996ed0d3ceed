use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{GeometryError, Point, TriMesh};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    points: Vec<Point>,
}

impl PointCloud {
    pub fn new(points: Vec<Point>) -> Result<Self, GeometryError> {
        if points.is_empty() || points.iter().any(|p| !p.iter().all(|c| c.is_finite())) {
            return Err(GeometryError::InvalidCloud);
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn translated(&self, offset: [f64; 3]) -> PointCloud {
        let points = self
            .points
            .iter()
            .map(|p| Point::new(p.x + offset[0], p.y + offset[1], p.z + offset[2]))
            .collect();
        PointCloud { points }
    }
}

/// Draws `n` points uniformly by area over the mesh surface.
pub fn sample_surface(mesh: &TriMesh, n: usize, seed: u64) -> Result<PointCloud, GeometryError> {
    if mesh.faces.is_empty() {
        return Err(GeometryError::EmptyMesh);
    }
    let mut cumulative = Vec::with_capacity(mesh.faces.len());
    let mut total = 0.0;
    for f in 0..mesh.faces.len() {
        total += mesh.triangle_area(f);
        cumulative.push(total);
    }
    if !(total > 0.0) {
        return Err(GeometryError::EmptyMesh);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n)
        .map(|_| {
            let target = rng.random::<f64>() * total;
            let face = cumulative
                .partition_point(|&c| c <= target)
                .min(mesh.faces.len() - 1);
            let [a, b, c] = mesh.triangle(face);
            let s = rng.random::<f64>().sqrt();
            let t = rng.random::<f64>();
            Point::from(a.coords * (1.0 - s) + b.coords * (s * (1.0 - t)) + c.coords * (s * t))
        })
        .collect();
    PointCloud::new(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let cube = TriMesh::unit_cube();
        let a = sample_surface(&cube, 1000, 42).unwrap();
        let b = sample_surface(&cube, 1000, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_surface(&cube, 1000, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn points_stay_on_single_triangle() {
        let tri = TriMesh::new(
            vec![
                Point::new(0.0, 0.0, 0.0),
                Point::new(2.0, 0.0, 0.0),
                Point::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        );
        let cloud = sample_surface(&tri, 10, 0).unwrap();
        assert_eq!(cloud.len(), 10);
        for p in cloud.points() {
            assert_eq!(p.z, 0.0);
            assert!(p.x >= 0.0 && p.y >= 0.0 && p.x / 2.0 + p.y <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn face_shares_follow_area() {
        // box with faces of unequal area: 2x1 ends, 2x3 and 1x3 sides
        let mesh = TriMesh::cuboid([0.0; 3], [2.0, 1.0, 3.0]);
        let n = 100_000;
        let cloud = sample_surface(&mesh, n, 7).unwrap();
        // face id by which coordinate sits on the boundary
        let mut counts = [0usize; 3];
        for p in cloud.points() {
            if p.z == 0.0 || (p.z - 3.0).abs() < 1e-12 {
                counts[0] += 1;
            } else if p.y == 0.0 || (p.y - 1.0).abs() < 1e-12 {
                counts[1] += 1;
            } else {
                counts[2] += 1;
            }
        }
        let total_area = 2.0 * (2.0 + 6.0 + 3.0);
        let expected = [4.0 / total_area, 12.0 / total_area, 6.0 / total_area];
        for k in 0..3 {
            let share = counts[k] as f64 / n as f64;
            assert!((share - expected[k]).abs() / expected[k] < 0.02, "{k}: {share} vs {}", expected[k]);
        }
    }

    #[test]
    fn cube_faces_share_equally() {
        let cloud = sample_surface(&TriMesh::unit_cube(), 100_000, 7).unwrap();
        let mut counts = [0usize; 6];
        for p in cloud.points() {
            // face = (axis, side) of the coordinate sitting on the boundary
            let face = (0..3)
                .flat_map(|k| [(2 * k, p[k].abs()), (2 * k + 1, (p[k] - 1.0).abs())])
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap()
                .0;
            counts[face] += 1;
        }
        for c in counts {
            let share = c as f64 / 100_000.0;
            assert!((share - 1.0 / 6.0).abs() * 6.0 < 0.02, "{counts:?}");
        }
    }

    #[test]
    fn cloud_rejects_empty_and_nan() {
        assert!(PointCloud::new(vec![]).is_err());
        assert!(PointCloud::new(vec![Point::new(f64::NAN, 0.0, 0.0)]).is_err());
    }
}

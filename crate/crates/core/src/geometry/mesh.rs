use std::collections::HashMap;

use nalgebra::Point3;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::GeometryError;

pub type Point = Point3<f64>;

/// Faces with an area below this (model units squared) are dropped by validation.
pub const DEGENERATE_AREA: f64 = 1e-12;

/// Extents closer than this are treated as equal when ordering axes.
pub const EXTENT_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    pub faces: Vec<[usize; 3]>,
}

/// Axis-aligned extents of a mesh. After alignment `lx` is the length,
/// `ly` the width and `lz` the height.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BoundingDims {
    pub lx: f64,
    pub ly: f64,
    pub lz: f64,
}

impl BoundingDims {
    pub fn as_array(&self) -> [f64; 3] {
        [self.lx, self.ly, self.lz]
    }
}

impl TriMesh {
    pub fn new(vertices: Vec<Point>, faces: Vec<[usize; 3]>) -> Self {
        Self { vertices, faces }
    }

    /// Axis-aligned box spanning `min`..`max`, 8 vertices and 12 outward-facing triangles.
    pub fn cuboid(min: [f64; 3], max: [f64; 3]) -> Self {
        let [x0, y0, z0] = min;
        let [x1, y1, z1] = max;
        let vertices = vec![
            Point::new(x0, y0, z0),
            Point::new(x1, y0, z0),
            Point::new(x1, y1, z0),
            Point::new(x0, y1, z0),
            Point::new(x0, y0, z1),
            Point::new(x1, y0, z1),
            Point::new(x1, y1, z1),
            Point::new(x0, y1, z1),
        ];
        let faces = vec![
            [0, 2, 1],
            [0, 3, 2],
            [4, 5, 6],
            [4, 6, 7],
            [0, 1, 5],
            [0, 5, 4],
            [1, 2, 6],
            [1, 6, 5],
            [2, 3, 7],
            [2, 7, 6],
            [3, 0, 4],
            [3, 4, 7],
        ];
        Self { vertices, faces }
    }

    pub fn unit_cube() -> Self {
        Self::cuboid([0.0; 3], [1.0; 3])
    }

    /// Latitude/longitude sphere centred at the origin.
    pub fn uv_sphere(radius: f64, stacks: usize, slices: usize) -> Self {
        let stacks = stacks.max(2);
        let slices = slices.max(3);
        let mut vertices = vec![Point::new(0.0, 0.0, radius)];
        for i in 1..stacks {
            let theta = std::f64::consts::PI * i as f64 / stacks as f64;
            for j in 0..slices {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / slices as f64;
                vertices.push(Point::new(
                    radius * theta.sin() * phi.cos(),
                    radius * theta.sin() * phi.sin(),
                    radius * theta.cos(),
                ));
            }
        }
        let south = vertices.len();
        vertices.push(Point::new(0.0, 0.0, -radius));

        let ring = |i: usize, j: usize| 1 + (i - 1) * slices + (j % slices);
        let mut faces = Vec::new();
        for j in 0..slices {
            faces.push([0, ring(1, j), ring(1, j + 1)]);
        }
        for i in 1..stacks - 1 {
            for j in 0..slices {
                let (a, b) = (ring(i, j), ring(i, j + 1));
                let (c, d) = (ring(i + 1, j), ring(i + 1, j + 1));
                faces.push([a, c, d]);
                faces.push([a, d, b]);
            }
        }
        for j in 0..slices {
            faces.push([south, ring(stacks - 1, j + 1), ring(stacks - 1, j)]);
        }
        Self { vertices, faces }
    }

    pub fn triangle(&self, face: usize) -> [Point; 3] {
        let [a, b, c] = self.faces[face];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, face: usize) -> f64 {
        let [a, b, c] = self.triangle(face);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.triangle_area(f)).sum()
    }

    /// Drops faces that are out of range, reference non-finite vertices,
    /// repeat an index or have (near) zero area, then prunes vertices no
    /// face references. Vertex order is preserved.
    pub fn validate(&self) -> Result<TriMesh, GeometryError> {
        let finite = |p: &Point| p.iter().all(|c| c.is_finite());
        let n = self.vertices.len();
        let kept: Vec<[usize; 3]> = self
            .faces
            .iter()
            .copied()
            .filter(|&[a, b, c]| {
                if a >= n || b >= n || c >= n || a == b || b == c || a == c {
                    return false;
                }
                let (pa, pb, pc) = (&self.vertices[a], &self.vertices[b], &self.vertices[c]);
                if !(finite(pa) && finite(pb) && finite(pc)) {
                    return false;
                }
                0.5 * (pb - pa).cross(&(pc - pa)).norm() >= DEGENERATE_AREA
            })
            .collect();
        if kept.is_empty() {
            return Err(GeometryError::EmptyMesh);
        }

        let mut used = vec![false; n];
        for face in &kept {
            for &i in face {
                used[i] = true;
            }
        }
        let mut remap = vec![usize::MAX; n];
        let mut vertices = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if used[i] {
                remap[i] = vertices.len();
                vertices.push(*v);
            }
        }
        let faces = kept
            .into_iter()
            .map(|[a, b, c]| [remap[a], remap[b], remap[c]])
            .collect();
        Ok(TriMesh { vertices, faces })
    }

    pub fn bounding_dims(&self) -> BoundingDims {
        match self.bounds() {
            Some((lo, hi)) => BoundingDims {
                lx: hi[0] - lo[0],
                ly: hi[1] - lo[1],
                lz: hi[2] - lo[2],
            },
            None => BoundingDims::default(),
        }
    }

    pub fn bounds(&self) -> Option<([f64; 3], [f64; 3])> {
        let first = self.vertices.first()?;
        let mut lo = [first.x, first.y, first.z];
        let mut hi = lo;
        for v in &self.vertices[1..] {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        Some((lo, hi))
    }

    /// Permutes axes so that the extents are ordered x >= y >= z (length,
    /// width, height) and centres the bounding box on the origin. Odd
    /// permutations flip z so the result is a proper rigid motion.
    pub fn align_to_axes(&self) -> Result<TriMesh, GeometryError> {
        if self.faces.is_empty() || self.vertices.is_empty() {
            return Err(GeometryError::EmptyMesh);
        }
        let extents = self.bounding_dims().as_array();
        let mut order = [0usize, 1, 2];
        // insertion sort: only swaps when strictly larger beyond the tie tolerance
        for i in 1..3 {
            let mut j = i;
            while j > 0 && extents[order[j]] > extents[order[j - 1]] + EXTENT_TIE_TOLERANCE {
                order.swap(j, j - 1);
                j -= 1;
            }
        }
        let inversions = (0..3)
            .flat_map(|i| (i + 1..3).map(move |j| (i, j)))
            .filter(|&(i, j)| order[i] > order[j])
            .count();
        let flip_z = if inversions % 2 == 1 { -1.0 } else { 1.0 };

        let permuted: Vec<Point> = self
            .vertices
            .iter()
            .map(|v| Point::new(v[order[0]], v[order[1]], flip_z * v[order[2]]))
            .collect();
        let mut out = TriMesh {
            vertices: permuted,
            faces: self.faces.clone(),
        };
        let (lo, hi) = out.bounds().ok_or(GeometryError::EmptyMesh)?;
        let centre = [
            0.5 * (lo[0] + hi[0]),
            0.5 * (lo[1] + hi[1]),
            0.5 * (lo[2] + hi[2]),
        ];
        for v in &mut out.vertices {
            for k in 0..3 {
                v[k] -= centre[k];
            }
        }
        Ok(out)
    }

    /// Moves every vertex by `offset`.
    pub fn translated(&self, offset: [f64; 3]) -> TriMesh {
        let vertices = self
            .vertices
            .iter()
            .map(|v| Point::new(v.x + offset[0], v.y + offset[1], v.z + offset[2]))
            .collect();
        TriMesh {
            vertices,
            faces: self.faces.clone(),
        }
    }

    /// Concatenates another mesh, re-indexing its faces.
    pub fn append(&mut self, other: &TriMesh) {
        let base = self.vertices.len();
        self.vertices.extend_from_slice(&other.vertices);
        self.faces.extend(
            other
                .faces
                .iter()
                .map(|&[a, b, c]| [a + base, b + base, c + base]),
        );
    }

    /// Stable digest of the exact vertex bits and face indices.
    pub fn content_hash(&self) -> u64 {
        let mut hasher = Sha256::new();
        hasher.update((self.vertices.len() as u64).to_le_bytes());
        for v in &self.vertices {
            for c in v.iter() {
                hasher.update(c.to_bits().to_le_bytes());
            }
        }
        hasher.update((self.faces.len() as u64).to_le_bytes());
        for f in &self.faces {
            for &i in f {
                hasher.update((i as u64).to_le_bytes());
            }
        }
        let digest = hasher.finalize();
        u64::from_le_bytes(digest[..8].try_into().expect("sha256 digest is 32 bytes"))
    }

    /// Merges vertices with bit-identical coordinates.
    pub fn weld(&self) -> TriMesh {
        let mut index: HashMap<[u64; 3], usize> = HashMap::new();
        let mut vertices = Vec::new();
        let mut remap = Vec::with_capacity(self.vertices.len());
        for v in &self.vertices {
            let key = [v.x.to_bits(), v.y.to_bits(), v.z.to_bits()];
            let id = *index.entry(key).or_insert_with(|| {
                vertices.push(*v);
                vertices.len() - 1
            });
            remap.push(id);
        }
        let faces = self
            .faces
            .iter()
            .map(|&[a, b, c]| [remap[a], remap[b], remap[c]])
            .collect();
        TriMesh { vertices, faces }
    }
}

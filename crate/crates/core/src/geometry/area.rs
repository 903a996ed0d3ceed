use super::{GeometryError, TriMesh};

pub const DEFAULT_GRID_RESOLUTION: usize = 256;
pub const MIN_GRID_RESOLUTION: usize = 16;

/// Area of the mesh's shadow on the y–z plane (flow along +x).
///
/// The projected bounding rectangle is divided into a
/// `grid_resolution × grid_resolution` grid. A lattice corner is covered
/// when it lies inside (or on the edge of) any projected triangle, and a
/// cell counts as occupied when all four of its corners are covered. The
/// result is the union of the projected triangles, never the sum, and for
/// convex silhouettes it can only grow as the grid is refined by doubling.
pub fn projected_frontal_area(mesh: &TriMesh, grid_resolution: usize) -> Result<f64, GeometryError> {
    if grid_resolution < MIN_GRID_RESOLUTION {
        return Err(GeometryError::GridTooCoarse(grid_resolution));
    }
    if mesh.faces.is_empty() {
        return Err(GeometryError::EmptyMesh);
    }

    let mut y0 = f64::INFINITY;
    let mut y1 = f64::NEG_INFINITY;
    let mut z0 = f64::INFINITY;
    let mut z1 = f64::NEG_INFINITY;
    for face in &mesh.faces {
        for &i in face {
            let v = mesh.vertices[i];
            y0 = y0.min(v.y);
            y1 = y1.max(v.y);
            z0 = z0.min(v.z);
            z1 = z1.max(v.z);
        }
    }
    let (width, height) = (y1 - y0, z1 - z0);
    if !(width > 0.0 && height > 0.0) || !(width * height).is_finite() {
        return Err(GeometryError::ZeroProjection);
    }

    let n = grid_resolution;
    let stride = n + 1;
    let dy = width / n as f64;
    let dz = height / n as f64;
    // lattice coordinate of corner i along an axis, with the last corner pinned to the max
    let corner_y = |i: usize| if i == n { y1 } else { y0 + i as f64 * dy };
    let corner_z = |j: usize| if j == n { z1 } else { z0 + j as f64 * dz };
    let tolerance = 1e-9 * (width * width + height * height);

    let mut covered = vec![false; stride * stride];
    for face in &mesh.faces {
        let p = face.map(|i| (mesh.vertices[i].y, mesh.vertices[i].z));
        let mut area2 = cross(p[0], p[1], p[2]);
        if area2.abs() <= tolerance * 1e-6 {
            continue; // edge-on in projection
        }
        let sign = area2.signum();
        area2 = area2.abs();
        let eps = tolerance.min(area2);

        let (tmin_y, tmax_y) = min_max([p[0].0, p[1].0, p[2].0]);
        let (tmin_z, tmax_z) = min_max([p[0].1, p[1].1, p[2].1]);
        let i_lo = (((tmin_y - y0) / dy).floor().max(0.0)) as usize;
        let i_hi = ((((tmax_y - y0) / dy).ceil()) as usize).min(n);
        let j_lo = (((tmin_z - z0) / dz).floor().max(0.0)) as usize;
        let j_hi = ((((tmax_z - z0) / dz).ceil()) as usize).min(n);

        for j in j_lo..=j_hi {
            let z = corner_z(j);
            for i in i_lo..=i_hi {
                let idx = j * stride + i;
                if covered[idx] {
                    continue;
                }
                let q = (corner_y(i), z);
                let w0 = sign * cross(p[0], p[1], q);
                let w1 = sign * cross(p[1], p[2], q);
                let w2 = sign * cross(p[2], p[0], q);
                if w0 >= -eps && w1 >= -eps && w2 >= -eps {
                    covered[idx] = true;
                }
            }
        }
    }

    let mut occupied = 0usize;
    for j in 0..n {
        for i in 0..n {
            let c = j * stride + i;
            if covered[c] && covered[c + 1] && covered[c + stride] && covered[c + stride + 1] {
                occupied += 1;
            }
        }
    }
    Ok(occupied as f64 * dy * dz)
}

fn cross(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn min_max(v: [f64; 3]) -> (f64, f64) {
    (v[0].min(v[1]).min(v[2]), v[0].max(v[1]).max(v[2]))
}

//! Wavefront OBJ (vertices and faces only) and XYZ point-cloud text formats.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::{Point, PointCloud, TriMesh};

#[derive(Debug, Error)]
pub enum MeshIoError {
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("no faces found")]
    NoFaces,
    #[error("no points found")]
    NoPoints,
}

fn parse_err(line: usize, message: impl Into<String>) -> MeshIoError {
    MeshIoError::Parse {
        line,
        message: message.into(),
    }
}

/// Reads `v` and `f` records. Polygons are fan-triangulated; texture and
/// normal references (`f 1/2/3`) and negative indices are accepted, all
/// other record types are ignored.
pub fn read_obj<R: Read>(reader: R) -> Result<TriMesh, MeshIoError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (n, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = n + 1;
        let mut fields = line.split_whitespace();
        match fields.next() {
            Some("v") => {
                let mut xyz = [0.0; 3];
                for c in &mut xyz {
                    let tok = fields
                        .next()
                        .ok_or_else(|| parse_err(lineno, "vertex needs three coordinates"))?;
                    *c = tok
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("bad coordinate {tok:?}")))?;
                }
                vertices.push(Point::new(xyz[0], xyz[1], xyz[2]));
            }
            Some("f") => {
                let idx: Vec<usize> = fields
                    .map(|tok| resolve_index(tok, vertices.len(), lineno))
                    .collect::<Result<_, _>>()?;
                if idx.len() < 3 {
                    return Err(parse_err(lineno, "face needs at least three vertices"));
                }
                for k in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    if faces.is_empty() {
        return Err(MeshIoError::NoFaces);
    }
    Ok(TriMesh { vertices, faces })
}

fn resolve_index(tok: &str, count: usize, line: usize) -> Result<usize, MeshIoError> {
    let head = tok.split('/').next().unwrap_or_default();
    let raw: i64 = head
        .parse()
        .map_err(|_| parse_err(line, format!("bad face index {tok:?}")))?;
    let resolved = match raw {
        0 => return Err(parse_err(line, "face index 0 is invalid (indices are 1-based)")),
        r if r > 0 => r - 1,
        r => count as i64 + r,
    };
    if resolved < 0 || resolved as usize >= count {
        return Err(parse_err(line, format!("face index {raw} out of range")));
    }
    Ok(resolved as usize)
}

pub fn write_obj<W: Write>(mesh: &TriMesh, writer: W) -> io::Result<()> {
    let mut w = BufWriter::new(writer);
    for v in &mesh.vertices {
        writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
    }
    for [a, b, c] in &mesh.faces {
        writeln!(w, "f {} {} {}", a + 1, b + 1, c + 1)?;
    }
    w.flush()
}

pub fn load_obj(path: impl AsRef<Path>) -> Result<TriMesh, MeshIoError> {
    read_obj(File::open(path)?)
}

pub fn save_obj(mesh: &TriMesh, path: impl AsRef<Path>) -> io::Result<()> {
    write_obj(mesh, File::create(path)?)
}

/// One `x y z` triple per line; blank lines and `#` comments are skipped.
pub fn read_xyz<R: Read>(reader: R) -> Result<PointCloud, MeshIoError> {
    let mut points = Vec::new();
    for (n, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let coords: Vec<f64> = trimmed
            .split_whitespace()
            .take(3)
            .map(|t| t.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| parse_err(n + 1, e.to_string()))?;
        if coords.len() != 3 {
            return Err(parse_err(n + 1, "expected three coordinates"));
        }
        points.push(Point::new(coords[0], coords[1], coords[2]));
    }
    if points.is_empty() {
        return Err(MeshIoError::NoPoints);
    }
    PointCloud::new(points).map_err(|e| parse_err(0, e.to_string()))
}

pub fn write_xyz<W: Write>(cloud: &PointCloud, writer: W) -> io::Result<()> {
    let mut w = BufWriter::new(writer);
    for p in cloud.points() {
        writeln!(w, "{} {} {}", p.x, p.y, p.z)?;
    }
    w.flush()
}

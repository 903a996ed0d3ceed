use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, ErrorKind, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{io_error, OrchestratorError, RunConfig};
use crate::geometry::io::write_obj;
use crate::geometry::TriMesh;

pub const CONFIG_FILE: &str = "config.toml";
pub const RECORDS_FILE: &str = "records.jsonl";
pub const GENERATIONS_FILE: &str = "generations.jsonl";
pub const RUNLOG_FILE: &str = "runlog.json";
pub const BASELINE_FILE: &str = "baseline.json";
pub const SIMILARITY_FILE: &str = "similarity.jsonl";
const MESH_DIR: &str = "meshes";

/// One directory per run: `<output_dir>/<kind>-s<seed>-<NNN>`, numbered
/// with the first free counter.
#[derive(Debug)]
pub struct RunDir {
    path: PathBuf,
    mesh_budget: u64,
    mesh_bytes: u64,
}

impl RunDir {
    pub fn create(output_dir: &Path, kind: &str, seed: u64) -> Result<Self, OrchestratorError> {
        fs::create_dir_all(output_dir).map_err(|e| io_error(output_dir, e))?;
        for n in 1.. {
            let path = output_dir.join(format!("{kind}-s{seed}-{n:03}"));
            match fs::create_dir(&path) {
                Ok(()) => return Ok(Self::open(path)),
                Err(e) if e.kind() == ErrorKind::AlreadyExists => continue,
                Err(e) => return Err(io_error(&path, e)),
            }
        }
        unreachable!()
    }

    pub fn open(path: PathBuf) -> Self {
        Self {
            path,
            mesh_budget: 0,
            mesh_bytes: 0,
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn write_config(&self, config: &RunConfig) -> Result<(), OrchestratorError> {
        self.write_text(CONFIG_FILE, &config.to_toml())
    }

    pub fn write_text(&self, name: &str, text: &str) -> Result<(), OrchestratorError> {
        let path = self.path.join(name);
        fs::write(&path, text).map_err(|e| io_error(&path, e))
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<(), OrchestratorError> {
        let text = serde_json::to_string_pretty(value).expect("artifact serializes");
        self.write_text(name, &(text + "\n"))
    }

    /// Appends one JSON line per item.
    pub fn append_jsonl<'a, T: Serialize + 'a>(
        &self,
        name: &str,
        items: impl IntoIterator<Item = &'a T>,
    ) -> Result<(), OrchestratorError> {
        let path = self.path.join(name);
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| io_error(&path, e))?;
        let mut w = BufWriter::new(file);
        for item in items {
            serde_json::to_writer(&mut w, item).expect("record serializes");
            w.write_all(b"\n").map_err(|e| io_error(&path, e))?;
        }
        w.flush().map_err(|e| io_error(&path, e))
    }

    pub fn set_mesh_budget(&mut self, bytes: u64) {
        self.mesh_budget = bytes;
    }

    /// Writes `meshes/<name>.obj` unless the mesh budget is used up.
    /// Returns whether the file was written.
    pub fn save_mesh(&mut self, name: &str, mesh: &TriMesh) -> Result<bool, OrchestratorError> {
        let mut buf = Vec::new();
        write_obj(mesh, &mut buf).expect("writing to memory");
        if self.mesh_bytes + buf.len() as u64 > self.mesh_budget {
            return Ok(false);
        }
        let dir = self.path.join(MESH_DIR);
        fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
        let path = dir.join(format!("{name}.obj"));
        File::create(&path)
            .and_then(|mut f| f.write_all(&buf))
            .map_err(|e| io_error(&path, e))?;
        self.mesh_bytes += buf.len() as u64;
        Ok(true)
    }
}

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

use super::analysis::SimilarityRow;
use super::artifacts::{GENERATIONS_FILE, RECORDS_FILE, SIMILARITY_FILE};
use super::pipeline::{DesignRecord, DesignStatus};
use super::run::GenerationStats;
use super::{io_error, OrchestratorError};

pub const GENERATIONS_CSV: &str = "generations.csv";
pub const GENOME_CSV: &str = "genome_stats.csv";
pub const DESIGNS_CSV: &str = "designs.csv";
pub const SIMILARITY_CSV: &str = "similarity.csv";

#[derive(Serialize)]
struct GenerationRow {
    generation: usize,
    evaluations: usize,
    failures: usize,
    mean_cd_n: f64,
    ci95_cd_n: f64,
    min_cd_n: f64,
    population_best: f64,
    global_best: f64,
    sigma: f64,
    mean_adjective_similarity: Option<f64>,
    mean_noun_similarity: Option<f64>,
}

#[derive(Serialize)]
struct GenomeRow {
    generation: usize,
    dimension: usize,
    mean: f64,
    variance: f64,
}

#[derive(Serialize)]
struct DesignRow<'a> {
    generation: usize,
    index: usize,
    status: DesignStatus,
    prompt: &'a str,
    frontal_area: Option<f64>,
    cd: Option<f64>,
    cd_n: f64,
}

/// Writes plot-ready CSV files next to the run's JSON-lines logs and
/// returns their paths. Each CSV is produced only when its source log
/// exists.
pub fn export_report(run_dir: &Path) -> Result<Vec<PathBuf>, OrchestratorError> {
    if !run_dir.is_dir() {
        return Err(OrchestratorError::Report(format!("{} is not a run directory", run_dir.display())));
    }
    let mut written = Vec::new();

    if let Some(stats) = read_jsonl::<GenerationStats>(&run_dir.join(GENERATIONS_FILE))? {
        let rows = stats.iter().map(|s| GenerationRow {
            generation: s.generation,
            evaluations: s.evaluations,
            failures: s.failures,
            mean_cd_n: s.mean_cd_n,
            ci95_cd_n: s.ci95_cd_n,
            min_cd_n: s.min_cd_n,
            population_best: s.population_best,
            global_best: s.global_best,
            sigma: s.sigma,
            mean_adjective_similarity: s.mean_adjective_similarity,
            mean_noun_similarity: s.mean_noun_similarity,
        });
        written.push(write_csv(&run_dir.join(GENERATIONS_CSV), rows)?);
        let genome = stats.iter().flat_map(|s| {
            s.genome_mean
                .iter()
                .zip(&s.genome_variance)
                .enumerate()
                .map(|(d, (&mean, &variance))| GenomeRow {
                    generation: s.generation,
                    dimension: d,
                    mean,
                    variance,
                })
        });
        written.push(write_csv(&run_dir.join(GENOME_CSV), genome)?);
    }

    if let Some(records) = read_jsonl::<DesignRecord>(&run_dir.join(RECORDS_FILE))? {
        let rows = records.iter().map(|r| DesignRow {
            generation: r.generation,
            index: r.index,
            status: r.status,
            prompt: &r.prompt,
            frontal_area: r.result.as_ref().map(|x| x.frontal_area),
            cd: r.result.as_ref().map(|x| x.cd),
            cd_n: r.fitness,
        });
        written.push(write_csv(&run_dir.join(DESIGNS_CSV), rows)?);
    }

    if let Some(rows) = read_jsonl::<SimilarityRow>(&run_dir.join(SIMILARITY_FILE))? {
        written.push(write_csv(&run_dir.join(SIMILARITY_CSV), rows)?);
    }

    if written.is_empty() {
        return Err(OrchestratorError::Report(format!("no run logs found in {}", run_dir.display())));
    }
    Ok(written)
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Option<Vec<T>>, OrchestratorError> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(io_error(path, e)),
    };
    let mut items = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_error(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        items.push(
            serde_json::from_str(&line)
                .map_err(|e| OrchestratorError::Report(format!("{}:{}: {e}", path.display(), n + 1)))?,
        );
    }
    Ok(Some(items))
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<PathBuf, OrchestratorError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| OrchestratorError::Report(format!("{}: {e}", path.display())))?;
    for row in rows {
        w.serialize(row)
            .map_err(|e| OrchestratorError::Report(format!("{}: {e}", path.display())))?;
    }
    w.flush().map_err(|e| io_error(path, e))?;
    Ok(path.to_path_buf())
}

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::artifacts::{RunDir, BASELINE_FILE, RECORDS_FILE, SIMILARITY_FILE};
use super::pipeline::{evaluate_all, DesignRecord, DesignStatus};
use super::{Backends, BaselineSource, OrchestratorError, RunConfig};
use crate::evaluator::{compute_baseline, BaselineStats};
use crate::geometry::{chamfer_distance, sample_surface, PointCloud, TriMesh};
use crate::lexicon::{PartOfSpeech, Taxonomy};

#[derive(Clone, Debug)]
pub struct ReferenceSet {
    pub stats: BaselineStats,
    pub records: Vec<DesignRecord>,
}

/// Generates and evaluates `n` designs from one prompt, with generator
/// seeds `seed, seed + 1, ...`. Failed designs are recorded but left out
/// of the statistics. Records carry the design's drag normalized by the
/// resulting span as their fitness.
pub fn compute_reference_set(
    prompt: &str,
    n: usize,
    config: &RunConfig,
    backends: &Backends,
    out: Option<&RunDir>,
) -> Result<ReferenceSet, OrchestratorError> {
    let jobs: Vec<(String, u64)> = (0..n)
        .map(|i| (prompt.to_owned(), config.generator.seed.wrapping_add(i as u64)))
        .collect();
    let outcomes = evaluate_all(backends, &jobs, config.run.workers)?;
    let results: Vec<_> = outcomes.iter().filter_map(|o| o.result.clone()).collect();
    let stats = compute_baseline(&results)?;

    let records: Vec<DesignRecord> = outcomes
        .into_iter()
        .zip(&jobs)
        .enumerate()
        .map(|(index, (outcome, (prompt, seed)))| {
            let mut result = outcome.result;
            let fitness = match result.as_mut() {
                Some(r) => {
                    let cd_n = stats.normalize(r.cd).expect("span checked by compute_baseline");
                    r.cd_normalized = Some(cd_n);
                    cd_n
                }
                None => stats.penalty_normalized().expect("span checked by compute_baseline"),
            };
            DesignRecord {
                generation: 0,
                index,
                genome: Vec::new(),
                prompt: prompt.clone(),
                seed: *seed,
                adjective: None,
                noun: None,
                tokens: None,
                status: outcome.status,
                result,
                fitness,
                message: outcome.message,
            }
        })
        .collect();
    if let Some(dir) = out {
        dir.append_jsonl(RECORDS_FILE, &records)?;
        stats.save(dir.path().join(BASELINE_FILE))?;
    }
    Ok(ReferenceSet { stats, records })
}

/// Baseline stats for normalization, computed or loaded as configured.
pub fn prepare_baseline(config: &RunConfig, backends: &Backends) -> Result<BaselineStats, OrchestratorError> {
    match config.baseline.source {
        BaselineSource::Compute => {
            Ok(compute_reference_set(&config.baseline.prompt, config.baseline.count, config, backends, None)?.stats)
        }
        BaselineSource::File => {
            let path = config.baseline.path.as_ref().expect("validated");
            Ok(BaselineStats::load(path)?)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityRow {
    pub word: String,
    pub pos: PartOfSpeech,
    /// Wu–Palmer similarity to the reference word.
    pub wup: f64,
    /// Chamfer distance between the word's design and the reference design;
    /// absent when the word's design could not be generated.
    pub chamfer: Option<f64>,
    pub status: DesignStatus,
}

/// Samples up to `word_count` words from the taxonomy (the reference is
/// always included) and compares each word's similarity to the reference
/// with the Chamfer distance between the designs generated from the bare
/// word and from the bare reference. Rows are sorted by word.
pub fn similarity_sweep(
    word_count: usize,
    reference: &str,
    config: &RunConfig,
    backends: &Backends,
    out: Option<&RunDir>,
) -> Result<Vec<SimilarityRow>, OrchestratorError> {
    let taxonomy = match &config.bow.taxonomy {
        Some(path) => Taxonomy::load(path)?,
        None => Taxonomy::bundled(),
    };
    taxonomy.lemma(reference)?;
    let pool: Vec<&str> = [PartOfSpeech::Adjective, PartOfSpeech::Noun]
        .into_iter()
        .flat_map(|pos| taxonomy.words(pos))
        .filter(|w| *w != reference)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let take = word_count.saturating_sub(1).min(pool.len());
    let mut words: Vec<&str> = index::sample(&mut rng, pool.len(), take).into_iter().map(|i| pool[i]).collect();
    words.push(reference);
    words.sort_unstable();

    let seed = config.generator.seed;
    let mut jobs = vec![(reference.to_owned(), seed)];
    jobs.extend(words.iter().map(|w| (w.to_string(), seed)));
    let outcomes = evaluate_all(backends, &jobs, config.run.workers)?;
    let cloud = |mesh: &TriMesh| sample_surface(mesh, config.similarity.points, config.seed);
    let reference_cloud: PointCloud = outcomes[0]
        .mesh
        .as_ref()
        .ok_or_else(|| {
            OrchestratorError::Report(format!(
                "reference prompt {reference:?} failed: {}",
                outcomes[0].message.as_deref().unwrap_or("no mesh")
            ))
        })
        .and_then(|m| cloud(m).map_err(|e| OrchestratorError::Report(e.to_string())))?;

    let mut rows = Vec::with_capacity(words.len());
    for (word, outcome) in words.iter().zip(&outcomes[1..]) {
        let chamfer = outcome
            .mesh
            .as_ref()
            .and_then(|m| cloud(m).ok())
            .map(|c| chamfer_distance(&c, &reference_cloud));
        let status = match (&chamfer, outcome.status) {
            (None, DesignStatus::Ok) => DesignStatus::GenerationFailed,
            (_, s) => s,
        };
        rows.push(SimilarityRow {
            word: word.to_string(),
            pos: taxonomy.lemma(word)?.pos,
            wup: taxonomy.wup_similarity(word, reference)?,
            chamfer,
            status,
        });
    }
    if let Some(dir) = out {
        dir.append_jsonl(SIMILARITY_FILE, &rows)?;
    }
    Ok(rows)
}

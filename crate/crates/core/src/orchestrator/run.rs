use serde::{Deserialize, Serialize};

use super::artifacts::{RunDir, GENERATIONS_FILE, RECORDS_FILE, RUNLOG_FILE};
use super::pipeline::{evaluate_all, DesignRecord, DesignStatus};
use super::{Backends, Codec, OrchestratorError, RunConfig};
use crate::cmaes::{CmaState, EvaluatedCandidate, Strategy, TerminationReason};
use crate::evaluator::BaselineStats;
use crate::lexicon::WordSet;

/// Aggregates over the λ designs of one generation. Failed designs enter
/// with their penalty fitness.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    /// Designs evaluated so far, this generation included.
    pub evaluations: usize,
    pub failures: usize,
    pub mean_cd_n: f64,
    /// Normal-approximation half-width, `1.96 * sd / sqrt(λ)`.
    pub ci95_cd_n: f64,
    pub min_cd_n: f64,
    /// Best fitness among the parents selected for the next generation.
    /// Never increases under plus selection.
    pub population_best: f64,
    /// Running minimum over every design so far.
    pub global_best: f64,
    /// Step size after this generation's update.
    pub sigma: f64,
    pub genome_mean: Vec<f64>,
    /// Population variance per dimension.
    pub genome_variance: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_adjective_similarity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_noun_similarity: Option<f64>,
}

impl GenerationStats {
    /// Recomputes the per-population aggregates from a generation's records.
    pub fn from_records(records: &[DesignRecord]) -> Self {
        let n = records.len() as f64;
        let fitness: Vec<f64> = records.iter().map(|r| r.fitness).collect();
        let mean = fitness.iter().sum::<f64>() / n;
        let var = if records.len() > 1 {
            fitness.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0)
        } else {
            0.0
        };
        let dim = records.first().map_or(0, |r| r.genome.len());
        let genome_mean: Vec<f64> = (0..dim)
            .map(|d| records.iter().map(|r| r.genome[d]).sum::<f64>() / n)
            .collect();
        let genome_variance = (0..dim)
            .map(|d| records.iter().map(|r| (r.genome[d] - genome_mean[d]).powi(2)).sum::<f64>() / n)
            .collect();
        let mean_of = |f: fn(&DesignRecord) -> Option<f64>| -> Option<f64> {
            let vals: Option<Vec<f64>> = records.iter().map(f).collect();
            vals.map(|v| v.iter().sum::<f64>() / n)
        };
        Self {
            generation: records.first().map_or(0, |r| r.generation),
            evaluations: 0,
            failures: records.iter().filter(|r| r.status != DesignStatus::Ok).count(),
            mean_cd_n: mean,
            ci95_cd_n: 1.96 * var.sqrt() / n.sqrt(),
            min_cd_n: fitness.iter().copied().fold(f64::INFINITY, f64::min),
            population_best: f64::NAN,
            global_best: f64::NAN,
            sigma: f64::NAN,
            genome_mean,
            genome_variance,
            mean_adjective_similarity: mean_of(|r| r.adjective.as_ref().map(|w| w.similarity)),
            mean_noun_similarity: mean_of(|r| r.noun.as_ref().map(|w| w.similarity)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub config: RunConfig,
    pub generator_id: String,
    pub evaluator_id: String,
    pub baseline: BaselineStats,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word_set: Option<WordSet>,
    pub generations: Vec<GenerationStats>,
    pub best: Option<DesignRecord>,
    pub termination: TerminationReason,
    pub final_mean: Vec<f64>,
    pub final_sigma: f64,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub log: RunLog,
    pub records: Vec<DesignRecord>,
}

/// Runs CMA-ES until it converges or hits the generation limit. When `out`
/// is given, the config snapshot, every record, the per-generation stats
/// and the final log are written there as the run progresses.
pub fn run_optimization(
    config: &RunConfig,
    backends: &Backends,
    baseline: &BaselineStats,
    mut out: Option<&mut RunDir>,
) -> Result<RunOutcome, OrchestratorError> {
    config.validate()?;
    let codec = Codec::from_config(config)?;
    let penalty = baseline.penalty_normalized().map_err(|e| OrchestratorError::Config(format!("baseline: {e}")))?;
    let mut state = CmaState::init(config.cma_config(), &codec.initial_mean(config))?;

    if let Some(dir) = out.as_deref_mut() {
        dir.write_config(config)?;
        dir.set_mesh_budget(if config.run.save_meshes { config.run.mesh_budget_bytes } else { 0 });
    }

    let mut records = Vec::new();
    let mut generations = Vec::new();
    let mut best: Option<DesignRecord> = None;
    let termination = loop {
        if let Some(reason) = state.has_converged() {
            break reason;
        }
        let generation = state.generation();
        let genomes = state.ask()?;
        let decoded: Vec<_> = genomes.iter().map(|g| codec.decode(g)).collect();
        let jobs: Vec<(String, u64)> = decoded
            .iter()
            .enumerate()
            .map(|(i, d)| (d.prompt.clone(), candidate_seed(config, i)))
            .collect();
        let outcomes = evaluate_all(backends, &jobs, config.run.workers)?;

        let mut batch = Vec::with_capacity(outcomes.len());
        for (index, ((genome, decoded), outcome)) in genomes.into_iter().zip(decoded).zip(outcomes).enumerate() {
            let mut result = outcome.result;
            let fitness = match result.as_mut() {
                Some(r) => {
                    let cd_n = baseline
                        .normalize(r.cd)
                        .map_err(|e| OrchestratorError::Config(format!("baseline: {e}")))?;
                    r.cd_normalized = Some(cd_n);
                    cd_n
                }
                None => penalty,
            };
            if let (Some(dir), Some(mesh)) = (out.as_deref_mut(), outcome.mesh.as_ref()) {
                dir.save_mesh(&format!("g{generation:03}-c{index:02}"), mesh)?;
            }
            batch.push(DesignRecord {
                generation,
                index,
                genome,
                prompt: decoded.prompt,
                seed: jobs[index].1,
                adjective: decoded.adjective,
                noun: decoded.noun,
                tokens: decoded.tokens,
                status: outcome.status,
                result,
                fitness,
                message: outcome.message,
            });
        }

        let mut pool: Vec<EvaluatedCandidate> = batch
            .iter()
            .map(|r| EvaluatedCandidate::offspring(r.genome.clone(), r.fitness))
            .collect();
        if config.cma.strategy == Strategy::Plus {
            pool.extend(state.survivors().iter().cloned());
        }
        let selection = state.tell(&pool)?;

        for r in &batch {
            if best.as_ref().is_none_or(|b| r.fitness < b.fitness) {
                best = Some(r.clone());
            }
        }
        let mut stats = GenerationStats::from_records(&batch);
        stats.evaluations = state.evaluations();
        stats.population_best = pool[selection.indices[0]].fitness;
        stats.global_best = best.as_ref().map_or(f64::NAN, |b| b.fitness);
        stats.sigma = state.sigma();

        if let Some(dir) = out.as_deref_mut() {
            dir.append_jsonl(RECORDS_FILE, &batch)?;
            dir.append_jsonl(GENERATIONS_FILE, [&stats])?;
        }
        records.extend(batch);
        generations.push(stats);
    };

    let log = RunLog {
        config: config.clone(),
        generator_id: backends.generator.id().to_owned(),
        evaluator_id: backends.evaluator.id().to_owned(),
        baseline: baseline.clone(),
        word_set: codec.word_set().cloned(),
        generations,
        best,
        termination,
        final_mean: state.mean().to_vec(),
        final_sigma: state.sigma(),
    };
    if let Some(dir) = out {
        dir.write_json(RUNLOG_FILE, &log)?;
    }
    Ok(RunOutcome { log, records })
}

fn candidate_seed(config: &RunConfig, index: usize) -> u64 {
    if config.generator.seed_per_candidate {
        config.generator.seed.wrapping_add(index as u64)
    } else {
        config.generator.seed
    }
}

//! `promptevo`: baselines, optimization runs, similarity sweeps and report
//! export.
//!
//! Exit status is 0 on success, 1 for configuration problems (including
//! bad command lines) and 2 for failures while running.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use promptevo::cmaes::Strategy;
use promptevo::orchestrator::{
    compute_reference_set, export_report, prepare_baseline, run_optimization, similarity_sweep, Backends,
    BaselineSource, OrchestratorError, Representation, RunConfig, RunDir, BASELINE_FILE, SIMILARITY_CSV,
};

/// Overrides the scratch directory used by external backends.
const SCRATCH_ENV: &str = "PROMPTEVO_SCRATCH";

#[derive(Parser)]
#[command(name = "promptevo", version, about = "Evolutionary shape optimization over text prompts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate and evaluate the reference set that defines the drag span.
    Baseline {
        #[command(flatten)]
        common: Common,
        /// Prompt for every reference design.
        #[arg(long)]
        prompt: Option<String>,
        /// Number of reference designs.
        #[arg(long)]
        count: Option<usize>,
    },
    /// Run CMA-ES over prompt encodings.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_strategy)]
        strategy: Option<Strategy>,
        #[arg(long, value_parser = parse_representation)]
        representation: Option<Representation>,
        #[arg(long)]
        generations: Option<usize>,
        /// Use stats from an earlier baseline run instead of computing them.
        #[arg(long)]
        baseline: Option<PathBuf>,
    },
    /// Compare taxonomy similarity with shape distance for sampled words.
    Similarity {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        words: Option<usize>,
        #[arg(long)]
        reference: Option<String>,
    },
    /// Export CSV series from a finished run directory.
    Report {
        #[arg(long)]
        run: PathBuf,
    },
    /// Print the default configuration.
    Config,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Parent directory for the run directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    match s {
        "comma" => Ok(Strategy::Comma),
        "plus" => Ok(Strategy::Plus),
        _ => Err(format!("expected comma or plus, got {s:?}")),
    }
}

fn parse_representation(s: &str) -> Result<Representation, String> {
    match s {
        "bow" => Ok(Representation::Bow),
        "token" => Ok(Representation::Token),
        _ => Err(format!("expected bow or token, got {s:?}")),
    }
}

/// Error split by exit status.
enum Failure {
    Config(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<OrchestratorError> for Failure {
    fn from(e: OrchestratorError) -> Self {
        if e.is_config_error() {
            Failure::Config(e.into())
        } else {
            Failure::Runtime(e.into())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig, Failure> {
    let mut config = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    if let Some(out) = &common.out {
        config.output_dir = out.clone();
    }
    if let Some(dir) = std::env::var_os(SCRATCH_ENV) {
        config.run.scratch_dir = Some(PathBuf::from(dir));
    }
    Ok(config)
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Baseline { common, prompt, count } => {
            let mut config = load_config(&common)?;
            if let Some(p) = prompt {
                config.baseline.prompt = p;
            }
            if let Some(n) = count {
                config.baseline.count = n;
            }
            config.validate()?;
            let backends = Backends::from_config(&config)?;
            let dir = RunDir::create(&config.output_dir, "baseline", config.seed)?;
            dir.write_config(&config)?;
            let set = compute_reference_set(&config.baseline.prompt, config.baseline.count, &config, &backends, Some(&dir))?;
            eprintln!(
                "{} designs: cd {:.4}..{:.4}, mean {:.4} ± {:.4}, r² {:.4}",
                set.stats.count,
                set.stats.cd_min,
                set.stats.cd_max,
                set.stats.cd_mean,
                set.stats.ci95_halfwidth,
                set.stats.r_squared
            );
            println!("{}", dir.path().display());
        }
        Command::Optimize {
            common,
            strategy,
            representation,
            generations,
            baseline,
        } => {
            let mut config = load_config(&common)?;
            if let Some(s) = strategy {
                config.cma.strategy = s;
            }
            if let Some(r) = representation {
                config.representation = r;
            }
            if let Some(g) = generations {
                config.cma.max_generations = g;
            }
            if let Some(path) = baseline {
                config.baseline.source = BaselineSource::File;
                config.baseline.path = Some(baseline_file(&path));
            }
            config.validate()?;
            let backends = Backends::from_config(&config)?;
            let stats = prepare_baseline(&config, &backends)?;
            let mut dir = RunDir::create(&config.output_dir, "optimize", config.seed)?;
            stats
                .save(dir.path().join(BASELINE_FILE))
                .map_err(|e| Failure::Runtime(e.into()))?;
            let outcome = run_optimization(&config, &backends, &stats, Some(&mut dir))?;
            if let Some(best) = &outcome.log.best {
                eprintln!(
                    "{} generations ({}), best cd_N {:.4}: {:?}",
                    outcome.log.generations.len(),
                    outcome.log.termination,
                    best.fitness,
                    best.prompt
                );
            }
            println!("{}", dir.path().display());
        }
        Command::Similarity {
            common,
            words,
            reference,
        } => {
            let mut config = load_config(&common)?;
            if let Some(n) = words {
                config.similarity.word_count = n;
            }
            if let Some(r) = reference {
                config.similarity.reference = r;
            }
            config.validate()?;
            let backends = Backends::from_config(&config)?;
            let dir = RunDir::create(&config.output_dir, "similarity", config.seed)?;
            dir.write_config(&config)?;
            let rows = similarity_sweep(
                config.similarity.word_count,
                &config.similarity.reference,
                &config,
                &backends,
                Some(&dir),
            )?;
            export_report(dir.path())?;
            eprintln!("{} words written to {SIMILARITY_CSV}", rows.len());
            println!("{}", dir.path().display());
        }
        Command::Report { run } => {
            let files = export_report(&run).map_err(|e| Failure::Runtime(e.into()))?;
            for f in &files {
                eprintln!("wrote {}", f.display());
            }
            println!("{}", run.display());
        }
        Command::Config => {
            print!("{}", RunConfig::default().to_toml());
        }
    }
    Ok(())
}

/// Accepts either a stats file or a baseline run directory.
fn baseline_file(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join(BASELINE_FILE)
    } else {
        path.to_path_buf()
    }
}

//! Bag-of-words optimization with the synthetic generator and the drag
//! proxy, printing one line per generation.
//!
//!     cargo run --release -p promptevo-core --example optimize_bow -- [seed] [generations]

use promptevo::cmaes::Strategy;
use promptevo::orchestrator::{prepare_baseline, run_optimization, Backends, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let mut config = RunConfig::default();
    config.seed = args.next().map_or(Ok(7), |s| s.parse())?;
    config.cma.max_generations = args.next().map_or(Ok(30), |s| s.parse())?;
    config.cma.strategy = Strategy::Plus;

    let backends = Backends::from_config(&config)?;
    let baseline = prepare_baseline(&config, &backends)?;
    println!(
        "baseline: span {:.5}  mean {:.5}  r2 {:.4}",
        baseline.span(),
        baseline.cd_mean,
        baseline.r_squared
    );
    let outcome = run_optimization(&config, &backends, &baseline, None)?;
    println!("gen  mean_cd_n  min_cd_n  pop_best  sigma");
    for g in &outcome.log.generations {
        println!(
            "{:<4} {:<10.4} {:<9.4} {:<9.4} {:.4}",
            g.generation, g.mean_cd_n, g.min_cd_n, g.population_best, g.sigma
        );
    }
    if let Some(best) = &outcome.log.best {
        let first = &outcome.log.generations[0];
        println!(
            "best {:.4} ({:?}), gen-0 mean {:.4}, ratio {:.4}",
            best.fitness,
            best.prompt,
            first.mean_cd_n,
            best.fitness / first.mean_cd_n
        );
    }
    Ok(())
}

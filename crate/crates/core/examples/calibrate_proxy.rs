//! Sweeps the proxy noise level and prints the frontal-area/drag R² of the
//! 300-design "A car" reference set for each value.
//!
//!     cargo run --release -p promptevo-core --example calibrate_proxy

use promptevo::evaluator::{compute_baseline, DragEvaluator, ProxyCoefficients, ProxyEvaluator};
use promptevo::genbridge::{GenerationRequest, ShapeGenerator, SyntheticGenerator};
use promptevo::geometry::DEFAULT_GRID_RESOLUTION;

fn main() {
    let generator = SyntheticGenerator::default();
    let meshes: Vec<_> = (0..300u64)
        .map(|seed| {
            let mesh = generator
                .generate(&GenerationRequest::new("A car", seed))
                .expect("synthetic generation")
                .meshes
                .remove(0);
            mesh.validate().and_then(|m| m.align_to_axes()).expect("valid mesh")
        })
        .collect();

    println!("noise_sigma  r_squared  cd_min   cd_max   span");
    for sigma in [0.0, 0.004, 0.006, 0.0065, 0.0068, 0.007, 0.008, 0.010, 0.015] {
        let proxy = ProxyEvaluator::new(
            ProxyCoefficients {
                noise_sigma: sigma,
                ..Default::default()
            },
            DEFAULT_GRID_RESOLUTION,
        )
        .expect("coefficients");
        let results: Vec<_> = meshes.iter().map(|m| proxy.evaluate(m).expect("evaluation")).collect();
        let stats = compute_baseline(&results).expect("baseline");
        println!(
            "{sigma:<12.4} {:<10.4} {:<8.4} {:<8.4} {:.4}",
            stats.r_squared,
            stats.cd_min,
            stats.cd_max,
            stats.span()
        );
    }
}

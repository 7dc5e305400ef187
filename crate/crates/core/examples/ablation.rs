//! Fixed, linearly decaying, and estimated thresholds compared on one
//! dataset, with per-cell outputs and a summary table on disk.
//!
//!     cargo run --release --example ablation [output_dir]

use satl::data::GeneratorConfig;
use satl::experiment::{ablation_arms, run_experiment, ExperimentSpec};
use satl::TrainConfig;

fn main() -> satl::Result<()> {
    let output_dir = std::env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| std::env::temp_dir().join("satl-ablation"));
    let spec = ExperimentSpec {
        name: "ablation".into(),
        generator: GeneratorConfig::uniform(5000, 20, 64, 14.0, 0.1, 7).long_tail(0.45),
        known_proportions: vec![0.1, 0.2, 0.5],
        arms: ablation_arms(&TrainConfig::default()),
        repeats: 2,
        output_dir,
        base_seed: 0,
        workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        gamma_from_proportion: true,
    };
    let outcome = run_experiment(&spec)?;
    print!("{}", outcome.summary);
    println!(
        "{} of {} cells finished; manifest at {}",
        outcome.manifest.completed,
        outcome.manifest.cells,
        spec.output_dir.join("manifest.json").display()
    );
    Ok(())
}

//! Pseudo-label precision and recall against the EMA momentum and the
//! positive-side quantile level.
//!
//!     cargo run --release --example sweeps

use satl::data::GeneratorConfig;
use satl::experiment::{sweep_csv, sweep_gamma, sweep_kappa, SweepBase};
use satl::metrics::spearman;
use satl::threshold::SateConfig;
use satl::TrainConfig;

fn main() -> satl::Result<()> {
    let base = SweepBase {
        generator: GeneratorConfig::uniform(5000, 20, 64, 12.0, 0.1, 7),
        known_proportion: 0.2,
        train: TrainConfig {
            lr_stage1: 0.1,
            lr_stage2: 0.1,
            ..TrainConfig::for_known_proportion(0.2)
        },
        repeats: 2,
        base_seed: 1,
        workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let gammas = [0.1, 0.3, 0.5, 0.7, 0.9];
    let rows = sweep_gamma(&base, &gammas)?;
    print!("{}", sweep_csv(&rows));
    let recall: Vec<f64> = rows.iter().map(|r| r.recall.unwrap_or(0.0)).collect();
    println!("spearman(gamma, recall) = {:?}\n", spearman(&gammas, &recall));

    let kappa_base = SweepBase {
        generator: GeneratorConfig::uniform(5000, 20, 64, 14.0, 0.1, 7).long_tail(0.45),
        train: TrainConfig {
            sate: SateConfig {
                kappa_pos: 0.999,
                kappa_neg: 0.1,
                ..SateConfig::for_known_proportion(0.2)
            },
            ..TrainConfig::default()
        },
        repeats: 1,
        ..base
    };
    print!("{}", sweep_csv(&sweep_kappa(&kappa_base, &[0.999, 0.8, 0.6, 0.5], &[])?));
    Ok(())
}

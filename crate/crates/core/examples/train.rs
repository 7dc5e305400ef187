//! One two-stage run with per-epoch reporting, then a checkpoint round trip.
//!
//!     cargo run --release --example train

use satl::data::{generate, mask_labels, GeneratorConfig};
use satl::io::Checkpoint;
use satl::{train, TrainConfig};

fn main() -> satl::Result<()> {
    let dataset = generate(&GeneratorConfig::uniform(3000, 10, 32, 10.0, 0.1, 5).long_tail(0.45))?;
    let rho = 0.2;
    let masked = mask_labels(&dataset.full_labels, rho, 6)?;
    let config = TrainConfig::for_known_proportion(rho);
    let run = train(&dataset, &masked, &config)?;

    println!("epoch stage    loss     mAP  recalled  pl_prec  pl_rec  mean_tau");
    for r in &run.records {
        let mean_tau = r.thresholds.iter().sum::<f64>() / r.thresholds.len() as f64;
        println!(
            "{:>5} {:>5} {:>7.1} {:>7.4} {:>9} {:>8} {:>7} {:>9.4}",
            r.epoch,
            r.stage,
            r.losses.total,
            r.eval.map.unwrap_or(f64::NAN),
            r.recalled(),
            r.pseudo.mean_precision.map_or("-".into(), |p| format!("{p:.3}")),
            r.pseudo.mean_recall_all.map_or("-".into(), |p| format!("{p:.3}")),
            mean_tau
        );
    }
    if let Some(best) = run.best_stage2_epoch() {
        println!("best stage-2 epoch: {} (mAP {:.4})", best.epoch, best.eval.map.unwrap_or(f64::NAN));
    }

    let dir = std::env::temp_dir().join("satl-train-example");
    let path = dir.join("checkpoint.json");
    Checkpoint::from_run(&run).save(&path)?;
    let restored = Checkpoint::load(&path)?;
    assert_eq!(restored.model, run.model);
    println!("checkpoint written to {}", path.display());
    Ok(())
}

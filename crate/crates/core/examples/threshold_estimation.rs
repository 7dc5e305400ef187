//! Boundary quantiles, the ideal threshold, and the EMA that tracks it.
//!
//!     cargo run --example threshold_estimation

use satl::distribution::ClassDistribution;
use satl::threshold::{boundary_thresholds, SateConfig, ThresholdState};

fn spread(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect()
}

fn main() -> satl::Result<()> {
    let config = SateConfig::default();

    // Well separated: the positive boundary decides.
    let separated = ClassDistribution {
        category: 0,
        positive_scores: spread(0.7, 1.0, 10_000),
        negative_scores: spread(0.0, 0.3, 10_000),
    };
    // Fully overlapping: the negative boundary decides.
    let overlapping = ClassDistribution {
        category: 1,
        positive_scores: spread(0.0, 1.0, 10_000),
        negative_scores: spread(0.0, 1.0, 10_000),
    };
    for dist in [&separated, &overlapping] {
        let b = boundary_thresholds(dist, &config)?;
        println!(
            "category {}: tau_neg {:.4}  tau_pos {:.4}  ideal {:.4}",
            dist.category,
            b.tau_neg,
            b.tau_pos,
            b.ideal()
        );
    }

    let mut state = ThresholdState::new(1, config);
    println!("\nEMA with gamma {} towards 0.5:", config.gamma);
    for _ in 0..6 {
        state.step(&[Some(0.5)])?;
        println!("  epoch {}: {:.6}", state.epoch, state.thresholds[0]);
    }
    Ok(())
}

//! Monte Carlo comparison of coordinate-only, heatmap-only and fused decoding
//! with predictors calibrated to about 71% and 65% standalone accuracy.
//!
//! cargo run --release --example simulation [images] [seed]

use landmark_fusion::rng::RngSeed;
use landmark_fusion::simulate::{run_trial, SimulationConfig};

fn main() -> landmark_fusion::Result<()> {
    let mut args = std::env::args().skip(1);
    let images = args.next().and_then(|s| s.parse().ok()).unwrap_or(300);
    let seed = RngSeed(args.next().and_then(|s| s.parse().ok()).unwrap_or(2019));
    let cfg = SimulationConfig::calibrated(images);
    println!(
        "{images} images x {} landmarks, coord sigma {:.2} px, confusion probability {:.2}",
        cfg.phantom.landmark_count, cfg.coords.noise_sigma, cfg.heatmaps.adjacent_confusion_prob
    );
    let r = run_trial(seed, &cfg)?;
    for (name, e) in [("coordinates", &r.coords), ("heatmap", &r.heatmap), ("fused", &r.fused)] {
        println!(
            "  {name:<12} {:>6}/{:<6} {:.4}  mean error {:.2} mm",
            e.hits,
            e.total,
            e.accuracy,
            mean_error(e)
        );
    }
    println!(
        "fused vs coordinates {:+.4}, vs heatmap {:+.4}",
        r.fused_vs_coords.absolute, r.fused_vs_heatmap.absolute
    );
    Ok(())
}

fn mean_error(e: &landmark_fusion::EvalReport) -> f64 {
    e.per_landmark
        .iter()
        .map(|l| l.mean_error_mm * l.total as f64)
        .sum::<f64>()
        / e.total as f64
}

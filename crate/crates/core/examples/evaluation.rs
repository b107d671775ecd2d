//! Percentage of correct keypoints at 8 mm.
//!
//! cargo run --example evaluation

use landmark_fusion::eval::{accuracy_delta, DEFAULT_THRESHOLD_MM};
use landmark_fusion::{pck, Point};

fn main() -> landmark_fusion::Result<()> {
    // 50 test images x 11 landmarks at 0.5 mm/px
    let gts: Vec<Vec<Point>> = (0..50)
        .map(|_| (0..11).map(|k| Point::new(256.0, 40.0 + 40.0 * k as f64)).collect())
        .collect();
    let with_misses = |n: usize| {
        let mut preds = gts.clone();
        for i in 0..n {
            preds[i / 11][i % 11].x += 17.0; // 8.5 mm: just outside the threshold
        }
        preds
    };

    let coords = pck(&with_misses(158), &gts, DEFAULT_THRESHOLD_MM, 0.5)?;
    let fused = pck(&with_misses(2), &gts, DEFAULT_THRESHOLD_MM, 0.5)?;
    println!(
        "coordinates only: {}/{} = {:.4}",
        coords.hits, coords.total, coords.accuracy
    );
    println!(
        "fused:            {}/{} = {:.4}",
        fused.hits, fused.total, fused.accuracy
    );
    let d = accuracy_delta(coords.accuracy, fused.accuracy);
    println!(
        "improvement: {:+.1} points absolute, {:+.1}% relative",
        100.0 * d.absolute,
        100.0 * d.relative
    );

    println!("per landmark (coordinates only):");
    for row in &coords.per_landmark {
        println!(
            "  #{:>2}: {:>2}/{} hits, mean {:.2} mm",
            row.index, row.hits, row.total, row.mean_error_mm
        );
    }

    // the threshold is strict
    let edge = pck(&[vec![Point::new(16.0, 0.0)]], &[vec![Point::new(0.0, 0.0)]], 8.0, 0.5)?;
    println!("an error of exactly 8 mm is a miss: {}", edge.hits == 0);
    Ok(())
}

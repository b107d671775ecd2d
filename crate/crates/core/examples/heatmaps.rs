//! Render Gaussian label heatmaps for a landmark chain and decode them back.
//!
//! cargo run --example heatmaps

use landmark_fusion::heatmap::{decode_argmax, decode_centroid, render_label_stack, LABEL_SIGMA};
use landmark_fusion::{GaussianSpec, LandmarkSet, Point};

fn ascii(hm: &landmark_fusion::Heatmap, cx: u32, cy: u32, r: u32) {
    let ramp = [' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'];
    for y in cy.saturating_sub(r)..=cy + r {
        let row: String = (cx.saturating_sub(r)..=cx + r)
            .map(|x| ramp[((hm.get(x, y) * 9.0).round() as usize).min(9)])
            .collect();
        println!("    {row}");
    }
}

fn main() -> landmark_fusion::Result<()> {
    let (w, h) = (64, 64);
    let pts: Vec<Point> = (0..5)
        .map(|k| Point::new(30.3 + k as f64 * 0.6, 8.0 + k as f64 * 11.7))
        .collect();
    let lms = LandmarkSet::pixels(pts.clone(), w, h)?;
    let stack = render_label_stack(&lms, LABEL_SIGMA, w, h)?;

    println!("{} channels of {w}x{h}, sigma {LABEL_SIGMA}", stack.len());
    for (k, (hm, p)) in stack.iter().zip(&pts).enumerate() {
        let (ax, ay) = decode_argmax(hm)?;
        let c = decode_centroid(hm, 3)?;
        println!(
            "  #{k}: true ({:.2}, {:.2})  argmax ({ax}, {ay})  centroid ({:.2}, {:.2})",
            p.x, p.y, c.x, c.y
        );
    }
    println!("channel 2 around its peak:");
    let (ax, ay) = decode_argmax(&stack[2])?;
    ascii(&stack[2], ax, ay, 4);

    // the scaled form differs only by a constant factor
    let scaled = landmark_fusion::render_gaussian(&GaussianSpec::scaled(pts[0], LABEL_SIGMA, 1.0), w, h)?;
    println!(
        "scaled-form peak value {:.6}, argmax {:?}",
        scaled.max_value(),
        decode_argmax(&scaled)?
    );
    Ok(())
}

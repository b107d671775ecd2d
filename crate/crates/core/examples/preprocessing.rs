//! Histogram equalization and bilinear resizing.
//!
//! cargo run --example preprocessing

use landmark_fusion::preprocess::{
    equalize_histogram, resize_bilinear, resize_landmarks, REGRESSOR_SIZE, WORKING_SIZE,
};
use landmark_fusion::{GrayImage, LandmarkSet, Point};

fn main() -> landmark_fusion::Result<()> {
    let img = GrayImage::new(2, 2, vec![10, 20, 20, 30], 0.5)?;
    println!("equalize {:?} -> {:?}", img.pixels(), equalize_histogram(&img).pixels());

    let row = GrayImage::new(2, 1, vec![0, 100], 1.0)?;
    println!(
        "resize 2x1 {:?} -> 4x1 {:?}",
        row.pixels(),
        resize_bilinear(&row, 4, 1)?.pixels()
    );

    // a low-contrast gradient spreads over the full range
    let (w, h) = (640u32, 480u32);
    let px: Vec<u8> = (0..w * h).map(|i| 90 + ((i % w) * 40 / w) as u8).collect();
    let scan = GrayImage::new(w, h, px, 0.4)?;
    let eq = equalize_histogram(&scan);
    let range = |g: &GrayImage| (*g.pixels().iter().min().unwrap(), *g.pixels().iter().max().unwrap());
    println!("{w}x{h} scan: range {:?} -> {:?}", range(&scan), range(&eq));

    for size in [WORKING_SIZE, REGRESSOR_SIZE] {
        let r = resize_bilinear(&eq, size, size)?;
        let lms = LandmarkSet::pixels(vec![Point::new(320.0, 240.0), Point::new(100.5, 400.25)], w, h)?;
        let moved = resize_landmarks(&lms, (w, h), (size, size))?;
        println!(
            "resize to {size}: spacing {:.4} mm/px, landmarks {:?}",
            r.spacing(),
            moved.points().iter().map(|p| (p.x, p.y)).collect::<Vec<_>>()
        );
    }
    Ok(())
}

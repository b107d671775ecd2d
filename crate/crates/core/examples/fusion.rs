//! Resolve an adjacent-landmark confusion by fusing a two-peak heatmap with
//! a coarse coordinate prediction.
//!
//! cargo run --example fusion

use landmark_fusion::fusion::{coord_to_prior, fuse_channel_map, DecodeMethod, FusionConfig};
use landmark_fusion::heatmap::{decode_argmax, render_gaussian};
use landmark_fusion::{fuse_and_decode, GaussianSpec, Point};

fn main() -> landmark_fusion::Result<()> {
    let (w, h) = (96, 96);
    let truth = Point::new(48.0, 40.0);
    let neighbour = Point::new(49.0, 60.0);

    // the heatmap branch fires on the neighbouring vertebra slightly harder
    let hm = render_gaussian(&GaussianSpec::unit(truth, 1.2), w, h)?
        .scaled(0.95)?
        .pointwise_max(&render_gaussian(&GaussianSpec::unit(neighbour, 1.2), w, h)?)?;
    let (hx, hy) = decode_argmax(&hm)?;
    println!(
        "heatmap alone     -> ({hx}, {hy})   error {:.1} px",
        Point::new(hx as f64, hy as f64).distance(truth)
    );

    // the coordinate branch is imprecise but on the right vertebra
    let coord = Point::new(44.7, 45.1);
    println!(
        "coordinates alone -> ({:.1}, {:.1}) error {:.1} px",
        coord.x,
        coord.y,
        coord.distance(truth)
    );

    for sigma in [3.0, 6.0, 12.0, 24.0] {
        let cfg = FusionConfig::with_sigma(sigma);
        let p = fuse_and_decode(&hm, coord, &cfg)?;
        println!(
            "fused, sigma {sigma:>4} -> ({}, {})   error {:.1} px",
            p.x,
            p.y,
            p.distance(truth)
        );
    }

    let cfg = FusionConfig {
        decode: DecodeMethod::Centroid,
        ..FusionConfig::default()
    };
    let p = fuse_and_decode(&hm, coord, &cfg)?;
    println!("fused, centroid   -> ({:.2}, {:.2})", p.x, p.y);

    // the fused map is peak-normalized
    let fused = fuse_channel_map(&hm, coord, 0, &FusionConfig::default())?;
    let prior = coord_to_prior(coord, 6.0, w, h)?;
    println!(
        "fused max {:.3}; prior at truth {:.3}, at neighbour {:.2e}",
        fused.max_value(),
        prior.get(48, 40),
        prior.get(49, 60)
    );
    Ok(())
}

//! The command pipeline driven from library calls: phantom corpus, equalize,
//! augment, label heatmaps, fuse against noisy coordinates, evaluate.
//!
//! cargo run --release --example pipeline [out-dir]

use std::path::PathBuf;

use landmark_fusion::cli::*;
use landmark_fusion::fusion::FusionConfig;
use landmark_fusion::geometry::{AugmentMode, AugmentationRanges};
use landmark_fusion::io::landmarks;
use landmark_fusion::io::manifest::DatasetManifest;
use landmark_fusion::rng::{RngSeed, StreamKind};
use landmark_fusion::simulate::{simulate_coords, CoordPredictorModel, PhantomConfig};

fn main() -> landmark_fusion::Result<()> {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("landmark-fusion-pipeline"));
    let seed = RngSeed(42);
    let phantom = PhantomConfig {
        width: 256,
        height: 256,
        spacing_mm_per_px: 1.0,
        inter_landmark_px: 18.0,
        margin_px: 16.0,
        ..Default::default()
    };

    cmd_phantom(&root.join("raw"), 4, &phantom, seed)?;
    cmd_equalize(&root.join("raw/manifest.toml"), &root.join("eq"))?;
    let opts = AugmentOptions {
        count: 2,
        ranges: AugmentationRanges::default(),
        mode: AugmentMode::Dynamic,
        epoch: 0,
        seed,
    };
    cmd_augment(&root.join("eq/manifest.toml"), &root.join("aug"), &opts)?;
    cmd_gen_heatmaps(&root.join("aug/manifest.toml"), 1.2, &root.join("hm"))?;

    // stand-in for a coordinate regressor: ground truth plus Gaussian noise
    let m = DatasetManifest::load(&root.join("aug/manifest.toml"))?;
    let model = CoordPredictorModel {
        noise_sigma: 4.0,
        outlier_rate: 0.0,
        outlier_sigma: 0.0,
    };
    for (i, rec) in m.records.iter().enumerate() {
        let gt = landmarks::read(&m.resolve(&rec.landmarks))?;
        let noisy = simulate_coords(&mut seed.stream(StreamKind::Coords, i as u64), &gt, &model)?;
        landmarks::write(&root.join("coords").join(format!("{}.txt", rec.stem())), &noisy)?;
    }

    let fuse = FuseOptions {
        config: FusionConfig::default(),
        dump_dir: None,
    };
    cmd_fuse(&root.join("hm"), &root.join("coords"), &root.join("fused"), &fuse)?;

    for (name, dir) in [("coordinates", "coords"), ("fused", "fused")] {
        let r = cmd_eval(&root.join(dir), &root.join("aug/manifest.toml"), 8.0)?;
        println!("{name:<12} {}/{} = {:.4}", r.hits, r.total, r.accuracy);
    }
    println!("artifacts in {}", root.display());
    Ok(())
}

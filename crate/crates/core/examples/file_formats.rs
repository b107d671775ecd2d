//! Round-trip every on-disk format: PGM images, landmark text, HMAP v1
//! heatmap stacks and TOML manifests.
//!
//! cargo run --example file_formats

use landmark_fusion::heatmap::render_label_stack;
use landmark_fusion::io::manifest::{DatasetManifest, ManifestRecord};
use landmark_fusion::io::{hmap, landmarks, pgm};
use landmark_fusion::{GrayImage, LandmarkSet, Point};

fn main() -> landmark_fusion::Result<()> {
    let dir = std::env::temp_dir().join(format!("landmark-fusion-formats-{}", std::process::id()));

    let img = GrayImage::new(4, 3, (0..12).map(|v| v * 20).collect(), 0.5)?;
    pgm::write(&dir.join("scan.pgm"), &img)?;
    let bytes = std::fs::read(dir.join("scan.pgm")).map_err(|e| landmark_fusion::Error::io(&dir, e))?;
    println!(
        "scan.pgm: {} bytes, header {:?}",
        bytes.len(),
        String::from_utf8_lossy(&bytes[..11])
    );
    assert_eq!(pgm::read(&dir.join("scan.pgm"), 0.5)?, img);

    let pts = vec![Point::new(1.25, 0.5), Point::new(2.0, 2.75)];
    landmarks::write(&dir.join("scan.txt"), &pts)?;
    print!("scan.txt:\n{}", landmarks::encode(&pts));
    assert_eq!(landmarks::read(&dir.join("scan.txt"))?, pts);

    let stack = render_label_stack(&LandmarkSet::pixels(pts.clone(), 4, 3)?, 1.2, 4, 3)?;
    hmap::write(&dir.join("scan.hmap"), &stack, 4, 3)?;
    let back = hmap::read(&dir.join("scan.hmap"))?;
    println!(
        "scan.hmap: {} channels {}x{} (f32, channel-major)",
        back.channels.len(),
        back.width,
        back.height
    );

    let manifest = DatasetManifest {
        landmark_count: 2,
        records: vec![ManifestRecord {
            image: "scan.pgm".into(),
            landmarks: "scan.txt".into(),
            spacing_mm_per_px: 0.5,
        }],
        base_dir: dir.clone(),
        ..Default::default()
    };
    print!("manifest.toml:\n{}", manifest.to_toml());
    manifest.save(&dir.join("manifest.toml"))?;
    let loaded = DatasetManifest::load(&dir.join("manifest.toml"))?.load_record(0)?;
    println!(
        "record 0 reloads: {}x{} image, {} landmarks",
        loaded.image.width(),
        loaded.image.height(),
        loaded.landmarks.points().len()
    );

    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

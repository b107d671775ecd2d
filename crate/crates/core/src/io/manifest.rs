//! Dataset manifests (TOML).
//!
//! ```toml
//! landmark_count = 11
//! working_size = 512
//! regressor_size = 299
//!
//! [[records]]
//! image_path = "case_0000.pgm"
//! landmarks_path = "case_0000.txt"
//! spacing_mm_per_px = 0.5
//! ```
//!
//! Record paths are relative to the manifest's directory unless absolute.
//! Top-level keys are optional and default to the values shown.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::{REGRESSOR_SIZE, WORKING_SIZE};
use crate::types::{GrayImage, LandmarkSet, DEFAULT_LANDMARK_COUNT};

use super::{landmarks, pgm, read_file, write_atomic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRecord {
    #[serde(rename = "image_path")]
    pub image: PathBuf,
    #[serde(rename = "landmarks_path")]
    pub landmarks: PathBuf,
    pub spacing_mm_per_px: f64,
}

impl ManifestRecord {
    /// File stem shared by this record's derived artifacts.
    pub fn stem(&self) -> String {
        self.image
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DatasetManifest {
    pub landmark_count: usize,
    pub working_size: u32,
    pub regressor_size: u32,
    pub records: Vec<ManifestRecord>,
    /// Directory record paths are resolved against; not serialized.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for DatasetManifest {
    fn default() -> Self {
        Self {
            landmark_count: DEFAULT_LANDMARK_COUNT,
            working_size: WORKING_SIZE,
            regressor_size: REGRESSOR_SIZE,
            records: Vec::new(),
            base_dir: PathBuf::new(),
        }
    }
}

/// An image and its ground-truth landmarks, validated against each other.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedRecord {
    pub image: GrayImage,
    pub landmarks: LandmarkSet,
}

impl DatasetManifest {
    pub fn parse(text: &str, base_dir: impl Into<PathBuf>) -> std::result::Result<Self, String> {
        let mut m: DatasetManifest = toml::from_str(text).map_err(|e| e.to_string())?;
        m.base_dir = base_dir.into();
        if let Some(r) = m
            .records
            .iter()
            .find(|r| !(r.spacing_mm_per_px.is_finite() && r.spacing_mm_per_px > 0.0))
        {
            return Err(format!("record {}: spacing must be > 0", r.image.display()));
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = read_file(path)?;
        let text = std::str::from_utf8(&bytes).map_err(|_| Error::format(path, "not UTF-8"))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(text, base).map_err(|m| Error::format(path, m))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest is always serializable")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_toml().as_bytes())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Reads record `i`, checking landmark count and frame bounds.
    pub fn load_record(&self, i: usize) -> Result<LoadedRecord> {
        let rec = &self.records[i];
        let image_path = self.resolve(&rec.image);
        let lm_path = self.resolve(&rec.landmarks);
        let image = pgm::read(&image_path, rec.spacing_mm_per_px)?;
        let points = landmarks::read(&lm_path)?;
        if points.len() != self.landmark_count {
            return Err(Error::format(
                &lm_path,
                format!("{} landmarks, manifest expects {}", points.len(), self.landmark_count),
            ));
        }
        let landmarks = LandmarkSet::pixels(points, image.width(), image.height())
            .map_err(|e| Error::format(&lm_path, e.to_string()))?;
        Ok(LoadedRecord { image, landmarks })
    }
}

//! Landmark localization by fusing Gaussian heatmap predictions with
//! direct coordinate predictions.
//!
//! A heatmap regressor localizes peaks precisely but often produces extra
//! peaks on neighboring landmarks; a coordinate regressor is never far off
//! but rarely precise. Turning each regressed coordinate into a Gaussian
//! prior heatmap and multiplying it with the predicted heatmap keeps the
//! precise peak that agrees with the coordinate, and an argmax on the
//! product recovers the landmark.
//!
//! Modules:
//!
//! - [`types`]: images, heatmaps, landmark sets, Gaussian specs
//! - [`preprocess`]: histogram equalization and resizing
//! - [`geometry`]: keypoint-consistent affine augmentation
//! - [`heatmap`]: Gaussian rendering and peak decoding
//! - [`fusion`]: prior construction, log-domain product, decoding
//! - [`simulate`]: synthetic predictors and the Monte Carlo comparison
//! - [`eval`]: PCK at a millimeter threshold
//! - [`io`]: PGM, landmark text, HMAP v1 and manifest formats
//! - [`cli`]: the `landmark-fusion` subcommands

pub mod cli;
pub mod error;
pub mod eval;
pub mod fusion;
pub mod geometry;
pub mod heatmap;
pub mod io;
pub mod preprocess;
pub mod rng;
pub mod simulate;
pub mod types;

pub use error::{Error, ErrorKind, Result};
pub use eval::{landmark_error_mm, pck, EvalReport};
pub use fusion::{coord_to_prior, fuse_and_decode, fuse_batch, fuse_product, FusionConfig};
pub use heatmap::{decode_argmax, decode_centroid, normalize_peak, render_gaussian, render_label_stack};
pub use rng::RngSeed;
pub use types::{GaussianForm, GaussianSpec, GrayImage, Heatmap, LandmarkSet, Point};

//! Fusion of a predicted heatmap with a Gaussian prior built from a direct
//! coordinate prediction.
//!
//! The coordinate regressor's output is treated as the mean of an isotropic
//! Gaussian. Rendering that Gaussian on the heatmap grid and multiplying it
//! pointwise with the predicted heatmap keeps the heatmap's sharp peaks but
//! suppresses those far from the regressed coordinate, which is what removes
//! adjacent-landmark confusions. The product is formed in the log domain:
//!
//! ```text
//! L(p)     = ln max(predicted(p), eps) + ln max(prior(p), eps)
//! fused(p) = exp(L(p) - max_q L(q))
//! ```
//!
//! so it never underflows to an all-zero map, and the result is already
//! peak-normalized. Decoding is then a plain argmax (or a local centroid).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heatmap::{decode_argmax, decode_centroid, render_gaussian};
use crate::types::{GaussianSpec, Heatmap, Point};

/// Default prior width on the 512 working grid.
pub const DEFAULT_PRIOR_SIGMA: f64 = 6.0;
/// Default floor applied before taking logarithms.
pub const DEFAULT_FLOOR_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeMethod {
    #[default]
    Argmax,
    Centroid,
}

/// Prior width, either shared or one per landmark channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PriorSigma {
    Uniform(f64),
    PerLandmark(Vec<f64>),
}

impl PriorSigma {
    pub fn for_channel(&self, k: usize) -> Result<f64> {
        match self {
            PriorSigma::Uniform(s) => Ok(*s),
            PriorSigma::PerLandmark(v) => v
                .get(k)
                .copied()
                .ok_or_else(|| Error::InvalidParameter(format!("no prior sigma for channel {k} ({} given)", v.len()))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FusionConfig {
    pub prior_sigma: PriorSigma,
    pub floor_epsilon: f64,
    pub decode: DecodeMethod,
    pub centroid_window: u32,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            prior_sigma: PriorSigma::Uniform(DEFAULT_PRIOR_SIGMA),
            floor_epsilon: DEFAULT_FLOOR_EPSILON,
            decode: DecodeMethod::Argmax,
            centroid_window: 3,
        }
    }
}

impl FusionConfig {
    pub fn with_sigma(sigma: f64) -> Self {
        Self {
            prior_sigma: PriorSigma::Uniform(sigma),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let sigmas: &[f64] = match &self.prior_sigma {
            PriorSigma::Uniform(s) => std::slice::from_ref(s),
            PriorSigma::PerLandmark(v) => v,
        };
        if let Some(s) = sigmas.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
            return Err(Error::InvalidParameter(format!("prior sigma {s} must be > 0")));
        }
        if !(self.floor_epsilon.is_finite() && self.floor_epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "floor epsilon {} must be > 0",
                self.floor_epsilon
            )));
        }
        if self.decode == DecodeMethod::Centroid && self.centroid_window % 2 == 0 {
            return Err(Error::InvalidParameter("centroid window must be odd".into()));
        }
        Ok(())
    }

    /// Checks that a per-landmark sigma list covers exactly `channels` channels.
    pub fn validate_for(&self, channels: usize) -> Result<()> {
        self.validate()?;
        if let PriorSigma::PerLandmark(v) = &self.prior_sigma {
            if v.len() != channels {
                return Err(Error::InvalidParameter(format!(
                    "{} prior sigmas for {channels} channels",
                    v.len()
                )));
            }
        }
        Ok(())
    }
}

/// Unit-peak Gaussian prior centered on a coordinate prediction. The
/// coordinate may lie outside the grid.
pub fn coord_to_prior(coord: Point, prior_sigma: f64, width: u32, height: u32) -> Result<Heatmap> {
    render_gaussian(&GaussianSpec::unit(coord, prior_sigma), width, height)
}

/// Floored log-domain product of two maps, normalized to a peak of 1.
pub fn fuse_product(predicted: &Heatmap, prior: &Heatmap, floor_epsilon: f64) -> Result<Heatmap> {
    if predicted.dims() != prior.dims() {
        return Err(Error::ShapeMismatch {
            left: predicted.dims(),
            right: prior.dims(),
        });
    }
    if !(floor_epsilon.is_finite() && floor_epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "floor epsilon {floor_epsilon} must be > 0"
        )));
    }
    let mut logs: Vec<f64> = predicted
        .values()
        .iter()
        .zip(prior.values())
        .map(|(&p, &q)| p.max(floor_epsilon).ln() + q.max(floor_epsilon).ln())
        .collect();
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    for l in &mut logs {
        *l = (*l - peak).exp();
    }
    Ok(Heatmap::from_parts(predicted.width(), predicted.height(), logs))
}

fn decode(hm: &Heatmap, cfg: &FusionConfig) -> Result<Point> {
    match cfg.decode {
        DecodeMethod::Argmax => decode_argmax(hm).map(|(x, y)| Point::new(x as f64, y as f64)),
        DecodeMethod::Centroid => decode_centroid(hm, cfg.centroid_window),
    }
}

/// Fused map for channel `k`, using that channel's prior sigma.
pub fn fuse_channel_map(predicted: &Heatmap, coord: Point, k: usize, cfg: &FusionConfig) -> Result<Heatmap> {
    cfg.validate()?;
    if predicted.max_value() <= 0.0 {
        return Err(Error::ZeroHeatmap);
    }
    let prior = coord_to_prior(
        coord,
        cfg.prior_sigma.for_channel(k)?,
        predicted.width(),
        predicted.height(),
    )?;
    fuse_product(predicted, &prior, cfg.floor_epsilon)
}

/// Fuses channel `k` and decodes the landmark position.
pub fn fuse_channel(predicted: &Heatmap, coord: Point, k: usize, cfg: &FusionConfig) -> Result<Point> {
    decode(&fuse_channel_map(predicted, coord, k, cfg)?, cfg)
}

/// Fuses a single heatmap with a coordinate prediction and decodes it. A
/// per-landmark sigma list contributes its first entry.
pub fn fuse_and_decode(predicted: &Heatmap, coord: Point, cfg: &FusionConfig) -> Result<Point> {
    fuse_channel(predicted, coord, 0, cfg)
}

fn check_stack(stack: &[Heatmap], coords: usize) -> Result<()> {
    if stack.len() != coords {
        return Err(Error::ChannelMismatch {
            heatmaps: stack.len(),
            coords,
        });
    }
    if let Some(first) = stack.first() {
        if let Some(other) = stack.iter().find(|h| h.dims() != first.dims()) {
            return Err(Error::ShapeMismatch {
                left: first.dims(),
                right: other.dims(),
            });
        }
    }
    Ok(())
}

/// Channel `k` of the stack paired with coordinate `k`; output keeps channel order.
pub fn fuse_batch(stack: &[Heatmap], coords: &[Point], cfg: &FusionConfig) -> Result<Vec<Point>> {
    check_stack(stack, coords.len())?;
    cfg.validate_for(stack.len())?;
    stack
        .par_iter()
        .zip(coords.par_iter())
        .enumerate()
        .map(|(k, (hm, &c))| {
            fuse_channel(hm, c, k, cfg).map_err(|e| Error::Channel {
                channel: k,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Same as [`fuse_batch`] but also returns the fused maps.
pub fn fuse_batch_maps(stack: &[Heatmap], coords: &[Point], cfg: &FusionConfig) -> Result<Vec<(Point, Heatmap)>> {
    check_stack(stack, coords.len())?;
    cfg.validate_for(stack.len())?;
    stack
        .par_iter()
        .zip(coords.par_iter())
        .enumerate()
        .map(|(k, (hm, &c))| {
            fuse_channel_map(hm, c, k, cfg)
                .and_then(|m| Ok((decode(&m, cfg)?, m)))
                .map_err(|e| Error::Channel {
                    channel: k,
                    source: Box::new(e),
                })
        })
        .collect()
}

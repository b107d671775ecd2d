//! Gaussian heatmap synthesis and peak decoding.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::{GaussianForm, GaussianSpec, Heatmap, LandmarkSet, Point};

/// Label sigma (px on the working grid).
pub const LABEL_SIGMA: f64 = 1.2;

/// Value of one Gaussian at a continuous point.
#[inline]
pub fn gaussian_value(spec: &GaussianSpec, x: f64, y: f64) -> f64 {
    let dx = x - spec.center.x;
    let dy = y - spec.center.y;
    let g = (-(dx * dx + dy * dy) / (2.0 * spec.sigma * spec.sigma)).exp();
    match spec.form {
        GaussianForm::Unit => g,
        GaussianForm::Scaled => spec.amplitude / (2.0 * PI * spec.sigma) * g,
    }
}

/// Evaluates the Gaussian at every integer grid point, with no truncation radius.
pub fn render_gaussian(spec: &GaussianSpec, width: u32, height: u32) -> Result<Heatmap> {
    spec.validate()?;
    if width == 0 || height == 0 {
        return Err(Error::EmptyDimensions { width, height });
    }
    let mut values = Vec::with_capacity(width as usize * height as usize);
    for y in 0..height {
        for x in 0..width {
            values.push(gaussian_value(spec, x as f64, y as f64));
        }
    }
    // Far tails underflow to zero; an all-zero render is still a valid map
    // of this kernel, so it bypasses the non-zero check.
    Ok(Heatmap::from_parts(width, height, values))
}

/// One unit-peak Gaussian label per landmark, in landmark order.
pub fn render_label_stack(lms: &LandmarkSet, sigma: f64, width: u32, height: u32) -> Result<Vec<Heatmap>> {
    lms.points()
        .par_iter()
        .map(|&p| render_gaussian(&GaussianSpec::unit(p, sigma), width, height))
        .collect()
}

fn argmax_index(hm: &Heatmap) -> Result<usize> {
    let mut best = 0;
    let mut best_value = 0.0;
    for (i, &v) in hm.values().iter().enumerate() {
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    if best_value > 0.0 {
        Ok(best)
    } else {
        Err(Error::ZeroHeatmap)
    }
}

/// Grid position of the maximum; ties go to the smallest row-major index.
pub fn decode_argmax(hm: &Heatmap) -> Result<(u32, u32)> {
    let i = argmax_index(hm)?;
    let w = hm.width() as usize;
    Ok(((i % w) as u32, (i / w) as u32))
}

/// Intensity-weighted centroid of the `window x window` patch around the
/// argmax. The patch is clipped at the borders.
pub fn decode_centroid(hm: &Heatmap, window: u32) -> Result<Point> {
    if window % 2 == 0 {
        return Err(Error::InvalidParameter(format!("centroid window {window} must be odd")));
    }
    let (px, py) = decode_argmax(hm)?;
    let r = (window / 2) as i64;
    let (w, h) = (hm.width() as i64, hm.height() as i64);
    let (mut sum, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for y in (py as i64 - r).max(0)..=(py as i64 + r).min(h - 1) {
        for x in (px as i64 - r).max(0)..=(px as i64 + r).min(w - 1) {
            let v = hm.get(x as u32, y as u32);
            sum += v;
            sx += v * x as f64;
            sy += v * y as f64;
        }
    }
    Ok(Point::new(sx / sum, sy / sum))
}

/// Divides by the maximum so the peak is exactly 1.
pub fn normalize_peak(hm: &Heatmap) -> Result<Heatmap> {
    let max = hm.max_value();
    if max <= 0.0 {
        return Err(Error::ZeroHeatmap);
    }
    let values = hm.values().iter().map(|v| v / max).collect();
    Ok(Heatmap::from_parts(hm.width(), hm.height(), values))
}

//! Shared domain types.
//!
//! Coordinates follow raster order: `x` is the column index growing to the
//! right, `y` is the row index growing downward, and pixel `(row i, col j)`
//! is sampled at the continuous point `(x = j, y = i)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default landmark count per image (vertebral landmarks on a sagittal slice).
pub const DEFAULT_LANDMARK_COUNT: usize = 11;

/// 8-bit single-channel raster with isotropic physical spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
    spacing: f64,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, pixels: Vec<u8>, spacing: f64) -> Result<Self> {
        check_image_parts(width, height, pixels.len(), spacing)?;
        Ok(Self {
            width,
            height,
            pixels,
            spacing,
        })
    }

    /// A black image of the given size.
    pub fn filled(width: u32, height: u32, value: u8, spacing: f64) -> Result<Self> {
        let len = width as usize * height as usize;
        Self::new(width, height, vec![value; len], spacing)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.pixels
    }

    /// Pixel spacing in mm per pixel.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn with_spacing(mut self, spacing: f64) -> Result<Self> {
        check_spacing(spacing)?;
        self.spacing = spacing;
        Ok(self)
    }

    /// Column/row of the brightest pixel, first in row-major order on ties.
    pub fn argmax(&self) -> (u32, u32) {
        let mut best = 0;
        for (i, &v) in self.pixels.iter().enumerate() {
            if v > self.pixels[best] {
                best = i;
            }
        }
        let w = self.width as usize;
        ((best % w) as u32, (best / w) as u32)
    }
}

fn check_spacing(spacing: f64) -> Result<()> {
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::NonPositiveSpacing(spacing));
    }
    Ok(())
}

fn check_image_parts(width: u32, height: u32, len: usize, spacing: f64) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::EmptyDimensions { width, height });
    }
    let expected = width as usize * height as usize;
    if len != expected {
        return Err(Error::DimensionMismatch { expected, actual: len });
    }
    check_spacing(spacing)
}

/// Re-checks every [`GrayImage`] invariant.
pub fn validate_image(img: &GrayImage) -> Result<()> {
    check_image_parts(img.width, img.height, img.pixels.len(), img.spacing)
}

/// Dense per-landmark score map. Values are finite and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    width: u32,
    height: u32,
    values: Vec<f64>,
}

impl Heatmap {
    /// Builds a heatmap, rejecting negative or non-finite values and maps
    /// with no positive value. Use [`Heatmap::zeros`] for the zero map.
    pub fn new(width: u32, height: u32, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyDimensions { width, height });
        }
        let expected = width as usize * height as usize;
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: values.len(),
            });
        }
        let mut any_positive = false;
        for (index, &value) in values.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidHeatmapValue { index, value });
            }
            any_positive |= value > 0.0;
        }
        if !any_positive {
            return Err(Error::ZeroHeatmap);
        }
        Ok(Self { width, height, values })
    }

    pub fn zeros(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyDimensions { width, height });
        }
        Ok(Self {
            width,
            height,
            values: vec![0.0; width as usize * height as usize],
        })
    }

    /// Construction for values produced by this crate's own kernels, which
    /// are non-negative and finite by construction.
    pub(crate) fn from_parts(width: u32, height: u32, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), width as usize * height as usize);
        debug_assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));
        Self { width, height, values }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.values[y as usize * self.width as usize + x as usize]
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Multiplies every value by `factor` (> 0).
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::InvalidParameter(format!("scale factor {factor} must be > 0")));
        }
        Heatmap::new(
            self.width,
            self.height,
            self.values.iter().map(|v| v * factor).collect(),
        )
    }

    /// Pointwise maximum of two maps of the same shape.
    pub fn pointwise_max(&self, other: &Heatmap) -> Result<Self> {
        if self.dims() != other.dims() {
            return Err(Error::ShapeMismatch {
                left: self.dims(),
                right: other.dims(),
            });
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.max(*b)).collect();
        Ok(Heatmap::from_parts(self.width, self.height, values))
    }
}

/// Continuous 2D point in pixels (or unit coordinates in the normalized frame).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_sq(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point { x, y }
    }
}

/// Coordinate frame of a [`LandmarkSet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    Pixel { width: u32, height: u32 },
    Normalized,
}

impl Frame {
    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Frame::Pixel { width, height } => p.x >= 0.0 && p.y >= 0.0 && p.x < width as f64 && p.y < height as f64,
            Frame::Normalized => (0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y),
        }
    }
}

/// Ordered landmark positions, all inside their frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSet {
    points: Vec<Point>,
    frame: Frame,
}

impl LandmarkSet {
    pub fn new(points: Vec<Point>, frame: Frame) -> Result<Self> {
        if let Frame::Pixel { width, height } = frame {
            if width == 0 || height == 0 {
                return Err(Error::EmptyDimensions { width, height });
            }
        }
        for (index, p) in points.iter().enumerate() {
            if !frame.contains(*p) {
                return Err(Error::OutOfFrame { index, x: p.x, y: p.y });
            }
        }
        Ok(Self { points, frame })
    }

    pub fn pixels(points: Vec<Point>, width: u32, height: u32) -> Result<Self> {
        Self::new(points, Frame::Pixel { width, height })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl AsRef<[Point]> for LandmarkSet {
    fn as_ref(&self) -> &[Point] {
        &self.points
    }
}

/// Converts landmarks between the pixel frame and the unit-normalized frame.
///
/// Pixel to normalized divides `x` by the width and `y` by the height of the
/// source frame; normalized to pixel multiplies by the target dimensions.
/// Pixel to pixel rescales between the two sizes, normalized to normalized
/// is the identity.
pub fn convert_frame(lms: &LandmarkSet, target: Frame) -> Result<LandmarkSet> {
    let points = match (lms.frame, target) {
        (Frame::Pixel { width, height }, Frame::Normalized) => lms
            .points
            .iter()
            .map(|p| Point::new(p.x / width as f64, p.y / height as f64))
            .collect(),
        (Frame::Normalized, Frame::Pixel { width, height }) => lms
            .points
            .iter()
            .map(|p| Point::new(p.x * width as f64, p.y * height as f64))
            .collect(),
        (Frame::Pixel { width: fw, height: fh }, Frame::Pixel { width: tw, height: th }) => {
            let sx = tw as f64 / fw as f64;
            let sy = th as f64 / fh as f64;
            lms.points.iter().map(|p| Point::new(p.x * sx, p.y * sy)).collect()
        }
        (Frame::Normalized, Frame::Normalized) => lms.points.clone(),
    };
    LandmarkSet::new(points, target)
}

/// Which printed Gaussian form to render.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaussianForm {
    /// `alpha / (2 pi sigma) * exp(-r^2 / (2 sigma^2))`, prefactor as printed.
    Scaled,
    /// `exp(-r^2 / (2 sigma^2))`, peak value 1. Used for all labels and priors.
    Unit,
}

/// One Gaussian spot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub center: Point,
    pub sigma: f64,
    pub amplitude: f64,
    pub form: GaussianForm,
}

impl GaussianSpec {
    pub fn unit(center: Point, sigma: f64) -> Self {
        Self {
            center,
            sigma,
            amplitude: 1.0,
            form: GaussianForm::Unit,
        }
    }

    pub fn scaled(center: Point, sigma: f64, amplitude: f64) -> Self {
        Self {
            center,
            sigma,
            amplitude,
            form: GaussianForm::Scaled,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma {} must be > 0", self.sigma)));
        }
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "amplitude {} must be > 0",
                self.amplitude
            )));
        }
        if !(self.center.x.is_finite() && self.center.y.is_finite()) {
            return Err(Error::InvalidParameter("gaussian center must be finite".into()));
        }
        Ok(())
    }
}

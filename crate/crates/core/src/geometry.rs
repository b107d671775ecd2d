//! Affine augmentation that moves an image and its landmark labels together.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::to_u8;
use crate::rng::{RngSeed, StreamKind};
use crate::types::{GrayImage, LandmarkSet, Point};

/// Row-major 2x3 matrix mapping `(x, y)` to `(a x + b y + tx, c x + d y + ty)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineTransform2D {
    pub a: f64,
    pub b: f64,
    pub tx: f64,
    pub c: f64,
    pub d: f64,
    pub ty: f64,
}

impl AffineTransform2D {
    pub const IDENTITY: Self = Self {
        a: 1.0,
        b: 0.0,
        tx: 0.0,
        c: 0.0,
        d: 1.0,
        ty: 0.0,
    };

    pub fn translation(tx: f64, ty: f64) -> Self {
        Self {
            tx,
            ty,
            ..Self::IDENTITY
        }
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, p: Point) -> Point {
        Point::new(
            self.a * p.x + self.b * p.y + self.tx,
            self.c * p.x + self.d * p.y + self.ty,
        )
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.determinant();
        if det == 0.0 || !det.is_finite() {
            return Err(Error::SingularTransform(det));
        }
        let (a, b, c, d) = (self.d / det, -self.b / det, -self.c / det, self.a / det);
        Ok(Self {
            a,
            b,
            c,
            d,
            tx: -(a * self.tx + b * self.ty),
            ty: -(c * self.tx + d * self.ty),
        })
    }

    /// `self` applied after `first`.
    pub fn then_after(&self, first: &Self) -> Self {
        Self {
            a: self.a * first.a + self.b * first.c,
            b: self.a * first.b + self.b * first.d,
            tx: self.a * first.tx + self.b * first.ty + self.tx,
            c: self.c * first.a + self.d * first.c,
            d: self.c * first.b + self.d * first.d,
            ty: self.c * first.tx + self.d * first.ty + self.ty,
        }
    }
}

/// Closed sampling interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub const fn point(v: f64) -> Self {
        Self { min: v, max: v }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        // always consume one draw so degenerate ranges keep streams aligned
        let u: f64 = rng.random();
        self.min + (self.max - self.min) * u
    }

    fn is_valid(&self) -> bool {
        self.min.is_finite() && self.max.is_finite() && self.min <= self.max
    }
}

/// Sampling ranges for translation (px), rotation (degrees) and scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentationRanges {
    pub tx: Range,
    pub ty: Range,
    pub angle_deg: Range,
    pub scale: Range,
}

impl Default for AugmentationRanges {
    fn default() -> Self {
        Self {
            tx: Range::new(-35.0, 35.0),
            ty: Range::new(-8.0, 8.0),
            angle_deg: Range::new(-25.0, 25.0),
            scale: Range::new(0.7, 1.3),
        }
    }
}

impl AugmentationRanges {
    pub fn identity() -> Self {
        Self {
            tx: Range::point(0.0),
            ty: Range::point(0.0),
            angle_deg: Range::point(0.0),
            scale: Range::point(1.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, r) in [
            ("tx", self.tx),
            ("ty", self.ty),
            ("angle", self.angle_deg),
            ("scale", self.scale),
        ] {
            if !r.is_valid() {
                return Err(Error::InvalidParameter(format!("{name} range {r:?} is not min <= max")));
            }
        }
        if self.scale.min <= 0.0 {
            return Err(Error::InvalidParameter("scale range must be positive".into()));
        }
        Ok(())
    }
}

/// One drawn augmentation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentParams {
    pub tx: f64,
    pub ty: f64,
    pub angle_deg: f64,
    pub scale: f64,
}

/// Draws each parameter independently and uniformly from its range, in the
/// order tx, ty, angle, scale.
pub fn sample_augmentation<R: Rng + ?Sized>(rng: &mut R, ranges: &AugmentationRanges) -> AugmentParams {
    AugmentParams {
        tx: ranges.tx.sample(rng),
        ty: ranges.ty.sample(rng),
        angle_deg: ranges.angle_deg.sample(rng),
        scale: ranges.scale.sample(rng),
    }
}

/// `p -> R(angle) * scale * (p - center) + center + (tx, ty)`.
///
/// `R` is the usual rotation matrix applied in the y-down pixel frame, so a
/// positive angle turns image content clockwise on screen.
pub fn build_transform(params: &AugmentParams, center: Point) -> Result<AffineTransform2D> {
    if !(params.scale.is_finite() && params.scale > 0.0) {
        return Err(Error::InvalidParameter(format!("scale {} must be > 0", params.scale)));
    }
    let (sin, cos) = params.angle_deg.to_radians().sin_cos();
    // snap exact quarter turns so symmetric cases stay exact
    let snap = |v: f64| if v.abs() < 1e-15 { 0.0 } else { v };
    let (sin, cos) = (snap(sin), snap(cos));
    let (a, b, c, d) = (
        cos * params.scale,
        -sin * params.scale,
        sin * params.scale,
        cos * params.scale,
    );
    Ok(AffineTransform2D {
        a,
        b,
        c,
        d,
        tx: center.x - (a * center.x + b * center.y) + params.tx,
        ty: center.y - (c * center.x + d * center.y) + params.ty,
    })
}

/// Continuous center of an image: the midpoint between its first and last pixel.
pub fn image_center(width: u32, height: u32) -> Point {
    Point::new((width as f64 - 1.0) / 2.0, (height as f64 - 1.0) / 2.0)
}

/// Bilinear samples of the input at the inverse-mapped position of every
/// output pixel, before rounding to 8 bits. Outside the frame reads as 0.
pub fn warp_samples(img: &GrayImage, t: &AffineTransform2D) -> Result<Vec<f64>> {
    let inv = t.inverse()?;
    let (w, h) = (img.width() as i64, img.height() as i64);
    let src = img.pixels();
    let at = |x: i64, y: i64| -> f64 {
        if x < 0 || y < 0 || x >= w || y >= h {
            0.0
        } else {
            src[(y * w + x) as usize] as f64
        }
    };
    let mut out = Vec::with_capacity(src.len());
    for oy in 0..h {
        for ox in 0..w {
            let p = inv.apply(Point::new(ox as f64, oy as f64));
            let (fx, fy) = (p.x.floor(), p.y.floor());
            if fx < -1.0 || fy < -1.0 || fx >= w as f64 || fy >= h as f64 {
                out.push(0.0);
                continue;
            }
            let (x0, y0) = (fx as i64, fy as i64);
            let (tx, ty) = (p.x - fx, p.y - fy);
            let top = at(x0, y0) * (1.0 - tx) + at(x0 + 1, y0) * tx;
            let bottom = at(x0, y0 + 1) * (1.0 - tx) + at(x0 + 1, y0 + 1) * tx;
            out.push(top * (1.0 - ty) + bottom * ty);
        }
    }
    Ok(out)
}

/// Inverse-maps each output pixel and bilinearly samples the input with
/// zero padding outside the frame. Dimensions and spacing are unchanged.
pub fn warp_image(img: &GrayImage, t: &AffineTransform2D) -> Result<GrayImage> {
    if *t == AffineTransform2D::IDENTITY {
        return Ok(img.clone());
    }
    let out = warp_samples(img, t)?.into_iter().map(to_u8).collect();
    GrayImage::new(img.width(), img.height(), out, img.spacing())
}

/// Landmarks mapped through a transform, with per-point frame membership.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedLandmarks {
    pub points: Vec<Point>,
    pub in_frame: Vec<bool>,
    pub width: u32,
    pub height: u32,
}

impl WarpedLandmarks {
    pub fn all_in_frame(&self) -> bool {
        self.in_frame.iter().all(|&b| b)
    }

    /// Succeeds only when every point stayed inside the frame.
    pub fn into_landmarks(self) -> Result<LandmarkSet> {
        LandmarkSet::pixels(self.points, self.width, self.height)
    }
}

/// Maps pixel landmarks forward through `t`, flagging points that leave the frame.
pub fn warp_landmarks(lms: &LandmarkSet, t: &AffineTransform2D) -> Result<WarpedLandmarks> {
    let crate::types::Frame::Pixel { width, height } = lms.frame() else {
        return Err(Error::InvalidParameter("warp_landmarks needs pixel coordinates".into()));
    };
    let frame = lms.frame();
    let points: Vec<Point> = lms.points().iter().map(|&p| t.apply(p)).collect();
    let in_frame: Vec<bool> = points.iter().map(|&p| frame.contains(p)).collect();
    if !points.is_empty() && !in_frame.iter().any(|&b| b) {
        return Err(Error::AllLandmarksOutOfFrame);
    }
    Ok(WarpedLandmarks {
        points,
        in_frame,
        width,
        height,
    })
}

/// Attempts before [`augment_pair`] gives up.
pub const MAX_AUGMENT_ATTEMPTS: usize = 100;

/// An accepted augmentation of one (image, landmarks) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Augmented {
    pub image: GrayImage,
    pub landmarks: LandmarkSet,
    pub params: AugmentParams,
    pub transform: AffineTransform2D,
}

/// Draws augmentations about the image center until every landmark stays in
/// frame, then warps image and labels with the accepted transform.
pub fn augment_pair<R: Rng + ?Sized>(
    rng: &mut R,
    img: &GrayImage,
    lms: &LandmarkSet,
    ranges: &AugmentationRanges,
) -> Result<Augmented> {
    ranges.validate()?;
    let pixel_lms = LandmarkSet::pixels(lms.points().to_vec(), img.width(), img.height())?;
    let center = image_center(img.width(), img.height());
    for _ in 0..MAX_AUGMENT_ATTEMPTS {
        let params = sample_augmentation(rng, ranges);
        let transform = build_transform(&params, center)?;
        let warped = match warp_landmarks(&pixel_lms, &transform) {
            Ok(w) => w,
            Err(Error::AllLandmarksOutOfFrame) => continue,
            Err(e) => return Err(e),
        };
        if !warped.all_in_frame() {
            continue;
        }
        let landmarks = warped.into_landmarks()?;
        let image = warp_image(img, &transform)?;
        return Ok(Augmented {
            image,
            landmarks,
            params,
            transform,
        });
    }
    Err(Error::AugmentationExhausted(MAX_AUGMENT_ATTEMPTS))
}

/// How augmentation streams relate to training epochs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AugmentMode {
    /// Fresh parameters per image per epoch.
    #[default]
    Dynamic,
    /// One fixed augmented set reused every epoch.
    Fixed,
}

/// Stream index for the `copy`-th augmentation of image `image` in `epoch`.
pub fn augment_stream_index(mode: AugmentMode, image: u64, copy: u64, epoch: u64) -> u64 {
    let epoch = match mode {
        AugmentMode::Dynamic => epoch,
        AugmentMode::Fixed => 0,
    };
    // 20 bits copy, 16 bits epoch, 20 bits image
    ((image & 0xF_FFFF) << 36) | ((epoch & 0xFFFF) << 20) | (copy & 0xF_FFFF)
}

/// Deterministic augmentation of one image/copy/epoch from the master seed.
pub fn augment_seeded(
    seed: RngSeed,
    mode: AugmentMode,
    (image_index, copy, epoch): (u64, u64, u64),
    img: &GrayImage,
    lms: &LandmarkSet,
    ranges: &AugmentationRanges,
) -> Result<Augmented> {
    let mut rng = seed.stream(
        StreamKind::Augment,
        augment_stream_index(mode, image_index, copy, epoch),
    );
    augment_pair(&mut rng, img, lms, ranges)
}

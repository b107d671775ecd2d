//! Synthetic predictors for both branches and a Monte Carlo harness that
//! scores coordinate-only, heatmap-only and fused decoding on the same trials.
//!
//! The coordinate branch scatters each landmark with isotropic Gaussian
//! noise (plus optional wide outliers). The heatmap branch places a sharp
//! unit peak near the truth and, with some probability, a competing peak on
//! a neighboring landmark of the chain; the two are combined by pointwise
//! max. Neither model is trained: they only reproduce the error structure.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{accuracy_delta, AccuracyDelta, EvalReport, Evaluator, DEFAULT_THRESHOLD_MM};
use crate::fusion::{fuse_channel, FusionConfig};
use crate::geometry::Range;
use crate::heatmap::{decode_argmax, LABEL_SIGMA};
use crate::rng::{RngSeed, StreamKind};
use crate::types::{Heatmap, LandmarkSet, Point, DEFAULT_LANDMARK_COUNT};

/// Geometry of a synthetic vertebral landmark chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PhantomConfig {
    pub landmark_count: usize,
    pub width: u32,
    pub height: u32,
    pub spacing_mm_per_px: f64,
    /// Vertical distance between consecutive landmarks.
    pub inter_landmark_px: f64,
    /// Maximum lateral offset of a landmark from the chain axis.
    pub wobble_px: f64,
    /// Minimum distance between any landmark and the border.
    pub margin_px: f64,
    /// Round positions to integer pixels.
    pub snap_to_grid: bool,
}

impl Default for PhantomConfig {
    fn default() -> Self {
        Self {
            landmark_count: DEFAULT_LANDMARK_COUNT,
            width: 512,
            height: 512,
            spacing_mm_per_px: 0.5,
            inter_landmark_px: 40.0,
            wobble_px: 6.0,
            margin_px: 24.0,
            snap_to_grid: false,
        }
    }
}

/// Ground truth for one synthetic image.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinePhantom {
    pub landmarks: LandmarkSet,
    pub spacing_mm_per_px: f64,
    pub inter_landmark_px: f64,
}

/// Lays out a near-vertical chain with strictly increasing `y`.
pub fn generate_phantom<R: Rng + ?Sized>(rng: &mut R, config: &PhantomConfig) -> Result<SpinePhantom> {
    let n = config.landmark_count;
    if n < 2 {
        return Err(Error::InfeasiblePhantom(format!("need at least 2 landmarks, got {n}")));
    }
    let min_step = if config.snap_to_grid { 1.0 } else { f64::MIN_POSITIVE };
    if !(config.inter_landmark_px >= min_step && config.inter_landmark_px.is_finite()) {
        return Err(Error::InfeasiblePhantom(
            "inter-landmark spacing must be positive".into(),
        ));
    }
    if !(config.wobble_px >= 0.0 && config.margin_px >= 0.0) {
        return Err(Error::InfeasiblePhantom(
            "wobble and margin must be non-negative".into(),
        ));
    }
    if !(config.spacing_mm_per_px.is_finite() && config.spacing_mm_per_px > 0.0) {
        return Err(Error::NonPositiveSpacing(config.spacing_mm_per_px));
    }
    let length = (n - 1) as f64 * config.inter_landmark_px;
    let y_room = (config.height as f64 - 1.0) - 2.0 * config.margin_px - length;
    let x_room = (config.width as f64 - 1.0) - 2.0 * (config.margin_px + config.wobble_px);
    if y_room < 0.0 || x_room < 0.0 {
        return Err(Error::InfeasiblePhantom(format!(
            "{n} landmarks {} px apart do not fit in {}x{} with margin {}",
            config.inter_landmark_px, config.width, config.height, config.margin_px
        )));
    }
    let y0 = config.margin_px + y_room * rng.random::<f64>();
    let axis = config.margin_px + config.wobble_px + x_room * rng.random::<f64>();
    let mut points = Vec::with_capacity(n);
    for k in 0..n {
        let offset = config.wobble_px * (2.0 * rng.random::<f64>() - 1.0);
        let mut p = Point::new(axis + offset, y0 + k as f64 * config.inter_landmark_px);
        if config.snap_to_grid {
            p = Point::new(p.x.round(), p.y.round());
        }
        points.push(p);
    }
    let landmarks = LandmarkSet::pixels(points, config.width, config.height)
        .map_err(|e| Error::Internal(format!("phantom left the frame: {e}")))?;
    Ok(SpinePhantom {
        landmarks,
        spacing_mm_per_px: config.spacing_mm_per_px,
        inter_landmark_px: config.inter_landmark_px,
    })
}

/// Direct coordinate regressor: Gaussian scatter with optional outliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoordPredictorModel {
    pub noise_sigma: f64,
    pub outlier_rate: f64,
    pub outlier_sigma: f64,
}

impl Default for CoordPredictorModel {
    fn default() -> Self {
        Self {
            noise_sigma: 3.0,
            outlier_rate: 0.0,
            outlier_sigma: 50.0,
        }
    }
}

impl CoordPredictorModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite())
            || !(self.outlier_sigma >= 0.0 && self.outlier_sigma.is_finite())
        {
            return Err(Error::InvalidParameter("coordinate noise sigmas must be >= 0".into()));
        }
        if !(0.0..=1.0).contains(&self.outlier_rate) {
            return Err(Error::InvalidParameter(format!(
                "outlier rate {} not in [0, 1]",
                self.outlier_rate
            )));
        }
        Ok(())
    }
}

/// Noise sigma whose radial error exceeds `radius_px` with probability
/// `1 - accuracy`. The radial error of isotropic 2D Gaussian noise is
/// Rayleigh distributed: `P(|e| >= r) = exp(-r^2 / (2 sigma^2))`.
pub fn rayleigh_sigma_for_accuracy(radius_px: f64, accuracy: f64) -> f64 {
    radius_px / (2.0 * (1.0 / (1.0 - accuracy)).ln()).sqrt()
}

/// One coordinate prediction per ground-truth point. Every point consumes
/// exactly three draws so noise levels can be compared on shared streams.
pub fn simulate_coords<R: Rng + ?Sized>(rng: &mut R, gt: &[Point], model: &CoordPredictorModel) -> Result<Vec<Point>> {
    model.validate()?;
    Ok(gt
        .iter()
        .map(|&g| {
            let zx: f64 = rng.sample(StandardNormal);
            let zy: f64 = rng.sample(StandardNormal);
            let u: f64 = rng.random();
            let sigma = if u < model.outlier_rate {
                model.outlier_sigma
            } else {
                model.noise_sigma
            };
            Point::new(g.x + sigma * zx, g.y + sigma * zy)
        })
        .collect())
}

/// Heatmap regressor with adjacent-landmark confusions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HeatmapPredictorModel {
    pub peak_jitter_sigma: f64,
    pub heatmap_sigma: f64,
    pub adjacent_confusion_prob: f64,
    /// Spurious peak height relative to the true peak.
    pub spurious_amplitude: Range,
}

impl Default for HeatmapPredictorModel {
    fn default() -> Self {
        Self {
            peak_jitter_sigma: 0.5,
            heatmap_sigma: LABEL_SIGMA,
            adjacent_confusion_prob: 0.3,
            spurious_amplitude: Range::new(0.9, 1.1),
        }
    }
}

impl HeatmapPredictorModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.peak_jitter_sigma >= 0.0 && self.peak_jitter_sigma.is_finite()) {
            return Err(Error::InvalidParameter("peak jitter must be >= 0".into()));
        }
        if !(self.heatmap_sigma > 0.0 && self.heatmap_sigma.is_finite()) {
            return Err(Error::InvalidParameter("heatmap sigma must be > 0".into()));
        }
        if !(0.0..=1.0).contains(&self.adjacent_confusion_prob) {
            return Err(Error::InvalidParameter("confusion probability not in [0, 1]".into()));
        }
        let a = self.spurious_amplitude;
        if !(a.min > 0.0 && a.min <= a.max && a.max.is_finite()) {
            return Err(Error::InvalidParameter(
                "spurious amplitude range must lie in (0, inf)".into(),
            ));
        }
        Ok(())
    }
}

/// A simulated channel and the confusion that went into it, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedChannel {
    pub heatmap: Heatmap,
    pub true_peak: Point,
    /// Neighbor index and relative amplitude of the spurious peak.
    pub spurious: Option<(usize, f64)>,
}

fn render_peaks(peaks: &[(Point, f64)], sigma: f64, width: u32, height: u32) -> Heatmap {
    let inv = 1.0 / (2.0 * sigma * sigma);
    let mut values = Vec::with_capacity(width as usize * height as usize);
    for y in 0..height {
        let yf = y as f64;
        for x in 0..width {
            let xf = x as f64;
            let v = peaks.iter().fold(0.0f64, |m, &(c, amp)| {
                let (dx, dy) = (xf - c.x, yf - c.y);
                m.max(amp * (-(dx * dx + dy * dy) * inv).exp())
            });
            values.push(v);
        }
    }
    Heatmap::from_parts(width, height, values)
}

/// Simulated heatmap stack with confusion details. Each channel consumes
/// the same number of draws whether or not it is confused.
pub fn simulate_heatmap_channels<R: Rng + ?Sized>(
    rng: &mut R,
    gt: &[Point],
    model: &HeatmapPredictorModel,
    width: u32,
    height: u32,
) -> Result<Vec<SimulatedChannel>> {
    model.validate()?;
    if width == 0 || height == 0 {
        return Err(Error::EmptyDimensions { width, height });
    }
    let n = gt.len();
    let mut channels = Vec::with_capacity(n);
    for (k, &g) in gt.iter().enumerate() {
        let jx: f64 = rng.sample(StandardNormal);
        let jy: f64 = rng.sample(StandardNormal);
        let u_conf: f64 = rng.random();
        let u_side: f64 = rng.random();
        let u_amp: f64 = rng.random();
        let sx: f64 = rng.sample(StandardNormal);
        let sy: f64 = rng.sample(StandardNormal);

        let j = model.peak_jitter_sigma;
        let true_peak = Point::new(g.x + j * jx, g.y + j * jy);
        let neighbor = match (k > 0, k + 1 < n) {
            (true, true) => Some(if u_side < 0.5 { k - 1 } else { k + 1 }),
            (true, false) => Some(k - 1),
            (false, true) => Some(k + 1),
            (false, false) => None,
        };
        let spurious = neighbor.filter(|_| u_conf < model.adjacent_confusion_prob).map(|nb| {
            let a = model.spurious_amplitude;
            (nb, a.min + (a.max - a.min) * u_amp)
        });
        let mut peaks = vec![(true_peak, 1.0)];
        if let Some((nb, amp)) = spurious {
            peaks.push((Point::new(gt[nb].x + j * sx, gt[nb].y + j * sy), amp));
        }
        let heatmap = render_peaks(&peaks, model.heatmap_sigma, width, height);
        channels.push(SimulatedChannel {
            heatmap,
            true_peak,
            spurious,
        });
    }
    Ok(channels)
}

/// Simulated heatmap stack, one channel per ground-truth point.
pub fn simulate_heatmaps<R: Rng + ?Sized>(
    rng: &mut R,
    gt: &[Point],
    model: &HeatmapPredictorModel,
    width: u32,
    height: u32,
) -> Result<Vec<Heatmap>> {
    Ok(simulate_heatmap_channels(rng, gt, model, width, height)?
        .into_iter()
        .map(|c| c.heatmap)
        .collect())
}

/// Everything needed for one Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig {
    /// Number of synthetic images; each contributes `landmark_count` trials.
    pub images: usize,
    pub threshold_mm: f64,
    pub phantom: PhantomConfig,
    pub coords: CoordPredictorModel,
    pub heatmaps: HeatmapPredictorModel,
    pub fusion: FusionConfig,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            images: 100,
            threshold_mm: DEFAULT_THRESHOLD_MM,
            phantom: PhantomConfig::default(),
            coords: CoordPredictorModel::default(),
            heatmaps: HeatmapPredictorModel::default(),
            fusion: FusionConfig::default(),
        }
    }
}

/// Single-branch targets the calibrated preset aims for.
pub const CALIBRATED_COORD_ACCURACY: f64 = 0.713;
pub const CALIBRATED_HEATMAP_ACCURACY: f64 = 0.65;

impl SimulationConfig {
    /// Both predictors exact.
    pub fn noiseless() -> Self {
        let mut cfg = Self::default();
        cfg.phantom.snap_to_grid = true;
        cfg.coords = CoordPredictorModel {
            noise_sigma: 0.0,
            outlier_rate: 0.0,
            outlier_sigma: 0.0,
        };
        cfg.heatmaps.peak_jitter_sigma = 0.0;
        cfg.heatmaps.adjacent_confusion_prob = 0.0;
        cfg.images = 4;
        cfg
    }

    /// Coordinate branch tuned to ~71% and heatmap branch to ~65% standalone
    /// accuracy at 8 mm, on a 256 px grid at 1 mm/px (landmarks 20 mm apart).
    pub fn calibrated(images: usize) -> Self {
        let phantom = PhantomConfig {
            width: 256,
            height: 256,
            spacing_mm_per_px: 1.0,
            inter_landmark_px: 20.0,
            wobble_px: 3.0,
            margin_px: 16.0,
            ..PhantomConfig::default()
        };
        let threshold_px = DEFAULT_THRESHOLD_MM / phantom.spacing_mm_per_px;
        let spurious_amplitude = Range::new(0.9, 1.1);
        // fraction of confusions whose spurious peak outgrows the true one
        let p_win = (spurious_amplitude.max - 1.0) / (spurious_amplitude.max - spurious_amplitude.min);
        Self {
            images,
            threshold_mm: DEFAULT_THRESHOLD_MM,
            phantom,
            coords: CoordPredictorModel {
                noise_sigma: rayleigh_sigma_for_accuracy(threshold_px, CALIBRATED_COORD_ACCURACY),
                outlier_rate: 0.0,
                outlier_sigma: 0.0,
            },
            heatmaps: HeatmapPredictorModel {
                peak_jitter_sigma: 0.5,
                heatmap_sigma: LABEL_SIGMA,
                adjacent_confusion_prob: (1.0 - CALIBRATED_HEATMAP_ACCURACY) / p_win,
                spurious_amplitude,
            },
            fusion: FusionConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.coords.validate()?;
        self.heatmaps.validate()?;
        self.fusion.validate_for(self.phantom.landmark_count)?;
        if !(self.threshold_mm.is_finite() && self.threshold_mm > 0.0) {
            return Err(Error::InvalidParameter("threshold must be > 0".into()));
        }
        Ok(())
    }
}

/// Predictions of all three methods for one synthetic image.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageOutcome {
    pub ground_truth: Vec<Point>,
    pub coords: Vec<Point>,
    pub heatmap: Vec<Point>,
    pub fused: Vec<Point>,
}

/// Simulates image `index`. Streams depend only on the seed and the index.
pub fn simulate_image(seed: RngSeed, config: &SimulationConfig, index: u64) -> Result<ImageOutcome> {
    let phantom = generate_phantom(&mut seed.stream(StreamKind::Phantom, index), &config.phantom)?;
    let gt = phantom.landmarks.points().to_vec();
    let coords = simulate_coords(&mut seed.stream(StreamKind::Coords, index), &gt, &config.coords)?;
    let (w, h) = (config.phantom.width, config.phantom.height);
    let stack = simulate_heatmaps(
        &mut seed.stream(StreamKind::Heatmaps, index),
        &gt,
        &config.heatmaps,
        w,
        h,
    )?;
    let mut heatmap = Vec::with_capacity(gt.len());
    let mut fused = Vec::with_capacity(gt.len());
    for (k, (hm, &c)) in stack.iter().zip(&coords).enumerate() {
        let (x, y) = decode_argmax(hm)?;
        heatmap.push(Point::new(x as f64, y as f64));
        fused.push(fuse_channel(hm, c, k, &config.fusion)?);
    }
    Ok(ImageOutcome {
        ground_truth: gt,
        coords,
        heatmap,
        fused,
    })
}

/// Accuracy of the three methods over the same trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub seed: u64,
    pub images: usize,
    pub landmarks: usize,
    pub coords: EvalReport,
    pub heatmap: EvalReport,
    pub fused: EvalReport,
    pub fused_vs_coords: AccuracyDelta,
    pub fused_vs_heatmap: AccuracyDelta,
}

/// Runs `config.images` independent images and scores all three methods.
/// Images may be simulated in parallel; results are reduced in index order.
pub fn run_trial(seed: RngSeed, config: &SimulationConfig) -> Result<SimulationReport> {
    config.validate()?;
    let outcomes: Vec<ImageOutcome> = (0..config.images as u64)
        .into_par_iter()
        .map(|i| simulate_image(seed, config, i))
        .collect::<Result<_>>()?;
    let spacing = config.phantom.spacing_mm_per_px;
    let mut evals = [
        Evaluator::new(config.threshold_mm)?,
        Evaluator::new(config.threshold_mm)?,
        Evaluator::new(config.threshold_mm)?,
    ];
    for o in &outcomes {
        evals[0].add(&o.coords, &o.ground_truth, spacing)?;
        evals[1].add(&o.heatmap, &o.ground_truth, spacing)?;
        evals[2].add(&o.fused, &o.ground_truth, spacing)?;
    }
    let [coords, heatmap, fused] = [evals[0].finish()?, evals[1].finish()?, evals[2].finish()?];
    Ok(SimulationReport {
        seed: seed.0,
        images: config.images,
        landmarks: coords.total,
        fused_vs_coords: accuracy_delta(coords.accuracy, fused.accuracy),
        fused_vs_heatmap: accuracy_delta(heatmap.accuracy, fused.accuracy),
        coords,
        heatmap,
        fused,
    })
}

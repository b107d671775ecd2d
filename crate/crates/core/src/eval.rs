//! Percentage-of-correct-keypoints at a millimeter threshold.
//!
//! A landmark is a hit when its Euclidean error, converted to millimeters
//! with the image's pixel spacing, is strictly below the threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::Point;

/// Threshold used throughout for a "correct" landmark.
pub const DEFAULT_THRESHOLD_MM: f64 = 8.0;

pub fn landmark_error_mm(pred: Point, gt: Point, spacing: f64) -> f64 {
    pred.distance(gt) * spacing
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandmarkRow {
    pub index: usize,
    pub total: usize,
    pub hits: usize,
    pub mean_error_mm: f64,
    pub max_error_mm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub total: usize,
    pub hits: usize,
    pub accuracy: f64,
    pub threshold_mm: f64,
    /// Shared spacing, absent when images had different spacings.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing_mm_per_px: Option<f64>,
    pub per_landmark: Vec<LandmarkRow>,
}

impl EvalReport {
    pub fn misses(&self) -> usize {
        self.total - self.hits
    }
}

/// Absolute and relative change between two accuracies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyDelta {
    pub absolute: f64,
    pub relative: f64,
}

pub fn accuracy_delta(baseline: f64, improved: f64) -> AccuracyDelta {
    AccuracyDelta {
        absolute: improved - baseline,
        relative: improved / baseline - 1.0,
    }
}

/// Pairwise summation, so the result does not depend on how work was chunked.
pub(crate) fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n if n <= 8 => v.iter().sum(),
        n => {
            let (a, b) = v.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Accumulates per-image errors, then builds an [`EvalReport`].
#[derive(Debug, Clone)]
pub struct Evaluator {
    threshold_mm: f64,
    spacing: Option<Option<f64>>,
    errors: Vec<Vec<f64>>,
}

impl Evaluator {
    pub fn new(threshold_mm: f64) -> Result<Self> {
        if !(threshold_mm.is_finite() && threshold_mm > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "threshold {threshold_mm} mm must be > 0"
            )));
        }
        Ok(Self {
            threshold_mm,
            spacing: None,
            errors: Vec::new(),
        })
    }

    /// Adds one image. Every image must have the same landmark count.
    pub fn add(&mut self, preds: &[Point], gts: &[Point], spacing: f64) -> Result<()> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::NonPositiveSpacing(spacing));
        }
        if preds.len() != gts.len() {
            return Err(Error::EvalShape(format!(
                "{} predictions for {} ground-truth landmarks",
                preds.len(),
                gts.len()
            )));
        }
        if self.errors.is_empty() {
            self.errors = vec![Vec::new(); gts.len()];
        } else if self.errors.len() != gts.len() {
            return Err(Error::EvalShape(format!(
                "image has {} landmarks, earlier images had {}",
                gts.len(),
                self.errors.len()
            )));
        }
        self.spacing = match self.spacing {
            None => Some(Some(spacing)),
            Some(Some(s)) if s == spacing => Some(Some(s)),
            _ => Some(None),
        };
        for ((slot, &p), &g) in self.errors.iter_mut().zip(preds).zip(gts) {
            slot.push(landmark_error_mm(p, g, spacing));
        }
        Ok(())
    }

    pub fn finish(&self) -> Result<EvalReport> {
        let mut per_landmark = Vec::with_capacity(self.errors.len());
        let (mut total, mut hits) = (0, 0);
        for (index, errs) in self.errors.iter().enumerate() {
            let n = errs.len();
            let h = errs.iter().filter(|&&e| e < self.threshold_mm).count();
            total += n;
            hits += h;
            per_landmark.push(LandmarkRow {
                index,
                total: n,
                hits: h,
                mean_error_mm: if n == 0 { 0.0 } else { pairwise_sum(errs) / n as f64 },
                max_error_mm: errs.iter().copied().fold(0.0, f64::max),
            });
        }
        if total == 0 {
            return Err(Error::EmptyEvaluation);
        }
        Ok(EvalReport {
            total,
            hits,
            accuracy: hits as f64 / total as f64,
            threshold_mm: self.threshold_mm,
            spacing_mm_per_px: self.spacing.flatten(),
            per_landmark,
        })
    }
}

/// PCK over paired prediction and ground-truth sets sharing one spacing.
pub fn pck<P: AsRef<[Point]>, G: AsRef<[Point]>>(
    preds: &[P],
    gts: &[G],
    threshold_mm: f64,
    spacing: f64,
) -> Result<EvalReport> {
    if preds.len() != gts.len() {
        return Err(Error::EvalShape(format!(
            "{} prediction sets for {} ground-truth sets",
            preds.len(),
            gts.len()
        )));
    }
    let mut ev = Evaluator::new(threshold_mm)?;
    for (p, g) in preds.iter().zip(gts) {
        ev.add(p.as_ref(), g.as_ref(), spacing)?;
    }
    ev.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn error_fixtures() {
        let g = Point::new(10.0, 10.0);
        assert_eq!(landmark_error_mm(g, g, 0.5), 0.0);
        assert_eq!(landmark_error_mm(Point::new(13.0, 14.0), g, 1.0), 5.0);
        assert_eq!(landmark_error_mm(Point::new(26.0, 10.0), g, 0.5), 8.0);
    }

    /// 50 images of 11 landmarks where the first `misses` landmarks (in
    /// image-major order) are displaced 20 px at 0.5 mm/px.
    fn fixture(misses: usize) -> (Vec<Vec<Point>>, Vec<Vec<Point>>) {
        let gts: Vec<Vec<Point>> = (0..50)
            .map(|_| (0..11).map(|k| Point::new(100.0, 40.0 + 30.0 * k as f64)).collect())
            .collect();
        let mut preds = gts.clone();
        for i in 0..misses {
            preds[i / 11][i % 11].x += 20.0;
        }
        (preds, gts)
    }

    #[test]
    fn reported_accuracy_arithmetic() {
        let (p, g) = fixture(2);
        let r = pck(&p, &g, 8.0, 0.5).unwrap();
        assert_eq!((r.total, r.hits), (550, 548));
        assert!((r.accuracy - 0.9964).abs() < 1e-4);
        let (p, g) = fixture(158);
        let r = pck(&p, &g, 8.0, 0.5).unwrap();
        assert_eq!(r.hits, 392);
        assert!((r.accuracy - 0.7127).abs() < 1e-4);
    }

    #[test]
    fn exactly_at_threshold_is_a_miss() {
        let g = vec![vec![Point::new(10.0, 10.0)]];
        let p = vec![vec![Point::new(26.0, 10.0)]];
        assert_eq!(pck(&p, &g, 8.0, 0.5).unwrap().hits, 0);
        let p = vec![vec![Point::new(25.999, 10.0)]];
        assert_eq!(pck(&p, &g, 8.0, 0.5).unwrap().hits, 1);
    }

    #[test]
    fn empty_and_mismatched_inputs() {
        let none: Vec<Vec<Point>> = vec![];
        assert!(matches!(pck(&none, &none, 8.0, 0.5), Err(Error::EmptyEvaluation)));
        let g = vec![vec![Point::default(); 2]];
        let p = vec![vec![Point::default(); 3]];
        assert!(matches!(pck(&p, &g, 8.0, 0.5), Err(Error::EvalShape(_))));
        assert!(matches!(
            pck(&p, &[] as &[Vec<Point>], 8.0, 0.5),
            Err(Error::EvalShape(_))
        ));
    }

    #[test]
    fn per_landmark_rows() {
        let (p, g) = fixture(13);
        let r = pck(&p, &g, 8.0, 0.5).unwrap();
        assert_eq!(r.per_landmark.len(), 11);
        assert_eq!(r.per_landmark[0].hits, 48);
        assert_eq!(r.per_landmark[2].hits, 49);
        assert_eq!(r.per_landmark[0].max_error_mm, 10.0);
        assert_eq!(r.per_landmark.iter().map(|l| l.total).sum::<usize>(), r.total);
        assert_eq!(r.spacing_mm_per_px, Some(0.5));
    }

    #[test]
    fn mixed_spacing_drops_shared_spacing() {
        let mut ev = Evaluator::new(8.0).unwrap();
        ev.add(&[Point::default()], &[Point::default()], 0.5).unwrap();
        ev.add(&[Point::default()], &[Point::default()], 1.0).unwrap();
        assert_eq!(ev.finish().unwrap().spacing_mm_per_px, None);
    }

    #[test]
    fn delta_reports_both_forms() {
        let d = accuracy_delta(0.713, 0.996);
        assert!((d.absolute - 0.283).abs() < 1e-12);
        assert!((d.relative - 0.3969).abs() < 1e-4);
    }

    fn arb_sets() -> impl Strategy<Value = (Vec<Vec<Point>>, Vec<Vec<Point>>)> {
        (1usize..6, 1usize..8).prop_flat_map(|(imgs, n)| {
            let set = || {
                proptest::collection::vec(
                    proptest::collection::vec((0.0f64..64.0, 0.0f64..64.0).prop_map(Point::from), n),
                    imgs,
                )
            };
            (set(), set())
        })
    }

    proptest! {
        #[test]
        fn image_order_does_not_matter((p, g) in arb_sets(), rot in 0usize..6) {
            let a = pck(&p, &g, 8.0, 0.5).unwrap();
            let k = rot % p.len();
            let (mut p2, mut g2) = (p.clone(), g.clone());
            p2.rotate_left(k);
            g2.rotate_left(k);
            let b = pck(&p2, &g2, 8.0, 0.5).unwrap();
            prop_assert_eq!(a.hits, b.hits);
            prop_assert_eq!(a.total, b.total);
        }

        #[test]
        fn monotone_in_threshold((p, g) in arb_sets(), t1 in 0.1f64..20.0, t2 in 0.1f64..20.0) {
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            prop_assert!(pck(&p, &g, lo, 0.5).unwrap().accuracy <= pck(&p, &g, hi, 0.5).unwrap().accuracy);
        }

        #[test]
        fn per_landmark_hits_sum((p, g) in arb_sets()) {
            let r = pck(&p, &g, 8.0, 0.5).unwrap();
            prop_assert_eq!(r.per_landmark.iter().map(|l| l.hits).sum::<usize>(), r.hits);
        }
    }
}

//! Intensity and size normalization applied before anything sees an image.
//!
//! Pipeline order is equalize, then augment, then resize to the working size.

use crate::error::Result;
use crate::types::{convert_frame, Frame, GrayImage, LandmarkSet};

/// Working resolution of the heatmap branch.
pub const WORKING_SIZE: u32 = 512;
/// Input resolution of the coordinate-regression branch.
pub const REGRESSOR_SIZE: u32 = 299;

/// Rounds half away from zero and saturates to `0..=255`.
pub(crate) fn to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Global histogram equalization.
///
/// `v' = round((cdf(v) - cdf_min) / (P - cdf_min) * 255)` where `cdf_min` is
/// the smallest non-zero cumulative count. A constant image has a zero
/// denominator and is returned unchanged.
pub fn equalize_histogram(img: &GrayImage) -> GrayImage {
    let mut hist = [0u64; 256];
    for &v in img.pixels() {
        hist[v as usize] += 1;
    }
    let mut cdf = [0u64; 256];
    let mut acc = 0;
    for (c, h) in cdf.iter_mut().zip(hist) {
        acc += h;
        *c = acc;
    }
    let total = img.pixels().len() as u64;
    let cdf_min = cdf.iter().copied().find(|&c| c > 0).unwrap_or(0);
    let denom = total - cdf_min;
    if denom == 0 {
        return img.clone();
    }
    let lut: Vec<u8> = cdf
        .iter()
        .map(|&c| to_u8(c.saturating_sub(cdf_min) as f64 / denom as f64 * 255.0))
        .collect();
    let pixels = img.pixels().iter().map(|&v| lut[v as usize]).collect();
    GrayImage::new(img.width(), img.height(), pixels, img.spacing()).expect("equalization preserves shape")
}

/// Bilinear resize with half-pixel centers and edge clamping.
///
/// Output pixel `(x, y)` samples the source at
/// `((x + 0.5) * w / out_w - 0.5, (y + 0.5) * h / out_h - 0.5)`.
/// Spacing is rescaled by `w / out_w`.
pub fn resize_bilinear(img: &GrayImage, out_w: u32, out_h: u32) -> Result<GrayImage> {
    let (w, h) = img.dims();
    let spacing = img.spacing() * w as f64 / out_w.max(1) as f64;
    if (out_w, out_h) == (w, h) {
        return Ok(img.clone());
    }
    if out_w == 0 || out_h == 0 {
        return GrayImage::new(out_w, out_h, Vec::new(), spacing);
    }
    let sx = w as f64 / out_w as f64;
    let sy = h as f64 / out_h as f64;
    let src = img.pixels();
    let max_x = (w - 1) as f64;
    let max_y = (h - 1) as f64;
    let mut out = Vec::with_capacity(out_w as usize * out_h as usize);
    for oy in 0..out_h {
        let fy = ((oy as f64 + 0.5) * sy - 0.5).clamp(0.0, max_y);
        let y0 = fy.floor() as usize;
        let y1 = (y0 + 1).min(h as usize - 1);
        let ty = fy - y0 as f64;
        for ox in 0..out_w {
            let fx = ((ox as f64 + 0.5) * sx - 0.5).clamp(0.0, max_x);
            let x0 = fx.floor() as usize;
            let x1 = (x0 + 1).min(w as usize - 1);
            let tx = fx - x0 as f64;
            let at = |x: usize, y: usize| src[y * w as usize + x] as f64;
            let top = at(x0, y0) * (1.0 - tx) + at(x1, y0) * tx;
            let bottom = at(x0, y1) * (1.0 - tx) + at(x1, y1) * tx;
            out.push(to_u8(top * (1.0 - ty) + bottom * ty));
        }
    }
    GrayImage::new(out_w, out_h, out, spacing)
}

/// Rescales pixel landmarks from one image size to another.
pub fn resize_landmarks(lms: &LandmarkSet, from: (u32, u32), to: (u32, u32)) -> Result<LandmarkSet> {
    let source = LandmarkSet::new(
        lms.points().to_vec(),
        Frame::Pixel {
            width: from.0,
            height: from.1,
        },
    )?;
    convert_frame(
        &source,
        Frame::Pixel {
            width: to.0,
            height: to.1,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Point;
    use proptest::prelude::*;

    fn img(w: u32, h: u32, px: &[u8]) -> GrayImage {
        GrayImage::new(w, h, px.to_vec(), 1.0).unwrap()
    }

    #[test]
    fn constant_image_is_unchanged() {
        let i = img(3, 3, &[77; 9]);
        assert_eq!(equalize_histogram(&i), i);
    }

    #[test]
    fn two_level_fixture() {
        let out = equalize_histogram(&img(2, 2, &[0, 0, 255, 255]));
        assert_eq!(out.pixels(), &[0, 0, 255, 255]);
    }

    #[test]
    fn three_level_fixture() {
        let out = equalize_histogram(&img(2, 2, &[10, 20, 20, 30]));
        assert_eq!(out.pixels(), &[0, 170, 170, 255]);
    }

    #[test]
    fn equalize_keeps_shape_and_spacing() {
        let i = GrayImage::new(2, 1, vec![3, 9], 0.7).unwrap();
        let o = equalize_histogram(&i);
        assert_eq!((o.dims(), o.spacing()), ((2, 1), 0.7));
    }

    #[test]
    fn resize_identity() {
        let i = img(3, 2, &[1, 2, 3, 4, 5, 6]);
        assert_eq!(resize_bilinear(&i, 3, 2).unwrap(), i);
    }

    #[test]
    fn resize_constant_extension() {
        let o = resize_bilinear(&img(1, 1, &[42]), 3, 3).unwrap();
        assert_eq!(o.pixels(), &[42; 9]);
    }

    #[test]
    fn resize_two_to_four() {
        // Output centers map to source x = -0.25, 0.25, 0.75, 1.25.
        let o = resize_bilinear(&img(2, 1, &[0, 100]), 4, 1).unwrap();
        assert_eq!(o.pixels(), &[0, 25, 75, 100]);
    }

    #[test]
    fn resize_rescales_spacing() {
        let i = GrayImage::new(4, 4, vec![0; 16], 0.5).unwrap();
        assert_eq!(resize_bilinear(&i, 2, 2).unwrap().spacing(), 1.0);
    }

    #[test]
    fn landmark_resize_fixtures() {
        let lms = LandmarkSet::pixels(vec![Point::new(256.0, 256.0), Point::new(0.0, 0.0)], 512, 512).unwrap();
        let r = resize_landmarks(&lms, (512, 512), (299, 299)).unwrap();
        assert_eq!(r.points(), &[Point::new(149.5, 149.5), Point::new(0.0, 0.0)]);
        let lms = LandmarkSet::pixels(vec![Point::new(100.0, 400.0)], 512, 512).unwrap();
        let r = resize_landmarks(&lms, (512, 512), (256, 256)).unwrap();
        assert_eq!(r.points(), &[Point::new(50.0, 200.0)]);
    }

    #[test]
    fn landmark_resize_rejects_out_of_bounds() {
        let lms = LandmarkSet::pixels(vec![Point::new(600.0, 10.0)], 1024, 1024).unwrap();
        assert!(resize_landmarks(&lms, (512, 512), (256, 256)).is_err());
    }

    fn arb_image() -> impl Strategy<Value = GrayImage> {
        (1u32..12, 1u32..12).prop_flat_map(|(w, h)| {
            proptest::collection::vec(any::<u8>(), (w * h) as usize)
                .prop_map(move |px| GrayImage::new(w, h, px, 1.0).unwrap())
        })
    }

    proptest! {
        #[test]
        fn equalization_preserves_order(i in arb_image()) {
            let o = equalize_histogram(&i);
            for (a, oa) in i.pixels().iter().zip(o.pixels()) {
                for (b, ob) in i.pixels().iter().zip(o.pixels()) {
                    if a <= b {
                        prop_assert!(oa <= ob);
                    }
                }
            }
        }

        #[test]
        fn equalization_idempotent_on_two_levels(
            lo in any::<u8>(), hi in any::<u8>(), mask in proptest::collection::vec(any::<bool>(), 1..40)
        ) {
            let px: Vec<u8> = mask.iter().map(|&m| if m { hi } else { lo }).collect();
            let i = GrayImage::new(px.len() as u32, 1, px, 1.0).unwrap();
            let once = equalize_histogram(&i);
            prop_assert_eq!(equalize_histogram(&once), once);
        }

        #[test]
        fn resize_stays_in_input_range(i in arb_image(), ow in 1u32..20, oh in 1u32..20) {
            let lo = *i.pixels().iter().min().unwrap();
            let hi = *i.pixels().iter().max().unwrap();
            let o = resize_bilinear(&i, ow, oh).unwrap();
            prop_assert!(o.pixels().iter().all(|&v| v >= lo && v <= hi));
        }

        #[test]
        fn resize_then_normalize_matches_direct(
            x in 0.0f64..512.0, y in 0.0f64..512.0, tw in 1u32..1024, th in 1u32..1024
        ) {
            let lms = LandmarkSet::pixels(vec![Point::new(x, y)], 512, 512).unwrap();
            let direct = convert_frame(&lms, Frame::Normalized).unwrap();
            let Ok(resized) = resize_landmarks(&lms, (512, 512), (tw, th)) else {
                // rounding can push a point sitting just below the edge onto it
                return Ok(());
            };
            let via = convert_frame(&resized, Frame::Normalized).unwrap();
            let (a, b) = (direct.points()[0], via.points()[0]);
            prop_assert!((a.x - b.x).abs() < 1e-9 && (a.y - b.y).abs() < 1e-9);
        }
    }
}

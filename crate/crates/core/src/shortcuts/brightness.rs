//! Brightness modulation masks.
//!
//! A class mask starts at all ones; `T` iterations each pick a square and
//! multiply the covered entries by `gamma` (darken) or `2 - gamma` (brighten),
//! chosen with equal probability. Overlaps compound, which is what produces
//! the checkerboard look. Factors are shared across channels.

use crate::error::{Error, Result};
use crate::image::{Image, ImageShape};
use crate::real::Real;
use crate::rng::Prng;

/// Per-class multiplicative brightness field. One factor per `(x, y)`
/// location, applied to every channel.
#[derive(Debug, Clone, PartialEq)]
pub struct BrightnessMask {
    shape: ImageShape,
    class: usize,
    factors: Vec<f64>,
}

impl BrightnessMask {
    pub fn shape(&self) -> ImageShape {
        self.shape
    }

    pub fn class(&self) -> usize {
        self.class
    }

    /// Factor at `(x, y)`, identical for all channels there.
    #[inline]
    pub fn factor_at(&self, x: usize, y: usize) -> f64 {
        self.factors[y * self.shape.width + x]
    }

    pub fn factors(&self) -> &[f64] {
        &self.factors
    }

    /// Inspection export: factors span `(0, 2]`-ish, so map `f / 2` into the
    /// image range.
    pub fn to_image<T: Real>(&self) -> Image<T> {
        Image::from_fn(self.shape, |x, y, _| {
            T::from_f64_lossy((self.factor_at(x, y) / 2.0).clamp(0.0, 1.0))
        })
    }
}

/// Multiplies `factor` over the square of side `side` centered at
/// `(cx, cy)`, cropped at the image borders.
fn apply_square(
    factors: &mut [f64],
    width: usize,
    height: usize,
    cx: usize,
    cy: usize,
    side: usize,
    factor: f64,
) {
    let lo = ((side - 1) / 2) as isize;
    let x0 = (cx as isize - lo).max(0) as usize;
    let y0 = (cy as isize - lo).max(0) as usize;
    let x1 = (cx as isize - lo + side as isize).min(width as isize) as usize;
    let y1 = (cy as isize - lo + side as isize).min(height as isize) as usize;
    for y in y0..y1 {
        for x in x0..x1 {
            factors[y * width + x] *= factor;
        }
    }
}

/// Samples the brightness mask for `class` from its child stream. Each of the
/// `iterations` steps draws center-x, center-y, then the darken/brighten bit
/// (a unit draw under 0.5 darkens), in that fixed order.
pub fn generate_brightness_mask(
    class: usize,
    shape: ImageShape,
    gamma: f64,
    iterations: u32,
    square_side: usize,
    seed: u64,
) -> Result<BrightnessMask> {
    if !(0.5..=1.0).contains(&gamma) {
        return Err(Error::param(format!("gamma must be in [0.5, 1], got {gamma}")));
    }
    if iterations == 0 {
        return Err(Error::param("brightness iterations must be >= 1".to_string()));
    }
    if square_side == 0 {
        return Err(Error::param("square side must be >= 1".to_string()));
    }
    let (w, h) = (shape.width, shape.height);
    let mut rng = Prng::child(seed, class as u64);
    let mut factors = vec![1.0f64; w * h];
    for _ in 0..iterations {
        let cx = rng.next_index(w);
        let cy = rng.next_index(h);
        let darken = rng.next_unit() < 0.5;
        let factor = if darken { gamma } else { 2.0 - gamma };
        apply_square(&mut factors, w, h, cx, cy, square_side, factor);
    }
    Ok(BrightnessMask { shape, class, factors })
}

/// `clamp01(mask * image)`: elementwise product, then clamp (brighten factors
/// can push values above one).
pub fn apply_brightness_modulation<T: Real>(
    img: &Image<T>,
    mask: &BrightnessMask,
) -> Result<Image<T>> {
    if img.shape() != mask.shape {
        return Err(Error::shape(format!(
            "image {} vs brightness mask {}",
            img.shape(),
            mask.shape
        )));
    }
    let out = Image::from_fn(img.shape(), |x, y, c| {
        let v = img.at(x, y, c) * T::from_f64_lossy(mask.factor_at(x, y));
        if v < T::zero() {
            T::zero()
        } else if v > T::one() {
            T::one()
        } else {
            v
        }
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHAPE: ImageShape = ImageShape { width: 16, height: 16, channels: 3 };

    #[test]
    fn gamma_one_is_all_ones_mask() {
        let mask = generate_brightness_mask(0, SHAPE, 1.0, 50, 4, 9).unwrap();
        assert!(mask.factors().iter().all(|&f| f == 1.0));
    }

    #[test]
    fn parameter_validation() {
        assert!(generate_brightness_mask(0, SHAPE, 0.4, 1, 4, 0).is_err());
        assert!(generate_brightness_mask(0, SHAPE, 1.1, 1, 4, 0).is_err());
        assert!(generate_brightness_mask(0, SHAPE, 0.9, 0, 4, 0).is_err());
        assert!(generate_brightness_mask(0, SHAPE, 0.9, 1, 0, 0).is_err());
    }

    #[test]
    fn single_darken_square_hand_trace() {
        let mut factors = vec![1.0f64; 16 * 16];
        apply_square(&mut factors, 16, 16, 5, 5, 3, 0.9);
        for y in 0..16 {
            for x in 0..16 {
                let inside = (4..=6).contains(&x) && (4..=6).contains(&y);
                let expect = if inside { 0.9 } else { 1.0 };
                assert_eq!(factors[y * 16 + x], expect, "at ({x},{y})");
            }
        }
    }

    #[test]
    fn overlapping_brighten_squares_compound() {
        let mut factors = vec![1.0f64; 16 * 16];
        apply_square(&mut factors, 16, 16, 4, 4, 4, 1.1);
        apply_square(&mut factors, 16, 16, 5, 4, 4, 1.1);
        // (4, 4) sits in both squares: (1.1)^2 = 1.21.
        assert!((factors[4 * 16 + 4] - 1.21).abs() < 1e-12);
        // (2, 4) only in the second square's left column? square 1 spans
        // x in [3, 6], square 2 spans x in [4, 7]; x = 3 is in square 1 only.
        assert!((factors[4 * 16 + 3] - 1.1).abs() < 1e-12);
    }

    #[test]
    fn squares_crop_at_borders() {
        let mut factors = vec![1.0f64; 8 * 8];
        apply_square(&mut factors, 8, 8, 0, 0, 5, 0.5);
        // Center (0,0), side 5: rows/cols -2..=2 intersect to 0..=2.
        for y in 0..8 {
            for x in 0..8 {
                let inside = x <= 2 && y <= 2;
                let expect = if inside { 0.5 } else { 1.0 };
                assert_eq!(factors[y * 8 + x], expect);
            }
        }
    }

    #[test]
    fn entries_have_expected_form() {
        let gamma = 0.8;
        let t = 12;
        let mask = generate_brightness_mask(2, SHAPE, gamma, t, 5, 77).unwrap();
        // Every factor must be gamma^a * (2-gamma)^b with a + b <= T.
        for &f in mask.factors() {
            let mut found = false;
            'search: for a in 0..=t {
                for b in 0..=(t - a) {
                    let cand = gamma.powi(a as i32) * (2.0 - gamma).powi(b as i32);
                    if (f - cand).abs() < 1e-9 {
                        found = true;
                        break 'search;
                    }
                }
            }
            assert!(found, "factor {f} not of the form gamma^a (2-gamma)^b");
            assert!(f > 0.0);
        }
    }

    #[test]
    fn mask_deterministic_and_class_dependent() {
        let a = generate_brightness_mask(1, SHAPE, 0.9, 32, 4, 5).unwrap();
        let b = generate_brightness_mask(1, SHAPE, 0.9, 32, 4, 5).unwrap();
        assert_eq!(a, b);
        let c = generate_brightness_mask(2, SHAPE, 0.9, 32, 4, 5).unwrap();
        assert_ne!(a.factors(), c.factors());
    }

    #[test]
    fn apply_all_ones_is_identity() {
        let mask = generate_brightness_mask(0, SHAPE, 1.0, 5, 4, 0).unwrap();
        let img = Image::<f64>::from_fn(SHAPE, |x, y, c| ((x + 2 * y + c) % 10) as f64 / 9.0);
        let out = apply_brightness_modulation(&img, &mask).unwrap();
        assert_eq!(out.data(), img.data());
    }

    #[test]
    fn apply_products_and_clamp() {
        let shape = ImageShape::new(2, 1, 1);
        let img = Image::<f64>::new(shape, vec![0.5, 0.9]).unwrap();
        let mask = BrightnessMask { shape, class: 0, factors: vec![0.9, 1.21] };
        let out = apply_brightness_modulation(&img, &mask).unwrap();
        assert!((out.at(0, 0, 0) - 0.45).abs() < 1e-15);
        // 1.21 * 0.9 = 1.089 clamps to 1.
        assert_eq!(out.at(1, 0, 0), 1.0);
    }

    #[test]
    fn apply_rejects_shape_mismatch() {
        let img = Image::<f64>::filled(ImageShape::new(4, 4, 1), 0.5).unwrap();
        let mask = generate_brightness_mask(0, SHAPE, 0.9, 4, 4, 0).unwrap();
        assert!(matches!(apply_brightness_modulation(&img, &mask), Err(Error::Shape(_))));
    }

    #[test]
    fn factors_equal_across_channels_by_construction() {
        let mask = generate_brightness_mask(3, SHAPE, 0.7, 32, 4, 11).unwrap();
        let img = Image::<f64>::filled(SHAPE, 0.5).unwrap();
        let out = apply_brightness_modulation(&img, &mask).unwrap();
        for y in 0..SHAPE.height {
            for x in 0..SHAPE.width {
                assert_eq!(out.at(x, y, 0), out.at(x, y, 1));
                assert_eq!(out.at(x, y, 0), out.at(x, y, 2));
            }
        }
    }
}

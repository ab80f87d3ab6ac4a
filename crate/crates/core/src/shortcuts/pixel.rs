//! Sparse pixel-based patterns.
//!
//! Each class gets a fixed binary mask; masked pixels are set to the maximum
//! brightness. Mask entries are sampled independently per channel: a
//! threshold test on Gaussian draws, one draw per entry in planar scan order.

use crate::error::{Error, Result};
use crate::image::{Image, ImageShape};
use crate::real::Real;
use crate::rng::Prng;

/// Per-class binary perturbation mask over the full `w x h x c` tensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelMask {
    shape: ImageShape,
    class: usize,
    bits: Vec<bool>,
}

impl PixelMask {
    pub fn shape(&self) -> ImageShape {
        self.shape
    }

    pub fn class(&self) -> usize {
        self.class
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of one-entries.
    pub fn ones_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Indices (planar order) of the one-entries.
    pub fn ones_indices(&self) -> Vec<usize> {
        self.bits
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
            .collect()
    }

    /// Renders the mask as a 0/1-valued image for inspection export.
    pub fn to_image<T: Real>(&self) -> Image<T> {
        let data = self
            .bits
            .iter()
            .map(|&b| if b { T::one() } else { T::zero() })
            .collect();
        Image::from_vec_unchecked(self.shape, data)
    }

    #[cfg(test)]
    pub(crate) fn from_bits(shape: ImageShape, class: usize, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), shape.len());
        PixelMask { shape, class, bits }
    }
}

/// Samples the mask for `class`: one Gaussian draw per entry from the class
/// child stream, entry set where the draw exceeds the middle of the
/// brightness range (0.5 under 0-1 normalization).
pub fn generate_pixel_mask(
    class: usize,
    shape: ImageShape,
    mu: f64,
    sigma: f64,
    seed: u64,
) -> Result<PixelMask> {
    if sigma <= 0.0 {
        return Err(Error::param(format!("pixel mask sigma must be > 0, got {sigma}")));
    }
    let mut rng = Prng::child(seed, class as u64);
    let bits = (0..shape.len())
        .map(|_| rng.next_gaussian(mu, sigma) > 0.5)
        .collect();
    Ok(PixelMask { shape, class, bits })
}

/// Masked pixels become exactly 1.0 (the dataset maximum), others pass
/// through untouched: `(1 - mask) * x + mask * x_max`.
pub fn apply_pixel_pattern<T: Real>(img: &Image<T>, mask: &PixelMask) -> Result<Image<T>> {
    if img.shape() != mask.shape {
        return Err(Error::shape(format!(
            "image {} vs pixel mask {}",
            img.shape(),
            mask.shape
        )));
    }
    let data = img
        .data()
        .iter()
        .zip(mask.bits.iter())
        .map(|(&v, &on)| if on { T::one() } else { v })
        .collect();
    Ok(Image::from_vec_unchecked(img.shape(), data))
}

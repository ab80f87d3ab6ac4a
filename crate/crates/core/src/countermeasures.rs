//! Adversary-side countermeasures: Gaussian noise and aggressive train-time
//! augmentations.
//!
//! These simulate an adversary trying to wash out a protection before or
//! during training. Every stage is a pure function of `(image, rng)`; the
//! fixed draw order per stage keeps augmented streams reproducible.

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::image::{Image, ImageShape};
use crate::parallel::par_map_indices;
use crate::real::Real;
use crate::rng::Prng;
use serde::{Deserialize, Serialize};

/// Parameters for the augmentation pipeline. Defaults are the aggressive
/// settings; a disabled stage is expressed by its neutral parameter
/// (`crop_size` = image side, zero deltas, `flip_prob` 0, contrast `[1, 1]`,
/// `noise_sigma` 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationConfig {
    pub crop_size: usize,
    pub translate_frac: f64,
    pub rotate_deg_max: f64,
    pub brightness_delta: f64,
    pub contrast_range: (f64, f64),
    pub flip_prob: f64,
    pub noise_sigma: f64,
}

impl Default for AugmentationConfig {
    fn default() -> Self {
        AugmentationConfig {
            crop_size: 28,
            translate_frac: 0.1,
            rotate_deg_max: 30.0,
            brightness_delta: 0.8,
            contrast_range: (0.9, 1.08),
            flip_prob: 0.5,
            noise_sigma: 0.05,
        }
    }
}

impl AugmentationConfig {
    /// Identity pipeline for `side`-pixel square images.
    pub fn neutral(side: usize) -> Self {
        AugmentationConfig {
            crop_size: side,
            translate_frac: 0.0,
            rotate_deg_max: 0.0,
            brightness_delta: 0.0,
            contrast_range: (1.0, 1.0),
            flip_prob: 0.0,
            noise_sigma: 0.0,
        }
    }

    pub fn validate(&self, shape: ImageShape) -> Result<()> {
        if self.crop_size == 0 || self.crop_size > shape.width.min(shape.height) {
            return Err(Error::param(format!(
                "crop size {} invalid for {} images",
                self.crop_size, shape
            )));
        }
        if !(0.0..=1.0).contains(&self.flip_prob) {
            return Err(Error::param(format!("flip prob must be in [0, 1], got {}", self.flip_prob)));
        }
        if self.contrast_range.0 > self.contrast_range.1 || self.contrast_range.0 < 0.0 {
            return Err(Error::param(format!(
                "contrast range [{}, {}] invalid",
                self.contrast_range.0, self.contrast_range.1
            )));
        }
        if !(0.0..=1.0).contains(&self.brightness_delta) {
            return Err(Error::param(format!(
                "brightness delta must be in [0, 1], got {}",
                self.brightness_delta
            )));
        }
        if self.translate_frac < 0.0 || self.rotate_deg_max < 0.0 || self.noise_sigma < 0.0 {
            return Err(Error::param(
                "translate, rotation and noise parameters must be >= 0".to_string(),
            ));
        }
        Ok(())
    }

    /// Shape after the pipeline: the crop decides the spatial extent.
    pub fn output_shape(&self, input: ImageShape) -> ImageShape {
        ImageShape::new(self.crop_size, self.crop_size, input.channels)
    }
}

/// Adds independent `N(0, sigma)` to every entry (planar draw order), then
/// clamps.
pub fn gaussian_noise<T: Real>(img: &Image<T>, sigma: f64, rng: &mut Prng) -> Result<Image<T>> {
    if sigma < 0.0 {
        return Err(Error::param(format!("noise sigma must be >= 0, got {sigma}")));
    }
    let data = img
        .data()
        .iter()
        .map(|&v| {
            let noisy = v.to_f64_exact() + rng.next_gaussian(0.0, sigma);
            T::from_f64_lossy(noisy.clamp(0.0, 1.0))
        })
        .collect();
    Ok(Image::from_vec_unchecked(img.shape(), data))
}

/// Uniform crop window; draws the x offset, then the y offset.
pub fn random_crop<T: Real>(img: &Image<T>, crop_size: usize, rng: &mut Prng) -> Result<Image<T>> {
    let (w, h) = (img.width(), img.height());
    if crop_size == 0 || crop_size > w.min(h) {
        return Err(Error::param(format!(
            "crop size {} too large for {} image",
            crop_size,
            img.shape()
        )));
    }
    let ox = rng.next_index(w - crop_size + 1);
    let oy = rng.next_index(h - crop_size + 1);
    let shape = ImageShape::new(crop_size, crop_size, img.channels());
    Ok(Image::from_fn(shape, |x, y, c| img.at(ox + x, oy + y, c)))
}

/// Mirrors columns with probability `prob` (one unit draw).
pub fn horizontal_flip<T: Real>(img: &Image<T>, prob: f64, rng: &mut Prng) -> Result<Image<T>> {
    if !(0.0..=1.0).contains(&prob) {
        return Err(Error::param(format!("flip prob must be in [0, 1], got {prob}")));
    }
    if rng.next_unit() < prob {
        Ok(flip_columns(img))
    } else {
        Ok(img.clone())
    }
}

/// Unconditional mirror, the deterministic half of [`horizontal_flip`].
pub fn flip_columns<T: Real>(img: &Image<T>) -> Image<T> {
    let w = img.width();
    Image::from_fn(img.shape(), |x, y, c| img.at(w - 1 - x, y, c))
}

/// Rotation about the image center followed by translation, evaluated by
/// inverse-mapping each output pixel with bilinear interpolation.
/// Out-of-bounds taps read as zero.
pub fn affine_transform<T: Real>(img: &Image<T>, theta_rad: f64, tx: f64, ty: f64) -> Image<T> {
    let (w, h) = (img.width(), img.height());
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;
    let cos = libm::cos(theta_rad);
    let sin = libm::sin(theta_rad);

    let tap = |xi: i64, yi: i64, c: usize| -> f64 {
        if xi < 0 || yi < 0 || xi >= w as i64 || yi >= h as i64 {
            0.0
        } else {
            img.at(xi as usize, yi as usize, c).to_f64_exact()
        }
    };

    Image::from_fn(img.shape(), |x, y, c| {
        let ux = x as f64 - cx - tx;
        let uy = y as f64 - cy - ty;
        // Inverse rotation.
        let sx = cos * ux + sin * uy + cx;
        let sy = -sin * ux + cos * uy + cy;
        let x0 = sx.floor();
        let y0 = sy.floor();
        let dx = sx - x0;
        let dy = sy - y0;
        let (x0, y0) = (x0 as i64, y0 as i64);
        let v = tap(x0, y0, c) * (1.0 - dx) * (1.0 - dy)
            + tap(x0 + 1, y0, c) * dx * (1.0 - dy)
            + tap(x0, y0 + 1, c) * (1.0 - dx) * dy
            + tap(x0 + 1, y0 + 1, c) * dx * dy;
        T::from_f64_lossy(v.clamp(0.0, 1.0))
    })
}

/// Draws rotation, then x and y translation, and applies
/// [`affine_transform`].
pub fn random_affine<T: Real>(
    img: &Image<T>,
    translate_frac: f64,
    rotate_deg_max: f64,
    rng: &mut Prng,
) -> Image<T> {
    let theta_deg = -rotate_deg_max + rng.next_unit() * 2.0 * rotate_deg_max;
    let tx = (-translate_frac + rng.next_unit() * 2.0 * translate_frac) * img.width() as f64;
    let ty = (-translate_frac + rng.next_unit() * 2.0 * translate_frac) * img.height() as f64;
    affine_transform(img, theta_deg.to_radians(), tx, ty)
}

/// Brightness scale then contrast about the per-image mean:
/// `clamp01(mean + f_c * (f_b * x - mean))` with `mean` the grayscale mean of
/// the brightness-scaled image. `f_c == 1` short-circuits so the neutral
/// contrast is an exact identity.
pub fn jitter_transform<T: Real>(img: &Image<T>, f_b: f64, f_c: f64) -> Image<T> {
    let scaled: Vec<f64> = img.data().iter().map(|&v| v.to_f64_exact() * f_b).collect();
    let data = if f_c == 1.0 {
        scaled.iter().map(|&v| T::from_f64_lossy(v.clamp(0.0, 1.0))).collect()
    } else {
        let mean = scaled.iter().sum::<f64>() / scaled.len() as f64;
        scaled
            .iter()
            .map(|&v| T::from_f64_lossy((mean + f_c * (v - mean)).clamp(0.0, 1.0)))
            .collect()
    };
    Image::from_vec_unchecked(img.shape(), data)
}

/// Draws the brightness factor `U[1 - delta, 1 + delta]`, then the contrast
/// factor over `contrast_range`, and applies [`jitter_transform`].
pub fn color_jitter<T: Real>(
    img: &Image<T>,
    brightness_delta: f64,
    contrast_range: (f64, f64),
    rng: &mut Prng,
) -> Image<T> {
    let f_b = (1.0 - brightness_delta) + rng.next_unit() * 2.0 * brightness_delta;
    let f_c = contrast_range.0 + rng.next_unit() * (contrast_range.1 - contrast_range.0);
    jitter_transform(img, f_b, f_c)
}

/// Crop, flip, affine, jitter, in that order, with fresh draws per call; a
/// final noise stage runs when `noise_sigma > 0`.
pub fn augmentation_pipeline<T: Real>(
    img: &Image<T>,
    cfg: &AugmentationConfig,
    rng: &mut Prng,
) -> Result<Image<T>> {
    cfg.validate(img.shape())?;
    let out = random_crop(img, cfg.crop_size, rng)?;
    let out = horizontal_flip(&out, cfg.flip_prob, rng)?;
    let out = random_affine(&out, cfg.translate_frac, cfg.rotate_deg_max, rng);
    let out = color_jitter(&out, cfg.brightness_delta, cfg.contrast_range, rng);
    if cfg.noise_sigma > 0.0 {
        gaussian_noise(&out, cfg.noise_sigma, rng)
    } else {
        Ok(out)
    }
}

/// Applies the pipeline to every image with per-image child streams
/// (`child(seed, i)`), so the result is independent of worker count.
pub fn augment_dataset<T: Real>(
    ds: &LabeledDataset<T>,
    cfg: &AugmentationConfig,
    seed: u64,
) -> Result<LabeledDataset<T>> {
    if ds.is_empty() {
        return Ok(ds.clone());
    }
    cfg.validate(ds.shape())?;
    let images = par_map_indices(ds.len(), |i| {
        let mut rng = Prng::child(seed, i as u64);
        augmentation_pipeline(ds.image(i), cfg, &mut rng)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    ds.with_images(images)
}

/// One-shot dataset noising (the default reading of the noise
/// countermeasure: applied once to the release, not per epoch).
pub fn noise_dataset<T: Real>(
    ds: &LabeledDataset<T>,
    sigma: f64,
    seed: u64,
) -> Result<LabeledDataset<T>> {
    if sigma < 0.0 {
        return Err(Error::param(format!("noise sigma must be >= 0, got {sigma}")));
    }
    let images = par_map_indices(ds.len(), |i| {
        let mut rng = Prng::child(seed, i as u64);
        gaussian_noise(ds.image(i), sigma, &mut rng)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    ds.with_images(images)
}

//! Class-conditional adversarial-shortcut modifications.
//!
//! Three methods, all label-preserving: sparse pixel patterns, visible
//! class-index watermarks, and brightness modulation. Pixel and brightness
//! masks are fixed per class; watermark stamps are sampled per image.

mod brightness;
mod pixel;
mod watermark;

pub use brightness::{apply_brightness_modulation, generate_brightness_mask, BrightnessMask};
pub use pixel::{apply_pixel_pattern, generate_pixel_mask, PixelMask};
pub use watermark::{
    apply_watermark, render_class_watermark, render_class_watermark_with_layout, GlyphSource,
    WatermarkLayout, WatermarkStamp, GLYPH_BINARIZE_THRESHOLD,
};

use crate::dataset::LabeledDataset;
use crate::error::{Error, Result};
use crate::image::{Image, ImageShape};
use crate::parallel::par_map_indices;
use crate::real::Real;
use crate::rng::Prng;
use serde::{Deserialize, Serialize};

/// Which of the three modifications to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShortcutMethod {
    Pixel,
    Watermark,
    Brightness,
}

impl ShortcutMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ShortcutMethod::Pixel => "pixel",
            ShortcutMethod::Watermark => "watermark",
            ShortcutMethod::Brightness => "brightness",
        }
    }
}

impl std::str::FromStr for ShortcutMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pixel" => Ok(ShortcutMethod::Pixel),
            "watermark" => Ok(ShortcutMethod::Watermark),
            "brightness" => Ok(ShortcutMethod::Brightness),
            other => Err(Error::param(format!(
                "unknown method {other:?}, expected pixel, watermark or brightness"
            ))),
        }
    }
}

impl std::fmt::Display for ShortcutMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Full parameter set for one protection run. Unused fields for a given
/// method keep their defaults and are ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShortcutParams {
    pub method: ShortcutMethod,
    /// Gaussian mean for pixel-mask sampling.
    pub mu: f64,
    /// Gaussian stdev for pixel-mask sampling.
    pub sigma: f64,
    /// Watermark blend factor in `[0, 1]`.
    pub alpha: f64,
    /// Darken factor in `[0.5, 1]`; brighten is `2 - gamma`.
    pub gamma: f64,
    /// Brightness square count `T`.
    pub iterations: u32,
    /// Brightness square side; `None` derives `ceil(w / 4)` from the image.
    pub square_side: Option<usize>,
    pub seed: u64,
}

impl ShortcutParams {
    pub fn new(method: ShortcutMethod, seed: u64) -> Self {
        ShortcutParams {
            method,
            mu: 0.01,
            sigma: 0.2,
            alpha: 0.5,
            gamma: 0.9,
            iterations: 32,
            square_side: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma <= 0.0 {
            return Err(Error::param(format!("sigma must be > 0, got {}", self.sigma)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::param(format!("alpha must be in [0, 1], got {}", self.alpha)));
        }
        if !(0.5..=1.0).contains(&self.gamma) {
            return Err(Error::param(format!("gamma must be in [0.5, 1], got {}", self.gamma)));
        }
        if self.iterations == 0 {
            return Err(Error::param("iterations must be >= 1".to_string()));
        }
        if self.square_side == Some(0) {
            return Err(Error::param("square side must be >= 1".to_string()));
        }
        Ok(())
    }

    /// Square side to use for `width`-pixel images: the explicit override, or
    /// `ceil(width / 4)` (8 for 32x32, 56 for 224x224).
    pub fn square_side_for(&self, width: usize) -> usize {
        self.square_side.unwrap_or_else(|| width.div_ceil(4).max(1))
    }

    /// Copy with the square side pinned for `width`, so a written manifest
    /// fully determines mask regeneration.
    pub fn resolved_for(&self, width: usize) -> Self {
        let mut p = self.clone();
        p.square_side = Some(self.square_side_for(width));
        p
    }
}

/// Applies the selected modification to every image; labels and length are
/// untouched. Deterministic in `(dataset, params)` regardless of worker
/// count.
///
/// `glyphs` feeds the watermark method; `None` uses the built-in digit set.
pub fn protect_dataset<T: Real>(
    ds: &LabeledDataset<T>,
    params: &ShortcutParams,
    glyphs: Option<&GlyphSource>,
) -> Result<LabeledDataset<T>> {
    params.validate()?;
    if ds.is_empty() {
        return Ok(ds.clone());
    }
    let shape = ds.shape();
    let k = ds.num_classes();

    let images: Vec<Result<Image<T>>> = match params.method {
        ShortcutMethod::Pixel => {
            let masks = class_pixel_masks(k, shape, params)?;
            par_map_indices(ds.len(), |i| {
                apply_pixel_pattern(ds.image(i), &masks[ds.label(i)])
            })
        }
        ShortcutMethod::Brightness => {
            let masks = class_brightness_masks(k, shape, params)?;
            par_map_indices(ds.len(), |i| {
                apply_brightness_modulation(ds.image(i), &masks[ds.label(i)])
            })
        }
        ShortcutMethod::Watermark => {
            let builtin;
            let source = match glyphs {
                Some(g) => g,
                None => {
                    builtin = GlyphSource::builtin();
                    &builtin
                }
            };
            // Stamps are per image: tag K + i keeps image streams clear of
            // the per-class tags 0..K-1.
            par_map_indices(ds.len(), |i| {
                let mut rng = Prng::child(params.seed, (k + i) as u64);
                let stamp = render_class_watermark(ds.label(i), shape, source, &mut rng)?;
                apply_watermark(ds.image(i), &stamp, params.alpha)
            })
        }
    };

    let images = images.into_iter().collect::<Result<Vec<_>>>()?;
    ds.with_images(images)
}

/// One pixel mask per class, from the class child streams.
pub fn class_pixel_masks(
    num_classes: usize,
    shape: ImageShape,
    params: &ShortcutParams,
) -> Result<Vec<PixelMask>> {
    (0..num_classes)
        .map(|c| generate_pixel_mask(c, shape, params.mu, params.sigma, params.seed))
        .collect()
}

/// One brightness mask per class, from the class child streams.
pub fn class_brightness_masks(
    num_classes: usize,
    shape: ImageShape,
    params: &ShortcutParams,
) -> Result<Vec<BrightnessMask>> {
    let side = params.square_side_for(shape.width);
    (0..num_classes)
        .map(|c| {
            generate_brightness_mask(c, shape, params.gamma, params.iterations, side, params.seed)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_dataset() -> LabeledDataset<f64> {
        let shape = ImageShape::new(8, 8, 3);
        let mut images = Vec::new();
        let mut labels = Vec::new();
        for i in 0..12 {
            images.push(Image::from_fn(shape, |x, y, c| {
                ((x * 5 + y * 3 + c * 2 + i) % 13) as f64 / 13.0
            }));
            labels.push(i % 4);
        }
        LabeledDataset::new(images, labels, 4).unwrap()
    }

    #[test]
    fn labels_and_length_preserved() {
        let ds = tiny_dataset();
        for method in [ShortcutMethod::Pixel, ShortcutMethod::Watermark, ShortcutMethod::Brightness] {
            let params = ShortcutParams { mu: 0.3, ..ShortcutParams::new(method, 9) };
            let out = protect_dataset(&ds, &params, None).unwrap();
            assert_eq!(out.len(), ds.len());
            assert_eq!(out.labels(), ds.labels());
            assert_eq!(out.num_classes(), ds.num_classes());
        }
    }

    #[test]
    fn pixel_mu_minus_ten_is_identity() {
        let ds = tiny_dataset();
        let params = ShortcutParams { mu: -10.0, ..ShortcutParams::new(ShortcutMethod::Pixel, 1) };
        let out = protect_dataset(&ds, &params, None).unwrap();
        assert_eq!(out, ds);
    }

    #[test]
    fn protect_is_deterministic() {
        let ds = tiny_dataset();
        for method in [ShortcutMethod::Pixel, ShortcutMethod::Watermark, ShortcutMethod::Brightness] {
            let params = ShortcutParams { mu: 0.2, ..ShortcutParams::new(method, 31) };
            let a = protect_dataset(&ds, &params, None).unwrap();
            let b = protect_dataset(&ds, &params, None).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn same_class_images_share_saturated_positions() {
        let ds = tiny_dataset();
        let params = ShortcutParams { mu: 0.3, ..ShortcutParams::new(ShortcutMethod::Pixel, 17) };
        let out = protect_dataset(&ds, &params, None).unwrap();
        // Images 0 and 4 share class 0.
        assert_eq!(ds.label(0), ds.label(4));
        let changed = |i: usize| -> Vec<usize> {
            ds.image(i)
                .data()
                .iter()
                .zip(out.image(i).data())
                .enumerate()
                .filter_map(|(j, (a, b))| (a != b).then_some(j))
                .collect()
        };
        let saturated = |i: usize| -> Vec<usize> {
            out.image(i)
                .data()
                .iter()
                .enumerate()
                .filter_map(|(j, &v)| (v == 1.0).then_some(j))
                .collect()
        };
        assert!(!changed(0).is_empty());
        // Changed positions are where the mask is set and the pixel was not
        // already 1.0; the saturated sets coincide across the class.
        assert_eq!(saturated(0), saturated(4));
        let other = saturated(1);
        assert_ne!(saturated(0), other, "distinct classes should differ");
    }

    #[test]
    fn validate_rejects_bad_params() {
        let base = ShortcutParams::new(ShortcutMethod::Pixel, 0);
        assert!(ShortcutParams { sigma: 0.0, ..base.clone() }.validate().is_err());
        assert!(ShortcutParams { alpha: 1.5, ..base.clone() }.validate().is_err());
        assert!(ShortcutParams { gamma: 0.2, ..base.clone() }.validate().is_err());
        assert!(ShortcutParams { iterations: 0, ..base.clone() }.validate().is_err());
        assert!(ShortcutParams { square_side: Some(0), ..base.clone() }.validate().is_err());
        assert!(base.validate().is_ok());
    }

    #[test]
    fn square_side_default_scales_with_width() {
        let p = ShortcutParams::new(ShortcutMethod::Brightness, 0);
        assert_eq!(p.square_side_for(32), 8);
        assert_eq!(p.square_side_for(224), 56);
        assert_eq!(p.square_side_for(16), 4);
        let q = ShortcutParams { square_side: Some(3), ..p };
        assert_eq!(q.square_side_for(32), 3);
    }

    #[test]
    fn method_round_trips_via_str() {
        for m in [ShortcutMethod::Pixel, ShortcutMethod::Watermark, ShortcutMethod::Brightness] {
            let parsed: ShortcutMethod = m.as_str().parse().unwrap();
            assert_eq!(parsed, m);
        }
        assert!("gradient".parse::<ShortcutMethod>().is_err());
    }
}

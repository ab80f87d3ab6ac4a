//! Visible class-index watermarks.
//!
//! The class index is written as decimal digits, each digit instantiated by a
//! randomly chosen exemplar from a glyph source (MNIST digits in the paper's
//! setup, or the built-in seven-segment set). The binarized digit block is
//! scaled, centered, and blended over the image with factor `alpha`.

use crate::error::{Error, Result};
use crate::image::{Image, ImageShape};
use crate::real::Real;
use crate::rng::Prng;

/// Binary raster used for glyphs and stamp assembly.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Bitmap {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl Bitmap {
    fn new(width: usize, height: usize) -> Self {
        Bitmap { width, height, bits: vec![false; width * height] }
    }

    #[inline]
    fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    #[inline]
    fn set(&mut self, x: usize, y: usize, v: bool) {
        self.bits[y * self.width + x] = v;
    }

    /// Nearest-neighbor resample; keeps entries binary.
    fn scaled(&self, new_w: usize, new_h: usize) -> Bitmap {
        let mut out = Bitmap::new(new_w, new_h);
        for y in 0..new_h {
            let sy = y * self.height / new_h;
            for x in 0..new_w {
                let sx = x * self.width / new_w;
                out.set(x, y, self.get(sx, sy));
            }
        }
        out
    }
}

/// Rounded integer division, half up.
fn div_round(num: usize, den: usize) -> usize {
    (2 * num + den) / (2 * den)
}

/// Exemplars of the ten decimal digits, pre-binarized.
#[derive(Debug, Clone)]
pub struct GlyphSource {
    by_digit: [Vec<Bitmap>; 10],
}

/// Glyph intensities strictly above this count as ink.
pub const GLYPH_BINARIZE_THRESHOLD: f64 = 0.5;

impl GlyphSource {
    /// Builds a source from `(image, digit)` pairs, binarizing each image at
    /// [`GLYPH_BINARIZE_THRESHOLD`]. Images must be single-channel.
    pub fn new<T: Real>(glyphs: impl IntoIterator<Item = (Image<T>, u8)>) -> Result<Self> {
        let mut by_digit: [Vec<Bitmap>; 10] = Default::default();
        let mut total = 0usize;
        for (img, digit) in glyphs {
            if digit > 9 {
                return Err(Error::config(format!("glyph label {digit} is not a decimal digit")));
            }
            if img.channels() != 1 {
                return Err(Error::config(format!(
                    "glyph images must be single-channel, got {}",
                    img.shape()
                )));
            }
            let mut bmp = Bitmap::new(img.width(), img.height());
            for y in 0..img.height() {
                for x in 0..img.width() {
                    bmp.set(x, y, img.at(x, y, 0).to_f64_exact() > GLYPH_BINARIZE_THRESHOLD);
                }
            }
            by_digit[digit as usize].push(bmp);
            total += 1;
        }
        if total == 0 {
            return Err(Error::config("glyph source is empty".to_string()));
        }
        Ok(GlyphSource { by_digit })
    }

    /// Seven-segment digits on a 28x28 canvas. One exemplar per digit, so
    /// stamps are repeatable without any external digit dataset.
    pub fn builtin() -> Self {
        // Segment bit order: top, top-left, top-right, middle, bottom-left,
        // bottom-right, bottom.
        const SEGMENTS: [[bool; 7]; 10] = [
            [true, true, true, false, true, true, true],     // 0
            [false, false, true, false, false, true, false], // 1
            [true, false, true, true, true, false, true],    // 2
            [true, false, true, true, false, true, true],    // 3
            [false, true, true, true, false, true, false],   // 4
            [true, true, false, true, false, true, true],    // 5
            [true, true, false, true, true, true, true],     // 6
            [true, false, true, false, false, true, false],  // 7
            [true, true, true, true, true, true, true],      // 8
            [true, true, true, true, false, true, true],     // 9
        ];
        // (x0, x1, y0, y1) half-open boxes on the 28x28 canvas.
        const BOXES: [(usize, usize, usize, usize); 7] = [
            (6, 22, 2, 6),    // top
            (2, 6, 2, 14),    // top-left
            (22, 26, 2, 14),  // top-right
            (6, 22, 12, 16),  // middle
            (2, 6, 14, 26),   // bottom-left
            (22, 26, 14, 26), // bottom-right
            (6, 22, 22, 26),  // bottom
        ];
        let mut by_digit: [Vec<Bitmap>; 10] = Default::default();
        for (digit, segs) in SEGMENTS.iter().enumerate() {
            let mut bmp = Bitmap::new(28, 28);
            for (seg, &(x0, x1, y0, y1)) in segs.iter().zip(BOXES.iter()) {
                if !seg {
                    continue;
                }
                for y in y0..y1 {
                    for x in x0..x1 {
                        bmp.set(x, y, true);
                    }
                }
            }
            by_digit[digit].push(bmp);
        }
        GlyphSource { by_digit }
    }

    pub fn exemplar_count(&self, digit: u8) -> usize {
        self.by_digit[digit as usize].len()
    }
}

/// Stamp geometry. Digits are scaled to `height * height_num / height_den`
/// (capped at the image height), joined with `gap`-pixel spacing, shrunk to
/// fit the width, and centered.
#[derive(Debug, Clone, Copy)]
pub struct WatermarkLayout {
    pub height_num: usize,
    pub height_den: usize,
    pub gap: usize,
}

impl Default for WatermarkLayout {
    fn default() -> Self {
        // 28/32 of the image height: a 32x32 stamp carries a full-size MNIST
        // digit, larger images scale proportionally.
        WatermarkLayout { height_num: 28, height_den: 32, gap: 1 }
    }
}

/// Per-image binary overlay; one plane, replicated across channels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WatermarkStamp {
    shape: ImageShape,
    plane: Vec<bool>,
}

impl WatermarkStamp {
    pub fn shape(&self) -> ImageShape {
        self.shape
    }

    #[inline]
    pub fn is_set(&self, x: usize, y: usize) -> bool {
        self.plane[y * self.shape.width + x]
    }

    pub fn ones_count(&self) -> usize {
        self.plane.iter().filter(|&&b| b).count()
    }

    /// 0/1-valued image for inspection export.
    pub fn to_image<T: Real>(&self) -> Image<T> {
        let shape = self.shape;
        Image::from_fn(shape, |x, y, _| {
            if self.is_set(x, y) {
                T::one()
            } else {
                T::zero()
            }
        })
    }
}

/// Renders the stamp for `class` with the default layout. Consumes one unit
/// draw per decimal digit (exemplar choice); the geometry is deterministic.
pub fn render_class_watermark(
    class: usize,
    shape: ImageShape,
    glyphs: &GlyphSource,
    rng: &mut Prng,
) -> Result<WatermarkStamp> {
    render_class_watermark_with_layout(class, shape, glyphs, rng, WatermarkLayout::default())
}

pub fn render_class_watermark_with_layout(
    class: usize,
    shape: ImageShape,
    glyphs: &GlyphSource,
    rng: &mut Prng,
    layout: WatermarkLayout,
) -> Result<WatermarkStamp> {
    let (w, h) = (shape.width, shape.height);
    if w == 0 || h == 0 {
        return Err(Error::shape(format!("cannot watermark an empty image {shape}")));
    }

    // Decimal digits of the class index, no leading zeros; 0 is "0".
    let digits: Vec<u8> = class
        .to_string()
        .bytes()
        .map(|b| b - b'0')
        .collect();

    let target_h = (layout.height_num * h / layout.height_den).clamp(1, h);
    let mut scaled: Vec<Bitmap> = Vec::with_capacity(digits.len());
    for &d in &digits {
        let count = glyphs.exemplar_count(d);
        if count == 0 {
            return Err(Error::config(format!("glyph source has no exemplar for digit {d}")));
        }
        let pick = rng.next_index(count);
        let glyph = &glyphs.by_digit[d as usize][pick];
        let gw = div_round(glyph.width * target_h, glyph.height).max(1);
        scaled.push(glyph.scaled(gw, target_h));
    }

    // Horizontal concatenation with fixed gaps.
    let block_w: usize = scaled.iter().map(|b| b.width).sum::<usize>()
        + layout.gap * (scaled.len() - 1);
    let mut block = Bitmap::new(block_w, target_h);
    let mut cursor = 0usize;
    for bmp in &scaled {
        for y in 0..bmp.height {
            for x in 0..bmp.width {
                block.set(cursor + x, y, bmp.get(x, y));
            }
        }
        cursor += bmp.width + layout.gap;
    }

    // Shrink uniformly when the block overflows the image width.
    let block = if block.width > w {
        let new_h = div_round(block.height * w, block.width).max(1);
        block.scaled(w, new_h)
    } else {
        block
    };

    let ox = (w - block.width) / 2;
    let oy = (h - block.height) / 2;
    let mut plane = vec![false; w * h];
    for y in 0..block.height {
        for x in 0..block.width {
            plane[(oy + y) * w + ox + x] = block.get(x, y);
        }
    }
    Ok(WatermarkStamp { shape, plane })
}

/// Blends the stamp into the image: `alpha * M + (1 - alpha) * M * x +
/// (1 - M) * x`. Stamped pixels become `alpha + (1 - alpha) * x`, the rest
/// pass through untouched.
pub fn apply_watermark<T: Real>(
    img: &Image<T>,
    stamp: &WatermarkStamp,
    alpha: f64,
) -> Result<Image<T>> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::param(format!("alpha must be in [0, 1], got {alpha}")));
    }
    if img.shape() != stamp.shape {
        return Err(Error::shape(format!(
            "image {} vs watermark stamp {}",
            img.shape(),
            stamp.shape
        )));
    }
    let a = T::from_f64_lossy(alpha);
    let out = Image::from_fn(img.shape(), |x, y, c| {
        let v = img.at(x, y, c);
        if stamp.is_set(x, y) {
            a + (T::one() - a) * v
        } else {
            v
        }
    });
    Ok(out)
}

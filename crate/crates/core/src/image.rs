//! Fixed-shape image tensors and the 8-bit quantization used at file
//! boundaries.
//!
//! Pixels are normalized intensities in `[0, 1]`, stored channel-planar in
//! row-major order: all of channel 0, then channel 1, and so on. This is the
//! CIFAR-10 binary record layout, so ingest is a straight copy.

use crate::error::{Error, Result};
use crate::real::Real;

/// Width, height and channel count of an image tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ImageShape {
    pub width: usize,
    pub height: usize,
    pub channels: usize,
}

impl ImageShape {
    pub fn new(width: usize, height: usize, channels: usize) -> Self {
        ImageShape { width, height, channels }
    }

    /// Total number of scalar entries, `w * h * c`.
    pub fn len(&self) -> usize {
        self.width * self.height * self.channels
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of pixels in one channel plane.
    pub fn plane_len(&self) -> usize {
        self.width * self.height
    }

    /// Planar index of `(x, y)` in channel `c`.
    #[inline]
    pub fn index(&self, x: usize, y: usize, c: usize) -> usize {
        c * self.width * self.height + y * self.width + x
    }
}

impl std::fmt::Display for ImageShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}x{}", self.width, self.height, self.channels)
    }
}

/// An image with intensities in `[0, 1]`, channel-planar row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image<T: Real> {
    shape: ImageShape,
    data: Vec<T>,
}

impl<T: Real> Image<T> {
    /// Builds an image, checking the length and range invariants.
    pub fn new(shape: ImageShape, data: Vec<T>) -> Result<Self> {
        if data.len() != shape.len() {
            return Err(Error::shape(format!(
                "image data has {} entries, shape {} needs {}",
                data.len(),
                shape,
                shape.len()
            )));
        }
        for (i, &v) in data.iter().enumerate() {
            if !(v >= T::zero() && v <= T::one()) {
                return Err(Error::param(format!(
                    "intensity {:?} at index {} is outside [0, 1]",
                    v, i
                )));
            }
        }
        Ok(Image { shape, data })
    }

    /// Constant-valued image. `value` must lie in `[0, 1]`.
    pub fn filled(shape: ImageShape, value: T) -> Result<Self> {
        Image::new(shape, vec![value; shape.len()])
    }

    /// Builds an image from a generator over `(x, y, c)`, trusting it to stay
    /// in range (checked in debug builds).
    pub fn from_fn(shape: ImageShape, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(shape.len());
        for c in 0..shape.channels {
            for y in 0..shape.height {
                for x in 0..shape.width {
                    let v = f(x, y, c);
                    debug_assert!(v >= T::zero() && v <= T::one());
                    data.push(v);
                }
            }
        }
        Image { shape, data }
    }

    /// Internal constructor for transforms that keep values in range by
    /// construction.
    pub(crate) fn from_vec_unchecked(shape: ImageShape, data: Vec<T>) -> Self {
        debug_assert_eq!(data.len(), shape.len());
        Image { shape, data }
    }

    pub fn shape(&self) -> ImageShape {
        self.shape
    }

    pub fn width(&self) -> usize {
        self.shape.width
    }

    pub fn height(&self) -> usize {
        self.shape.height
    }

    pub fn channels(&self) -> usize {
        self.shape.channels
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize, c: usize) -> T {
        self.data[self.shape.index(x, y, c)]
    }

    /// Clamps every intensity to `[0, 1]`. Idempotent; in-range values pass
    /// through bit-identically.
    pub fn clamp01(&self) -> Self {
        let data = self
            .data
            .iter()
            .map(|&v| {
                if v < T::zero() {
                    T::zero()
                } else if v > T::one() {
                    T::one()
                } else {
                    v
                }
            })
            .collect();
        Image { shape: self.shape, data }
    }

    /// Quantizes to 8-bit bytes in the internal planar order.
    ///
    /// Each intensity maps to `round(v * 255)` with round-half-up, the fixed
    /// repo-wide convention. Requires the range invariant to hold.
    pub fn quantize(&self) -> Vec<u8> {
        self.data.iter().map(|&v| quantize_value(v)).collect()
    }

    /// Inverse of [`Image::quantize`]: each byte maps to `b / 255`.
    pub fn dequantize(bytes: &[u8], shape: ImageShape) -> Result<Self> {
        if bytes.len() != shape.len() {
            return Err(Error::shape(format!(
                "byte buffer has {} entries, shape {} needs {}",
                bytes.len(),
                shape,
                shape.len()
            )));
        }
        let data = bytes.iter().map(|&b| dequantize_value(b)).collect();
        Ok(Image { shape, data })
    }

    /// Lossless per-entry widening to `f64`.
    pub fn to_f64(&self) -> Image<f64> {
        Image {
            shape: self.shape,
            data: self.data.iter().map(|&v| v.to_f64_exact()).collect(),
        }
    }
}

/// `round(v * 255)` with round-half-up, for `v` in `[0, 1]`.
#[inline]
pub fn quantize_value<T: Real>(v: T) -> u8 {
    let scaled = v.to_f64_exact() * 255.0 + 0.5;
    let b = scaled.floor();
    debug_assert!((0.0..=255.0).contains(&b));
    b as u8
}

/// `b / 255` as a `T` intensity.
#[inline]
pub fn dequantize_value<T: Real>(b: u8) -> T {
    T::from_f64_lossy(b as f64 / 255.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape() -> ImageShape {
        ImageShape::new(4, 3, 3)
    }

    #[test]
    fn new_rejects_wrong_length() {
        let err = Image::<f64>::new(shape(), vec![0.0; 5]).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn new_rejects_out_of_range() {
        let mut data = vec![0.5; shape().len()];
        data[7] = 1.5;
        let err = Image::<f64>::new(shape(), data).unwrap_err();
        assert!(matches!(err, Error::Param(_)));
    }

    #[test]
    fn clamp01_interior_upper_lower() {
        let s = ImageShape::new(3, 1, 1);
        let img = Image { shape: s, data: vec![0.5, 1.21, -0.05] };
        let c = img.clamp01();
        assert_eq!(c.data(), &[0.5, 1.0, 0.0]);
    }

    #[test]
    fn clamp01_is_idempotent() {
        let s = ImageShape::new(4, 1, 1);
        let img = Image { shape: s, data: vec![-3.0, 0.25, 0.75, 2.0] };
        let once = img.clamp01();
        let twice = once.clamp01();
        assert_eq!(once.data(), twice.data());
    }

    #[test]
    fn quantize_endpoints_and_half() {
        assert_eq!(quantize_value(0.0f64), 0);
        assert_eq!(quantize_value(1.0f64), 255);
        // 0.5 * 255 = 127.5, round half up.
        assert_eq!(quantize_value(0.5f64), 128);
        assert_eq!(quantize_value(0.5f32), 128);
    }

    #[test]
    fn dequantize_endpoints_and_midpoint() {
        assert_eq!(dequantize_value::<f64>(255), 1.0);
        assert_eq!(dequantize_value::<f64>(0), 0.0);
        let v: f64 = dequantize_value(128);
        assert!((v - 128.0 / 255.0).abs() < 1e-15);
        assert!((v - 0.50196).abs() < 1e-4);
    }

    #[test]
    fn dequantize_rejects_length_mismatch() {
        let err = Image::<f64>::dequantize(&[0u8; 10], shape()).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn quantize_dequantize_on_bytes_is_identity() {
        let s = ImageShape::new(16, 16, 1);
        let bytes: Vec<u8> = (0..s.len()).map(|i| (i % 256) as u8).collect();
        let img = Image::<f64>::dequantize(&bytes, s).unwrap();
        assert_eq!(img.quantize(), bytes);
        let img32 = Image::<f32>::dequantize(&bytes, s).unwrap();
        assert_eq!(img32.quantize(), bytes);
    }
}

//! Dataset-protection toolkit built on class-conditional adversarial
//! shortcuts.
//!
//! The crate covers the full loop at desk scale: generating and applying the
//! three shortcut modifications (sparse pixel patterns, visible watermarks,
//! brightness modulation), simulating adversary-side countermeasures,
//! bit-exact dataset I/O, and a deterministic from-scratch training oracle
//! that measures whether a protection actually disrupts learning.
//!
//! Pixel buffers are generic over the scalar type (`f32` or `f64`, see
//! [`Real`]); randomness and training math always run in `f64` so results are
//! reproducible bit-for-bit from a single seed.

pub mod countermeasures;
pub mod dataio;
pub mod dataset;
pub mod error;
pub mod image;
pub mod parallel;
pub mod real;
pub mod rng;
pub mod shortcuts;
pub mod trainer;

pub use dataset::LabeledDataset;
pub use error::{Error, Result};
pub use image::{Image, ImageShape};
pub use real::Real;
pub use rng::Prng;

/// Single-precision image, the storage type for large datasets.
pub type Image32 = Image<f32>;
/// Double-precision image, the reference type for formula-level tests.
pub type Image64 = Image<f64>;
/// Single-precision dataset.
pub type Dataset32 = LabeledDataset<f32>;
/// Double-precision dataset.
pub type Dataset64 = LabeledDataset<f64>;

//! Labeled image collections: the clean dataset and its protected variants.

use crate::error::{Error, Result};
use crate::image::{Image, ImageShape};
use crate::real::Real;

/// Uniformly shaped images with class labels in `{0 .. num_classes - 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset<T: Real> {
    images: Vec<Image<T>>,
    labels: Vec<usize>,
    shape: ImageShape,
    num_classes: usize,
}

impl<T: Real> LabeledDataset<T> {
    pub fn new(images: Vec<Image<T>>, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if images.len() != labels.len() {
            return Err(Error::shape(format!(
                "{} images but {} labels",
                images.len(),
                labels.len()
            )));
        }
        let shape = match images.first() {
            Some(img) => img.shape(),
            // An empty dataset still carries a nominal shape.
            None => ImageShape::new(0, 0, 0),
        };
        for img in &images {
            if img.shape() != shape {
                return Err(Error::shape(format!(
                    "mixed image shapes {} and {}",
                    shape,
                    img.shape()
                )));
            }
        }
        for &label in &labels {
            if label >= num_classes {
                return Err(Error::param(format!(
                    "label {} out of range for {} classes",
                    label, num_classes
                )));
            }
        }
        Ok(LabeledDataset { images, labels, shape, num_classes })
    }

    /// Empty dataset with a declared shape, used by readers on zero-record
    /// files.
    pub fn empty(shape: ImageShape, num_classes: usize) -> Self {
        LabeledDataset { images: Vec::new(), labels: Vec::new(), shape, num_classes }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn shape(&self) -> ImageShape {
        self.shape
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn images(&self) -> &[Image<T>] {
        &self.images
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn image(&self, i: usize) -> &Image<T> {
        &self.images[i]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Image<T>, usize)> {
        self.images.iter().zip(self.labels.iter().copied())
    }

    /// Replaces the images, keeping labels and class count. Used by the
    /// protection and countermeasure pipelines, which transform pixels only.
    pub fn with_images(&self, images: Vec<Image<T>>) -> Result<Self> {
        LabeledDataset::new(images, self.labels.clone(), self.num_classes)
    }

    pub fn to_f64(&self) -> LabeledDataset<f64> {
        LabeledDataset {
            images: self.images.iter().map(|img| img.to_f64()).collect(),
            labels: self.labels.clone(),
            shape: self.shape,
            num_classes: self.num_classes,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_length_mismatch() {
        let s = ImageShape::new(2, 2, 1);
        let imgs = vec![Image::<f64>::filled(s, 0.5).unwrap()];
        let err = LabeledDataset::new(imgs, vec![0, 1], 2).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn rejects_label_out_of_range() {
        let s = ImageShape::new(2, 2, 1);
        let imgs = vec![Image::<f64>::filled(s, 0.5).unwrap()];
        let err = LabeledDataset::new(imgs, vec![2], 2).unwrap_err();
        assert!(matches!(err, Error::Param(_)));
    }

    #[test]
    fn rejects_mixed_shapes() {
        let a = Image::<f64>::filled(ImageShape::new(2, 2, 1), 0.5).unwrap();
        let b = Image::<f64>::filled(ImageShape::new(3, 2, 1), 0.5).unwrap();
        let err = LabeledDataset::new(vec![a, b], vec![0, 0], 2).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }
}

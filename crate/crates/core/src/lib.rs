//! Allocation-only algorithms behind the limevis workbench.
//!
//! Everything in this crate is a pure function of its inputs: superpixel
//! segmentation, the LIME perturbation/surrogate pipeline, the builtin
//! softmax classifier, handcrafted image features and the PaCMAP layout.
//! File formats, external model transports, sessions and serving live in
//! the `limevis` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod embedding;
pub mod error;
pub mod image;
pub mod lime;
pub mod linalg;
pub mod predictor;
pub mod rng;
pub mod segmentation;

pub use error::{Error, Result};
pub use image::{LabImage, LabeledDataset, RgbImage};
pub use predictor::{ClassProbabilities, Predictor};
pub use segmentation::{SegmentationParams, SuperpixelMap};

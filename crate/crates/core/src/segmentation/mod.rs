//! Superpixel partitions.
//!
//! Three algorithms are available (SLIC, Felzenszwalb graph merging and
//! quickshift). Every result is normalized into a [`SuperpixelMap`] whose
//! ids are dense and numbered by first occurrence in row-major order, so
//! equal partitions always yield equal label buffers.

mod connectivity;
mod felzenszwalb;
mod quickshift;
mod slic;

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::image::RgbImage;

pub use connectivity::{absorb_small_components, connected_components};
pub use felzenszwalb::felzenszwalb;
pub use quickshift::quickshift;
pub use slic::slic;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SuperpixelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    num_segments: usize,
}

impl SuperpixelMap {
    /// Validates an already-dense label buffer.
    pub fn new(width: usize, height: usize, labels: Vec<u32>, num_segments: usize) -> Result<Self> {
        if width == 0 || height == 0 || labels.len() != width * height {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} labels for a {}x{} map",
                labels.len(),
                width,
                height
            )));
        }
        let mut seen = vec![false; num_segments];
        for &l in &labels {
            let slot = seen
                .get_mut(l as usize)
                .ok_or_else(|| invalid(alloc::format!("label {l} >= num_segments {num_segments}")))?;
            *slot = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(invalid("segment ids are not dense"));
        }
        Ok(SuperpixelMap { width, height, labels, num_segments })
    }

    /// Renumbers arbitrary labels by first occurrence in row-major order.
    pub fn from_raw_labels(width: usize, height: usize, raw: &[u32]) -> Self {
        assert_eq!(raw.len(), width * height);
        let (labels, num_segments) = densify(raw);
        SuperpixelMap { width, height, labels, num_segments }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn num_segments(&self) -> usize {
        self.num_segments
    }

    /// Label at column `x`, row `y`.
    pub fn label_at(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn segment_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.num_segments];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    pub fn matches(&self, image: &RgbImage) -> bool {
        self.width == image.width() && self.height == image.height()
    }
}

/// Dense renumbering by first occurrence. Returns `(labels, count)`.
pub(crate) fn densify(raw: &[u32]) -> (Vec<u32>, usize) {
    let mut map = alloc::collections::BTreeMap::new();
    let labels = raw
        .iter()
        .map(|&r| {
            let next = map.len() as u32;
            *map.entry(r).or_insert(next)
        })
        .collect();
    (labels, map.len())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentationParams {
    Slic { n_segments: usize, compactness: f64, max_iter: usize },
    Felzenszwalb { scale: f64, sigma: f64, min_size: usize },
    Quickshift { ratio: f64, kernel_size: f64, max_dist: f64 },
}

impl SegmentationParams {
    pub const fn slic_default() -> Self {
        SegmentationParams::Slic { n_segments: 50, compactness: 10.0, max_iter: 10 }
    }

    pub const fn felzenszwalb_default() -> Self {
        SegmentationParams::Felzenszwalb { scale: 100.0, sigma: 0.8, min_size: 20 }
    }

    pub const fn quickshift_default() -> Self {
        SegmentationParams::Quickshift { ratio: 0.2, kernel_size: 4.0, max_dist: 8.0 }
    }

    pub fn algorithm_name(&self) -> &'static str {
        match self {
            SegmentationParams::Slic { .. } => "slic",
            SegmentationParams::Felzenszwalb { .. } => "felzenszwalb",
            SegmentationParams::Quickshift { .. } => "quickshift",
        }
    }

    /// Default parameter block for an algorithm name.
    pub fn default_for(name: &str) -> Option<Self> {
        match name {
            "slic" => Some(Self::slic_default()),
            "felzenszwalb" => Some(Self::felzenszwalb_default()),
            "quickshift" => Some(Self::quickshift_default()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SegmentationParams::Slic { n_segments, compactness, max_iter } => {
                if n_segments < 1 {
                    return Err(invalid("slic n_segments must be >= 1"));
                }
                if !(compactness > 0.0) || !compactness.is_finite() {
                    return Err(invalid("slic compactness must be > 0"));
                }
                if max_iter < 1 {
                    return Err(invalid("slic max_iter must be >= 1"));
                }
            }
            SegmentationParams::Felzenszwalb { scale, sigma, min_size } => {
                if !(scale > 0.0) || !scale.is_finite() {
                    return Err(invalid("felzenszwalb scale must be > 0"));
                }
                if !(sigma >= 0.0) || !sigma.is_finite() {
                    return Err(invalid("felzenszwalb sigma must be >= 0"));
                }
                if min_size < 1 {
                    return Err(invalid("felzenszwalb min_size must be >= 1"));
                }
            }
            SegmentationParams::Quickshift { ratio, kernel_size, max_dist } => {
                if !(ratio > 0.0 && ratio <= 1.0) {
                    return Err(invalid("quickshift ratio must be in (0, 1]"));
                }
                if !(kernel_size > 0.0) || !kernel_size.is_finite() {
                    return Err(invalid("quickshift kernel_size must be > 0"));
                }
                if !(max_dist > 0.0) || !max_dist.is_finite() {
                    return Err(invalid("quickshift max_dist must be > 0"));
                }
            }
        }
        Ok(())
    }
}

impl Default for SegmentationParams {
    fn default() -> Self {
        Self::quickshift_default()
    }
}

/// Runs whichever algorithm `params` selects.
pub fn segment(image: &RgbImage, params: &SegmentationParams) -> Result<SuperpixelMap> {
    match *params {
        SegmentationParams::Slic { .. } => slic(image, params),
        SegmentationParams::Felzenszwalb { .. } => felzenszwalb(image, params),
        SegmentationParams::Quickshift { .. } => quickshift(image, params),
    }
}

/// True where a pixel has a 4-neighbor with a different label.
pub fn boundary_mask(spmap: &SuperpixelMap) -> Vec<bool> {
    let (w, h) = (spmap.width, spmap.height);
    let l = &spmap.labels;
    let mut mask = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if x + 1 < w && l[i] != l[i + 1] {
                mask[i] = true;
                mask[i + 1] = true;
            }
            if y + 1 < h && l[i] != l[i + w] {
                mask[i] = true;
                mask[i + w] = true;
            }
        }
    }
    mask
}

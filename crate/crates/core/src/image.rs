//! Raster types, color conversion and resampling.

use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};

pub type Rgb = [u8; 3];

/// Row-major 8-bit RGB raster.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<Rgb>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(invalid("image dimensions must be positive"));
        }
        if pixels.len() != width * height {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} pixels for a {}x{} image",
                pixels.len(),
                width,
                height
            )));
        }
        Ok(RgbImage { width, height, pixels })
    }

    /// Uniform image. Panics on a zero dimension.
    pub fn filled(width: usize, height: usize, color: Rgb) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        RgbImage { width, height, pixels: alloc::vec![color; width * height] }
    }

    /// Builds an image by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> Rgb) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        RgbImage { width, height, pixels }
    }

    /// Interprets `bytes` as row-major interleaved RGB.
    pub fn from_rgb_bytes(width: usize, height: usize, bytes: &[u8]) -> Result<Self> {
        if bytes.len() != width * height * 3 {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} bytes for a {}x{} RGB image",
                bytes.len(),
                width,
                height
            )));
        }
        let pixels = bytes.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        RgbImage::new(width, height, pixels)
    }

    pub fn to_rgb_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [Rgb] {
        &mut self.pixels
    }

    /// Pixel at column `x`, row `y`.
    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, value: Rgb) {
        self.pixels[y * self.width + x] = value;
    }
}

/// Images with integer labels in `0..category_names.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub images: Vec<RgbImage>,
    pub labels: Vec<usize>,
    pub category_names: Vec<alloc::string::String>,
}

impl LabeledDataset {
    pub fn new(
        images: Vec<RgbImage>,
        labels: Vec<usize>,
        category_names: Vec<alloc::string::String>,
    ) -> Result<Self> {
        if images.len() != labels.len() {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{} images but {} labels",
                images.len(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= category_names.len()) {
            return Err(invalid(alloc::format!(
                "label {bad} out of range for {} categories",
                category_names.len()
            )));
        }
        Ok(LabeledDataset { images, labels, category_names })
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.category_names.len()
    }

    /// Indices of the images labeled `category`, in dataset order.
    pub fn indices_of(&self, category: usize) -> Vec<usize> {
        (0..self.labels.len()).filter(|&i| self.labels[i] == category).collect()
    }
}

/// Rounds half away from zero and clamps into the 8-bit range.
pub fn quantize(v: f64) -> u8 {
    let r = libm::round(v);
    if r <= 0.0 {
        0
    } else if r >= 255.0 {
        255
    } else {
        r as u8
    }
}

/// CIE L*a*b* raster (D65).
#[derive(Debug, Clone, PartialEq)]
pub struct LabImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[f64; 3]>,
}

// D65 white as the row sums of the sRGB->XYZ matrix, so 8-bit white maps to
// L = 100, a = b = 0 exactly up to rounding.
const WHITE_X: f64 = 0.412_456_4 + 0.357_576_1 + 0.180_437_5;
const WHITE_Y: f64 = 0.212_672_9 + 0.715_152_2 + 0.072_175_0;
const WHITE_Z: f64 = 0.019_333_9 + 0.119_192_0 + 0.950_304_1;

fn srgb_to_linear(c: u8) -> f64 {
    let c = c as f64 / 255.0;
    if c <= 0.040_45 {
        c / 12.92
    } else {
        libm::pow((c + 0.055) / 1.055, 2.4)
    }
}

fn lab_f(t: f64) -> f64 {
    const DELTA: f64 = 6.0 / 29.0;
    if t > DELTA * DELTA * DELTA {
        libm::cbrt(t)
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

/// Converts one sRGB pixel to L*a*b*.
pub fn rgb_pixel_to_lab(rgb: Rgb) -> [f64; 3] {
    let r = srgb_to_linear(rgb[0]);
    let g = srgb_to_linear(rgb[1]);
    let b = srgb_to_linear(rgb[2]);
    let x = 0.412_456_4 * r + 0.357_576_1 * g + 0.180_437_5 * b;
    let y = 0.212_672_9 * r + 0.715_152_2 * g + 0.072_175_0 * b;
    let z = 0.019_333_9 * r + 0.119_192_0 * g + 0.950_304_1 * b;
    let fx = lab_f(x / WHITE_X);
    let fy = lab_f(y / WHITE_Y);
    let fz = lab_f(z / WHITE_Z);
    [116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

pub fn rgb_to_lab(image: &RgbImage) -> LabImage {
    // 8-bit inputs take at most 256^3 values; small images are cheaper to
    // convert directly than to cache.
    LabImage {
        width: image.width,
        height: image.height,
        pixels: image.pixels.iter().map(|&p| rgb_pixel_to_lab(p)).collect(),
    }
}

/// Bilinear resampling with pixel-center alignment and edge clamping.
pub fn resize_bilinear(image: &RgbImage, new_width: usize, new_height: usize) -> Result<RgbImage> {
    if new_width == 0 || new_height == 0 {
        return Err(invalid("resize target must be at least 1x1"));
    }
    if new_width == image.width && new_height == image.height {
        return Ok(image.clone());
    }
    let mut out = Vec::with_capacity(new_width * new_height);
    let (xs, ys) = (
        sample_positions(image.width, new_width),
        sample_positions(image.height, new_height),
    );
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            let p00 = image.get(x0, y0);
            let p10 = image.get(x1, y0);
            let p01 = image.get(x0, y1);
            let p11 = image.get(x1, y1);
            let mut px = [0u8; 3];
            for c in 0..3 {
                let top = p00[c] as f64 * (1.0 - fx) + p10[c] as f64 * fx;
                let bottom = p01[c] as f64 * (1.0 - fx) + p11[c] as f64 * fx;
                px[c] = quantize(top * (1.0 - fy) + bottom * fy);
            }
            out.push(px);
        }
    }
    RgbImage::new(new_width, new_height, out)
}

/// Float-valued bilinear resampling of one channel, used by feature code
/// that must not quantize.
pub fn resize_plane(plane: &[f64], width: usize, height: usize, new_width: usize, new_height: usize) -> Vec<f64> {
    let (xs, ys) = (sample_positions(width, new_width), sample_positions(height, new_height));
    let mut out = Vec::with_capacity(new_width * new_height);
    for &(y0, y1, fy) in &ys {
        for &(x0, x1, fx) in &xs {
            let top = plane[y0 * width + x0] * (1.0 - fx) + plane[y0 * width + x1] * fx;
            let bottom = plane[y1 * width + x0] * (1.0 - fx) + plane[y1 * width + x1] * fx;
            out.push(top * (1.0 - fy) + bottom * fy);
        }
    }
    out
}

/// For each destination index: the two source indices and the weight of the second.
fn sample_positions(src: usize, dst: usize) -> Vec<(usize, usize, f64)> {
    let scale = src as f64 / dst as f64;
    (0..dst)
        .map(|i| {
            let pos = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (src - 1) as f64);
            let i0 = libm::floor(pos) as usize;
            let i1 = (i0 + 1).min(src - 1);
            (i0, i1, pos - i0 as f64)
        })
        .collect()
}

use alloc::vec;
use alloc::vec::Vec;

use crate::image::{resize_plane, RgbImage};

const COLOR_BINS: usize = 8;
const THUMB_SIDE: usize = 8;
const ORIENTATION_BINS: usize = 9;

/// 24 color-histogram bins + 64 grayscale thumbnail values + 9 orientation bins.
pub const FEATURE_DIM: usize = 3 * COLOR_BINS + THUMB_SIDE * THUMB_SIDE + ORIENTATION_BINS;

/// Handcrafted descriptor of an image.
///
/// Layout: per-channel normalized 8-bin histograms (R, G, B), an 8x8
/// bilinear grayscale thumbnail in `[0, 1]`, and a magnitude-weighted
/// 9-bin histogram of gradient orientations over `[0, pi)`. An image with
/// no gradient at all gets the uniform orientation histogram.
pub fn extract_features(image: &RgbImage) -> Vec<f64> {
    let (w, h) = (image.width(), image.height());
    let n = image.len() as f64;
    let mut out = Vec::with_capacity(FEATURE_DIM);

    let mut hist = [[0usize; COLOR_BINS]; 3];
    for px in image.pixels() {
        for c in 0..3 {
            hist[c][px[c] as usize * COLOR_BINS / 256] += 1;
        }
    }
    for channel in &hist {
        out.extend(channel.iter().map(|&count| count as f64 / n));
    }

    let gray: Vec<f64> = image
        .pixels()
        .iter()
        .map(|p| (0.299 * p[0] as f64 + 0.587 * p[1] as f64 + 0.114 * p[2] as f64) / 255.0)
        .collect();
    out.extend(resize_plane(&gray, w, h, THUMB_SIDE, THUMB_SIDE));

    let mut orient = [0.0f64; ORIENTATION_BINS];
    for y in 0..h {
        for x in 0..w {
            let gx = (gray[y * w + (x + 1).min(w - 1)] - gray[y * w + x.saturating_sub(1)]) / 2.0;
            let gy = (gray[(y + 1).min(h - 1) * w + x] - gray[y.saturating_sub(1) * w + x]) / 2.0;
            let mag = libm::sqrt(gx * gx + gy * gy);
            if mag == 0.0 {
                continue;
            }
            let mut angle = libm::atan2(gy, gx);
            if angle < 0.0 {
                angle += core::f64::consts::PI;
            }
            if angle >= core::f64::consts::PI {
                angle -= core::f64::consts::PI;
            }
            let bin = ((angle / (core::f64::consts::PI / ORIENTATION_BINS as f64)) as usize).min(ORIENTATION_BINS - 1);
            orient[bin] += mag;
        }
    }
    let mass: f64 = orient.iter().sum();
    if mass > 0.0 {
        out.extend(orient.iter().map(|m| m / mass));
    } else {
        out.extend([1.0 / ORIENTATION_BINS as f64; ORIENTATION_BINS]);
    }
    debug_assert_eq!(out.len(), FEATURE_DIM);
    out
}

/// Per-dimension z-scores across `rows`, dropping constant dimensions.
pub fn standardize(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let Some(first) = rows.first() else {
        return Vec::new();
    };
    let dim = first.len();
    let n = rows.len() as f64;
    let mut keep = Vec::new();
    for d in 0..dim {
        let mean = rows.iter().map(|r| r[d]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r[d] - mean) * (r[d] - mean)).sum::<f64>() / n;
        let constant = rows.iter().all(|r| r[d] == first[d]);
        if !constant && var > 0.0 {
            keep.push((d, mean, libm::sqrt(var)));
        }
    }
    let mut out = vec![Vec::with_capacity(keep.len()); rows.len()];
    for (row, dst) in rows.iter().zip(&mut out) {
        dst.extend(keep.iter().map(|&(d, mean, sd)| (row[d] - mean) / sd));
    }
    out
}

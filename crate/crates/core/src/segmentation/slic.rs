use alloc::vec;
use alloc::vec::Vec;

use super::{absorb_small_components, SegmentationParams, SuperpixelMap};
use crate::error::{invalid, Result};
use crate::image::{rgb_to_lab, RgbImage};

/// SLIC: localized k-means in (L, a, b, x, y).
///
/// Centers start on a regular grid with spacing `S = sqrt(N / K)`; each
/// center only competes for pixels inside its `2S x 2S` window. The
/// distance is `sqrt(d_lab^2 + m^2 (d_xy / S)^2)`. After `max_iter` rounds,
/// fragments smaller than `N / (4K)` are absorbed into their
/// largest-contact neighbor.
pub fn slic(image: &RgbImage, params: &SegmentationParams) -> Result<SuperpixelMap> {
    params.validate()?;
    let SegmentationParams::Slic { n_segments, compactness, max_iter } = *params else {
        return Err(invalid("slic called with non-slic parameters"));
    };
    let (w, h) = (image.width(), image.height());
    let n = w * h;
    if n_segments > n {
        return Err(invalid(alloc::format!("slic n_segments {n_segments} exceeds pixel count {n}")));
    }
    let lab = rgb_to_lab(image);
    let step = libm::sqrt(n as f64 / n_segments as f64);
    let nx = (libm::round(w as f64 / step) as usize).clamp(1, w);
    let ny = (libm::round(h as f64 / step) as usize).clamp(1, h);

    // [L, a, b, x, y]
    let mut centers: Vec<[f64; 5]> = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let cx = (i as f64 + 0.5) * w as f64 / nx as f64;
            let cy = (j as f64 + 0.5) * h as f64 / ny as f64;
            let px = (libm::floor(cx) as usize).min(w - 1);
            let py = (libm::floor(cy) as usize).min(h - 1);
            let c = lab.pixels[py * w + px];
            centers.push([c[0], c[1], c[2], cx, cy]);
        }
    }

    // Pixels outside every window keep their grid cell.
    let mut labels: Vec<u32> = (0..n)
        .map(|p| {
            let (x, y) = (p % w, p / w);
            let i = (x * nx / w).min(nx - 1);
            let j = (y * ny / h).min(ny - 1);
            (j * nx + i) as u32
        })
        .collect();

    let spatial = (compactness / step) * (compactness / step);
    let mut dist = vec![f64::INFINITY; n];
    for _ in 0..max_iter {
        dist.iter_mut().for_each(|d| *d = f64::INFINITY);
        for (k, c) in centers.iter().enumerate() {
            let x0 = libm::floor(c[3] - step).max(0.0) as usize;
            let x1 = (libm::ceil(c[3] + step) as usize).min(w - 1);
            let y0 = libm::floor(c[4] - step).max(0.0) as usize;
            let y1 = (libm::ceil(c[4] + step) as usize).min(h - 1);
            for y in y0..=y1 {
                for x in x0..=x1 {
                    let p = y * w + x;
                    let l = lab.pixels[p];
                    let dl = l[0] - c[0];
                    let da = l[1] - c[1];
                    let db = l[2] - c[2];
                    let dx = x as f64 - c[3];
                    let dy = y as f64 - c[4];
                    let d = dl * dl + da * da + db * db + spatial * (dx * dx + dy * dy);
                    if d < dist[p] {
                        dist[p] = d;
                        labels[p] = k as u32;
                    }
                }
            }
        }
        let mut sums = vec![[0.0f64; 5]; centers.len()];
        let mut counts = vec![0usize; centers.len()];
        for (p, (&label, l)) in labels.iter().zip(&lab.pixels).enumerate() {
            let k = label as usize;
            let s = &mut sums[k];
            s[0] += l[0];
            s[1] += l[1];
            s[2] += l[2];
            s[3] += (p % w) as f64;
            s[4] += (p / w) as f64;
            counts[k] += 1;
        }
        for (k, c) in centers.iter_mut().enumerate() {
            if counts[k] > 0 {
                let inv = 1.0 / counts[k] as f64;
                for d in 0..5 {
                    c[d] = sums[k][d] * inv;
                }
            }
        }
    }

    let min_size = (n / (4 * n_segments)).max(1);
    let merged = absorb_small_components(w, h, &labels, min_size);
    Ok(SuperpixelMap::from_raw_labels(w, h, &merged))
}

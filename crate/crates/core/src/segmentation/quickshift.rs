use alloc::vec;
use alloc::vec::Vec;

use super::connectivity::connected_components;
use super::{SegmentationParams, SuperpixelMap};
use crate::error::{invalid, Result};
use crate::image::{rgb_to_lab, RgbImage};

/// Quickshift mode seeking in `(ratio*L, ratio*a, ratio*b, x, y)`.
///
/// Density is a Gaussian Parzen estimate (bandwidth `kernel_size`) over a
/// square neighborhood of radius `ceil(3 * kernel_size)`. Each pixel links
/// to the nearest pixel within `max_dist` whose density is strictly higher;
/// equal distances go to the lowest row-major index and equal densities
/// never link. Segments are the resulting trees, split into their
/// 4-connected pieces (a link may jump over pixels of another tree).
pub fn quickshift(image: &RgbImage, params: &SegmentationParams) -> Result<SuperpixelMap> {
    params.validate()?;
    let SegmentationParams::Quickshift { ratio, kernel_size, max_dist } = *params else {
        return Err(invalid("quickshift called with non-quickshift parameters"));
    };
    let (w, h) = (image.width(), image.height());
    let n = w * h;
    let color: Vec<[f64; 3]> = rgb_to_lab(image)
        .pixels
        .iter()
        .map(|p| [p[0] * ratio, p[1] * ratio, p[2] * ratio])
        .collect();
    let dist2 = |p: usize, q: usize| -> f64 {
        let (a, b) = (color[p], color[q]);
        let dx = (p % w) as f64 - (q % w) as f64;
        let dy = (p / w) as f64 - (q / w) as f64;
        let d0 = a[0] - b[0];
        let d1 = a[1] - b[1];
        let d2 = a[2] - b[2];
        d0 * d0 + d1 * d1 + d2 * d2 + dx * dx + dy * dy
    };

    let window = libm::ceil(3.0 * kernel_size) as usize;
    let inv_two_var = 1.0 / (2.0 * kernel_size * kernel_size);
    let mut density = vec![0.0f64; n];
    for y in 0..h {
        for x in 0..w {
            let p = y * w + x;
            let mut s = 0.0;
            for yy in y.saturating_sub(window)..(y + window + 1).min(h) {
                for xx in x.saturating_sub(window)..(x + window + 1).min(w) {
                    s += libm::exp(-dist2(p, yy * w + xx) * inv_two_var);
                }
            }
            density[p] = s;
        }
    }

    let reach = libm::floor(max_dist) as usize;
    let max_d2 = max_dist * max_dist;
    let mut parent: Vec<usize> = (0..n).collect();
    for y in 0..h {
        for x in 0..w {
            let p = y * w + x;
            let mut best = f64::INFINITY;
            for yy in y.saturating_sub(reach)..(y + reach + 1).min(h) {
                for xx in x.saturating_sub(reach)..(x + reach + 1).min(w) {
                    let q = yy * w + xx;
                    if density[q] > density[p] {
                        let d = dist2(p, q);
                        if d <= max_d2 && d < best {
                            best = d;
                            parent[p] = q;
                        }
                    }
                }
            }
        }
    }

    // Parents have strictly higher density, so chains terminate.
    let mut root = vec![u32::MAX; n];
    let mut chain = Vec::new();
    for p in 0..n {
        let mut q = p;
        while root[q] == u32::MAX && parent[q] != q {
            chain.push(q);
            q = parent[q];
        }
        let r = if root[q] == u32::MAX { q as u32 } else { root[q] };
        root[q] = r;
        for c in chain.drain(..) {
            root[c] = r;
        }
    }
    let (pieces, _) = connected_components(w, h, &root);
    Ok(SuperpixelMap::from_raw_labels(w, h, &pieces))
}

use alloc::vec;
use alloc::vec::Vec;

use super::{absorb_small_components, SegmentationParams, SuperpixelMap};
use crate::error::{invalid, Result};
use crate::image::RgbImage;

/// Graph-based segmentation on the 8-neighbor pixel grid.
///
/// Edges are processed in nondecreasing weight order (ties by the smaller
/// endpoint index, then generation order). Components `A`, `B` merge when
/// the edge weight is at most `min(Int(A) + k/|A|, Int(B) + k/|B|)`. A
/// second pass over the same order merges components below `min_size`,
/// and the result is split into 4-connected regions.
pub fn felzenszwalb(image: &RgbImage, params: &SegmentationParams) -> Result<SuperpixelMap> {
    params.validate()?;
    let SegmentationParams::Felzenszwalb { scale, sigma, min_size } = *params else {
        return Err(invalid("felzenszwalb called with non-felzenszwalb parameters"));
    };
    let (w, h) = (image.width(), image.height());
    let n = w * h;
    let planes: Vec<Vec<f64>> = (0..3).map(|c| smooth_channel(image, c, sigma)).collect();

    let weight = |p: usize, q: usize| -> f64 {
        let mut s = 0.0;
        for plane in &planes {
            let d = plane[p] - plane[q];
            s += d * d;
        }
        libm::sqrt(s)
    };
    let mut edges: Vec<(f64, u32, u32)> = Vec::with_capacity(4 * n);
    for y in 0..h {
        for x in 0..w {
            let p = y * w + x;
            if x + 1 < w {
                edges.push((weight(p, p + 1), p as u32, (p + 1) as u32));
            }
            if y + 1 < h {
                if x > 0 {
                    edges.push((weight(p, p + w - 1), p as u32, (p + w - 1) as u32));
                }
                edges.push((weight(p, p + w), p as u32, (p + w) as u32));
                if x + 1 < w {
                    edges.push((weight(p, p + w + 1), p as u32, (p + w + 1) as u32));
                }
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut uf = UnionFind::new(n);
    let mut internal = vec![0.0f64; n];
    for &(wt, p, q) in &edges {
        let a = uf.find(p as usize);
        let b = uf.find(q as usize);
        if a == b {
            continue;
        }
        let ta = internal[a] + scale / uf.size[a] as f64;
        let tb = internal[b] + scale / uf.size[b] as f64;
        if wt <= ta.min(tb) {
            let r = uf.union(a, b);
            internal[r] = wt;
        }
    }
    for &(_, p, q) in &edges {
        let a = uf.find(p as usize);
        let b = uf.find(q as usize);
        if a != b && (uf.size[a] < min_size || uf.size[b] < min_size) {
            uf.union(a, b);
        }
    }
    let raw: Vec<u32> = (0..n).map(|p| uf.find(p) as u32).collect();
    let split = absorb_small_components(w, h, &raw, min_size);
    Ok(SuperpixelMap::from_raw_labels(w, h, &split))
}

struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Joins two roots; the larger tree (ties: lower index) becomes the root.
    fn union(&mut self, a: usize, b: usize) -> usize {
        let (root, child) = match self.size[a].cmp(&self.size[b]) {
            core::cmp::Ordering::Greater => (a, b),
            core::cmp::Ordering::Less => (b, a),
            core::cmp::Ordering::Equal => (a.min(b), a.max(b)),
        };
        self.parent[child] = root;
        self.size[root] += self.size[child];
        root
    }
}

/// Separable Gaussian blur of one channel (kernel truncated at 4 sigma,
/// reflected borders). The channel minimum is subtracted first so a
/// constant offset of the input leaves the output bit-identical.
fn smooth_channel(image: &RgbImage, channel: usize, sigma: f64) -> Vec<f64> {
    let (w, h) = (image.width(), image.height());
    let min = image.pixels().iter().map(|p| p[channel]).min().unwrap_or(0);
    let plane: Vec<f64> = image.pixels().iter().map(|p| (p[channel] - min) as f64).collect();
    if sigma == 0.0 {
        return plane;
    }
    let radius = libm::ceil(4.0 * sigma) as isize;
    let mut kernel: Vec<f64> = (-radius..=radius)
        .map(|i| libm::exp(-((i * i) as f64) / (2.0 * sigma * sigma)))
        .collect();
    let total: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|k| *k /= total);

    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut s = 0.0;
            for (t, k) in kernel.iter().enumerate() {
                let xx = reflect(x as isize + t as isize - radius, w);
                s += k * plane[y * w + xx];
            }
            tmp[y * w + x] = s;
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let mut s = 0.0;
            for (t, k) in kernel.iter().enumerate() {
                let yy = reflect(y as isize + t as isize - radius, h);
                s += k * tmp[yy * w + x];
            }
            out[y * w + x] = s;
        }
    }
    out
}

/// Half-sample symmetric reflection (`d c b a | a b c d | d c b a`).
fn reflect(mut i: isize, n: usize) -> usize {
    let n = n as isize;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - i - 1;
        } else {
            return i as usize;
        }
    }
}

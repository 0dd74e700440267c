#![allow(dead_code)]

use limevis_core::rng::CounterRng;
use limevis_core::{ClassProbabilities, Predictor, RgbImage, SuperpixelMap};

pub fn random_image(width: usize, height: usize, seed: u64) -> RgbImage {
    let mut rng = CounterRng::new(seed, 77);
    RgbImage::from_fn(width, height, |_, _| {
        let v = rng.next_u64();
        [v as u8, (v >> 8) as u8, (v >> 16) as u8]
    })
}

/// Random image whose channels stay inside `[lo, hi]`.
pub fn random_image_in(width: usize, height: usize, seed: u64, lo: u8, hi: u8) -> RgbImage {
    let mut rng = CounterRng::new(seed, 78);
    let span = (hi - lo) as usize + 1;
    RgbImage::from_fn(width, height, |_, _| {
        [lo + rng.below(span) as u8, lo + rng.below(span) as u8, lo + rng.below(span) as u8]
    })
}

/// Blocky random image: `cells x cells` uniform tiles with random colors
/// plus mild per-pixel noise.
pub fn blocky_image(side: usize, cells: usize, seed: u64) -> RgbImage {
    let mut rng = CounterRng::new(seed, 79);
    let colors: Vec<[u8; 3]> = (0..cells * cells)
        .map(|_| [30 + rng.below(196) as u8, 30 + rng.below(196) as u8, 30 + rng.below(196) as u8])
        .collect();
    RgbImage::from_fn(side, side, |x, y| {
        let c = colors[(y * cells / side) * cells + x * cells / side];
        let n = rng.below(9) as i32 - 4;
        c.map(|v| (v as i32 + n).clamp(0, 255) as u8)
    })
}

/// Two partitions are equal up to a relabeling of segment ids.
pub fn same_partition(a: &[u32], b: &[u32]) -> bool {
    use std::collections::HashMap;
    if a.len() != b.len() {
        return false;
    }
    let mut fwd = HashMap::new();
    let mut back = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        if *fwd.entry(x).or_insert(y) != y || *back.entry(y).or_insert(x) != x {
            return false;
        }
    }
    true
}

/// Brute-force check that every label's pixels form one 4-connected region.
pub fn segments_are_connected(map: &SuperpixelMap) -> bool {
    let (w, h) = (map.width(), map.height());
    let labels = map.labels();
    let mut seen = vec![false; w * h];
    let mut started = vec![false; map.num_segments()];
    for start in 0..w * h {
        if seen[start] {
            continue;
        }
        let l = labels[start] as usize;
        if started[l] {
            return false;
        }
        started[l] = true;
        let mut queue = std::collections::VecDeque::from([start]);
        seen[start] = true;
        while let Some(p) = queue.pop_front() {
            let (x, y) = (p % w, p / w);
            let mut nb = Vec::new();
            if x > 0 {
                nb.push(p - 1);
            }
            if x + 1 < w {
                nb.push(p + 1);
            }
            if y > 0 {
                nb.push(p - w);
            }
            if y + 1 < h {
                nb.push(p + w);
            }
            for q in nb {
                if !seen[q] && labels[q] as usize == l {
                    seen[q] = true;
                    queue.push_back(q);
                }
            }
        }
    }
    true
}

pub fn labels_are_dense(map: &SuperpixelMap) -> bool {
    let mut seen = vec![false; map.num_segments()];
    for &l in map.labels() {
        match seen.get_mut(l as usize) {
            Some(s) => *s = true,
            None => return false,
        }
    }
    seen.into_iter().all(|s| s)
}

/// Two-class black box whose class-0 probability is exactly
/// `base + sum_k coefs[k] * visible[k]`. A superpixel counts as hidden when
/// its first pixel differs from the original (hide with a color absent from
/// the original image).
pub struct LinearOracle {
    pub original: RgbImage,
    pub probe: Vec<usize>,
    pub base: f64,
    pub coefs: Vec<f64>,
    names: Vec<String>,
}

impl LinearOracle {
    pub fn new(original: RgbImage, spmap: &SuperpixelMap, seed: u64) -> Self {
        let k = spmap.num_segments();
        let mut probe = vec![usize::MAX; k];
        for (i, &l) in spmap.labels().iter().enumerate() {
            if probe[l as usize] == usize::MAX {
                probe[l as usize] = i;
            }
        }
        let mut rng = CounterRng::new(seed, 5);
        let coefs = (0..k).map(|_| (rng.next_f64() * 1.3 - 0.3) * 0.5 / k as f64).collect();
        LinearOracle { original, probe, base: 0.45, coefs, names: vec!["target".into(), "other".into()] }
    }

    pub fn visible(&self, image: &RgbImage) -> Vec<bool> {
        self.probe.iter().map(|&p| image.pixels()[p] == self.original.pixels()[p]).collect()
    }

    pub fn class0(&self, image: &RgbImage) -> f64 {
        self.base + self.visible(image).iter().zip(&self.coefs).map(|(&v, c)| if v { *c } else { 0.0 }).sum::<f64>()
    }
}

impl Predictor for LinearOracle {
    fn class_count(&self) -> usize {
        2
    }

    fn class_names(&self) -> &[String] {
        &self.names
    }

    fn predict_batch(&self, images: &[RgbImage]) -> limevis_core::Result<Vec<ClassProbabilities>> {
        images
            .iter()
            .map(|img| {
                let p = self.class0(img);
                ClassProbabilities::new(vec![p, 1.0 - p])
            })
            .collect()
    }
}

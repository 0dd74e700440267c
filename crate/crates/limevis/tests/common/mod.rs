#![allow(dead_code)]

#[path = "../../../core/tests/common/mod.rs"]
mod shared;

pub use shared::*;

use limevis_core::rng::CounterRng;
use limevis_core::{ClassProbabilities, LabeledDataset, Predictor, RgbImage};

const PALETTE: [[u8; 3]; 6] = [[200, 40, 40], [40, 200, 40], [40, 40, 200], [200, 200, 40], [40, 200, 200], [200, 40, 200]];

/// `per_class` blocky images per class, tinted toward the class color.
pub fn synthetic_dataset(classes: usize, per_class: usize, side: usize, seed: u64) -> LabeledDataset {
    let mut images = Vec::new();
    let mut labels = Vec::new();
    for i in 0..per_class {
        for c in 0..classes {
            let base = blocky_image(side, 4, seed.wrapping_mul(1000).wrapping_add((i * classes + c) as u64));
            let tint = PALETTE[c % PALETTE.len()];
            images.push(RgbImage::from_fn(side, side, |x, y| {
                let p = base.get(x, y);
                [0, 1, 2].map(|k| ((p[k] as u16 + 2 * tint[k] as u16) / 3) as u8)
            }));
            labels.push(c);
        }
    }
    let names = (0..classes).map(|c| format!("cat{c}")).collect();
    LabeledDataset::new(images, labels, names).unwrap()
}

/// Uniform probabilities for every image.
pub struct ConstantPredictor {
    pub names: Vec<String>,
}

impl ConstantPredictor {
    pub fn new(classes: usize) -> Self {
        ConstantPredictor { names: (0..classes).map(|c| format!("cat{c}")).collect() }
    }
}

impl Predictor for ConstantPredictor {
    fn class_count(&self) -> usize {
        self.names.len()
    }

    fn class_names(&self) -> &[String] {
        &self.names
    }

    fn predict_batch(&self, images: &[RgbImage]) -> limevis_core::Result<Vec<ClassProbabilities>> {
        let c = self.names.len();
        images.iter().map(|_| ClassProbabilities::new(vec![1.0 / c as f64; c])).collect()
    }
}

pub fn seeded_rng(seed: u64) -> CounterRng {
    CounterRng::new(seed, 99)
}

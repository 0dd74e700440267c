//! One executed analysis: explanations for a category's images, their
//! embedding, and per-image superpixel visibility for interactive probing.

use limevis_core::embedding::{pacmap_embed, pca_init, standardize, EmbeddingConfig};
use limevis_core::lime::{apply_mask, explain, ExplainConfig, Explanation, HideColor};
use limevis_core::rng::{derive_seed, CounterRng};
use limevis_core::{ClassProbabilities, LabeledDataset, Predictor, RgbImage, SuperpixelMap};
use rayon::prelude::*;

use crate::error::{LimevisError, Result};
use crate::handle::FeatureSource;

pub const SESSION_SIZE: usize = 100;
pub const GRID_SIDE: usize = 10;
pub const TOGGLE_FILL: HideColor = HideColor::Fixed([0, 0, 0]);

const SHUFFLE_STREAM: u64 = 0x5348_5546;

#[derive(Debug, Clone, PartialEq)]
pub struct SessionEntry {
    pub image_id: usize,
    pub dataset_index: usize,
    pub original: RgbImage,
    pub spmap: SuperpixelMap,
    pub explanation: Explanation,
    /// Configuration used for this image, per-image seed included.
    pub config: ExplainConfig,
    pub lime_image: RgbImage,
    pub predicted_class: usize,
    pub correct: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OverviewCell {
    pub image_id: usize,
    pub row: usize,
    pub col: usize,
    pub correct: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExecuteOptions {
    pub max_images: usize,
    /// Shuffle the category before taking the first `max_images`.
    pub shuffle_seed: Option<u64>,
}

impl Default for ExecuteOptions {
    fn default() -> Self {
        ExecuteOptions { max_images: SESSION_SIZE, shuffle_seed: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ToggleOutcome {
    pub toggle: Vec<u8>,
    pub masked: RgbImage,
    pub current: ClassProbabilities,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub category: usize,
    pub category_name: String,
    pub config: ExplainConfig,
    pub entries: Vec<SessionEntry>,
    pub embedding: Vec<[f64; 2]>,
    toggles: Vec<Vec<u8>>,
}

/// Layout parameters for `n` points; neighbor count shrinks for small sessions.
pub fn embedding_config(n: usize, seed: u64) -> EmbeddingConfig {
    let base = EmbeddingConfig { seed, ..Default::default() };
    EmbeddingConfig { n_neighbors: base.n_neighbors.min(n.saturating_sub(1)).max(1), ..base }
}

/// 2-D coordinates for `features`. Sessions too small for pair sampling
/// fall back to the principal-component initialization.
pub fn embed_features(features: &[Vec<f64>], seed: u64) -> Result<Vec<[f64; 2]>> {
    let points = standardize(features);
    let cfg = embedding_config(points.len(), seed);
    if points.len() < (cfg.n_neighbors + 1).max(7) {
        return Ok(pca_init(&points));
    }
    Ok(pacmap_embed(&points, &cfg)?.coords)
}

fn session_indices(dataset: &LabeledDataset, category: usize, options: &ExecuteOptions) -> Vec<usize> {
    let mut idx = dataset.indices_of(category);
    if let Some(seed) = options.shuffle_seed {
        let mut rng = CounterRng::new(seed, SHUFFLE_STREAM);
        for i in (1..idx.len()).rev() {
            let j = rng.below(i + 1);
            idx.swap(i, j);
        }
    }
    idx.truncate(options.max_images);
    idx
}

/// Explains up to 100 images of `category`, embeds their LIME renderings and
/// starts every toggle vector at all-visible. Runs on the current rayon pool;
/// results do not depend on its size.
pub fn execute_category<P: Predictor + ?Sized>(
    dataset: &LabeledDataset,
    category: usize,
    config: &ExplainConfig,
    predictor: &P,
    features: &FeatureSource,
    options: &ExecuteOptions,
) -> Result<Session> {
    config.validate()?;
    let category_name = dataset
        .category_names
        .get(category)
        .cloned()
        .ok_or_else(|| LimevisError::UnknownCategory(category.to_string()))?;
    let indices = session_indices(dataset, category, options);
    if indices.is_empty() {
        return Err(LimevisError::EmptyCategory(category_name));
    }
    let entries = indices
        .par_iter()
        .enumerate()
        .map(|(image_id, &dataset_index)| {
            let cfg = ExplainConfig { seed: derive_seed(config.seed, image_id as u64), ..config.clone() };
            let original = dataset.images[dataset_index].clone();
            let out = explain(&original, predictor, &cfg)?;
            let predicted_class = out.explanation.original_probs.argmax();
            Ok(SessionEntry {
                image_id,
                dataset_index,
                original,
                spmap: out.spmap,
                explanation: out.explanation,
                config: cfg,
                lime_image: out.rendered,
                predicted_class,
                correct: predicted_class == category,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let lime_images: Vec<RgbImage> = entries.iter().map(|e| e.lime_image.clone()).collect();
    let embedding = embed_features(&features.extract(&lime_images)?, config.seed)?;
    let toggles = entries.iter().map(|e| vec![1u8; e.spmap.num_segments()]).collect();
    Ok(Session { category, category_name, config: config.clone(), entries, embedding, toggles })
}

impl Session {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry(&self, image_id: usize) -> Result<&SessionEntry> {
        self.entries.get(image_id).ok_or(LimevisError::UnknownImage(image_id))
    }

    pub fn toggle_state(&self, image_id: usize) -> Result<&[u8]> {
        self.entry(image_id)?;
        Ok(&self.toggles[image_id])
    }

    /// Row-major 10-wide grid.
    pub fn overview(&self) -> Vec<OverviewCell> {
        self.entries
            .iter()
            .map(|e| OverviewCell { image_id: e.image_id, row: e.image_id / GRID_SIDE, col: e.image_id % GRID_SIDE, correct: e.correct })
            .collect()
    }

    pub fn incorrect_count(&self) -> usize {
        self.entries.iter().filter(|e| !e.correct).count()
    }

    pub fn accuracy(&self) -> f64 {
        (self.len() - self.incorrect_count()) as f64 / self.len() as f64
    }

    /// Current masked image for `image_id` (hidden superpixels black).
    pub fn masked_image(&self, image_id: usize) -> Result<RgbImage> {
        let e = self.entry(image_id)?;
        Ok(apply_mask(&e.original, &e.spmap, &self.toggles[image_id], TOGGLE_FILL)?)
    }

    /// Flips one superpixel's visibility and re-predicts the masked image.
    pub fn toggle_superpixel<P: Predictor + ?Sized>(
        &mut self,
        predictor: &P,
        image_id: usize,
        superpixel: usize,
    ) -> Result<ToggleOutcome> {
        let count = self.entry(image_id)?.spmap.num_segments();
        if superpixel >= count {
            return Err(LimevisError::SuperpixelOutOfRange { superpixel, count });
        }
        let mut next = self.toggles[image_id].clone();
        next[superpixel] ^= 1;
        let e = &self.entries[image_id];
        let masked = apply_mask(&e.original, &e.spmap, &next, TOGGLE_FILL)?;
        let current = predictor.predict(&masked)?;
        self.toggles[image_id] = next.clone();
        Ok(ToggleOutcome { toggle: next, masked, current })
    }

    /// Restores all-visible; the current prediction is the original one.
    pub fn reset_toggles(&mut self, image_id: usize) -> Result<(Vec<u8>, ClassProbabilities)> {
        let probs = self.entry(image_id)?.explanation.original_probs.clone();
        self.toggles[image_id].iter_mut().for_each(|t| *t = 1);
        Ok((self.toggles[image_id].clone(), probs))
    }

    pub fn pixel_to_superpixel(&self, image_id: usize, x: usize, y: usize) -> Result<usize> {
        let m = &self.entry(image_id)?.spmap;
        if x >= m.width() || y >= m.height() {
            return Err(LimevisError::OutOfBounds { x, y, width: m.width(), height: m.height() });
        }
        Ok(m.label_at(x, y) as usize)
    }
}

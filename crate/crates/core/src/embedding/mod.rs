//! Image descriptors and the PaCMAP 2-D layout for the summary scatter.

mod features;
mod pacmap;
mod pairs;

pub use features::{extract_features, standardize, FEATURE_DIM};
pub use pacmap::{pacmap_embed, pacmap_loss_and_grad, pca_init, phase_weights, Embedding2D, EmbeddingConfig, PhaseWeights};
pub use pairs::{sample_further_pairs, sample_mid_near_pairs, select_near_pairs, squared_distance, Pair, PairSet};

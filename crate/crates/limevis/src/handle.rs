use limevis_core::embedding::extract_features;
use limevis_core::predictor::BuiltinModel;
use limevis_core::{ClassProbabilities, Predictor, RgbImage};
use rayon::prelude::*;

use crate::error::Result;
use crate::external::{ExternalExtractor, ExternalPredictor};

/// The model behind a session: the builtin classifier or an external endpoint.
#[derive(Debug)]
pub enum PredictorHandle {
    Builtin(BuiltinModel),
    External(ExternalPredictor),
}

impl Predictor for PredictorHandle {
    fn class_count(&self) -> usize {
        match self {
            PredictorHandle::Builtin(m) => m.class_count(),
            PredictorHandle::External(e) => e.class_count(),
        }
    }

    fn class_names(&self) -> &[String] {
        match self {
            PredictorHandle::Builtin(m) => m.class_names(),
            PredictorHandle::External(e) => e.class_names(),
        }
    }

    fn predict_batch(&self, images: &[RgbImage]) -> limevis_core::Result<Vec<ClassProbabilities>> {
        match self {
            PredictorHandle::Builtin(m) => m.predict_batch(images),
            PredictorHandle::External(e) => e.predict_batch(images),
        }
    }
}

/// Source of the per-image descriptors that feed the embedding.
#[derive(Default)]
pub enum FeatureSource {
    #[default]
    Builtin,
    External(ExternalExtractor),
}

impl FeatureSource {
    pub fn extract(&self, images: &[RgbImage]) -> Result<Vec<Vec<f64>>> {
        match self {
            FeatureSource::Builtin => Ok(images.par_iter().map(extract_features).collect()),
            FeatureSource::External(x) => x.extract(images),
        }
    }
}

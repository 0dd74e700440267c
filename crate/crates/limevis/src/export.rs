//! Files written by `limevis explain`.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::formats::write_ppm;
use crate::session::Session;
use crate::wire::{ConfigSpec, ExplanationRecord};

pub fn embedding_csv(session: &Session) -> String {
    let mut out = String::from("index,x,y,correct\n");
    for (e, [x, y]) in session.entries.iter().zip(&session.embedding) {
        out.push_str(&format!("{},{x},{y},{}\n", e.image_id, e.correct));
    }
    out
}

pub fn explanation_json(session: &Session, image_id: usize) -> Result<String> {
    let e = session.entry(image_id)?;
    let record = ExplanationRecord::new(&e.explanation, &e.config);
    Ok(serde_json::to_string_pretty(&record).expect("serializable") + "\n")
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub dataset: String,
    pub format: String,
    pub predictor: String,
    pub category: String,
    pub category_index: usize,
    pub n_images: usize,
    pub accuracy: f64,
    /// Correctly classified (blue border).
    pub blue_count: usize,
    /// Misclassified (red border).
    pub red_count: usize,
    pub dataset_indices: Vec<usize>,
    pub config: ConfigSpec,
}

impl Summary {
    pub fn new(session: &Session, dataset: String, format: String, predictor: String) -> Self {
        let red = session.incorrect_count();
        Summary {
            dataset,
            format,
            predictor,
            category: session.category_name.clone(),
            category_index: session.category,
            n_images: session.len(),
            accuracy: session.accuracy(),
            blue_count: session.len() - red,
            red_count: red,
            dataset_indices: session.entries.iter().map(|e| e.dataset_index).collect(),
            config: (&session.config).into(),
        }
    }
}

/// Writes `lime_<id>.ppm` and `explanation_<id>.json` per image, then
/// `embedding.csv` and `summary.json`.
pub fn write_outputs(dir: &Path, session: &Session, summary: &Summary) -> Result<()> {
    fs::create_dir_all(dir)?;
    for e in &session.entries {
        fs::write(dir.join(format!("lime_{}.ppm", e.image_id)), write_ppm(&e.lime_image))?;
        fs::write(dir.join(format!("explanation_{}.json", e.image_id)), explanation_json(session, e.image_id)?)?;
    }
    fs::write(dir.join("embedding.csv"), embedding_csv(session))?;
    fs::write(dir.join("summary.json"), serde_json::to_string_pretty(summary).expect("serializable") + "\n")?;
    Ok(())
}

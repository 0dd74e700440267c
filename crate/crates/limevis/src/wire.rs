//! JSON shapes shared by the HTTP API and the CLI's output files.

use limevis_core::lime::{ExplainConfig, Explanation, HideColor};
use limevis_core::SegmentationParams;
use serde::{Deserialize, Serialize};

use crate::error::{LimevisError, Result};

/// Segmentation block. Unset fields take the algorithm's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentationSpec {
    pub algorithm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_segments: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compactness: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_size: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dist: Option<f64>,
}

fn bad(msg: String) -> LimevisError {
    LimevisError::Core(limevis_core::Error::InvalidParams(msg))
}

impl SegmentationSpec {
    pub fn to_params(&self) -> Result<SegmentationParams> {
        let base = SegmentationParams::default_for(&self.algorithm)
            .ok_or_else(|| bad(format!("unknown segmentation algorithm {:?}", self.algorithm)))?;
        let stray = |present: &[bool]| {
            if present.iter().any(|&p| p) {
                Err(bad(format!("parameter does not apply to {}", self.algorithm)))
            } else {
                Ok(())
            }
        };
        let p = match base {
            SegmentationParams::Slic { n_segments, compactness, max_iter } => {
                stray(&[
                    self.scale.is_some(),
                    self.sigma.is_some(),
                    self.min_size.is_some(),
                    self.ratio.is_some(),
                    self.kernel_size.is_some(),
                    self.max_dist.is_some(),
                ])?;
                SegmentationParams::Slic {
                    n_segments: self.n_segments.unwrap_or(n_segments),
                    compactness: self.compactness.unwrap_or(compactness),
                    max_iter: self.max_iter.unwrap_or(max_iter),
                }
            }
            SegmentationParams::Felzenszwalb { scale, sigma, min_size } => {
                stray(&[
                    self.n_segments.is_some(),
                    self.compactness.is_some(),
                    self.max_iter.is_some(),
                    self.ratio.is_some(),
                    self.kernel_size.is_some(),
                    self.max_dist.is_some(),
                ])?;
                SegmentationParams::Felzenszwalb {
                    scale: self.scale.unwrap_or(scale),
                    sigma: self.sigma.unwrap_or(sigma),
                    min_size: self.min_size.unwrap_or(min_size),
                }
            }
            SegmentationParams::Quickshift { ratio, kernel_size, max_dist } => {
                stray(&[
                    self.n_segments.is_some(),
                    self.compactness.is_some(),
                    self.max_iter.is_some(),
                    self.scale.is_some(),
                    self.sigma.is_some(),
                    self.min_size.is_some(),
                ])?;
                SegmentationParams::Quickshift {
                    ratio: self.ratio.unwrap_or(ratio),
                    kernel_size: self.kernel_size.unwrap_or(kernel_size),
                    max_dist: self.max_dist.unwrap_or(max_dist),
                }
            }
        };
        p.validate()?;
        Ok(p)
    }
}

impl From<&SegmentationParams> for SegmentationSpec {
    fn from(p: &SegmentationParams) -> Self {
        let mut s = SegmentationSpec { algorithm: p.algorithm_name().to_string(), ..Default::default() };
        match *p {
            SegmentationParams::Slic { n_segments, compactness, max_iter } => {
                s.n_segments = Some(n_segments);
                s.compactness = Some(compactness);
                s.max_iter = Some(max_iter);
            }
            SegmentationParams::Felzenszwalb { scale, sigma, min_size } => {
                s.scale = Some(scale);
                s.sigma = Some(sigma);
                s.min_size = Some(min_size);
            }
            SegmentationParams::Quickshift { ratio, kernel_size, max_dist } => {
                s.ratio = Some(ratio);
                s.kernel_size = Some(kernel_size);
                s.max_dist = Some(max_dist);
            }
        }
        s
    }
}

/// Either an algorithm name or a full parameter block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SegmentationInput {
    Name(String),
    Spec(SegmentationSpec),
}

impl Default for SegmentationInput {
    fn default() -> Self {
        SegmentationInput::Spec((&SegmentationParams::default()).into())
    }
}

/// `"mean"` or an `[r, g, b]` triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum HideColorSpec {
    Named(String),
    Rgb([u8; 3]),
}

impl Default for HideColorSpec {
    fn default() -> Self {
        HideColorSpec::Named("mean".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigSpec {
    pub segmentation: SegmentationInput,
    pub num_samples: usize,
    pub kernel_width: f64,
    pub ridge_lambda: f64,
    pub positive_only: bool,
    pub num_features: usize,
    pub hide_rest: bool,
    pub hide_color: HideColorSpec,
    pub seed: u64,
}

impl Default for ConfigSpec {
    fn default() -> Self {
        (&ExplainConfig::default()).into()
    }
}

impl ConfigSpec {
    pub fn to_config(&self) -> Result<ExplainConfig> {
        let segmentation = match &self.segmentation {
            SegmentationInput::Name(n) => SegmentationSpec { algorithm: n.clone(), ..Default::default() }.to_params()?,
            SegmentationInput::Spec(s) => s.to_params()?,
        };
        let hide_color = match &self.hide_color {
            HideColorSpec::Named(n) if n == "mean" => HideColor::SegmentMean,
            HideColorSpec::Named(n) => return Err(bad(format!("unknown hide_color {n:?}"))),
            HideColorSpec::Rgb(c) => HideColor::Fixed(*c),
        };
        let cfg = ExplainConfig {
            segmentation,
            num_samples: self.num_samples,
            kernel_width: self.kernel_width,
            ridge_lambda: self.ridge_lambda,
            positive_only: self.positive_only,
            num_features: self.num_features,
            hide_rest: self.hide_rest,
            hide_color,
            seed: self.seed,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<&ExplainConfig> for ConfigSpec {
    fn from(c: &ExplainConfig) -> Self {
        ConfigSpec {
            segmentation: SegmentationInput::Spec((&c.segmentation).into()),
            num_samples: c.num_samples,
            kernel_width: c.kernel_width,
            ridge_lambda: c.ridge_lambda,
            positive_only: c.positive_only,
            num_features: c.num_features,
            hide_rest: c.hide_rest,
            hide_color: match c.hide_color {
                HideColor::SegmentMean => HideColorSpec::Named("mean".into()),
                HideColor::Fixed(rgb) => HideColorSpec::Rgb(rgb),
            },
            seed: c.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationRecord {
    pub target_class: usize,
    pub intercept: f64,
    pub weights: Vec<f64>,
    pub selected: Vec<usize>,
    pub local_fit_r2: f64,
    pub original_probs: Vec<f64>,
    pub num_superpixels: usize,
    pub config_echo: ConfigSpec,
}

impl ExplanationRecord {
    /// `config` is the configuration that produced `e`, per-image seed included.
    pub fn new(e: &Explanation, config: &ExplainConfig) -> Self {
        ExplanationRecord {
            target_class: e.target_class,
            intercept: e.intercept,
            weights: e.weights.clone(),
            selected: e.selected.clone(),
            local_fit_r2: e.local_fit_r2,
            original_probs: e.original_probs.as_slice().to_vec(),
            num_superpixels: e.num_superpixels,
            config_echo: config.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn name_only_segmentation_takes_defaults() {
        let spec: ConfigSpec = serde_json::from_str(r#"{"segmentation":"slic","num_features":3}"#).unwrap();
        let cfg = spec.to_config().unwrap();
        assert_eq!(cfg.segmentation, SegmentationParams::slic_default());
        assert_eq!(cfg.num_features, 3);
        assert_eq!(cfg.num_samples, 1000);
    }

    #[test]
    fn partial_block_overrides() {
        let spec: ConfigSpec =
            serde_json::from_str(r#"{"segmentation":{"algorithm":"felzenszwalb","scale":50},"hide_color":[0,0,0]}"#).unwrap();
        let cfg = spec.to_config().unwrap();
        assert_eq!(cfg.segmentation, SegmentationParams::Felzenszwalb { scale: 50.0, sigma: 0.8, min_size: 20 });
        assert_eq!(cfg.hide_color, HideColor::Fixed([0, 0, 0]));
    }

    #[test]
    fn rejects_bad_input() {
        let parse = |s: &str| serde_json::from_str::<ConfigSpec>(s).map_err(|_| ()).and_then(|c| c.to_config().map_err(|_| ()));
        assert!(parse(r#"{"segmentation":"watershed"}"#).is_err());
        assert!(parse(r#"{"segmentation":{"algorithm":"slic","ratio":0.5}}"#).is_err());
        assert!(parse(r#"{"num_samples":0}"#).is_err());
        assert!(parse(r#"{"hide_color":"pink"}"#).is_err());
        assert!(parse(r#"{"bogus":1}"#).is_err());
    }

    #[test]
    fn echo_round_trips() {
        let cfg = ExplainConfig { seed: 9, hide_color: HideColor::Fixed([1, 2, 3]), ..Default::default() };
        let spec = ConfigSpec::from(&cfg);
        let text = serde_json::to_string(&spec).unwrap();
        let back: ConfigSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_config().unwrap(), cfg);
    }
}

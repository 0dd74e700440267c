//! LIME for images: superpixel perturbations, a kernel-weighted ridge
//! surrogate, feature selection and explanation rendering.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::image::{quantize, Rgb, RgbImage};
use crate::linalg::cholesky_solve;
use crate::predictor::{ClassProbabilities, Predictor};
use crate::rng::CounterRng;
use crate::segmentation::{boundary_mask, segment, SegmentationParams, SuperpixelMap};

const MASK_STREAM: u64 = 0x4d41_534b;
/// Perturbed images are predicted in chunks of this many.
const PREDICT_CHUNK: usize = 64;

pub const OUTLINE_POSITIVE: Rgb = [0, 255, 0];
pub const OUTLINE_NEGATIVE: Rgb = [255, 0, 0];
pub const OUTLINE_NEUTRAL: Rgb = [255, 255, 0];

/// Replacement color for hidden superpixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HideColor {
    /// Each hidden superpixel becomes its own mean color.
    SegmentMean,
    Fixed(Rgb),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplainConfig {
    pub segmentation: SegmentationParams,
    pub num_samples: usize,
    pub kernel_width: f64,
    pub ridge_lambda: f64,
    pub positive_only: bool,
    pub num_features: usize,
    pub hide_rest: bool,
    pub hide_color: HideColor,
    pub seed: u64,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        ExplainConfig {
            segmentation: SegmentationParams::default(),
            num_samples: 1000,
            kernel_width: 0.25,
            ridge_lambda: 1.0,
            positive_only: true,
            num_features: 5,
            hide_rest: false,
            hide_color: HideColor::SegmentMean,
            seed: 0,
        }
    }
}

impl ExplainConfig {
    pub fn validate(&self) -> Result<()> {
        self.segmentation.validate()?;
        if self.num_samples < 2 {
            return Err(invalid("num_samples must be >= 2"));
        }
        if self.num_features < 1 {
            return Err(invalid("num_features must be >= 1"));
        }
        if !(self.kernel_width > 0.0) || !self.kernel_width.is_finite() {
            return Err(invalid("kernel_width must be > 0"));
        }
        if !(self.ridge_lambda >= 0.0) || !self.ridge_lambda.is_finite() {
            return Err(invalid("ridge_lambda must be >= 0"));
        }
        Ok(())
    }
}

/// Binary perturbation rows over `k` superpixels; row 0 is all ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskMatrix {
    rows: usize,
    k: usize,
    data: Vec<u8>,
}

impl MaskMatrix {
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let k = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || k == 0 || rows.iter().any(|r| r.len() != k) {
            return Err(invalid("mask rows must be nonempty and of equal length"));
        }
        if rows.iter().flatten().any(|&v| v > 1) {
            return Err(invalid("mask entries must be 0 or 1"));
        }
        Ok(MaskMatrix { rows: rows.len(), k, data: rows.concat() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn num_superpixels(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.k..(i + 1) * self.k]
    }
}

/// Row 0 all ones, remaining entries i.i.d. Bernoulli(0.5) from the
/// counter-based stream of `seed`.
pub fn sample_masks(num_samples: usize, k: usize, seed: u64) -> Result<MaskMatrix> {
    if num_samples < 2 {
        return Err(invalid("num_samples must be >= 2"));
    }
    if k < 1 {
        return Err(invalid("need at least one superpixel"));
    }
    let mut rng = CounterRng::new(seed, MASK_STREAM);
    let mut data = vec![1u8; num_samples * k];
    let mut bits = 0u64;
    let mut left = 0u32;
    for v in &mut data[k..] {
        if left == 0 {
            bits = rng.next_u64();
            left = 64;
        }
        *v = (bits & 1) as u8;
        bits >>= 1;
        left -= 1;
    }
    Ok(MaskMatrix { rows: num_samples, k, data })
}

/// Per-superpixel fill colors for `hide_color`.
pub fn fill_colors(image: &RgbImage, spmap: &SuperpixelMap, hide_color: HideColor) -> Result<Vec<Rgb>> {
    if !spmap.matches(image) {
        return Err(dims_error(image, spmap));
    }
    Ok(match hide_color {
        HideColor::Fixed(c) => vec![c; spmap.num_segments()],
        HideColor::SegmentMean => {
            let mut sums = vec![[0u64; 3]; spmap.num_segments()];
            let mut counts = vec![0u64; spmap.num_segments()];
            for (px, &l) in image.pixels().iter().zip(spmap.labels()) {
                let s = &mut sums[l as usize];
                for c in 0..3 {
                    s[c] += px[c] as u64;
                }
                counts[l as usize] += 1;
            }
            sums.iter()
                .zip(&counts)
                .map(|(s, &n)| core::array::from_fn(|c| quantize(s[c] as f64 / n as f64)))
                .collect()
        }
    })
}

fn dims_error(image: &RgbImage, spmap: &SuperpixelMap) -> Error {
    Error::DimensionMismatch(alloc::format!(
        "image is {}x{}, superpixel map is {}x{}",
        image.width(),
        image.height(),
        spmap.width(),
        spmap.height()
    ))
}

fn masked_with_fills(image: &RgbImage, spmap: &SuperpixelMap, mask: &[u8], fills: &[Rgb]) -> RgbImage {
    let mut out = image.clone();
    for (px, &l) in out.pixels_mut().iter_mut().zip(spmap.labels()) {
        if mask[l as usize] == 0 {
            *px = fills[l as usize];
        }
    }
    out
}

/// Replaces every superpixel whose mask entry is 0 with `hide_color`.
pub fn apply_mask(image: &RgbImage, spmap: &SuperpixelMap, mask: &[u8], hide_color: HideColor) -> Result<RgbImage> {
    if mask.len() != spmap.num_segments() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "mask has {} entries for {} superpixels",
            mask.len(),
            spmap.num_segments()
        )));
    }
    let fills = fill_colors(image, spmap, hide_color)?;
    Ok(masked_with_fills(image, spmap, mask, &fills))
}

/// Cosine distance of `mask` to the all-ones vector.
pub fn mask_distance(mask: &[u8]) -> f64 {
    let on = mask.iter().filter(|&&v| v != 0).count();
    if on == 0 {
        1.0
    } else {
        1.0 - on as f64 / libm::sqrt((mask.len() * on) as f64)
    }
}

/// `exp(-d^2 / kernel_width^2)` on the cosine distance to the unperturbed instance.
pub fn kernel_weight(mask: &[u8], kernel_width: f64) -> f64 {
    let d = mask_distance(mask);
    libm::exp(-(d * d) / (kernel_width * kernel_width))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RidgeFit {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    pub weighted_r2: f64,
}

/// Minimizes `sum_i w_i (y_i - b0 - b.z_i)^2 + lambda |b|^2` with the
/// intercept unpenalized, via the weighted-centered normal equations.
pub fn fit_weighted_ridge(masks: &MaskMatrix, responses: &[f64], sample_weights: &[f64], lambda: f64) -> Result<RidgeFit> {
    let (n, k) = (masks.rows(), masks.num_superpixels());
    if responses.len() != n || sample_weights.len() != n {
        return Err(Error::DimensionMismatch("responses and weights must match mask rows".into()));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(invalid("ridge lambda must be >= 0"));
    }
    if sample_weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
        return Err(invalid("sample weights must be finite and >= 0"));
    }
    if responses.iter().any(|y| !y.is_finite()) {
        return Err(invalid("responses must be finite"));
    }
    let total_w: f64 = sample_weights.iter().sum();
    if !(total_w > 0.0) {
        return Err(invalid("sample weights are all zero"));
    }

    // Responses are averaged as offsets from the first one, so a constant
    // response vector centers to exact zeros.
    let y_ref = responses[0];
    let mut z_mean = vec![0.0; k];
    let mut y_offset = 0.0;
    for i in 0..n {
        let w = sample_weights[i];
        for (m, &z) in z_mean.iter_mut().zip(masks.row(i)) {
            *m += w * z as f64;
        }
        y_offset += w * (responses[i] - y_ref);
    }
    z_mean.iter_mut().for_each(|m| *m /= total_w);
    let y_mean = y_ref + y_offset / total_w;

    let mut gram = vec![0.0; k * k];
    let mut rhs = vec![0.0; k];
    let mut zc = vec![0.0; k];
    for i in 0..n {
        let w = sample_weights[i];
        if w == 0.0 {
            continue;
        }
        for (c, (&z, m)) in zc.iter_mut().zip(masks.row(i).iter().zip(&z_mean)) {
            *c = z as f64 - m;
        }
        let yc = responses[i] - y_mean;
        for a in 0..k {
            let wa = w * zc[a];
            rhs[a] += wa * yc;
            for b in a..k {
                gram[a * k + b] += wa * zc[b];
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            gram[a * k + b] = gram[b * k + a];
        }
        gram[a * k + a] += lambda;
    }
    let rel_tol = if lambda > 0.0 { 0.0 } else { 1e-12 };
    let coefficients = cholesky_solve(&gram, &rhs, k, rel_tol)?;
    let intercept = y_mean - coefficients.iter().zip(&z_mean).map(|(b, m)| b * m).sum::<f64>();

    let mut sse = 0.0;
    let mut sst = 0.0;
    let mut scale = 0.0;
    for i in 0..n {
        let w = sample_weights[i];
        let fitted = intercept + coefficients.iter().zip(masks.row(i)).map(|(b, &z)| b * z as f64).sum::<f64>();
        sse += w * (responses[i] - fitted) * (responses[i] - fitted);
        sst += w * (responses[i] - y_mean) * (responses[i] - y_mean);
        scale += w * responses[i] * responses[i];
    }
    // Constant responses are fit perfectly by the intercept alone.
    let weighted_r2 = if sst <= 1e-24 * scale { 1.0 } else { 1.0 - sse / sst };
    Ok(RidgeFit { coefficients, intercept, weighted_r2 })
}

/// Ranks superpixel ids for display.
///
/// With `positive_only`, only strictly positive coefficients are eligible,
/// ranked descending; otherwise all ids ranked by magnitude. Ties go to the
/// lower id. At most `num_features` ids are returned.
pub fn select_superpixels(coefficients: &[f64], num_features: usize, positive_only: bool) -> Vec<usize> {
    let mut ids: Vec<usize> = if positive_only {
        (0..coefficients.len()).filter(|&i| coefficients[i] > 0.0).collect()
    } else {
        (0..coefficients.len()).collect()
    };
    let key = |i: usize| if positive_only { coefficients[i] } else { coefficients[i].abs() };
    ids.sort_by(|&a, &b| key(b).total_cmp(&key(a)).then(a.cmp(&b)));
    ids.truncate(num_features);
    ids
}

#[derive(Debug, Clone, PartialEq)]
pub struct Explanation {
    pub target_class: usize,
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub local_fit_r2: f64,
    pub num_superpixels: usize,
    pub selected: Vec<usize>,
    pub original_probs: ClassProbabilities,
}

/// Draws the explanation image.
///
/// `hide_rest` keeps only the selected superpixels and fills everything else
/// with the configured hide color. Otherwise the full image is kept and the
/// inner boundary of each selected superpixel is recolored: green/red by
/// coefficient sign when `positive_only` is off, yellow when it is on.
pub fn render_explanation(
    image: &RgbImage,
    spmap: &SuperpixelMap,
    explanation: &Explanation,
    config: &ExplainConfig,
) -> Result<RgbImage> {
    if !spmap.matches(image) {
        return Err(dims_error(image, spmap));
    }
    if explanation.weights.len() != spmap.num_segments() {
        return Err(Error::DimensionMismatch("explanation does not match superpixel map".into()));
    }
    let mut chosen = vec![0u8; spmap.num_segments()];
    for &s in &explanation.selected {
        *chosen
            .get_mut(s)
            .ok_or_else(|| Error::DimensionMismatch(alloc::format!("selected id {s} out of range")))? = 1;
    }
    if config.hide_rest {
        return apply_mask(image, spmap, &chosen, config.hide_color);
    }
    let boundary = boundary_mask(spmap);
    let mut out = image.clone();
    for ((px, &l), &edge) in out.pixels_mut().iter_mut().zip(spmap.labels()).zip(&boundary) {
        if edge && chosen[l as usize] == 1 {
            *px = if config.positive_only {
                OUTLINE_NEUTRAL
            } else if explanation.weights[l as usize] > 0.0 {
                OUTLINE_POSITIVE
            } else {
                OUTLINE_NEGATIVE
            };
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplainOutput {
    pub explanation: Explanation,
    pub rendered: RgbImage,
    pub spmap: SuperpixelMap,
}

/// Segments `image` and explains the predictor's top class.
pub fn explain<P: Predictor + ?Sized>(image: &RgbImage, predictor: &P, config: &ExplainConfig) -> Result<ExplainOutput> {
    config.validate()?;
    let spmap = segment(image, &config.segmentation)?;
    explain_segmented(image, spmap, predictor, config)
}

/// [`explain`] with a precomputed superpixel map.
pub fn explain_segmented<P: Predictor + ?Sized>(
    image: &RgbImage,
    spmap: SuperpixelMap,
    predictor: &P,
    config: &ExplainConfig,
) -> Result<ExplainOutput> {
    config.validate()?;
    let k = spmap.num_segments();
    let masks = sample_masks(config.num_samples, k, config.seed)?;
    let fills = fill_colors(image, &spmap, config.hide_color)?;

    let mut predictions: Vec<ClassProbabilities> = Vec::with_capacity(masks.rows());
    let mut batch = Vec::with_capacity(PREDICT_CHUNK);
    for start in (0..masks.rows()).step_by(PREDICT_CHUNK) {
        batch.clear();
        for r in start..(start + PREDICT_CHUNK).min(masks.rows()) {
            batch.push(masked_with_fills(image, &spmap, masks.row(r), &fills));
        }
        let out = predictor.predict_batch(&batch)?;
        if out.len() != batch.len() {
            return Err(Error::ExternalPredictorFailure(alloc::format!(
                "predictor returned {} results for {} images",
                out.len(),
                batch.len()
            )));
        }
        predictions.extend(out);
    }
    let class_count = predictions[0].class_count();
    if predictions.iter().any(|p| p.class_count() != class_count) {
        return Err(Error::ExternalPredictorFailure("inconsistent class counts across predictions".into()));
    }

    let original_probs = predictions[0].clone();
    let target_class = original_probs.argmax();
    let responses: Vec<f64> = predictions.iter().map(|p| p.get(target_class)).collect();
    let sample_weights: Vec<f64> = (0..masks.rows()).map(|r| kernel_weight(masks.row(r), config.kernel_width)).collect();
    let fit = fit_weighted_ridge(&masks, &responses, &sample_weights, config.ridge_lambda)?;
    let selected = select_superpixels(&fit.coefficients, config.num_features, config.positive_only);
    let explanation = Explanation {
        target_class,
        weights: fit.coefficients,
        intercept: fit.intercept,
        local_fit_r2: fit.weighted_r2,
        num_superpixels: k,
        selected,
        original_probs,
    };
    let rendered = render_explanation(image, &spmap, &explanation, config)?;
    Ok(ExplainOutput { explanation, rendered, spmap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;

    fn quadrants() -> (RgbImage, SuperpixelMap) {
        let img = RgbImage::from_fn(8, 8, |x, y| match (x / 4, y / 4) {
            (0, 0) => [200, 10, 10],
            (1, 0) => [10, 200, 10],
            (0, 1) => [10, 10, 200],
            _ => [(x * 30) as u8, (y * 30) as u8, 90],
        });
        let raw: Vec<u32> = (0..64).map(|i| ((i / 8) / 4 * 2 + (i % 8) / 4) as u32).collect();
        (img, SuperpixelMap::from_raw_labels(8, 8, &raw))
    }

    #[test]
    fn first_mask_row_is_all_ones() {
        let m = sample_masks(2, 3, 99).unwrap();
        assert_eq!(m.row(0), &[1, 1, 1]);
        assert_eq!(m, sample_masks(2, 3, 99).unwrap());
        assert!(sample_masks(1, 3, 0).is_err());
        assert!(sample_masks(5, 0, 0).is_err());
    }

    #[test]
    fn mask_columns_are_fair_coins() {
        let m = sample_masks(10_000, 8, 7).unwrap();
        for c in 0..8 {
            let ones: usize = (1..m.rows()).map(|r| m.row(r)[c] as usize).sum();
            let mean = ones as f64 / (m.rows() - 1) as f64;
            assert!((0.47..=0.53).contains(&mean), "column {c} mean {mean}");
        }
    }

    #[test]
    fn apply_mask_extremes() {
        let (img, sp) = quadrants();
        assert_eq!(apply_mask(&img, &sp, &[1; 4], HideColor::Fixed([0; 3])).unwrap(), img);
        let black = apply_mask(&img, &sp, &[0; 4], HideColor::Fixed([0; 3])).unwrap();
        assert!(black.pixels().iter().all(|&p| p == [0; 3]));
        assert!(matches!(
            apply_mask(&img, &sp, &[1; 3], HideColor::SegmentMean),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn mean_fill_hides_one_quadrant() {
        let (img, sp) = quadrants();
        let out = apply_mask(&img, &sp, &[1, 1, 1, 0], HideColor::SegmentMean).unwrap();
        let mut sum = [0u32; 3];
        for y in 4..8 {
            for x in 4..8 {
                let p = img.get(x, y);
                for c in 0..3 {
                    sum[c] += p[c] as u32;
                }
            }
        }
        let mean: Rgb = core::array::from_fn(|c| quantize(sum[c] as f64 / 16.0));
        for y in 0..8 {
            for x in 0..8 {
                let want = if x >= 4 && y >= 4 { mean } else { img.get(x, y) };
                assert_eq!(out.get(x, y), want);
            }
        }
    }

    #[test]
    fn kernel_weight_examples() {
        assert_eq!(kernel_weight(&[1, 1, 1], 0.25), 1.0);
        let d = 1.0 - 2.0 / libm::sqrt(8.0);
        assert!((d - 0.29289).abs() < 1e-5);
        let w = kernel_weight(&[1, 1, 0, 0], 0.25);
        assert!((w - libm::exp(-d * d / 0.0625)).abs() < 1e-15);
        assert!((w - 0.25345).abs() < 1e-5);
        assert_eq!(kernel_weight(&[0, 0, 0], 0.5), libm::exp(-1.0 / 0.25));
    }

    #[test]
    fn constant_responses_fit_intercept_only() {
        let m = sample_masks(40, 5, 3).unwrap();
        let y = vec![0.37; 40];
        let w: Vec<f64> = (0..40).map(|r| kernel_weight(m.row(r), 0.25)).collect();
        for lambda in [0.0, 1e-3, 1.0] {
            let fit = fit_weighted_ridge(&m, &y, &w, lambda).unwrap();
            assert!(fit.coefficients.iter().all(|b| b.abs() < 1e-12));
            assert!((fit.intercept - 0.37).abs() < 1e-12);
            assert_eq!(fit.weighted_r2, 1.0);
        }
    }

    #[test]
    fn exact_linear_responses_over_all_masks() {
        let mut rows = vec![vec![1u8, 1, 1]];
        for bits in 0..8u8 {
            rows.push((0..3).map(|j| (bits >> j) & 1).collect());
        }
        let m = MaskMatrix::from_rows(&rows).unwrap();
        let y: Vec<f64> = rows.iter().map(|r| 2.0 * r[0] as f64 - r[1] as f64 + 0.5).collect();
        let fit = fit_weighted_ridge(&m, &y, &[1.0; 9], 1e-8).unwrap();
        for (b, want) in fit.coefficients.iter().zip([2.0, -1.0, 0.0]) {
            assert!((b - want).abs() < 1e-5);
        }
        assert!((fit.intercept - 0.5).abs() < 1e-5);
    }

    #[test]
    fn rank_deficient_unpenalized_is_singular() {
        let rows = vec![vec![1u8, 1], vec![0, 0], vec![1, 1], vec![0, 0]];
        let m = MaskMatrix::from_rows(&rows).unwrap();
        let r = fit_weighted_ridge(&m, &[1.0, 0.0, 1.0, 0.0], &[1.0; 4], 0.0);
        assert_eq!(r, Err(Error::SingularSystem));
        assert!(fit_weighted_ridge(&m, &[1.0, 0.0, 1.0, 0.0], &[1.0; 4], 0.1).is_ok());
    }

    #[test]
    fn ridge_rejects_bad_weights() {
        let m = sample_masks(4, 2, 0).unwrap();
        assert!(fit_weighted_ridge(&m, &[0.0; 4], &[0.0; 4], 1.0).is_err());
        assert!(fit_weighted_ridge(&m, &[0.0; 4], &[1.0, -1.0, 1.0, 1.0], 1.0).is_err());
        assert!(fit_weighted_ridge(&m, &[0.0; 3], &[1.0; 4], 1.0).is_err());
    }

    #[test]
    fn selection_examples() {
        let coefs = [0.5, -0.9, 0.2];
        assert_eq!(select_superpixels(&coefs, 2, false), vec![1, 0]);
        assert_eq!(select_superpixels(&coefs, 2, true), vec![0, 2]);
        assert!(select_superpixels(&[-1.0, 0.0, -0.1], 3, true).is_empty());
        assert_eq!(select_superpixels(&[0.3, 0.3, 0.3], 2, true), vec![0, 1]);
    }

    fn explanation_for(sp: &SuperpixelMap, weights: Vec<f64>, selected: Vec<usize>) -> Explanation {
        Explanation {
            target_class: 0,
            weights,
            intercept: 0.0,
            local_fit_r2: 1.0,
            num_superpixels: sp.num_segments(),
            selected,
            original_probs: ClassProbabilities::new(vec![1.0]).unwrap(),
        }
    }

    #[test]
    fn hide_rest_rendering() {
        let (img, sp) = quadrants();
        let cfg = ExplainConfig { hide_rest: true, hide_color: HideColor::Fixed([0; 3]), ..Default::default() };
        let all = explanation_for(&sp, vec![1.0; 4], vec![0, 1, 2, 3]);
        assert_eq!(render_explanation(&img, &sp, &all, &cfg).unwrap(), img);
        let none = explanation_for(&sp, vec![0.0; 4], vec![]);
        let out = render_explanation(&img, &sp, &none, &cfg).unwrap();
        assert!(out.pixels().iter().all(|&p| p == [0; 3]));
        let one = explanation_for(&sp, vec![1.0, 0.0, 0.0, 0.0], vec![0]);
        let out = render_explanation(&img, &sp, &one, &cfg).unwrap();
        let black = out.pixels().iter().filter(|&&p| p == [0; 3]).count();
        assert_eq!(black, 48);
        assert!((0..4).all(|y| (0..4).all(|x| out.get(x, y) == img.get(x, y))));
    }

    #[test]
    fn outline_colors_follow_sign() {
        let (img, sp) = quadrants();
        let e = explanation_for(&sp, vec![0.4, -0.6, 0.0, 0.0], vec![1, 0]);
        let signed = ExplainConfig { positive_only: false, ..Default::default() };
        let out = render_explanation(&img, &sp, &e, &signed).unwrap();
        assert_eq!(out.get(3, 0), OUTLINE_POSITIVE);
        assert_eq!(out.get(4, 0), OUTLINE_NEGATIVE);
        assert_eq!(out.get(0, 0), img.get(0, 0));
        assert_eq!(out.get(3, 4), img.get(3, 4));
        let plain = render_explanation(&img, &sp, &e, &ExplainConfig::default()).unwrap();
        assert_eq!(plain.get(3, 0), OUTLINE_NEUTRAL);
    }

    struct Constant(Vec<String>);

    impl Predictor for Constant {
        fn class_count(&self) -> usize {
            2
        }
        fn class_names(&self) -> &[String] {
            &self.0
        }
        fn predict_batch(&self, images: &[RgbImage]) -> Result<Vec<ClassProbabilities>> {
            Ok(images.iter().map(|_| ClassProbabilities::new(vec![0.7, 0.3]).unwrap()).collect())
        }
    }

    #[test]
    fn constant_black_box_gets_zero_weights() {
        let (img, _) = quadrants();
        let cfg = ExplainConfig {
            segmentation: SegmentationParams::Slic { n_segments: 4, compactness: 1.0, max_iter: 10 },
            num_samples: 200,
            ..Default::default()
        };
        let p = Constant(vec!["a".into(), "b".into()]);
        let out = explain(&img, &p, &cfg).unwrap();
        assert!(out.explanation.weights.iter().all(|w| w.abs() < 1e-9));
        assert!(out.explanation.selected.is_empty());
        assert_eq!(out.explanation.target_class, 0);
        assert_eq!(out, explain(&img, &p, &cfg).unwrap());
    }

    #[test]
    fn config_validation() {
        let base = ExplainConfig::default();
        assert!(base.validate().is_ok());
        assert!(ExplainConfig { num_samples: 1, ..base.clone() }.validate().is_err());
        assert!(ExplainConfig { num_features: 0, ..base.clone() }.validate().is_err());
        assert!(ExplainConfig { kernel_width: 0.0, ..base.clone() }.validate().is_err());
        assert!(ExplainConfig { ridge_lambda: -1.0, ..base }.validate().is_err());
    }
}

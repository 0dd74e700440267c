use alloc::vec;
use alloc::vec::Vec;

use super::pairs::{sample_further_pairs, sample_mid_near_pairs, select_near_pairs, Pair, PairSet};
use crate::error::{invalid, Error, Result};
use crate::linalg::symmetric_eigen;

const PHASE_ONE_STEPS: usize = 100;
const PHASE_TWO_STEPS: usize = 100;
const INIT_SCALE: f64 = 0.01;
const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingConfig {
    pub n_neighbors: usize,
    pub mid_near_ratio: f64,
    pub far_pair_ratio: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            n_neighbors: 10,
            mid_near_ratio: 0.5,
            far_pair_ratio: 2.0,
            iterations: 450,
            learning_rate: 1.0,
            seed: 0,
        }
    }
}

impl EmbeddingConfig {
    pub fn mid_near_count(&self) -> usize {
        libm::round(self.mid_near_ratio * self.n_neighbors as f64) as usize
    }

    pub fn far_count(&self) -> usize {
        libm::round(self.far_pair_ratio * self.n_neighbors as f64) as usize
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.n_neighbors < 1 {
            return Err(invalid("n_neighbors must be >= 1"));
        }
        let needed = (self.n_neighbors + 1).max(7);
        if n < needed {
            return Err(Error::TooFewPoints { needed, have: n });
        }
        if !(self.mid_near_ratio > 0.0) || !(self.far_pair_ratio > 0.0) {
            return Err(invalid("pair ratios must be > 0"));
        }
        if self.iterations < 1 {
            return Err(invalid("iterations must be >= 1"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(invalid("learning_rate must be > 0"));
        }
        Ok(())
    }
}

/// Loss weights of the near, mid-near and far terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseWeights {
    pub near: f64,
    pub mid_near: f64,
    pub far: f64,
}

/// Three-phase schedule: mid-near weight decays 1000 -> 3 over the first
/// 100 steps, holds at 3 for the next 100, then switches off.
pub fn phase_weights(step: usize) -> PhaseWeights {
    if step < PHASE_ONE_STEPS {
        let t = step as f64 / PHASE_ONE_STEPS as f64;
        PhaseWeights { near: 2.0, mid_near: (1.0 - t) * 1000.0 + t * 3.0, far: 1.0 }
    } else if step < PHASE_ONE_STEPS + PHASE_TWO_STEPS {
        PhaseWeights { near: 3.0, mid_near: 3.0, far: 1.0 }
    } else {
        PhaseWeights { near: 1.0, mid_near: 0.0, far: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Embedding2D {
    pub coords: Vec<[f64; 2]>,
    pub pairs: PairSet,
}

/// PaCMAP objective and its analytic gradient.
///
/// With `d = |y_i - y_j|^2 + 1`, near pairs contribute `d / (10 + d)`,
/// mid-near pairs `d / (10000 + d)` and far pairs `1 / (1 + d)`, each
/// scaled by its phase weight.
pub fn pacmap_loss_and_grad(coords: &[[f64; 2]], pairs: &PairSet, weights: PhaseWeights) -> (f64, Vec<[f64; 2]>) {
    let mut grad = vec![[0.0; 2]; coords.len()];
    let mut loss = 0.0;
    let mut attract = |list: &[Pair], w: f64, c: f64, loss: &mut f64| {
        if w == 0.0 {
            return;
        }
        for &(i, j) in list {
            let dx = coords[i][0] - coords[j][0];
            let dy = coords[i][1] - coords[j][1];
            let d = dx * dx + dy * dy + 1.0;
            *loss += w * d / (c + d);
            // d/dd [d / (c + d)] = c / (c + d)^2, and dd/dy_i = 2 (y_i - y_j).
            let s = w * c / ((c + d) * (c + d)) * 2.0;
            grad[i][0] += s * dx;
            grad[i][1] += s * dy;
            grad[j][0] -= s * dx;
            grad[j][1] -= s * dy;
        }
    };
    attract(&pairs.near, weights.near, 10.0, &mut loss);
    attract(&pairs.mid_near, weights.mid_near, 10000.0, &mut loss);
    if weights.far != 0.0 {
        for &(i, j) in &pairs.far {
            let dx = coords[i][0] - coords[j][0];
            let dy = coords[i][1] - coords[j][1];
            let d = dx * dx + dy * dy + 1.0;
            loss += weights.far / (1.0 + d);
            let s = -weights.far / ((1.0 + d) * (1.0 + d)) * 2.0;
            grad[i][0] += s * dx;
            grad[i][1] += s * dy;
            grad[j][0] -= s * dx;
            grad[j][1] -= s * dy;
        }
    }
    (loss, grad)
}

/// Top two principal components of the mean-centered points, times 0.01.
pub fn pca_init(points: &[Vec<f64>]) -> Vec<[f64; 2]> {
    let n = points.len();
    let dim = points.first().map_or(0, Vec::len);
    if n == 0 {
        return Vec::new();
    }
    let mean: Vec<f64> = (0..dim).map(|d| points.iter().map(|p| p[d]).sum::<f64>() / n as f64).collect();
    let centered: Vec<Vec<f64>> = points.iter().map(|p| p.iter().zip(&mean).map(|(v, m)| v - m).collect()).collect();
    let mut cov = vec![0.0; dim * dim];
    for row in &centered {
        for a in 0..dim {
            for b in a..dim {
                cov[a * dim + b] += row[a] * row[b];
            }
        }
    }
    let denom = (n.max(2) - 1) as f64;
    for a in 0..dim {
        for b in a..dim {
            cov[a * dim + b] /= denom;
            cov[b * dim + a] = cov[a * dim + b];
        }
    }
    let (_, vectors) = symmetric_eigen(&cov, dim);
    centered
        .iter()
        .map(|row| {
            let mut c = [0.0; 2];
            for (k, v) in vectors.iter().take(2).enumerate() {
                c[k] = INIT_SCALE * row.iter().zip(v).map(|(x, e)| x * e).sum::<f64>();
            }
            c
        })
        .collect()
}

/// Builds the pair lists from `points` and optimizes the layout with Adam.
pub fn pacmap_embed(points: &[Vec<f64>], config: &EmbeddingConfig) -> Result<Embedding2D> {
    config.validate(points.len())?;
    let near = select_near_pairs(points, config.n_neighbors)?;
    let mid_near = sample_mid_near_pairs(points, config.mid_near_count(), config.seed)?;
    let far = sample_further_pairs(points, &near, config.far_count(), config.seed)?;
    let pairs = PairSet { near, mid_near, far };

    let mut coords = pca_init(points);
    let mut m = vec![[0.0; 2]; coords.len()];
    let mut v = vec![[0.0; 2]; coords.len()];
    let (mut b1t, mut b2t) = (1.0, 1.0);
    for step in 0..config.iterations {
        let (_, grad) = pacmap_loss_and_grad(&coords, &pairs, phase_weights(step));
        b1t *= BETA1;
        b2t *= BETA2;
        for ((y, g), (mi, vi)) in coords.iter_mut().zip(&grad).zip(m.iter_mut().zip(v.iter_mut())) {
            for k in 0..2 {
                mi[k] = BETA1 * mi[k] + (1.0 - BETA1) * g[k];
                vi[k] = BETA2 * vi[k] + (1.0 - BETA2) * g[k] * g[k];
                let m_hat = mi[k] / (1.0 - b1t);
                let v_hat = vi[k] / (1.0 - b2t);
                y[k] -= config.learning_rate * m_hat / (libm::sqrt(v_hat) + ADAM_EPS);
            }
        }
    }
    Ok(Embedding2D { coords, pairs })
}

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::CounterRng;

const MID_NEAR_STREAM: u64 = 1;
const FAR_STREAM: u64 = 2;
const MID_NEAR_CANDIDATES: usize = 6;

/// Ordered `(anchor, partner)` pair.
pub type Pair = (usize, usize);

/// The three pair classes optimized by PaCMAP.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairSet {
    pub near: Vec<Pair>,
    pub mid_near: Vec<Pair>,
    pub far: Vec<Pair>,
}

pub fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Exact k-nearest neighbors per anchor (Euclidean, ties to the lower index).
pub fn select_near_pairs(points: &[Vec<f64>], n_neighbors: usize) -> Result<Vec<Pair>> {
    let n = points.len();
    if n <= n_neighbors {
        return Err(Error::TooFewPoints { needed: n_neighbors + 1, have: n });
    }
    let mut pairs = Vec::with_capacity(n * n_neighbors);
    let mut cand: Vec<(f64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        cand.clear();
        cand.extend((0..n).filter(|&j| j != i).map(|j| (squared_distance(&points[i], &points[j]), j)));
        cand.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        pairs.extend(cand[..n_neighbors].iter().map(|&(_, j)| (i, j)));
    }
    Ok(pairs)
}

/// `count_per_point` mid-near partners per anchor: each is the second
/// closest of six distinct random non-anchor points.
pub fn sample_mid_near_pairs(points: &[Vec<f64>], count_per_point: usize, seed: u64) -> Result<Vec<Pair>> {
    let n = points.len();
    if n < MID_NEAR_CANDIDATES + 1 {
        return Err(Error::TooFewPoints { needed: MID_NEAR_CANDIDATES + 1, have: n });
    }
    let mut rng = CounterRng::new(seed, MID_NEAR_STREAM);
    let mut pairs = Vec::with_capacity(n * count_per_point);
    let mut picks: Vec<(f64, usize)> = Vec::with_capacity(MID_NEAR_CANDIDATES);
    for i in 0..n {
        for _ in 0..count_per_point {
            picks.clear();
            while picks.len() < MID_NEAR_CANDIDATES {
                let j = rng.below(n);
                if j != i && picks.iter().all(|&(_, p)| p != j) {
                    picks.push((squared_distance(&points[i], &points[j]), j));
                }
            }
            picks.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            pairs.push((i, picks[1].1));
        }
    }
    Ok(pairs)
}

/// Up to `count_per_point` distinct random partners per anchor, excluding
/// the anchor itself and its near partners. When fewer partners are
/// eligible, all of them are taken.
pub fn sample_further_pairs(points: &[Vec<f64>], near: &[Pair], count_per_point: usize, seed: u64) -> Result<Vec<Pair>> {
    let n = points.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, have: n });
    }
    let mut blocked = alloc::vec![false; n];
    let mut rng = CounterRng::new(seed, FAR_STREAM);
    let mut pairs = Vec::with_capacity(n * count_per_point);
    for i in 0..n {
        blocked.iter_mut().for_each(|b| *b = false);
        blocked[i] = true;
        for &(a, b) in near {
            if a == i {
                blocked[b] = true;
            }
        }
        let eligible = blocked.iter().filter(|b| !**b).count();
        let take = count_per_point.min(eligible);
        let mut taken = 0;
        while taken < take {
            let j = rng.below(n);
            if !blocked[j] {
                blocked[j] = true;
                pairs.push((i, j));
                taken += 1;
            }
        }
    }
    Ok(pairs)
}

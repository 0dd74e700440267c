mod common;

use limevis_core::embedding::*;
use limevis_core::rng::CounterRng;

fn gaussian_clusters(per: usize, dim: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = CounterRng::new(seed, 42);
    let mut pts = Vec::new();
    let mut labels = Vec::new();
    for c in 0..2 {
        let offset = if c == 0 { -3.0 } else { 3.0 };
        for _ in 0..per {
            pts.push((0..dim).map(|_| offset + rng.normal()).collect());
            labels.push(c);
        }
    }
    (pts, labels)
}

/// Mean silhouette coefficient, computed directly from pairwise distances.
fn silhouette(coords: &[[f64; 2]], labels: &[usize]) -> f64 {
    let n = coords.len();
    let dist = |i: usize, j: usize| ((coords[i][0] - coords[j][0]).powi(2) + (coords[i][1] - coords[j][1]).powi(2)).sqrt();
    let mut total = 0.0;
    for i in 0..n {
        let (mut own, mut own_n, mut other, mut other_n) = (0.0, 0, 0.0, 0);
        for j in 0..n {
            if i == j {
                continue;
            }
            if labels[j] == labels[i] {
                own += dist(i, j);
                own_n += 1;
            } else {
                other += dist(i, j);
                other_n += 1;
            }
        }
        let a = own / own_n as f64;
        let b = other / other_n as f64;
        total += (b - a) / a.max(b);
    }
    total / n as f64
}

fn random_pairs(rng: &mut CounterRng, n: usize, count: usize) -> Vec<Pair> {
    (0..count)
        .map(|_| {
            let i = rng.below(n);
            let mut j = rng.below(n);
            while j == i {
                j = rng.below(n);
            }
            (i, j)
        })
        .collect()
}

#[test]
fn gradient_matches_finite_differences() {
    for seed in 0..10 {
        let mut rng = CounterRng::new(seed, 8);
        let coords: Vec<[f64; 2]> = (0..6).map(|_| [rng.normal() * 2.0, rng.normal() * 2.0]).collect();
        let pairs = PairSet { near: random_pairs(&mut rng, 6, 8), mid_near: random_pairs(&mut rng, 6, 5), far: random_pairs(&mut rng, 6, 10) };
        for step in [0, 50, 150, 300] {
            let w = phase_weights(step);
            let (_, grad) = pacmap_loss_and_grad(&coords, &pairs, w);
            let h = 1e-5;
            let mut worst: f64 = 0.0;
            for i in 0..6 {
                for k in 0..2 {
                    let mut plus = coords.clone();
                    let mut minus = coords.clone();
                    plus[i][k] += h;
                    minus[i][k] -= h;
                    let fd = (pacmap_loss_and_grad(&plus, &pairs, w).0 - pacmap_loss_and_grad(&minus, &pairs, w).0) / (2.0 * h);
                    let rel = (grad[i][k] - fd).abs() / grad[i][k].abs().max(fd.abs()).max(1e-6);
                    worst = worst.max(rel);
                }
            }
            assert!(worst < 1e-4, "seed {seed} step {step}: {worst}");
        }
    }
}

#[test]
fn loss_is_translation_invariant_and_gradient_sums_to_zero() {
    let (pts, _) = gaussian_clusters(20, 5, 1);
    let cfg = EmbeddingConfig { iterations: 30, ..Default::default() };
    let emb = pacmap_embed(&pts, &cfg).unwrap();
    for step in [0, 150, 300] {
        let w = phase_weights(step);
        let (loss, grad) = pacmap_loss_and_grad(&emb.coords, &emb.pairs, w);
        let shifted: Vec<[f64; 2]> = emb.coords.iter().map(|c| [c[0] + 3.5, c[1] - 1.25]).collect();
        let (loss2, _) = pacmap_loss_and_grad(&shifted, &emb.pairs, w);
        assert!((loss - loss2).abs() <= 1e-9 * loss.abs().max(1.0));
        let sx: f64 = grad.iter().map(|g| g[0]).sum();
        let sy: f64 = grad.iter().map(|g| g[1]).sum();
        assert!(sx.hypot(sy) < 1e-9 * pts.len() as f64);
    }
}

#[test]
fn near_pairs_match_double_loop() {
    let mut rng = CounterRng::new(3, 3);
    let pts: Vec<Vec<f64>> = (0..20).map(|_| (0..5).map(|_| rng.next_f64()).collect()).collect();
    let k = 4;
    let got = select_near_pairs(&pts, k).unwrap();
    let mut expected = Vec::new();
    for i in 0..20 {
        let mut taken: Vec<usize> = Vec::new();
        for _ in 0..k {
            let mut best: Option<(f64, usize)> = None;
            for j in 0..20 {
                if j == i || taken.contains(&j) {
                    continue;
                }
                let d: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                if best.is_none_or(|(bd, _)| d < bd) {
                    best = Some((d, j));
                }
            }
            taken.push(best.unwrap().1);
        }
        expected.extend(taken.into_iter().map(|j| (i, j)));
    }
    assert_eq!(got, expected);
}

#[test]
fn far_partners_are_roughly_uniform() {
    let mut rng = CounterRng::new(4, 4);
    let pts: Vec<Vec<f64>> = (0..20).map(|_| (0..3).map(|_| rng.next_f64()).collect()).collect();
    let near = select_near_pairs(&pts, 3).unwrap();
    let anchor = 7;
    let mut counts = [0usize; 20];
    for seed in 0..2000 {
        for (i, j) in sample_further_pairs(&pts, &near, 5, seed).unwrap() {
            if i == anchor {
                counts[j] += 1;
            }
        }
    }
    let blocked: Vec<usize> = near.iter().filter(|p| p.0 == anchor).map(|p| p.1).chain([anchor]).collect();
    let eligible: Vec<usize> = (0..20).filter(|j| !blocked.contains(j)).collect();
    let expected = 2000.0 * 5.0 / eligible.len() as f64;
    for &j in &blocked {
        assert_eq!(counts[j], 0);
    }
    for &j in &eligible {
        let ratio = counts[j] as f64 / expected;
        assert!((0.7..=1.3).contains(&ratio), "partner {j}: {ratio}");
    }
}

#[test]
fn clusters_stay_separated() {
    for seed in 0..5 {
        let (pts, labels) = gaussian_clusters(50, 20, seed);
        let cfg = EmbeddingConfig { seed, ..Default::default() };
        let emb = pacmap_embed(&pts, &cfg).unwrap();
        let s = silhouette(&emb.coords, &labels);
        assert!(s > 0.5, "seed {seed}: silhouette {s}");
        let w = phase_weights(cfg.iterations - 1);
        let init = pca_init(&pts);
        assert!(pacmap_loss_and_grad(&emb.coords, &emb.pairs, w).0 < pacmap_loss_and_grad(&init, &emb.pairs, w).0);
        assert_eq!(emb, pacmap_embed(&pts, &cfg).unwrap());
    }
}

#[test]
fn output_is_finite_on_random_inputs() {
    for seed in 0..10 {
        let mut rng = CounterRng::new(seed, 6);
        let pts: Vec<Vec<f64>> = (0..30).map(|_| (0..8).map(|_| rng.normal() * 10.0).collect()).collect();
        let emb = pacmap_embed(&pts, &EmbeddingConfig { seed, iterations: 250, ..Default::default() }).unwrap();
        assert!(emb.coords.iter().all(|c| c[0].is_finite() && c[1].is_finite()));
        assert_eq!(emb.coords.len(), 30);
    }
}

#[test]
fn duplicated_rows_embed_together() {
    let (mut pts, _) = gaussian_clusters(50, 20, 11);
    let originals = [3usize, 27, 61, 90];
    let mut pairs = Vec::new();
    for &i in &originals {
        pairs.push((i, pts.len()));
        pts.push(pts[i].clone());
    }
    let emb = pacmap_embed(&pts, &EmbeddingConfig::default()).unwrap();
    let c = &emb.coords;
    let dist = |a: usize, b: usize| (c[a][0] - c[b][0]).hypot(c[a][1] - c[b][1]);
    let diameter = (0..c.len()).flat_map(|a| (0..c.len()).map(move |b| (a, b))).map(|(a, b)| dist(a, b)).fold(0.0, f64::max);
    for (a, b) in pairs {
        let d = dist(a, b);
        // Far pairs sampled inside the same cluster keep twins a few tenths
        // of a unit apart at equilibrium, about 1% of the layout diameter.
        assert!(d < 0.02 * diameter, "{a}/{b}: {d} vs diameter {diameter}");
    }
}

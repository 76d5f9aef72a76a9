//! Seeded synthetic problem instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::dataset::{Dataset, Sample};
use super::quadratic::Quadratic;
use crate::linalg::Matrix;

/// `m` random strongly convex quadratics on `R^n`:
/// `Q_i = GᵀG / n + 0.5 I` with Gaussian `G`, centers drawn from `N(0, 4 I)`.
pub fn random_quadratics(m: usize, n: usize, seed: u64) -> Vec<Quadratic> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m)
        .map(|_| {
            let g: Vec<f64> = (0..n * n)
                .map(|_| StandardNormal.sample(&mut rng))
                .collect();
            let mut q = Matrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let s: f64 = (0..n).map(|r| g[r * n + i] * g[r * n + j]).sum();
                    q[(i, j)] = s / n as f64 + if i == j { 0.5 } else { 0.0 };
                }
            }
            let center = (0..n)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    2.0 * z
                })
                .collect();
            Quadratic { q, center }
        })
        .collect()
}

/// Sizes of the one-hot attribute groups of a 123-feature binary
/// classification set made of 14 categorical attributes.
pub const ONE_HOT_GROUPS: [usize; 14] = [5, 8, 16, 5, 7, 14, 6, 5, 2, 3, 3, 3, 41, 5];

/// Census-style binary dataset: every sample activates exactly one
/// feature per one-hot group (value 1.0). Labels come from a hidden
/// Gaussian linear score plus logistic noise, thresholded so that roughly a
/// quarter of the samples are positive.
pub fn one_hot_classification(samples: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n: usize = ONE_HOT_GROUPS.iter().sum();
    let weights: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut rows = Vec::with_capacity(samples);
    let mut scores = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut indices = Vec::with_capacity(ONE_HOT_GROUPS.len());
        let mut offset = 0;
        for &size in &ONE_HOT_GROUPS {
            // Skewed category frequencies, as in real census attributes.
            let u: f64 = rng.gen();
            indices.push(offset + ((u * u) * size as f64) as usize);
            offset += size;
        }
        let u: f64 = rng.gen_range(1e-12..1.0);
        let noise = (u / (1.0 - u)).ln();
        scores.push(indices.iter().map(|&j| weights[j]).sum::<f64>() + noise);
        rows.push(indices);
    }
    let mut sorted = scores.clone();
    sorted.sort_by(f64::total_cmp);
    let threshold = sorted.get(samples * 3 / 4).copied().unwrap_or(0.0);
    let samples = rows
        .into_iter()
        .zip(scores)
        .map(|(indices, s)| Sample {
            values: vec![1.0; indices.len()],
            indices,
            label: if s >= threshold { 1.0 } else { -1.0 },
        })
        .collect();
    Dataset::new(samples, n).expect("generated samples are well formed")
}

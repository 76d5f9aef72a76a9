//! Sigmoid classification loss `(1/N) Σ σ(l⟨a, x⟩)` with `σ(u) = 1/(1+eᵘ)`.

use std::sync::OnceLock;

use super::dataset::Dataset;
use crate::error::{Error, Result};
use crate::linalg::check_dim;
use crate::prox::oracle::golden_section;

/// `1 / (1 + eᵘ)`, evaluated without overflow for large `|u|`.
pub fn sigma(u: f64) -> f64 {
    if u > 0.0 {
        let e = (-u).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + u.exp())
    }
}

/// `|σ''(u)| = σ(1−σ)|1−2σ|`.
fn curvature(u: f64) -> f64 {
    let s = sigma(u);
    s * (1.0 - s) * (1.0 - 2.0 * s).abs()
}

/// `max_u |σ''(u)|`, found by a grid over `[-10, 10]` with step `1e-4`
/// followed by golden-section refinement around the best grid point.
pub fn curvature_constant() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let step: f64 = 1e-4;
        let (mut best_u, mut best) = (-10.0, curvature(-10.0));
        let steps = (20.0 / step).round() as usize;
        for i in 0..=steps {
            let u = -10.0 + i as f64 * step;
            let c = curvature(u);
            if c > best {
                best = c;
                best_u = u;
            }
        }
        let u = golden_section(|u| -curvature(u), best_u - step, best_u + step, 1e-12);
        curvature(u).max(best)
    })
}

fn check(x: &[f64], shard: &Dataset) -> Result<()> {
    if shard.is_empty() {
        return Err(Error::EmptyShard);
    }
    check_dim(shard.n, x.len())
}

pub fn loss_value(x: &[f64], shard: &Dataset) -> Result<f64> {
    check(x, shard)?;
    let total: f64 = shard
        .samples
        .iter()
        .map(|s| sigma(s.label * s.dot(x)))
        .sum();
    Ok(total / shard.len() as f64)
}

pub fn loss_grad(x: &[f64], shard: &Dataset) -> Result<Vec<f64>> {
    check(x, shard)?;
    let inv_n = 1.0 / shard.len() as f64;
    let mut g = vec![0.0; x.len()];
    for s in &shard.samples {
        let sg = sigma(s.label * s.dot(x));
        s.add_scaled_to(-sg * (1.0 - sg) * s.label * inv_n, &mut g);
    }
    Ok(g)
}

/// Lipschitz constant of the gradient: `c* · mean ‖a‖²`.
pub fn lipschitz(shard: &Dataset) -> f64 {
    curvature_constant() * shard.mean_norm_sq()
}

/// Uniform gradient bound `0.25 · mean ‖a‖`.
pub fn gradient_bound(shard: &Dataset) -> f64 {
    0.25 * shard.mean_norm()
}

//! Numerical reference for the separable proximal maps.
//!
//! Minimizes `φ(z) = h₁(z) + (z − v)² / (2α)` per coordinate by
//! golden-section search. `φ` is strictly convex, hence unimodal on any
//! bracket containing the minimizer. Nothing here calls the closed forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Regularizer, RegularizerSpec};
use crate::error::Result;
use crate::linalg::check_dim;

/// Final bracket width of the search.
pub const BRACKET_TOL: f64 = 1e-9;

fn bracket(kind: &Regularizer, v: f64, alpha: f64) -> (f64, f64) {
    let (l1, l2) = match *kind {
        Regularizer::L1 { lambda1 } => (lambda1, 0.0),
        Regularizer::SquaredL2 { lambda2 } => (0.0, lambda2),
        Regularizer::ElasticNet { lambda1, lambda2 } => (lambda1, lambda2),
        _ => (0.0, 0.0),
    };
    let half = 10.0 * alpha * (l1 + 2.0 * l2 * v.abs() + 1.0);
    let (a, b) = (v - half, v + half);
    match *kind {
        Regularizer::Box { lo, hi } => (a.clamp(lo, hi), b.clamp(lo, hi)),
        _ => (a, b),
    }
}

/// Golden-section minimizer of a unimodal `f` on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Numerical `prox` of one coordinate.
pub fn scalar_prox(kind: &Regularizer, v: f64, alpha: f64) -> f64 {
    let (a, b) = bracket(kind, v, alpha);
    let phi = |z: f64| kind.scalar_value(z) + (z - v) * (z - v) / (2.0 * alpha);
    golden_section(phi, a, b, BRACKET_TOL)
}

/// Numerical `prox_{α,h}(v)`.
pub fn prox(spec: &RegularizerSpec, v: &[f64], alpha: f64) -> Result<Vec<f64>> {
    check_dim(spec.dim, v.len())?;
    Ok(v.iter()
        .map(|&vj| scalar_prox(&spec.kind, vj, alpha))
        .collect())
}

/// Result of comparing closed-form and numerical prox on random inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    pub trials: usize,
    pub max_deviation: f64,
}

/// Draws `trials` seeded `(v, α, λ)` triples for the given regularizer
/// family and returns the largest coordinatewise gap between
/// [`super::prox`] and the golden-section oracle. The family's own
/// parameters are replaced by random draws; box bounds are drawn around 0.
pub fn compare_with_closed_form(
    family: &Regularizer,
    trials: usize,
    seed: u64,
) -> OracleComparison {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 4;
    let mut max_dev = 0.0_f64;
    for _ in 0..trials {
        let kind = random_like(family, &mut rng);
        let spec = RegularizerSpec { kind, dim: n };
        let alpha = rng.gen_range(0.01..5.0);
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let exact = super::prox(&spec, &v, alpha).expect("valid inputs");
        let numeric = prox(&spec, &v, alpha).expect("valid inputs");
        for (x, y) in exact.iter().zip(&numeric) {
            max_dev = max_dev.max((x - y).abs());
        }
    }
    OracleComparison {
        trials,
        max_deviation: max_dev,
    }
}

/// Same family as `family` with freshly drawn parameters.
pub fn random_like<R: Rng>(family: &Regularizer, rng: &mut R) -> Regularizer {
    match family {
        Regularizer::Zero => Regularizer::Zero,
        Regularizer::L1 { .. } => Regularizer::L1 {
            lambda1: rng.gen_range(0.0..5.0),
        },
        Regularizer::SquaredL2 { .. } => Regularizer::SquaredL2 {
            lambda2: rng.gen_range(0.0..5.0),
        },
        Regularizer::ElasticNet { .. } => Regularizer::ElasticNet {
            lambda1: rng.gen_range(0.0..5.0),
            lambda2: rng.gen_range(0.0..5.0),
        },
        Regularizer::Box { .. } => {
            let lo = rng.gen_range(-5.0..1.0);
            Regularizer::Box {
                lo,
                hi: lo + rng.gen_range(0.0..6.0),
            }
        }
    }
}

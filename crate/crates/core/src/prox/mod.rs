//! Proximal operators of separable convex regularizers.
//!
//! `prox_{α,h}(v) = argmin_z h(z) + ‖z − v‖² / (2α)`. Every supported `h`
//! is coordinatewise separable, so each closed form acts per coordinate.
//! The [`oracle`] submodule solves the same 1-D problems numerically and
//! serves as an independent check of the closed forms.

pub mod oracle;

use crate::error::{Error, Result};
use crate::linalg::{check_dim, dist, norm};

/// The non-smooth term `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizer {
    Zero,
    /// `λ₁ ‖x‖₁`
    L1 {
        lambda1: f64,
    },
    /// `λ₂ ‖x‖²`
    SquaredL2 {
        lambda2: f64,
    },
    /// `λ₁ ‖x‖₁ + λ₂ ‖x‖²`
    ElasticNet {
        lambda1: f64,
        lambda2: f64,
    },
    /// Indicator of `[lo, hi]^n`.
    Box {
        lo: f64,
        hi: f64,
    },
}

impl Regularizer {
    pub fn name(&self) -> &'static str {
        match self {
            Regularizer::Zero => "zero",
            Regularizer::L1 { .. } => "l1",
            Regularizer::SquaredL2 { .. } => "squared-l2",
            Regularizer::ElasticNet { .. } => "elastic-net",
            Regularizer::Box { .. } => "box",
        }
    }

    /// Value of the 1-D component of `h` at `z`.
    pub fn scalar_value(&self, z: f64) -> f64 {
        match *self {
            Regularizer::Zero => 0.0,
            Regularizer::L1 { lambda1 } => lambda1 * z.abs(),
            Regularizer::SquaredL2 { lambda2 } => lambda2 * z * z,
            Regularizer::ElasticNet { lambda1, lambda2 } => lambda1 * z.abs() + lambda2 * z * z,
            Regularizer::Box { lo, hi } => {
                if (lo..=hi).contains(&z) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Closed-form 1-D proximal map.
    pub fn scalar_prox(&self, v: f64, alpha: f64) -> f64 {
        match *self {
            Regularizer::Zero => v,
            Regularizer::L1 { lambda1 } => soft_threshold(v, alpha * lambda1),
            Regularizer::SquaredL2 { lambda2 } => v / (1.0 + 2.0 * alpha * lambda2),
            Regularizer::ElasticNet { lambda1, lambda2 } => {
                soft_threshold(v, alpha * lambda1) / (1.0 + 2.0 * alpha * lambda2)
            }
            Regularizer::Box { lo, hi } => v.clamp(lo, hi),
        }
    }
}

/// `sign(v) · max(|v| − τ, 0)`
pub fn soft_threshold(v: f64, tau: f64) -> f64 {
    if v > tau {
        v - tau
    } else if v < -tau {
        v + tau
    } else {
        0.0
    }
}

/// Bound `G_h` on subgradient norms of `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubgradientBound {
    Finite(f64),
    /// `h` has unbounded subdifferentials (indicator functions).
    Unbounded,
}

impl SubgradientBound {
    pub fn finite(self) -> Option<f64> {
        match self {
            SubgradientBound::Finite(g) => Some(g),
            SubgradientBound::Unbounded => None,
        }
    }
}

/// A regularizer on `R^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizerSpec {
    pub kind: Regularizer,
    pub dim: usize,
}

impl RegularizerSpec {
    pub fn new(kind: Regularizer, dim: usize) -> Result<Self> {
        let bad = |what: &str, x: f64| {
            Err(Error::InvalidArgument(format!(
                "{what} = {x} must be finite and nonnegative"
            )))
        };
        match kind {
            Regularizer::L1 { lambda1: l } | Regularizer::SquaredL2 { lambda2: l }
                if !(l >= 0.0 && l.is_finite()) =>
            {
                return bad("lambda", l)
            }
            Regularizer::ElasticNet { lambda1, lambda2 } => {
                if !(lambda1 >= 0.0 && lambda1.is_finite()) {
                    return bad("lambda1", lambda1);
                }
                if !(lambda2 >= 0.0 && lambda2.is_finite()) {
                    return bad("lambda2", lambda2);
                }
            }
            Regularizer::Box { lo, hi } if !(lo <= hi) => {
                return Err(Error::InvalidArgument(format!(
                    "box bounds must satisfy lo <= hi, got [{lo}, {hi}]"
                )))
            }
            _ => {}
        }
        Ok(RegularizerSpec { kind, dim })
    }

    pub fn zero(dim: usize) -> Self {
        RegularizerSpec {
            kind: Regularizer::Zero,
            dim,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|&z| self.kind.scalar_value(z)).sum()
    }

    /// `G_h` valid on the ball `‖x‖ ≤ radius`.
    pub fn subgradient_bound(&self, radius: f64) -> SubgradientBound {
        let r = radius.max(0.0);
        let sqrt_n = (self.dim as f64).sqrt();
        match self.kind {
            Regularizer::Zero => SubgradientBound::Finite(0.0),
            Regularizer::L1 { lambda1 } => SubgradientBound::Finite(lambda1 * sqrt_n),
            Regularizer::SquaredL2 { lambda2 } => SubgradientBound::Finite(2.0 * lambda2 * r),
            Regularizer::ElasticNet { lambda1, lambda2 } => {
                SubgradientBound::Finite(lambda1 * sqrt_n + 2.0 * lambda2 * r)
            }
            Regularizer::Box { .. } => SubgradientBound::Unbounded,
        }
    }

    /// Whether `G_h` depends on the radius of the ball the iterates live in.
    pub fn bound_needs_radius(&self) -> bool {
        matches!(
            self.kind,
            Regularizer::SquaredL2 { .. } | Regularizer::ElasticNet { .. }
        )
    }

    /// `h(x) + ‖x − v‖² / (2α)`
    pub fn prox_objective(&self, x: &[f64], v: &[f64], alpha: f64) -> f64 {
        let d = dist(x, v);
        self.value(x) + d * d / (2.0 * alpha)
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "step size alpha = {alpha} must be positive"
        )))
    }
}

/// Exact proximal point `prox_{α,h}(v)`.
pub fn prox(spec: &RegularizerSpec, v: &[f64], alpha: f64) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    check_dim(spec.dim, v.len())?;
    Ok(v.iter()
        .map(|&vj| spec.kind.scalar_prox(vj, alpha))
        .collect())
}

/// Outcome of an ε-inexact proximal membership test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InexactCheck {
    /// The candidate's prox objective exceeds the minimum by `gap <= ε`.
    Accepted { gap: f64 },
    /// The gap exceeds `ε` by `excess > 0`.
    Rejected { excess: f64 },
}

impl InexactCheck {
    pub fn is_accepted(&self) -> bool {
        matches!(self, InexactCheck::Accepted { .. })
    }

    /// Amount by which the candidate misses the `ε` budget (0 when accepted).
    pub fn excess(&self) -> f64 {
        match *self {
            InexactCheck::Accepted { .. } => 0.0,
            InexactCheck::Rejected { excess } => excess,
        }
    }
}

/// Tests whether `candidate` is an ε-approximate minimizer of the prox
/// objective at `v`, using the exact prox point for the minimum.
pub fn check_inexact_prox(
    spec: &RegularizerSpec,
    candidate: &[f64],
    v: &[f64],
    alpha: f64,
    epsilon: f64,
) -> Result<InexactCheck> {
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "epsilon = {epsilon} must be nonnegative"
        )));
    }
    check_dim(spec.dim, candidate.len())?;
    let exact = prox(spec, v, alpha)?;
    let gap = spec.prox_objective(candidate, v, alpha) - spec.prox_objective(&exact, v, alpha);
    Ok(if gap <= epsilon {
        InexactCheck::Accepted { gap }
    } else {
        InexactCheck::Rejected {
            excess: gap - epsilon,
        }
    })
}

/// The ε-subgradient certified by an inexact prox step:
/// `(x_prev − x_next)/α − g_bar − e − p/α`.
pub fn prox_residual_subgradient(
    spec: &RegularizerSpec,
    x_prev: &[f64],
    x_next: &[f64],
    g_bar: &[f64],
    e: &[f64],
    p: &[f64],
    alpha: f64,
) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    for v in [x_prev, x_next, g_bar, e, p] {
        check_dim(spec.dim, v.len())?;
    }
    Ok((0..spec.dim)
        .map(|j| (x_prev[j] - x_next[j]) / alpha - g_bar[j] - e[j] - p[j] / alpha)
        .collect())
}

/// Whether `‖x‖ ≤ radius`, the region where a radius-dependent `G_h` holds.
pub fn within_ball(x: &[f64], radius: f64) -> bool {
    norm(x) <= radius
}

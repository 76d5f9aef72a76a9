//! Smooth local losses `g_i`.

mod dataset;
mod libsvm;
mod quadratic;
pub mod sigmoid;
pub mod synthetic;

pub use dataset::{shard, Dataset, Sample};
pub use libsvm::{parse_libsvm, parse_libsvm_str, write_libsvm};
pub use quadratic::{spectral_radius, Quadratic};

use crate::error::{Error, Result};
use crate::linalg::{check_dim, dot};

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveKind {
    /// Mean sigmoid loss over an agent's sample shard.
    Sigmoid(Dataset),
    Quadratic(Quadratic),
}

/// A smooth local loss, optionally with a `λ₂‖x‖²` term folded in (used
/// when the smooth part of the regularizer is assigned to `g`).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalObjective {
    kind: ObjectiveKind,
    dim: usize,
    l2: f64,
    lipschitz: f64,
}

impl LocalObjective {
    pub fn sigmoid(shard: Dataset) -> Result<Self> {
        if shard.is_empty() {
            return Err(Error::EmptyShard);
        }
        let dim = shard.n;
        let lipschitz = sigmoid::lipschitz(&shard);
        Ok(LocalObjective {
            kind: ObjectiveKind::Sigmoid(shard),
            dim,
            l2: 0.0,
            lipschitz,
        })
    }

    pub fn quadratic(q: Quadratic) -> Self {
        let dim = q.dim();
        let lipschitz = q.lipschitz();
        LocalObjective {
            kind: ObjectiveKind::Quadratic(q),
            dim,
            l2: 0.0,
            lipschitz,
        }
    }

    /// Adds `λ₂‖x‖²` to the loss.
    pub fn with_l2(mut self, lambda2: f64) -> Result<Self> {
        if !(lambda2 >= 0.0 && lambda2.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda2 = {lambda2}")));
        }
        self.lipschitz += 2.0 * (lambda2 - self.l2);
        self.l2 = lambda2;
        Ok(self)
    }

    pub fn kind(&self) -> &ObjectiveKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        let base = match &self.kind {
            ObjectiveKind::Sigmoid(d) => sigmoid::loss_value(x, d)?,
            ObjectiveKind::Quadratic(q) => q.value(x)?,
        };
        Ok(base + self.l2 * dot(x, x))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        let mut g = match &self.kind {
            ObjectiveKind::Sigmoid(d) => sigmoid::loss_grad(x, d)?,
            ObjectiveKind::Quadratic(q) => q.gradient(x)?,
        };
        if self.l2 != 0.0 {
            for (gi, xi) in g.iter_mut().zip(x) {
                *gi += 2.0 * self.l2 * xi;
            }
        }
        Ok(g)
    }

    /// Lipschitz constant `L_i` of the gradient.
    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz
    }

    /// `G_g,i`: bound on `‖∇g_i(x)‖` over `‖x‖ ≤ radius` (global for the
    /// sigmoid loss without an `l2` term).
    pub fn gradient_bound(&self, radius: f64) -> f64 {
        let base = match &self.kind {
            ObjectiveKind::Sigmoid(d) => sigmoid::gradient_bound(d),
            ObjectiveKind::Quadratic(q) => q.gradient_bound(radius),
        };
        base + 2.0 * self.l2 * radius.max(0.0)
    }
}

/// `L = max_i L_i`.
pub fn global_lipschitz(objectives: &[LocalObjective]) -> f64 {
    objectives
        .iter()
        .map(LocalObjective::lipschitz_bound)
        .fold(0.0, f64::max)
}

use std::sync::Arc;

use super::schedule::GraphSchedule;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// Number of communication slots consumed before iteration `k`:
/// iteration `k` performs `k` rounds, so `t(k) = 1 + 2 + ... + (k-1)`.
pub fn slots_before(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Total slots consumed by iterations `1..=k`, i.e. `k(k+1)/2`.
pub fn slots_through(k: usize) -> usize {
    k * (k + 1) / 2
}

/// Ordered product `A(t) A(t-1) ... A(s)`.
pub fn transition_matrix(schedule: &GraphSchedule, t: usize, s: usize) -> Result<Matrix> {
    if t < s {
        return Err(Error::InvalidArgument(format!(
            "transition matrix needs t >= s, got t = {t}, s = {s}"
        )));
    }
    let mut phi = schedule.matrix(s)?.matrix().clone();
    for slot in (s + 1)..=t {
        phi = schedule.matrix(slot)?.matrix().matmul(&phi)?;
    }
    Ok(phi)
}

/// Mixing weights `λ_k` used at iteration `k`: the `k`-fold product of the
/// slot matrices `A(t(k)), ..., A(t(k)+k-1)`. Results are cached per `k` on
/// the schedule.
pub fn consensus_weights(schedule: &GraphSchedule, k: usize) -> Result<Arc<Matrix>> {
    if k < 1 {
        return Err(Error::InvalidArgument(
            "iteration index k must be >= 1".into(),
        ));
    }
    if let Some(w) = schedule.weights_cache.read().unwrap().get(&k) {
        return Ok(Arc::clone(w));
    }
    let start = slots_before(k);
    let phi = Arc::new(transition_matrix(schedule, start + k - 1, start)?);
    schedule
        .weights_cache
        .write()
        .unwrap()
        .entry(k)
        .or_insert_with(|| Arc::clone(&phi));
    Ok(phi)
}

/// Constants of the geometric consensus bound
/// `|[λ_k]_ij - 1/m| <= Γ γ^k` for B-connected schedules with floor `η`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricConstants {
    pub gamma_scale: f64,
    pub gamma: f64,
    pub b0: usize,
    /// `ln γ`, kept separately because `γ` rounds to 1 when `η^B₀` is tiny.
    ln_gamma: f64,
}

impl GeometricConstants {
    /// `Γ γ^k`, evaluated in log space.
    pub fn decay(&self, k: usize) -> f64 {
        self.gamma_scale * (self.ln_gamma * k as f64).exp()
    }
}

/// `B₀ = (m-1)B`, `γ = (1-η^B₀)^(1/B₀)`, `Γ = 2(1+η^-B₀)/(1-η^B₀)`.
pub fn geometric_constants(m: usize, b: usize, eta: f64) -> Result<GeometricConstants> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "eta = {eta} outside (0, 1)"
        )));
    }
    if m < 2 {
        return Err(Error::InvalidArgument(
            "geometric constants need at least two agents".into(),
        ));
    }
    if b < 1 {
        return Err(Error::InvalidArgument(
            "interval B must be at least 1".into(),
        ));
    }
    let b0 = (m - 1) * b;
    let eta_b0 = eta.powi(b0 as i32);
    let ln_gamma = (-eta_b0).ln_1p() / b0 as f64;
    Ok(GeometricConstants {
        gamma_scale: 2.0 * (1.0 + eta.powi(-(b0 as i32))) / (1.0 - eta_b0),
        gamma: ln_gamma.exp(),
        b0,
        ln_gamma,
    })
}

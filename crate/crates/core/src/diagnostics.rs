//! Runtime convergence certificates computed from full-state snapshots.
//!
//! The average iterate `x̄_k` of the distributed method behaves like a
//! centralized proximal gradient step with a gradient error `e_k` and a
//! prox error `ε_k`, both driven by the consensus gap. This module evaluates
//! those error sequences, the bounds they are known to satisfy, the
//! disagreement `D`, and a computable upper bound on the stationarity
//! residual. An observer sees every agent's state, which the protocol itself
//! never does.

use crate::algorithm::AgentState;
use crate::error::{Error, Result};
use crate::graph::{geometric_constants, slots_through, GeometricConstants, GraphSchedule};
use crate::linalg::{self, check_dim, dist, dot, norm, norm_inf, Matrix};
use crate::objective::LocalObjective;
use crate::prox::{self, RegularizerSpec, SubgradientBound};

/// `e = (1/m) Σ_i (∇g_i(x_i) − ∇g_i(x̄))`.
pub fn error_sequence_e(x_all: &[Vec<f64>], objectives: &[LocalObjective]) -> Result<Vec<f64>> {
    check_dim(objectives.len(), x_all.len())?;
    let x_bar = linalg::mean(x_all);
    let m = x_all.len() as f64;
    let mut e = vec![0.0; x_bar.len()];
    for (x, obj) in x_all.iter().zip(objectives) {
        let gi = obj.gradient(x)?;
        let gb = obj.gradient(&x_bar)?;
        for ((ej, a), b) in e.iter_mut().zip(&gi).zip(&gb) {
            *ej += (a - b) / m;
        }
    }
    Ok(e)
}

/// `ε = ‖x̄ − z‖ (G_h + ‖z − v̄‖/α) + ‖x̄ − z‖² / (2α)`, or `None` when
/// `G_h` is unbounded.
pub fn error_sequence_eps(
    x_bar: &[f64],
    v_bar: &[f64],
    z: &[f64],
    alpha: f64,
    g_h: SubgradientBound,
) -> Option<f64> {
    let g_h = g_h.finite()?;
    let d = dist(x_bar, z);
    Some(d * (g_h + dist(z, v_bar) / alpha) + d * d / (2.0 * alpha))
}

/// `D = Σ_i ⟨x_i, Σ_j a_ij (x_i − x_j)⟩`.
pub fn disagreement(x_all: &[Vec<f64>], a: &Matrix) -> Result<f64> {
    check_dim(a.rows(), x_all.len())?;
    let mut total = 0.0;
    for (i, xi) in x_all.iter().enumerate() {
        let mut inner = vec![0.0; xi.len()];
        for (j, xj) in x_all.iter().enumerate() {
            let w = a[(i, j)];
            if w != 0.0 {
                for ((acc, p), q) in inner.iter_mut().zip(xi).zip(xj) {
                    *acc += w * (p - q);
                }
            }
        }
        total += dot(xi, &inner);
    }
    Ok(total)
}

/// `½ Σ_{i,j} a_ij ‖x_i − x_j‖²`, equal to [`disagreement`] for symmetric `a`.
pub fn disagreement_pairwise(x_all: &[Vec<f64>], a: &Matrix) -> Result<f64> {
    check_dim(a.rows(), x_all.len())?;
    let mut total = 0.0;
    for (i, xi) in x_all.iter().enumerate() {
        for (j, xj) in x_all.iter().enumerate() {
            let d = dist(xi, xj);
            total += 0.5 * a[(i, j)] * d * d;
        }
    }
    Ok(total)
}

/// Upper bound on `min_{d ∈ ∂_ε h(x̄_k)} ‖∇g(x̄_k) + d‖`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualBound {
    pub value: f64,
    /// The `√(2ε/α)` term was omitted because `ε` is unavailable.
    pub partial: bool,
}

/// `(1/α + L)‖x̄_k − x̄_{k−1}‖ + √(2ε_k/α) + ‖e_k‖`.
pub fn stationarity_bound(
    dx_norm: f64,
    eps: Option<f64>,
    e_norm: f64,
    alpha: f64,
    lipschitz: f64,
) -> ResidualBound {
    let base = (1.0 / alpha + lipschitz) * dx_norm + e_norm;
    match eps {
        Some(eps) => ResidualBound {
            value: base + (2.0 * eps.max(0.0) / alpha).sqrt(),
            partial: false,
        },
        None => ResidualBound {
            value: base,
            partial: true,
        },
    }
}

/// `(1/T) Σ_{k=1..T} ‖x̄_k − x̄_{k−1}‖²` and `T` times that value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateStatistic {
    pub mean: f64,
    pub t_times_mean: f64,
}

/// Rate statistic over the first `t` iterations of a sequence of average
/// iterates `x̄_0, x̄_1, ...`.
pub fn rate_statistic(x_bars: &[Vec<f64>], t: usize) -> Result<RateStatistic> {
    if t == 0 {
        return Err(Error::InvalidArgument("rate statistic needs T >= 1".into()));
    }
    if t >= x_bars.len() {
        return Err(Error::InvalidArgument(format!(
            "T = {t} exceeds the {} iterations available",
            x_bars.len().saturating_sub(1)
        )));
    }
    let total: f64 = x_bars[..=t]
        .windows(2)
        .map(|w| {
            let d = dist(&w[1], &w[0]);
            d * d
        })
        .sum();
    Ok(RateStatistic {
        mean: total / t as f64,
        t_times_mean: total,
    })
}

/// Everything recorded about one iteration. Row `k = 0` describes the
/// initial state; fields that need a previous iterate are `None` there.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationMetrics {
    pub k: usize,
    pub comm_cumulative: usize,
    pub x_bar: Vec<f64>,
    /// `f(x̄_k) = (1/m) Σ g_i(x̄_k) + h(x̄_k)`.
    pub f_avg: f64,
    pub disagreement: f64,
    pub max_consensus_gap: f64,
    pub dx_norm: Option<f64>,
    pub e_norm: Option<f64>,
    pub eps: Option<f64>,
    /// Centralized prox point `prox(v̄_k)`.
    pub z: Option<Vec<f64>>,
    pub residual_bound: Option<ResidualBound>,
    /// `2Γγ^k Σ_j ‖q_{j,k}‖`; `None` for a single agent or invalid `η`.
    pub geo_bound: Option<f64>,
    /// `Σ_{j ≤ k} ‖x̄_j − x̄_{j−1}‖²`.
    pub rate_t_times_stat: f64,
    pub checks: BoundChecks,
}

/// Both sides of the inequalities the iterates are known to satisfy.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundChecks {
    /// `‖v̄_k − (x̄_{k−1} − α(∇g(x̄_{k−1}) + e_k))‖∞`.
    pub mean_tracking: Option<f64>,
    /// `(L/m) Σ_i ‖x_{i,k−1} − x̄_{k−1}‖`, the bound on `‖e_k‖`.
    pub e_bound: Option<f64>,
    /// `(2G_h/m) Σ_i ‖v_{i,k} − v̄_k‖ + (1/2α)((1/m) Σ_i ‖v_{i,k} − v̄_k‖)²`.
    pub eps_bound: Option<f64>,
    /// Amount by which `x̄_k` misses the `ε_k`-inexact prox test at
    /// `x̄_{k−1} − α(∇g(x̄_{k−1}) + e_k)`; `0` when accepted.
    pub inexact_excess: Option<f64>,
    /// `max_i ‖v_{i,k} − v̄_k‖`.
    pub max_v_gap: Option<f64>,
    /// `Γγ^k Σ_j ‖q_{j,k}‖`.
    pub v_geo_bound: Option<f64>,
    /// `Σ_j ‖q_{j,k}‖`.
    pub q_sum: Option<f64>,
    /// `G_h` is valid here: it does not depend on a ball, or every
    /// `x_{i,k}`, `x̄_k` and `z_k` lies in the declared ball.
    pub in_ball: bool,
}

/// Computes [`IterationMetrics`] from consecutive state snapshots.
#[derive(Debug, Clone)]
pub struct Observer<'a> {
    objectives: &'a [LocalObjective],
    schedule: &'a GraphSchedule,
    spec: RegularizerSpec,
    alpha: f64,
    lipschitz: f64,
    radius: f64,
    g_h: SubgradientBound,
    constants: Option<GeometricConstants>,
    rate_acc: f64,
}

impl<'a> Observer<'a> {
    pub fn new(
        objectives: &'a [LocalObjective],
        schedule: &'a GraphSchedule,
        spec: RegularizerSpec,
        alpha: f64,
        lipschitz: f64,
        radius: f64,
    ) -> Self {
        let constants = geometric_constants(schedule.m(), schedule.interval(), schedule.eta()).ok();
        Observer {
            objectives,
            schedule,
            spec,
            alpha,
            lipschitz,
            radius,
            g_h: spec.subgradient_bound(radius),
            constants,
            rate_acc: 0.0,
        }
    }

    pub fn subgradient_bound(&self) -> SubgradientBound {
        self.g_h
    }

    /// `G_g = max_i G_g,i` on the declared ball.
    pub fn gradient_bound(&self) -> f64 {
        self.objectives
            .iter()
            .map(|o| o.gradient_bound(self.radius))
            .fold(0.0, f64::max)
    }

    pub fn constants(&self) -> Option<GeometricConstants> {
        self.constants
    }

    /// Mean of the `B` slot matrices ending at the last slot consumed by
    /// iteration `k` (the first `B` slots for `k = 0`). Symmetric, doubly
    /// stochastic, and connected for valid schedules.
    pub fn reference_matrix(&self, k: usize) -> Result<Matrix> {
        let b = self.schedule.interval();
        let end = slots_through(k).max(b);
        let m = self.schedule.m();
        let mut acc = Matrix::zeros(m, m);
        for t in (end - b)..end {
            let a = self.schedule.matrix(t)?;
            for i in 0..m {
                for j in 0..m {
                    acc[(i, j)] += a.weight(i, j) / b as f64;
                }
            }
        }
        Ok(acc)
    }

    fn f_avg(&self, x: &[f64]) -> Result<f64> {
        let mut g = 0.0;
        for o in self.objectives {
            g += o.value(x)?;
        }
        Ok(g / self.objectives.len() as f64 + self.spec.value(x))
    }

    fn mean_gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let grads = self
            .objectives
            .iter()
            .map(|o| o.gradient(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(linalg::mean(&grads))
    }

    fn consensus_summary(&self, x_all: &[Vec<f64>], k: usize) -> Result<(Vec<f64>, f64, f64)> {
        let x_bar = linalg::mean(x_all);
        let gap = x_all.iter().map(|x| dist(x, &x_bar)).fold(0.0, f64::max);
        let d = disagreement(x_all, &self.reference_matrix(k)?)?;
        Ok((x_bar, gap, d))
    }

    /// Metrics of the initial state (row `k = 0`).
    pub fn observe_initial(&mut self, states: &[AgentState]) -> Result<IterationMetrics> {
        self.rate_acc = 0.0;
        let xs: Vec<Vec<f64>> = states.iter().map(|s| s.x.clone()).collect();
        let (x_bar, gap, d) = self.consensus_summary(&xs, 0)?;
        let in_ball = xs.iter().all(|x| norm(x) <= self.radius) || !self.spec.bound_needs_radius();
        Ok(IterationMetrics {
            k: 0,
            comm_cumulative: 0,
            f_avg: self.f_avg(&x_bar)?,
            disagreement: d,
            max_consensus_gap: gap,
            x_bar,
            dx_norm: None,
            e_norm: None,
            eps: None,
            z: None,
            residual_bound: None,
            geo_bound: None,
            rate_t_times_stat: 0.0,
            checks: BoundChecks {
                in_ball,
                ..BoundChecks::default()
            },
        })
    }

    /// Metrics of iteration `k`, given the states before (`k − 1`) and after it.
    pub fn observe(
        &mut self,
        k: usize,
        comm_cumulative: usize,
        prev: &[AgentState],
        next: &[AgentState],
    ) -> Result<IterationMetrics> {
        let m = next.len() as f64;
        let alpha = self.alpha;
        let prev_x: Vec<Vec<f64>> = prev.iter().map(|s| s.x.clone()).collect();
        let xs: Vec<Vec<f64>> = next.iter().map(|s| s.x.clone()).collect();
        let vs: Vec<Vec<f64>> = next.iter().map(|s| s.v.clone()).collect();

        let x_bar_prev = linalg::mean(&prev_x);
        let (x_bar, gap, d) = self.consensus_summary(&xs, k)?;
        let v_bar = linalg::mean(&vs);
        let z = prox::prox(&self.spec, &v_bar, alpha)?;

        let e = error_sequence_e(&prev_x, self.objectives)?;
        let e_norm = norm(&e);
        let dx = dist(&x_bar, &x_bar_prev);
        self.rate_acc += dx * dx;

        let in_ball = xs
            .iter()
            .chain([&x_bar, &z])
            .all(|x| norm(x) <= self.radius)
            || !self.spec.bound_needs_radius();
        let g_h = if in_ball {
            self.g_h
        } else {
            SubgradientBound::Unbounded
        };
        let eps = error_sequence_eps(&x_bar, &v_bar, &z, alpha, g_h);
        let residual = stationarity_bound(dx, eps, e_norm, alpha, self.lipschitz);

        // Mean-tracking identity and the inexact prox certificate.
        let grad_bar = self.mean_gradient(&x_bar_prev)?;
        let tracked: Vec<f64> = (0..x_bar.len())
            .map(|j| x_bar_prev[j] - alpha * (grad_bar[j] + e[j]))
            .collect();
        let mean_tracking = norm_inf(&linalg::sub(&v_bar, &tracked));
        let inexact_excess = match eps {
            Some(eps) => {
                Some(prox::check_inexact_prox(&self.spec, &x_bar, &tracked, alpha, eps)?.excess())
            }
            None => None,
        };

        let prev_spread: f64 = prev_x.iter().map(|x| dist(x, &x_bar_prev)).sum();
        let v_gaps: Vec<f64> = vs.iter().map(|v| dist(v, &v_bar)).collect();
        let v_gap_mean = v_gaps.iter().sum::<f64>() / m;
        let eps_bound = g_h
            .finite()
            .map(|g| 2.0 * g * v_gap_mean + v_gap_mean * v_gap_mean / (2.0 * alpha));
        let q_sum: f64 = next.iter().map(|s| norm(&s.q)).sum();
        let decay = self.constants.map(|c| c.decay(k));

        Ok(IterationMetrics {
            k,
            comm_cumulative,
            f_avg: self.f_avg(&x_bar)?,
            disagreement: d,
            max_consensus_gap: gap,
            x_bar,
            dx_norm: Some(dx),
            e_norm: Some(e_norm),
            eps,
            z: Some(z),
            residual_bound: Some(residual),
            geo_bound: decay.map(|c| 2.0 * c * q_sum),
            rate_t_times_stat: self.rate_acc,
            checks: BoundChecks {
                mean_tracking: Some(mean_tracking),
                e_bound: Some(self.lipschitz / m * prev_spread),
                eps_bound,
                inexact_excess,
                max_v_gap: Some(v_gaps.iter().copied().fold(0.0, f64::max)),
                v_geo_bound: decay.map(|c| c * q_sum),
                q_sum: Some(q_sum),
                in_ball,
            },
        })
    }
}

//! The distributed proximal gradient iteration.
//!
//! At iteration `k ≥ 1` every agent takes a local gradient step, the
//! network mixes the results with [`consensus_weights`]`(schedule, k)`
//! (`k` communication rounds), and every agent applies the proximal map of
//! the shared regularizer.

mod run;
mod trace;

pub use run::{run, Init, Problem, RunConfig, StepSize};
pub use trace::{RunTrace, Snapshot, CSV_HEADER};

use crate::error::{Error, Result};
use crate::graph::{consensus_weights, GraphSchedule};
use crate::linalg::{is_finite, Matrix};
use crate::objective::LocalObjective;
use crate::prox::{self, RegularizerSpec};

/// Iterates held by one agent: the estimate `x`, the post-gradient point
/// `q` and the post-consensus point `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentState {
    pub x: Vec<f64>,
    pub q: Vec<f64>,
    pub v: Vec<f64>,
}

impl AgentState {
    /// Fresh state at `x`, with `q` and `v` also set to `x`.
    pub fn at(x: Vec<f64>) -> Self {
        AgentState {
            q: x.clone(),
            v: x.clone(),
            x,
        }
    }
}

/// `q = x − α ∇g_i(x)`.
pub fn gradient_step(
    state: &AgentState,
    obj: &LocalObjective,
    alpha: f64,
    agent: usize,
    iteration: usize,
) -> Result<Vec<f64>> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "step size alpha = {alpha} must be positive"
        )));
    }
    let g = obj.gradient(&state.x)?;
    if !is_finite(&g) {
        return Err(Error::NonFinite {
            iteration,
            agent: Some(agent),
        });
    }
    Ok(state.x.iter().zip(&g).map(|(x, g)| x - alpha * g).collect())
}

/// `v_i = Σ_j λ_ij q_j`.
pub fn consensus_step(q_all: &[Vec<f64>], weights: &Matrix) -> Result<Vec<Vec<f64>>> {
    weights.mix(q_all)
}

/// `x = prox_{α,h}(v)`.
pub fn prox_step(v: &[f64], spec: &RegularizerSpec, alpha: f64) -> Result<Vec<f64>> {
    prox::prox(spec, v, alpha)
}

/// One full iteration `k` over all agents.
pub fn iterate(
    states: &[AgentState],
    objectives: &[LocalObjective],
    schedule: &GraphSchedule,
    spec: &RegularizerSpec,
    alpha: f64,
    k: usize,
) -> Result<Vec<AgentState>> {
    if k < 1 {
        return Err(Error::InvalidArgument(
            "iteration index k must be >= 1".into(),
        ));
    }
    if states.len() != objectives.len() || states.len() != schedule.m() {
        return Err(Error::DimensionMismatch {
            expected: schedule.m(),
            got: states.len(),
        });
    }
    let q_all = states
        .iter()
        .zip(objectives)
        .enumerate()
        .map(|(i, (s, obj))| gradient_step(s, obj, alpha, i, k))
        .collect::<Result<Vec<_>>>()?;
    let weights = consensus_weights(schedule, k)?;
    let v_all = consensus_step(&q_all, &weights)?;
    let mut next = Vec::with_capacity(states.len());
    for (i, (q, v)) in q_all.into_iter().zip(v_all).enumerate() {
        let x = prox_step(&v, spec, alpha)?;
        if !is_finite(&x) || !is_finite(&v) {
            return Err(Error::NonFinite {
                iteration: k,
                agent: Some(i),
            });
        }
        next.push(AgentState { x, q, v });
    }
    Ok(next)
}

/// Stateful driver: holds the agents' iterates, the iteration counter and
/// the number of communication slots consumed so far.
#[derive(Debug, Clone)]
pub struct Network<'a> {
    objectives: &'a [LocalObjective],
    schedule: &'a GraphSchedule,
    spec: RegularizerSpec,
    alpha: f64,
    states: Vec<AgentState>,
    k: usize,
    comm_slots: usize,
}

impl<'a> Network<'a> {
    pub fn new(
        objectives: &'a [LocalObjective],
        schedule: &'a GraphSchedule,
        spec: RegularizerSpec,
        alpha: f64,
        initial: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if initial.len() != objectives.len() || initial.len() != schedule.m() {
            return Err(Error::DimensionMismatch {
                expected: schedule.m(),
                got: initial.len(),
            });
        }
        Ok(Network {
            objectives,
            schedule,
            spec,
            alpha,
            states: initial.into_iter().map(AgentState::at).collect(),
            k: 0,
            comm_slots: 0,
        })
    }

    /// Runs the next iteration and returns its index.
    pub fn step(&mut self) -> Result<usize> {
        let k = self.k + 1;
        self.states = iterate(
            &self.states,
            self.objectives,
            self.schedule,
            &self.spec,
            self.alpha,
            k,
        )?;
        self.k = k;
        self.comm_slots += k;
        Ok(k)
    }

    pub fn states(&self) -> &[AgentState] {
        &self.states
    }

    pub fn iteration(&self) -> usize {
        self.k
    }

    pub fn comm_slots(&self) -> usize {
        self.comm_slots
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn xs(&self) -> Vec<Vec<f64>> {
        self.states.iter().map(|s| s.x.clone()).collect()
    }
}

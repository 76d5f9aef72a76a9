use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::trace::{RunTrace, Snapshot};
use super::Network;
use crate::diagnostics::Observer;
use crate::error::{Error, Result};
use crate::graph::{slots_through, validate_schedule, GraphSchedule};
use crate::linalg::norm;
use crate::objective::{global_lipschitz, LocalObjective};
use crate::prox::RegularizerSpec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    /// Must satisfy `0 < α < 1/L`.
    Fixed(f64),
    /// `α = safety / L` with `0 < safety < 1`.
    Auto { safety: f64 },
}

impl Default for StepSize {
    fn default() -> Self {
        StepSize::Auto { safety: 0.9 }
    }
}

impl StepSize {
    /// Resolves the step size against the global Lipschitz constant.
    pub fn resolve(self, lipschitz: f64) -> Result<f64> {
        let limit = if lipschitz > 0.0 {
            1.0 / lipschitz
        } else {
            f64::INFINITY
        };
        let alpha = match self {
            StepSize::Fixed(a) => a,
            StepSize::Auto { safety } => {
                if !(safety > 0.0 && safety < 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "step size safety factor {safety} must lie in (0, 1)"
                    )));
                }
                if lipschitz <= 0.0 {
                    return Err(Error::InvalidArgument(
                        "automatic step size needs a positive Lipschitz constant".into(),
                    ));
                }
                safety / lipschitz
            }
        };
        if !(alpha > 0.0 && alpha < limit) {
            return Err(Error::StepSize { alpha, limit });
        }
        Ok(alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum Init {
    #[default]
    Zeros,
    /// Independent `N(0, scale²)` entries.
    Gaussian { scale: f64, seed: u64 },
    /// Explicit starting point for every agent.
    Points(Vec<Vec<f64>>),
}

impl Init {
    pub fn points(&self, m: usize, n: usize) -> Result<Vec<Vec<f64>>> {
        match self {
            Init::Zeros => Ok(vec![vec![0.0; n]; m]),
            Init::Gaussian { scale, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..m)
                    .map(|_| {
                        (0..n)
                            .map(|_| {
                                let z: f64 = StandardNormal.sample(&mut rng);
                                scale * z
                            })
                            .collect()
                    })
                    .collect())
            }
            Init::Points(p) => {
                if p.len() != m {
                    return Err(Error::DimensionMismatch {
                        expected: m,
                        got: p.len(),
                    });
                }
                if let Some(bad) = p.iter().find(|x| x.len() != n) {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: bad.len(),
                    });
                }
                Ok(p.clone())
            }
        }
    }
}

/// One local objective per agent and the shared regularizer.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub objectives: Vec<LocalObjective>,
    pub regularizer: RegularizerSpec,
}

impl Problem {
    pub fn m(&self) -> usize {
        self.objectives.len()
    }

    pub fn dim(&self) -> usize {
        self.regularizer.dim
    }

    pub fn lipschitz(&self) -> f64 {
        global_lipschitz(&self.objectives)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub step: StepSize,
    pub max_iter: usize,
    /// Stop once a complete (non-partial) residual bound falls below this.
    pub tol: Option<f64>,
    pub init: Init,
    /// Ball radius for ball-restricted bounds; defaults to
    /// `10 · max(max_i ‖x_{i,0}‖, 1)`.
    pub radius: Option<f64>,
    /// Keep `q` and `v` snapshots every this many iterations (0 keeps none).
    pub snapshot_every: usize,
    pub validate_schedule: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            step: StepSize::default(),
            max_iter: 100,
            tol: None,
            init: Init::Zeros,
            radius: None,
            snapshot_every: 1,
            validate_schedule: true,
        }
    }
}

/// Runs the method for up to `cfg.max_iter` iterations and records
/// diagnostics for every one of them.
pub fn run(problem: &Problem, schedule: &GraphSchedule, cfg: &RunConfig) -> Result<RunTrace> {
    let m = problem.m();
    let n = problem.dim();
    if m == 0 {
        return Err(Error::InvalidArgument(
            "at least one agent is required".into(),
        ));
    }
    if schedule.m() != m {
        return Err(Error::DimensionMismatch {
            expected: schedule.m(),
            got: m,
        });
    }
    if let Some(bad) = problem.objectives.iter().find(|o| o.dim() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: bad.dim(),
        });
    }
    let lipschitz = problem.lipschitz();
    let alpha = cfg.step.resolve(lipschitz)?;

    if cfg.validate_schedule {
        let horizon = slots_through(cfg.max_iter).max(schedule.interval());
        let report = validate_schedule(schedule, horizon)?;
        if !report.is_valid() {
            return Err(Error::InvalidSchedule(report.to_string()));
        }
    }

    let initial = cfg.init.points(m, n)?;
    let radius = cfg
        .radius
        .unwrap_or_else(|| 10.0 * initial.iter().map(|x| norm(x)).fold(1.0, f64::max));
    if !(radius > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "radius = {radius} must be positive"
        )));
    }

    let mut net = Network::new(
        &problem.objectives,
        schedule,
        problem.regularizer,
        alpha,
        initial.clone(),
    )?;
    let mut observer = Observer::new(
        &problem.objectives,
        schedule,
        problem.regularizer,
        alpha,
        lipschitz,
        radius,
    );
    let mut rows = vec![observer.observe_initial(net.states())?];
    let mut snapshots = Vec::new();
    let mut stopped_early = false;

    for _ in 0..cfg.max_iter {
        let prev = net.states().to_vec();
        let k = net.step()?;
        let row = observer.observe(k, net.comm_slots(), &prev, net.states())?;
        if cfg.snapshot_every > 0 && k % cfg.snapshot_every == 0 {
            snapshots.push(Snapshot {
                k,
                q: net.states().iter().map(|s| s.q.clone()).collect(),
                v: net.states().iter().map(|s| s.v.clone()).collect(),
            });
        }
        let done = match (cfg.tol, row.residual_bound) {
            (Some(tol), Some(b)) => !b.partial && b.value < tol,
            _ => false,
        };
        rows.push(row);
        if done {
            stopped_early = k < cfg.max_iter;
            break;
        }
    }

    Ok(RunTrace {
        alpha,
        lipschitz,
        radius,
        m,
        n,
        rows,
        snapshots,
        initial,
        final_states: net.states().to_vec(),
        stopped_early,
    })
}

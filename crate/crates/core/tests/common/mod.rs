#![allow(dead_code)]

use std::path::PathBuf;

use tvprox::algorithm::{run, Init, Problem, RunConfig, RunTrace, StepSize};
use tvprox::graph::{random_periodic_schedule, GraphSchedule};
use tvprox::objective::{synthetic, LocalObjective};
use tvprox::prox::{Regularizer, RegularizerSpec};

pub const FIXTURE_M: usize = 10;
pub const FIXTURE_N: usize = 5;
pub const FIXTURE_SEED: u64 = 2024;

/// Ten random strongly convex quadratics on `R^5` with a small `l1` term.
pub fn quadratic_problem(regularizer: Regularizer) -> Problem {
    let objectives = synthetic::random_quadratics(FIXTURE_M, FIXTURE_N, FIXTURE_SEED)
        .into_iter()
        .map(LocalObjective::quadratic)
        .collect();
    Problem {
        objectives,
        regularizer: RegularizerSpec::new(regularizer, FIXTURE_N).unwrap(),
    }
}

pub fn fixture_problem() -> Problem {
    quadratic_problem(Regularizer::L1 { lambda1: 0.1 })
}

/// Two random slot graphs with Metropolis weights, alternating; their
/// union is connected (`B = 2`).
pub fn fixture_schedule() -> GraphSchedule {
    random_periodic_schedule(FIXTURE_M, 2, FIXTURE_SEED, 0.3).unwrap()
}

pub fn fixture_config(max_iter: usize) -> RunConfig {
    RunConfig {
        step: StepSize::Auto { safety: 0.9 },
        max_iter,
        init: Init::Gaussian {
            scale: 1.0,
            seed: FIXTURE_SEED,
        },
        ..RunConfig::default()
    }
}

pub fn fixture_run(max_iter: usize) -> RunTrace {
    run(
        &fixture_problem(),
        &fixture_schedule(),
        &fixture_config(max_iter),
    )
    .unwrap()
}

/// Location of an optional real dataset: `$A9A_PATH`, else `data/a9a` at
/// the workspace root.
pub fn a9a_path() -> Option<PathBuf> {
    if let Ok(p) = std::env::var("A9A_PATH") {
        let p = PathBuf::from(p);
        return p.exists().then_some(p);
    }
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/a9a");
    p.exists().then_some(p)
}

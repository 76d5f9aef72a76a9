//! Builds problems and schedules from a config.

use std::fs::File;
use std::io::BufReader;

use serde::Serialize;
use tvprox::algorithm::{Init, Problem, RunConfig, StepSize};
use tvprox::graph::{
    alternating_path_schedule, metropolis_weights, parse_matrix_list, random_periodic_schedule,
    topology, GraphSchedule,
};
use tvprox::linalg::Matrix;
use tvprox::objective::{parse_libsvm, shard, synthetic, Dataset, LocalObjective, Quadratic};
use tvprox::prox::{Regularizer, RegularizerSpec};

use crate::config::{
    Alpha, ExperimentConfig, GraphKind, InitKind, ProblemKind, RegKind, RegSplit, Topology,
};
use crate::CliError;

/// Where the samples came from, recorded in the run summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DataProvenance {
    pub source: String,
    pub total_samples: usize,
    pub used_samples: usize,
    pub subsample_seed: Option<u64>,
    pub features: usize,
}

const SYNTHETIC_DEFAULT_SAMPLES: usize = 2000;

fn load_dataset(cfg: &ExperimentConfig) -> Result<(Dataset, DataProvenance), CliError> {
    let seed = cfg.problem.seed;
    let Some(path) = &cfg.data.path else {
        let count = cfg.data.subsample.unwrap_or(SYNTHETIC_DEFAULT_SAMPLES);
        let d = synthetic::one_hot_classification(count, seed);
        let prov = DataProvenance {
            source: format!("synthetic one-hot (seed {seed})"),
            total_samples: count,
            used_samples: count,
            subsample_seed: None,
            features: d.n,
        };
        return Ok((d, prov));
    };
    let file =
        File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let full = parse_libsvm(BufReader::new(file), cfg.data.n_override)?;
    let total = full.len();
    let (d, sub_seed) = match cfg.data.subsample {
        Some(count) if count < total => (full.subsample(count, seed)?, Some(seed)),
        _ => (full, None),
    };
    let prov = DataProvenance {
        source: path.display().to_string(),
        total_samples: total,
        used_samples: d.len(),
        subsample_seed: sub_seed,
        features: d.n,
    };
    Ok((d, prov))
}

/// Regularizer placed in `h`, and the `λ₂` moved into every `g_i`.
fn regularizer(cfg: &ExperimentConfig, n: usize) -> Result<(RegularizerSpec, f64), CliError> {
    let r = &cfg.reg;
    let to_g = cfg.problem.reg_split == RegSplit::GCarriesL2;
    let (kind, l2) = match r.kind {
        RegKind::Zero => (Regularizer::Zero, 0.0),
        RegKind::L1 => (Regularizer::L1 { lambda1: r.lambda1 }, 0.0),
        RegKind::SquaredL2 if to_g => (Regularizer::Zero, r.lambda2),
        RegKind::SquaredL2 => (Regularizer::SquaredL2 { lambda2: r.lambda2 }, 0.0),
        RegKind::ElasticNet if to_g => (Regularizer::L1 { lambda1: r.lambda1 }, r.lambda2),
        RegKind::ElasticNet => (
            Regularizer::ElasticNet {
                lambda1: r.lambda1,
                lambda2: r.lambda2,
            },
            0.0,
        ),
        RegKind::Box => (Regularizer::Box { lo: r.lo, hi: r.hi }, 0.0),
    };
    Ok((RegularizerSpec::new(kind, n)?, l2))
}

pub fn build_problem(
    cfg: &ExperimentConfig,
) -> Result<(Problem, Option<DataProvenance>), CliError> {
    let m = cfg.graph.m;
    let (objectives, n, prov) = match cfg.problem.kind {
        ProblemKind::Quadratic => {
            let n = cfg.problem.diag.as_ref().map_or(cfg.problem.n, Vec::len);
            let mut quads = synthetic::random_quadratics(m, n, cfg.problem.seed);
            if let Some(diag) = &cfg.problem.diag {
                for q in &mut quads {
                    *q = Quadratic::new(Matrix::from_diag(diag), q.center.clone())?;
                }
            }
            let objs: Vec<LocalObjective> =
                quads.into_iter().map(LocalObjective::quadratic).collect();
            (objs, n, None)
        }
        ProblemKind::Sigmoid => {
            let (data, prov) = load_dataset(cfg)?;
            let objs = shard(&data, m, cfg.problem.seed)?
                .into_iter()
                .map(LocalObjective::sigmoid)
                .collect::<tvprox::Result<Vec<_>>>()?;
            (objs, data.n, Some(prov))
        }
    };
    let (spec, l2) = regularizer(cfg, n)?;
    let objectives = if l2 > 0.0 {
        objectives
            .into_iter()
            .map(|o| o.with_l2(l2))
            .collect::<tvprox::Result<Vec<_>>>()?
    } else {
        objectives
    };
    Ok((
        Problem {
            objectives,
            regularizer: spec,
        },
        prov,
    ))
}

fn topology_edges(t: Topology, m: usize) -> Vec<(usize, usize)> {
    match t {
        Topology::Complete => topology::complete(m),
        Topology::Path => topology::path(m),
        Topology::Ring => topology::ring(m),
        Topology::Star => topology::star(m),
        Topology::Empty => Vec::new(),
    }
}

pub fn build_schedule(cfg: &ExperimentConfig) -> Result<GraphSchedule, CliError> {
    let g = &cfg.graph;
    let mut schedule = match g.kind {
        GraphKind::Static => {
            GraphSchedule::fixed(metropolis_weights(&topology_edges(g.topology, g.m), g.m)?)
        }
        GraphKind::AlternatingPath => alternating_path_schedule(g.m)?,
        GraphKind::Periodic => random_periodic_schedule(g.m, g.period, g.seed, g.edge_prob)?,
        GraphKind::Random => {
            let b = g.interval.unwrap_or(2);
            GraphSchedule::seeded_random(g.m, b, g.seed, g.edge_prob)?
        }
        GraphKind::Matrices => {
            let path = g.matrices.as_ref().expect("checked at load");
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let s = GraphSchedule::list(parse_matrix_list(&text)?, g.cyclic)?;
            if s.m() != g.m {
                return Err(CliError::Config(format!(
                    "graph.m = {} but the matrices are {}x{}",
                    g.m,
                    s.m(),
                    s.m()
                )));
            }
            s
        }
    };
    if let Some(b) = g.interval {
        schedule = schedule.with_interval(b)?;
    }
    if let Some(eta) = g.eta {
        schedule = schedule.with_eta(eta)?;
    }
    Ok(schedule)
}

pub fn run_config(cfg: &ExperimentConfig) -> RunConfig {
    let a = &cfg.algo;
    RunConfig {
        step: match a.alpha {
            Alpha::Auto => StepSize::Auto { safety: a.safety },
            Alpha::Value(v) => StepSize::Fixed(v),
        },
        max_iter: a.max_iter,
        tol: a.tol,
        init: match a.init {
            InitKind::Zeros => Init::Zeros,
            InitKind::Gaussian => Init::Gaussian {
                scale: a.init_scale,
                seed: a.seed,
            },
        },
        radius: a.radius,
        snapshot_every: cfg.output.snapshot_every,
        validate_schedule: true,
    }
}

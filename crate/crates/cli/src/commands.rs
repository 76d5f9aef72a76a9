use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use tvprox::algorithm::run;
use tvprox::graph::{slots_through, validate_schedule};
use tvprox::prox::{oracle, Regularizer};
use tvprox::simulator::{replay_check, CommLog};

use crate::config::{Alpha, ExperimentConfig};
use crate::setup::{self, DataProvenance};
use crate::{exit, CliError};

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub output: Option<PathBuf>,
    /// Replaces every seed in the config (problem, graph and init).
    pub seed: Option<u64>,
    pub max_iter: Option<usize>,
    pub alpha: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ExperimentConfig) {
        if let Some(p) = &self.output {
            cfg.output.trace = p.clone();
        }
        if let Some(s) = self.seed {
            cfg.problem.seed = s;
            cfg.graph.seed = s;
            cfg.algo.seed = s;
        }
        if let Some(t) = self.max_iter {
            cfg.algo.max_iter = t;
        }
        if let Some(a) = self.alpha {
            cfg.algo.alpha = Alpha::Value(a);
        }
    }
}

/// Resolves a relative output path under `$OUTPUT_DIR` when it is set.
pub fn output_path(p: &Path) -> PathBuf {
    match std::env::var_os("OUTPUT_DIR") {
        Some(dir) if p.is_relative() => PathBuf::from(dir).join(p),
        _ => p.to_path_buf(),
    }
}

fn sibling(trace: &Path, suffix: &str) -> PathBuf {
    let stem = trace
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trace".into());
    trace.with_file_name(format!("{stem}{suffix}"))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

#[derive(Debug, Serialize)]
struct ReplaySummary {
    iterations_checked: usize,
    max_deviation: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct RunSummary {
    iterations: usize,
    stopped_early: bool,
    m: usize,
    n: usize,
    alpha: f64,
    lipschitz: f64,
    radius: f64,
    comm_steps: usize,
    messages: usize,
    initial_disagreement: f64,
    final_disagreement: f64,
    disagreement_decreased: bool,
    first_residual_bound: Option<f64>,
    final_residual_bound: Option<f64>,
    final_residual_partial: bool,
    final_max_consensus_gap: f64,
    final_f_avg: f64,
    replay: Option<ReplaySummary>,
    data: Option<DataProvenance>,
    wall_time_s: f64,
    trace: String,
    comm_trace: String,
    config: String,
}

pub fn cmd_run(cfg: &ExperimentConfig) -> Result<u8, CliError> {
    let start = Instant::now();
    let (problem, data) = setup::build_problem(cfg)?;
    let schedule = setup::build_schedule(cfg)?;
    let trace = run(&problem, &schedule, &setup::run_config(cfg))?;

    let trace_path = output_path(&cfg.output.trace);
    let mut out = create(&trace_path)?;
    trace.write_csv(&mut out)?;
    out.flush()?;

    let comm = CommLog::for_slots(&schedule, 0, trace.comm_cumulative(), trace.n)?;
    let comm_path = sibling(&trace_path, ".comm.csv");
    let mut out = create(&comm_path)?;
    comm.write_csv(&mut out)?;
    out.flush()?;

    let replay = if trace.snapshots.is_empty() {
        None
    } else {
        let r = replay_check(&trace, &schedule)?;
        Some(ReplaySummary {
            iterations_checked: r.iterations_checked,
            max_deviation: r.max_deviation,
            passed: r.passed,
        })
    };

    let last = trace.last();
    let summary = RunSummary {
        iterations: trace.iterations(),
        stopped_early: trace.stopped_early,
        m: trace.m,
        n: trace.n,
        alpha: trace.alpha,
        lipschitz: trace.lipschitz,
        radius: trace.radius,
        comm_steps: trace.comm_cumulative(),
        messages: comm.total_messages(),
        initial_disagreement: trace.rows[0].disagreement,
        final_disagreement: last.disagreement,
        disagreement_decreased: last.disagreement < trace.rows[0].disagreement,
        first_residual_bound: trace
            .rows
            .get(1)
            .and_then(|r| r.residual_bound)
            .map(|b| b.value),
        final_residual_bound: last.residual_bound.map(|b| b.value),
        final_residual_partial: last.residual_bound.is_some_and(|b| b.partial),
        final_max_consensus_gap: last.max_consensus_gap,
        final_f_avg: last.f_avg,
        replay,
        data,
        wall_time_s: start.elapsed().as_secs_f64(),
        trace: trace_path.display().to_string(),
        comm_trace: comm_path.display().to_string(),
        config: cfg.dump(),
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    let summary_path = sibling(&trace_path, ".summary.json");
    let mut out = create(&summary_path)?;
    writeln!(out, "{json}")?;
    out.flush()?;

    println!("iterations         {}", summary.iterations);
    println!(
        "alpha              {:e} (L = {:e})",
        summary.alpha, summary.lipschitz
    );
    println!("comm steps         {}", summary.comm_steps);
    println!(
        "disagreement       {:e} -> {:e}",
        summary.initial_disagreement, summary.final_disagreement
    );
    if let (Some(a), Some(b)) = (summary.first_residual_bound, summary.final_residual_bound) {
        let note = if summary.final_residual_partial {
            " (partial)"
        } else {
            ""
        };
        println!("residual bound     {a:e} -> {b:e}{note}");
    }
    println!("wall time          {:.3} s", summary.wall_time_s);
    println!("summary            {}", summary_path.display());
    Ok(exit::OK)
}

pub fn cmd_validate_graph(cfg: &ExperimentConfig, horizon: Option<usize>) -> Result<u8, CliError> {
    let schedule = setup::build_schedule(cfg)?;
    let horizon =
        horizon.unwrap_or_else(|| slots_through(cfg.algo.max_iter).max(schedule.interval()));
    let report = validate_schedule(&schedule, horizon)?;
    println!("{report}");
    Ok(if report.is_valid() {
        exit::OK
    } else {
        exit::CHECK_FAILED
    })
}

pub const PROX_CHECK_TOL: f64 = 1e-6;

pub fn parse_regularizer_family(name: &str) -> Option<Regularizer> {
    Some(match name {
        "zero" => Regularizer::Zero,
        "l1" => Regularizer::L1 { lambda1: 1.0 },
        "squared-l2" => Regularizer::SquaredL2 { lambda2: 1.0 },
        "elastic-net" => Regularizer::ElasticNet {
            lambda1: 1.0,
            lambda2: 1.0,
        },
        "box" => Regularizer::Box { lo: 0.0, hi: 1.0 },
        _ => return None,
    })
}

pub fn cmd_prox_check(kind: &str, trials: usize, seed: u64) -> Result<u8, CliError> {
    let family = parse_regularizer_family(kind).ok_or_else(|| {
        CliError::Config(format!(
            "unknown regularizer `{kind}` (expected zero, l1, squared-l2, elastic-net or box)"
        ))
    })?;
    let cmp = oracle::compare_with_closed_form(&family, trials, seed);
    let ok = cmp.max_deviation < PROX_CHECK_TOL;
    println!(
        "{kind}: {} trials, max deviation {:e} ({})",
        cmp.trials,
        cmp.max_deviation,
        if ok { "pass" } else { "FAIL" }
    );
    Ok(if ok { exit::OK } else { exit::CHECK_FAILED })
}

pub fn cmd_lipschitz(cfg: &ExperimentConfig) -> Result<u8, CliError> {
    let (problem, _) = setup::build_problem(cfg)?;
    for (i, o) in problem.objectives.iter().enumerate() {
        println!("agent {i:>3}  L_i = {}", o.lipschitz_bound());
    }
    let l = problem.lipschitz();
    println!("global L = {l}");
    if l > 0.0 {
        println!("recommended alpha = 0.9/L = {}", 0.9 / l);
    }
    Ok(exit::OK)
}

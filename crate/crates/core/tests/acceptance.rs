//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any failed.

mod common;

use std::fs::File;
use std::io::BufReader;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tvprox::algorithm::{run, Init, Problem, RunConfig, RunTrace, StepSize};
use tvprox::graph::{consensus_weights, random_periodic_schedule, slots_before, GraphSchedule};
use tvprox::linalg::{dist, dot, norm, norm_inf, sub};
use tvprox::objective::{parse_libsvm, shard, synthetic, Dataset, LocalObjective, Quadratic};
use tvprox::prox::{self, oracle, Regularizer, RegularizerSpec};
use tvprox::simulator::gossip_rounds;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

const FAMILIES: [Regularizer; 5] = [
    Regularizer::Zero,
    Regularizer::L1 { lambda1: 1.0 },
    Regularizer::SquaredL2 { lambda2: 1.0 },
    Regularizer::ElasticNet {
        lambda1: 1.0,
        lambda2: 1.0,
    },
    Regularizer::Box { lo: 0.0, hi: 1.0 },
];

fn prox_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for (i, family) in FAMILIES.iter().enumerate() {
        worst =
            worst.max(oracle::compare_with_closed_form(family, 1000, 100 + i as u64).max_deviation);
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst < 1e-6 && secs < 5.0,
        format!("max deviation {worst:.3e} over 5 x 1000 trials (< 1e-6), {secs:.2} s (< 5 s)"),
    )
}

fn prox_properties() -> Outcome {
    const SLACK: f64 = 1e-10;
    let n = 4;
    let mut violations = 0;
    let mut worst_nonexp = f64::NEG_INFINITY;
    let mut worst_ineq = f64::NEG_INFINITY;
    for (f, family) in FAMILIES.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(200 + f as u64);
        for _ in 0..10_000 {
            let kind = oracle::random_like(family, &mut rng);
            let spec = RegularizerSpec::new(kind, n).unwrap();
            let alpha = rng.gen_range(0.01..5.0);
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
            let pv = prox::prox(&spec, &v, alpha).unwrap();
            let pw = prox::prox(&spec, &w, alpha).unwrap();

            let nonexp = dist(&pv, &pw) - dist(&v, &w);
            worst_nonexp = worst_nonexp.max(nonexp);
            if nonexp > SLACK {
                violations += 1;
            }

            // u ranges over dom h; for the box that is the box itself.
            let u: Vec<f64> = match kind {
                Regularizer::Box { lo, hi } => (0..n).map(|_| rng.gen_range(lo..=hi)).collect(),
                _ => (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect(),
            };
            // (v − prox v)/α is a subgradient at prox v; the same check with
            // u replaced by the other prox point covers the cross pair.
            for (x, y, other) in [(&v, &pv, &u), (&v, &pv, &pw), (&w, &pw, &pv)] {
                let z: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - b) / alpha).collect();
                let gap = spec.value(y) + dot(&z, &sub(other, y)) - spec.value(other);
                worst_ineq = worst_ineq.max(gap);
                if gap > SLACK {
                    violations += 1;
                }
            }
        }
    }
    outcome(
        violations == 0,
        format!(
            "{violations} violations in 5 x 10^4 pairs; worst nonexpansiveness excess {worst_nonexp:.2e}, worst subgradient-inequality excess {worst_ineq:.2e} (slack 1e-10)"
        ),
    )
}

fn central_difference(obj: &LocalObjective, x: &[f64]) -> Vec<f64> {
    let h = 1e-6 * (1.0 + norm(x));
    (0..x.len())
        .map(|j| {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            (obj.value(&xp).unwrap() - obj.value(&xm).unwrap()) / (2.0 * h)
        })
        .collect()
}

fn gradient_correctness() -> Outcome {
    let sig = LocalObjective::sigmoid(synthetic::one_hot_classification(200, 31)).unwrap();
    let quad = LocalObjective::quadratic(synthetic::random_quadratics(1, 8, 32).remove(0));
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut worst: f64 = 0.0;
    for obj in [&sig, &quad] {
        for _ in 0..100 {
            let x: Vec<f64> = (0..obj.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let g = obj.gradient(&x).unwrap();
            let fd = central_difference(obj, &x);
            let rel = dist(&g, &fd) / norm(&g).max(norm(&fd)).max(1e-3);
            worst = worst.max(rel);
        }
    }
    outcome(
        worst < 1e-5,
        format!("worst relative error {worst:.2e} at 200 points (< 1e-5)"),
    )
}

fn over_rows(
    trace: &RunTrace,
    f: impl Fn(&tvprox::diagnostics::IterationMetrics) -> Option<f64>,
) -> (usize, f64) {
    let mut missing = 0;
    let mut worst = f64::NEG_INFINITY;
    for r in &trace.rows[1..] {
        match f(r) {
            Some(v) if !v.is_nan() => worst = worst.max(v),
            _ => missing += 1,
        }
    }
    (missing, worst)
}

fn mean_tracking(trace: &RunTrace) -> Outcome {
    let (missing, worst) = over_rows(trace, |r| r.checks.mean_tracking);
    outcome(
        missing == 0 && worst <= 1e-8,
        format!(
            "max deviation {worst:.2e} over {} iterations (<= 1e-8)",
            trace.iterations()
        ),
    )
}

fn error_bounds(trace: &RunTrace) -> Outcome {
    let (m_e, e_gap) = over_rows(trace, |r| Some(r.e_norm? - r.checks.e_bound?));
    let (m_eps, eps_gap) = over_rows(trace, |r| Some(r.eps? - r.checks.eps_bound?));
    let (m_in, excess) = over_rows(trace, |r| r.checks.inexact_excess);
    let passed = m_e + m_eps + m_in == 0 && e_gap <= 1e-10 && eps_gap <= 1e-10 && excess <= 1e-9;
    outcome(
        passed,
        format!(
            "max(|e|-bound) {e_gap:.2e}, max(eps-bound) {eps_gap:.2e} (slack 1e-10); max inexact-prox excess {excess:.2e} (slack 1e-9); {} unavailable",
            m_e + m_eps + m_in
        ),
    )
}

fn geometric_bound(trace: &RunTrace) -> Outcome {
    let (missing, worst) = over_rows(trace, |r| Some(r.max_consensus_gap - r.geo_bound?));
    let (_, v_worst) = over_rows(trace, |r| Some(r.checks.max_v_gap? - r.checks.v_geo_bound?));
    outcome(
        missing == 0 && worst <= 0.0 && v_worst <= 0.0,
        format!(
            "max(gap - bound) {worst:.3e} for x, {v_worst:.3e} for v, over {} iterations",
            trace.iterations()
        ),
    )
}

fn message_equivalence(trace: &RunTrace, schedule: &GraphSchedule) -> Outcome {
    let mut worst = 0.0_f64;
    for snap in &trace.snapshots {
        let (by_message, _) =
            gossip_rounds(&snap.q, schedule, slots_before(snap.k), snap.k).unwrap();
        let by_matrix = consensus_weights(schedule, snap.k)
            .unwrap()
            .mix(&snap.q)
            .unwrap();
        for (a, b) in by_message.iter().zip(&by_matrix) {
            worst = worst.max(norm_inf(&sub(a, b)));
        }
    }
    let short = common::fixture_run(20);
    let comm = short.comm_cumulative();
    outcome(
        worst <= 1e-9 && comm == 210 && trace.snapshots.len() == trace.iterations(),
        format!(
            "max |v_message - v_matrix| {worst:.2e} over {} iterations (<= 1e-9); communication steps after 20 iterations = {comm} (== 210)",
            trace.snapshots.len()
        ),
    )
}

fn convex_fixed_point() -> Outcome {
    let start = Instant::now();
    let (m, n) = (4, 3);
    let quads: Vec<Quadratic> = synthetic::random_quadratics(m, n, 41);
    let spec = RegularizerSpec::new(Regularizer::L1 { lambda1: 0.3 }, n).unwrap();
    let problem = Problem {
        objectives: quads
            .iter()
            .cloned()
            .map(LocalObjective::quadratic)
            .collect(),
        regularizer: spec,
    };

    // Centralized proximal gradient on (1/m) Σ g_i + h.
    let alpha = 0.9 / problem.lipschitz();
    let mut x = vec![0.0; n];
    let mut residual = f64::INFINITY;
    let mut steps = 0;
    while residual > 1e-10 && steps < 1_000_000 {
        let mut g = vec![0.0; n];
        for q in &quads {
            for (gj, d) in g.iter_mut().zip(q.gradient(&x).unwrap()) {
                *gj += d / m as f64;
            }
        }
        let y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - alpha * b).collect();
        let next = prox::prox(&spec, &y, alpha).unwrap();
        residual = dist(&next, &x) / alpha;
        x = next;
        steps += 1;
    }

    let schedule = GraphSchedule::seeded_random(m, 2, 43, 0.3).unwrap();
    let cfg = RunConfig {
        step: StepSize::Fixed(alpha),
        max_iter: 300,
        init: Init::Gaussian {
            scale: 1.0,
            seed: 44,
        },
        snapshot_every: 0,
        ..RunConfig::default()
    };
    let trace = run(&problem, &schedule, &cfg).unwrap();
    let err = norm_inf(&sub(&trace.last().x_bar, &x));
    let nonzero = x.iter().filter(|v| **v != 0.0).count();
    let secs = start.elapsed().as_secs_f64();
    outcome(
        err <= 1e-4 && residual <= 1e-10 && secs < 10.0,
        format!(
            "|x_bar - x*|_inf = {err:.2e} after {} iterations (<= 1e-4); x* has {nonzero} of {n} coordinates nonzero; reference residual {residual:.1e} in {steps} steps; {secs:.2} s (< 10 s)",
            trace.iterations()
        ),
    )
}

fn rate_check(trace: &RunTrace) -> Outcome {
    let s100 = trace.rate_statistic(100).unwrap().t_times_mean;
    let s200 = trace.rate_statistic(200).unwrap().t_times_mean;
    let r1 = trace.rows[1].residual_bound.unwrap();
    let r200 = trace.rows[200].residual_bound.unwrap();
    let passed =
        s200 <= 1.1 * s100 && !r1.partial && !r200.partial && r200.value <= 0.01 * r1.value;
    outcome(
        passed,
        format!(
            "T*stat: {s100:.6e} at T=100, {s200:.6e} at T=200 (ratio {:.4} <= 1.1); residual bound {:.3e} at k=1, {:.3e} at k=200 (ratio {:.2e} <= 1e-2)",
            s200 / s100,
            r1.value,
            r200.value,
            r200.value / r1.value
        ),
    )
}

fn classification_data() -> (Dataset, String) {
    if let Some(path) = common::a9a_path() {
        let file = File::open(&path).expect("readable dataset");
        let full = parse_libsvm(BufReader::new(file), Some(123)).expect("valid LIBSVM file");
        let sub = full.subsample(2000, 7).unwrap();
        return (
            sub,
            format!("{} (2000 of {} samples)", path.display(), full.len()),
        );
    }
    (
        synthetic::one_hot_classification(2000, 7),
        "synthetic 123-feature one-hot surrogate (no a9a file found; set A9A_PATH)".into(),
    )
}

fn classification_trend() -> Outcome {
    let start = Instant::now();
    let (data, source) = classification_data();
    let m = 10;
    let objectives = shard(&data, m, 8)
        .unwrap()
        .into_iter()
        .map(|s| LocalObjective::sigmoid(s).unwrap())
        .collect();
    let problem = Problem {
        objectives,
        regularizer: RegularizerSpec::new(
            Regularizer::ElasticNet {
                lambda1: 5e-4,
                lambda2: 5e-4,
            },
            data.n,
        )
        .unwrap(),
    };
    let schedule = random_periodic_schedule(m, 3, 9, 0.1).unwrap();
    let cfg = RunConfig {
        step: StepSize::Auto { safety: 0.9 },
        max_iter: 300,
        radius: Some(100.0),
        snapshot_every: 0,
        ..RunConfig::default()
    };
    let trace = run(&problem, &schedule, &cfg).unwrap();
    let last = trace.last();
    let r1 = trace.rows[1].residual_bound.unwrap();
    let rt = last.residual_bound.unwrap();
    let secs = start.elapsed().as_secs_f64();
    let passed = last.disagreement < 1e-6
        && !r1.partial
        && !rt.partial
        && rt.value <= 0.01 * r1.value
        && secs < 120.0;
    outcome(
        passed,
        format!(
            "data: {source}; D = {:.2e} (< 1e-6); residual bound {:.3e} -> {:.3e} (ratio {:.2e} <= 1e-2) over {} iterations; {secs:.1} s (< 120 s)",
            last.disagreement,
            r1.value,
            rt.value,
            rt.value / r1.value,
            trace.iterations()
        ),
    )
}

fn main() -> ExitCode {
    let fixture = common::fixture_run(200);
    let schedule = common::fixture_schedule();

    let results: Vec<(&str, Box<dyn FnOnce() -> Outcome>)> = vec![
        ("prox oracle equivalence", Box::new(prox_oracle_equivalence)),
        (
            "prox nonexpansiveness and subgradient inequalities",
            Box::new(prox_properties),
        ),
        ("gradient correctness", Box::new(gradient_correctness)),
        (
            "mean-tracking identity",
            Box::new(|| mean_tracking(&fixture)),
        ),
        (
            "error-sequence bounds and inexact prox membership",
            Box::new(|| error_bounds(&fixture)),
        ),
        (
            "geometric consensus bound",
            Box::new(|| geometric_bound(&fixture)),
        ),
        (
            "matrix/message consensus equivalence",
            Box::new(|| message_equivalence(&fixture, &schedule)),
        ),
        ("convex fixed point", Box::new(convex_fixed_point)),
        (
            "rate statistic and residual decay",
            Box::new(|| rate_check(&fixture)),
        ),
        (
            "classification consensus and residual trend",
            Box::new(classification_trend),
        ),
    ];

    let mut failures = 0;
    for (i, (name, check)) in results.into_iter().enumerate() {
        let o = check();
        if !o.passed {
            failures += 1;
        }
        println!(
            "acceptance {:>2} {}: {} -- {}",
            i + 1,
            if o.passed { "PASS" } else { "FAIL" },
            name,
            o.detail
        );
    }
    if failures == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} of 10 criteria FAILED");
        ExitCode::FAILURE
    }
}

mod common;

use tvprox::algorithm::{iterate, run, AgentState, Init, Problem, RunConfig, StepSize};
use tvprox::diagnostics::{disagreement_pairwise, Observer};
use tvprox::graph::{metropolis_weights, topology, AdjacencyMatrix, GraphSchedule};
use tvprox::linalg::{dist, norm, Matrix};
use tvprox::objective::{synthetic, LocalObjective, Quadratic};
use tvprox::prox::{Regularizer, RegularizerSpec};
use tvprox::simulator::replay_check;
use tvprox::Error;

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
fn solve(a: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.to_rows();
    let mut x = b.to_vec();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, p);
        x.swap(col, p);
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            x[r] -= f * x[col];
        }
    }
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (x[r] - s) / m[r][r];
    }
    x
}

/// Minimizer of `Σ ½(x − c_i)ᵀQ_i(x − c_i)`: `(Σ Q_i)⁻¹ Σ Q_i c_i`.
fn quadratic_minimizer(quads: &[Quadratic]) -> Vec<f64> {
    let n = quads[0].dim();
    let mut q_sum = Matrix::zeros(n, n);
    let mut rhs = vec![0.0; n];
    for q in quads {
        for i in 0..n {
            for j in 0..n {
                q_sum[(i, j)] += q.q[(i, j)];
            }
        }
        for (r, v) in rhs.iter_mut().zip(q.q.matvec(&q.center).unwrap()) {
            *r += v;
        }
    }
    solve(&q_sum, &rhs)
}

#[test]
fn zero_iterations_gives_the_initial_row() {
    let trace = common::fixture_run(0);
    assert_eq!(trace.rows.len(), 1);
    assert_eq!(trace.comm_cumulative(), 0);
    assert_eq!(trace.rows[0].dx_norm, None);
}

#[test]
fn three_iterations_use_six_slots() {
    let trace = common::fixture_run(3);
    let comm: Vec<usize> = trace.rows.iter().map(|r| r.comm_cumulative).collect();
    assert_eq!(comm, vec![0, 1, 3, 6]);
}

#[test]
fn smooth_fixture_reaches_closed_form_minimizer() {
    let quads =
        synthetic::random_quadratics(common::FIXTURE_M, common::FIXTURE_N, common::FIXTURE_SEED);
    let x_star = quadratic_minimizer(&quads);
    let problem = common::quadratic_problem(Regularizer::Zero);
    let trace = run(
        &problem,
        &common::fixture_schedule(),
        &common::fixture_config(200),
    )
    .unwrap();
    for s in &trace.final_states {
        assert!(dist(&s.x, &x_star) <= 1e-6, "{}", dist(&s.x, &x_star));
    }
}

#[test]
fn smooth_residual_bound_dominates_true_gradient_norm() {
    let problem = common::quadratic_problem(Regularizer::Zero);
    let trace = run(
        &problem,
        &common::fixture_schedule(),
        &common::fixture_config(60),
    )
    .unwrap();
    for r in &trace.rows[1..] {
        let mut g = vec![0.0; common::FIXTURE_N];
        for o in &problem.objectives {
            for (gj, d) in g.iter_mut().zip(o.gradient(&r.x_bar).unwrap()) {
                *gj += d / common::FIXTURE_M as f64;
            }
        }
        let bound = r.residual_bound.unwrap();
        assert!(!bound.partial);
        assert!(bound.value + 1e-12 >= norm(&g), "k = {}", r.k);
    }
}

#[test]
fn step_size_limit_enforced() {
    let problem = common::fixture_problem();
    let l = problem.lipschitz();
    let cfg = RunConfig {
        step: StepSize::Fixed(2.0 / l),
        ..common::fixture_config(5)
    };
    assert!(matches!(
        run(&problem, &common::fixture_schedule(), &cfg),
        Err(Error::StepSize { .. })
    ));
    let cfg = RunConfig {
        step: StepSize::Fixed(0.0),
        ..common::fixture_config(5)
    };
    assert!(run(&problem, &common::fixture_schedule(), &cfg).is_err());
}

#[test]
fn disconnected_schedule_rejected() {
    let problem = common::fixture_problem();
    // The last agent never communicates.
    let edges = topology::path(common::FIXTURE_M - 1);
    let a = metropolis_weights(&edges, common::FIXTURE_M).unwrap();
    let schedule = GraphSchedule::fixed(a);
    assert!(matches!(
        run(&problem, &schedule, &common::fixture_config(5)),
        Err(Error::InvalidSchedule(_))
    ));
}

#[test]
fn identical_runs_are_bitwise_identical() {
    let a = common::fixture_run(40);
    let b = common::fixture_run(40);
    assert_eq!(a, b);
    let mut ca = Vec::new();
    let mut cb = Vec::new();
    a.write_csv(&mut ca).unwrap();
    b.write_csv(&mut cb).unwrap();
    assert_eq!(ca, cb);
    let text = String::from_utf8(ca).unwrap();
    assert!(text.starts_with(
        "k,comm_cumulative,f_avg,D,dx_norm,e_norm,eps,residual_bound,max_consensus_gap,geo_bound,rate_T_times_stat\n"
    ));
    assert_eq!(text.lines().count(), 42);
}

#[test]
fn early_stop_on_residual_tolerance() {
    let cfg = RunConfig {
        tol: Some(1e-3),
        ..common::fixture_config(500)
    };
    let trace = run(
        &common::fixture_problem(),
        &common::fixture_schedule(),
        &cfg,
    )
    .unwrap();
    assert!(trace.stopped_early);
    assert!(trace.iterations() < 500);
    assert!(trace.last().residual_bound.unwrap().value < 1e-3);
}

#[test]
fn consensus_gap_shrinks_and_disagreement_forms_agree() {
    let trace = common::fixture_run(120);
    assert!(trace.last().max_consensus_gap < trace.rows[1].max_consensus_gap);
    assert!(trace.last().max_consensus_gap < 1e-8);

    let problem = common::fixture_problem();
    let schedule = common::fixture_schedule();
    let observer = Observer::new(
        &problem.objectives,
        &schedule,
        problem.regularizer,
        trace.alpha,
        trace.lipschitz,
        trace.radius,
    );
    let xs: Vec<Vec<f64>> = trace.initial.clone();
    let a = observer.reference_matrix(0).unwrap();
    let d = tvprox::diagnostics::disagreement(&xs, &a).unwrap();
    assert!((d - disagreement_pairwise(&xs, &a).unwrap()).abs() < 1e-10);
    assert!((d - trace.rows[0].disagreement).abs() < 1e-12);
}

#[test]
fn t_times_rate_statistic_levels_off() {
    let trace = common::fixture_run(200);
    let s: Vec<f64> = [50, 100, 200]
        .iter()
        .map(|&t| trace.rate_statistic(t).unwrap().t_times_mean)
        .collect();
    assert!(s[1] <= 1.1 * s[0]);
    assert!(s[2] <= 1.1 * s[1]);
    let means: Vec<f64> = [50, 100, 200]
        .iter()
        .map(|&t| trace.rate_statistic(t).unwrap().mean)
        .collect();
    assert!(means[0] > means[1] && means[1] > means[2]);
}

#[test]
fn replay_matches_and_detects_corruption() {
    let schedule = common::fixture_schedule();
    let mut trace = common::fixture_run(30);
    let report = replay_check(&trace, &schedule).unwrap();
    assert!(report.passed);
    assert_eq!(report.iterations_checked, 30);

    trace.snapshots[16].v[3][2] += 1e-3;
    let report = replay_check(&trace, &schedule).unwrap();
    assert!(!report.passed);
    assert_eq!(report.worst_iteration, Some(17));

    let empty = common::fixture_run(0);
    assert!(replay_check(&empty, &schedule).unwrap().passed);

    let cfg = RunConfig {
        snapshot_every: 0,
        ..common::fixture_config(3)
    };
    let bare = run(&common::fixture_problem(), &schedule, &cfg).unwrap();
    assert_eq!(replay_check(&bare, &schedule), Err(Error::MissingSnapshots));
}

#[test]
fn box_regularizer_marks_eps_unavailable() {
    let problem = common::quadratic_problem(Regularizer::Box { lo: -1.0, hi: 1.0 });
    let trace = run(
        &problem,
        &common::fixture_schedule(),
        &common::fixture_config(10),
    )
    .unwrap();
    for r in &trace.rows[1..] {
        assert_eq!(r.eps, None);
        assert!(r.residual_bound.unwrap().partial);
        assert!(r.x_bar.iter().all(|v| (-1.0..=1.0).contains(v)));
    }
}

#[test]
fn iterates_outside_declared_ball_invalidate_eps() {
    let cfg = RunConfig {
        radius: Some(0.5),
        ..common::fixture_config(10)
    };
    let problem = common::quadratic_problem(Regularizer::ElasticNet {
        lambda1: 0.01,
        lambda2: 0.01,
    });
    let trace = run(&problem, &common::fixture_schedule(), &cfg).unwrap();
    assert!(trace.rows[1..]
        .iter()
        .any(|r| !r.checks.in_ball && r.eps.is_none()));
}

#[test]
fn sigmoid_problem_with_l2_in_the_loss() {
    let data = synthetic::one_hot_classification(300, 5);
    let shards = tvprox::objective::shard(&data, 4, 6).unwrap();
    let objectives: Vec<LocalObjective> = shards
        .into_iter()
        .map(|s| LocalObjective::sigmoid(s).unwrap().with_l2(5e-4).unwrap())
        .collect();
    let problem = Problem {
        objectives,
        regularizer: RegularizerSpec::new(Regularizer::L1 { lambda1: 5e-4 }, data.n).unwrap(),
    };
    let schedule = GraphSchedule::seeded_random(4, 2, 3, 0.3).unwrap();
    let cfg = RunConfig {
        max_iter: 40,
        init: Init::Zeros,
        ..RunConfig::default()
    };
    let trace = run(&problem, &schedule, &cfg).unwrap();
    assert!(trace.last().f_avg < trace.rows[0].f_avg);
    assert!(trace.rows[1..]
        .iter()
        .all(|r| r.checks.inexact_excess.unwrap() <= 1e-9));
}

#[test]
fn iterate_preserves_a_common_fixed_point() {
    // g_i = ½‖x − c‖², h = |x|₁: x̂ = soft(c, 1) is fixed for any α.
    let c = vec![3.0, 0.2];
    let objectives = vec![LocalObjective::quadratic(Quadratic::isotropic(c)); 3];
    let spec = RegularizerSpec::new(Regularizer::L1 { lambda1: 1.0 }, 2).unwrap();
    let schedule = GraphSchedule::fixed(AdjacencyMatrix::uniform(3).unwrap());
    let states = vec![AgentState::at(vec![2.0, 0.0]); 3];
    let next = iterate(&states, &objectives, &schedule, &spec, 0.7, 4).unwrap();
    for s in next {
        assert!(dist(&s.x, &[2.0, 0.0]) < 1e-12);
    }
}

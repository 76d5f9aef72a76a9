use std::fmt;

use super::adjacency::{AdjacencyMatrix, GENERATED_TOL, USER_TOL};
use super::schedule::{GraphSchedule, ScheduleKind};
use crate::error::{Error, Result};

/// Outcome of checking a schedule's slot matrices and window connectivity
/// over `[0, horizon)`. Failure lists hold slot indices (window start slots
/// for connectivity).
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub horizon: usize,
    pub interval: usize,
    pub eta: f64,
    pub stochastic_failures: Vec<usize>,
    pub eta_failures: Vec<usize>,
    pub disconnected_windows: Vec<usize>,
    pub exhausted_at: Option<usize>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.stochastic_failures.is_empty()
            && self.eta_failures.is_empty()
            && self.disconnected_windows.is_empty()
            && self.exhausted_at.is_none()
    }
}

fn preview(v: &[usize]) -> String {
    let shown: Vec<String> = v.iter().take(8).map(ToString::to_string).collect();
    if v.len() > 8 {
        format!("{} ... ({} total)", shown.join(", "), v.len())
    } else {
        shown.join(", ")
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = |ok: bool| if ok { "pass" } else { "FAIL" };
        writeln!(
            f,
            "horizon = {}, B = {}, eta = {}",
            self.horizon, self.interval, self.eta
        )?;
        writeln!(
            f,
            "double stochasticity: {} {}",
            verdict(self.stochastic_failures.is_empty()),
            preview(&self.stochastic_failures)
        )?;
        writeln!(
            f,
            "eta floor: {} {}",
            verdict(self.eta_failures.is_empty()),
            preview(&self.eta_failures)
        )?;
        writeln!(
            f,
            "B-window connectivity: {} {}",
            verdict(self.disconnected_windows.is_empty()),
            preview(&self.disconnected_windows)
        )?;
        if let Some(t) = self.exhausted_at {
            writeln!(f, "schedule exhausted at slot {t}")?;
        }
        write!(
            f,
            "verdict: {}",
            if self.is_valid() { "VALID" } else { "INVALID" }
        )
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
            true
        } else {
            false
        }
    }
}

/// Checks every slot in `[0, horizon)` for double stochasticity and the
/// `eta` floor, and every window of `B` consecutive slots for a connected
/// union graph.
pub fn validate_schedule(schedule: &GraphSchedule, horizon: usize) -> Result<ValidationReport> {
    let b = schedule.interval();
    if horizon < b {
        return Err(Error::InvalidArgument(format!(
            "horizon {horizon} shorter than interval B = {b}"
        )));
    }
    let m = schedule.m();
    let tol = match schedule.kind() {
        ScheduleKind::Periodic { .. } => USER_TOL,
        _ => GENERATED_TOL,
    };
    // Periodic and static schedules repeat, so only distinct slots need the
    // per-matrix checks.
    let distinct = match schedule.kind() {
        ScheduleKind::Static(_) => 1,
        ScheduleKind::Periodic { matrices, .. } => matrices.len().min(horizon),
        ScheduleKind::SeededRandom { .. } => horizon,
    };
    let mut report = ValidationReport {
        horizon,
        interval: b,
        eta: schedule.eta(),
        stochastic_failures: Vec::new(),
        eta_failures: Vec::new(),
        disconnected_windows: Vec::new(),
        exhausted_at: None,
    };
    let mut slot_edges: Vec<Vec<(usize, usize)>> = Vec::with_capacity(distinct);
    let mut available = horizon;
    for t in 0..distinct {
        let a = match schedule.matrix(t) {
            Ok(a) => a,
            Err(Error::ScheduleExhausted { .. }) => {
                report.exhausted_at = Some(t);
                available = t;
                break;
            }
            Err(e) => return Err(e),
        };
        check_slot(&a, t, tol, schedule.eta(), &mut report);
        slot_edges.push(a.edges());
    }
    if let Some(len) = schedule.len() {
        if len < horizon && report.exhausted_at.is_none() {
            report.exhausted_at = Some(len);
            available = len;
        }
    }
    let edges_at = |t: usize| &slot_edges[t % distinct];
    if available >= b {
        for start in 0..=(available - b) {
            let mut uf = UnionFind::new(m);
            let mut components = m;
            for t in start..start + b {
                for &(i, j) in edges_at(t) {
                    if uf.union(i, j) {
                        components -= 1;
                    }
                }
            }
            if components > 1 {
                report.disconnected_windows.push(start);
            }
        }
    }
    Ok(report)
}

fn check_slot(a: &AdjacencyMatrix, t: usize, tol: f64, eta: f64, report: &mut ValidationReport) {
    if a.matrix().stochasticity_error() > tol {
        report.stochastic_failures.push(t);
    }
    if !a.respects_floor(eta) {
        report.eta_failures.push(t);
    }
}

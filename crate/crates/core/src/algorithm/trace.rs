use std::io::Write;

use super::AgentState;
use crate::diagnostics::{self, IterationMetrics, RateStatistic};
use crate::error::Result;

/// Column order of the per-iteration CSV trace.
pub const CSV_HEADER: [&str; 11] = [
    "k",
    "comm_cumulative",
    "f_avg",
    "D",
    "dx_norm",
    "e_norm",
    "eps",
    "residual_bound",
    "max_consensus_gap",
    "geo_bound",
    "rate_T_times_stat",
];

/// Post-gradient and post-consensus points of every agent at iteration `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub k: usize,
    pub q: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

/// Record of a run: one metrics row per iteration (row 0 is the initial
/// state), optional state snapshots, and the final agent states.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub alpha: f64,
    pub lipschitz: f64,
    pub radius: f64,
    pub m: usize,
    pub n: usize,
    pub rows: Vec<IterationMetrics>,
    pub snapshots: Vec<Snapshot>,
    pub initial: Vec<Vec<f64>>,
    pub final_states: Vec<AgentState>,
    pub stopped_early: bool,
}

fn field(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl RunTrace {
    /// Number of completed iterations.
    pub fn iterations(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn last(&self) -> &IterationMetrics {
        self.rows
            .last()
            .expect("a trace always holds the initial row")
    }

    pub fn comm_cumulative(&self) -> usize {
        self.last().comm_cumulative
    }

    pub fn x_bars(&self) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| r.x_bar.clone()).collect()
    }

    pub fn rate_statistic(&self, t: usize) -> Result<RateStatistic> {
        diagnostics::rate_statistic(&self.x_bars(), t)
    }

    /// Writes the CSV trace; unavailable metrics are empty fields. Floats
    /// use the shortest round-trip representation, so identical runs give
    /// identical bytes.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.k.to_string(),
                r.comm_cumulative.to_string(),
                r.f_avg.to_string(),
                r.disagreement.to_string(),
                field(r.dx_norm),
                field(r.e_norm),
                field(r.eps),
                field(r.residual_bound.map(|b| b.value)),
                r.max_consensus_gap.to_string(),
                field(r.geo_bound),
                r.rate_t_times_stat.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

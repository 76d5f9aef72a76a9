//! Message-level execution of the consensus stage.
//!
//! Each round is synchronous: every agent sends its current value to each
//! neighbour with positive weight in that slot, then all agents replace
//! their value with the weighted sum of their own value and the received
//! messages. Self-weights are local computation and are not logged as
//! messages.

use crate::algorithm::RunTrace;
use crate::error::{Error, Result};
use crate::graph::{slots_before, GraphSchedule};
use crate::linalg::check_dim;

/// A value sent from one agent to another in a given slot.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundMessage {
    pub from: usize,
    pub to: usize,
    pub slot: usize,
    pub payload: Vec<f64>,
}

/// Message accounting for one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SlotRecord {
    pub slot: usize,
    /// Directed off-diagonal transfers.
    pub messages: usize,
    /// Local self-weight applications.
    pub self_updates: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CommLog {
    pub slots: Vec<SlotRecord>,
    /// Floats sent by each agent.
    pub floats_sent: Vec<usize>,
}

impl CommLog {
    fn new(m: usize) -> Self {
        CommLog {
            slots: Vec::new(),
            floats_sent: vec![0; m],
        }
    }

    /// Log of `count` slots starting at `start` carrying `n`-vectors,
    /// without moving any data.
    pub fn for_slots(
        schedule: &GraphSchedule,
        start: usize,
        count: usize,
        n: usize,
    ) -> Result<Self> {
        let m = schedule.m();
        let mut log = CommLog::new(m);
        for slot in start..start + count {
            let a = schedule.matrix(slot)?;
            let mut messages = 0;
            for to in 0..m {
                for from in 0..m {
                    if from != to && a.weight(to, from) > 0.0 {
                        messages += 1;
                        log.floats_sent[from] += n;
                    }
                }
            }
            log.slots.push(SlotRecord {
                slot,
                messages,
                self_updates: m,
            });
        }
        Ok(log)
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn total_messages(&self) -> usize {
        self.slots.iter().map(|s| s.messages).sum()
    }

    pub fn extend(&mut self, other: CommLog) {
        if self.floats_sent.len() < other.floats_sent.len() {
            self.floats_sent.resize(other.floats_sent.len(), 0);
        }
        for (a, b) in self.floats_sent.iter_mut().zip(&other.floats_sent) {
            *a += b;
        }
        self.slots.extend(other.slots);
    }

    /// CSV with columns `slot, messages, cumulative_messages`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["slot", "messages", "cumulative_messages"])?;
        let mut total = 0;
        for s in &self.slots {
            total += s.messages;
            w.write_record([
                s.slot.to_string(),
                s.messages.to_string(),
                total.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Messages sent in one slot from the pre-round values `y`.
pub fn round_messages(
    y: &[Vec<f64>],
    schedule: &GraphSchedule,
    slot: usize,
) -> Result<Vec<RoundMessage>> {
    let a = schedule.matrix(slot)?;
    let m = schedule.m();
    let mut out = Vec::new();
    for from in 0..m {
        for to in 0..m {
            if from != to && a.weight(to, from) > 0.0 {
                out.push(RoundMessage {
                    from,
                    to,
                    slot,
                    payload: y[from].clone(),
                });
            }
        }
    }
    Ok(out)
}

/// Runs `rounds` synchronous gossip rounds over slots
/// `start_slot .. start_slot + rounds`.
pub fn gossip_rounds(
    q_all: &[Vec<f64>],
    schedule: &GraphSchedule,
    start_slot: usize,
    rounds: usize,
) -> Result<(Vec<Vec<f64>>, CommLog)> {
    if rounds == 0 {
        return Err(Error::InvalidArgument(
            "gossip needs at least one round".into(),
        ));
    }
    let m = schedule.m();
    check_dim(m, q_all.len())?;
    let n = q_all.first().map_or(0, Vec::len);
    let mut y = q_all.to_vec();
    let mut log = CommLog::new(m);
    for slot in start_slot..start_slot + rounds {
        let a = schedule.matrix(slot)?;
        let messages = round_messages(&y, schedule, slot)?;
        // Barrier: all sends above read the pre-round state.
        let mut next: Vec<Vec<f64>> = (0..m)
            .map(|i| y[i].iter().map(|v| a.weight(i, i) * v).collect())
            .collect();
        for msg in &messages {
            check_dim(n, msg.payload.len())?;
            let w = a.weight(msg.to, msg.from);
            for (acc, p) in next[msg.to].iter_mut().zip(&msg.payload) {
                *acc += w * p;
            }
            log.floats_sent[msg.from] += n;
        }
        log.slots.push(SlotRecord {
            slot,
            messages: messages.len(),
            self_updates: m,
        });
        y = next;
    }
    Ok((y, log))
}

/// Outcome of replaying a trace's consensus stages message by message.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayReport {
    pub iterations_checked: usize,
    pub max_deviation: f64,
    /// Iteration with the largest deviation.
    pub worst_iteration: Option<usize>,
    pub passed: bool,
}

pub const REPLAY_TOL: f64 = 1e-8;

/// Re-executes the consensus stage of every snapshotted iteration with
/// [`gossip_rounds`] and compares against the recorded `v`.
pub fn replay_check(trace: &RunTrace, schedule: &GraphSchedule) -> Result<ReplayReport> {
    if trace.iterations() > 0 && trace.snapshots.is_empty() {
        return Err(Error::MissingSnapshots);
    }
    let mut max_deviation = 0.0_f64;
    let mut worst_iteration = None;
    for snap in &trace.snapshots {
        let (v, _) = gossip_rounds(&snap.q, schedule, slots_before(snap.k), snap.k)?;
        check_dim(v.len(), snap.v.len())?;
        let dev = v
            .iter()
            .zip(&snap.v)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        if dev > max_deviation || dev.is_nan() || worst_iteration.is_none() {
            max_deviation = if dev.is_nan() {
                f64::INFINITY
            } else {
                dev.max(max_deviation)
            };
            worst_iteration = Some(snap.k);
        }
    }
    Ok(ReplayReport {
        iterations_checked: trace.snapshots.len(),
        max_deviation,
        worst_iteration,
        passed: max_deviation < REPLAY_TOL,
    })
}

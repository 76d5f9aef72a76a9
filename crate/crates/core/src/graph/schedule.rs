use std::borrow::Cow;
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::adjacency::{metropolis_weights, AdjacencyMatrix};
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// How a schedule produces `A(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleKind {
    /// The same matrix in every slot.
    Static(AdjacencyMatrix),
    /// `A(t) = matrices[t mod len]`, or `matrices[t]` with no wrap when
    /// `cyclic` is false (the schedule is then finite).
    Periodic {
        matrices: Vec<AdjacencyMatrix>,
        cyclic: bool,
    },
    /// Slots `t ≡ 0 (mod B)` carry Metropolis weights of a random spanning
    /// tree; the others carry Metropolis weights of an Erdős–Rényi graph
    /// with the given edge probability. Every slot is generated from
    /// `(seed, t)` alone.
    SeededRandom { seed: u64, edge_prob: f64 },
}

/// A time-varying sequence of adjacency matrices together with the weight
/// floor `eta` and connectivity interval `B` it is declared to satisfy.
#[derive(Debug)]
pub struct GraphSchedule {
    m: usize,
    eta: f64,
    interval: usize,
    kind: ScheduleKind,
    pub(crate) weights_cache: RwLock<HashMap<usize, Arc<Matrix>>>,
}

impl Clone for GraphSchedule {
    fn clone(&self) -> Self {
        GraphSchedule {
            m: self.m,
            eta: self.eta,
            interval: self.interval,
            kind: self.kind.clone(),
            weights_cache: RwLock::new(HashMap::new()),
        }
    }
}

impl PartialEq for GraphSchedule {
    fn eq(&self, other: &Self) -> bool {
        self.m == other.m
            && self.eta == other.eta
            && self.interval == other.interval
            && self.kind == other.kind
    }
}

impl GraphSchedule {
    fn build(m: usize, eta: f64, interval: usize, kind: ScheduleKind) -> Self {
        GraphSchedule {
            m,
            eta,
            interval,
            kind,
            weights_cache: RwLock::new(HashMap::new()),
        }
    }

    /// Time-invariant schedule; `B = 1` and `eta` is the matrix's smallest positive entry.
    pub fn fixed(a: AdjacencyMatrix) -> Self {
        Self::build(a.m(), a.eta(), 1, ScheduleKind::Static(a))
    }

    /// Cycles through `matrices`; `B` defaults to the period length.
    pub fn periodic(matrices: Vec<AdjacencyMatrix>) -> Result<Self> {
        Self::list(matrices, true)
    }

    /// Explicit finite or cyclic list.
    pub fn list(matrices: Vec<AdjacencyMatrix>, cyclic: bool) -> Result<Self> {
        let m = matrices
            .first()
            .ok_or_else(|| Error::InvalidArgument("schedule needs at least one matrix".into()))?
            .m();
        if let Some(bad) = matrices.iter().find(|a| a.m() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: bad.m(),
            });
        }
        let eta = matrices
            .iter()
            .map(AdjacencyMatrix::eta)
            .fold(1.0, f64::min);
        let interval = matrices.len();
        Ok(Self::build(
            m,
            eta,
            interval,
            ScheduleKind::Periodic { matrices, cyclic },
        ))
    }

    /// B-connected random schedule on `m` agents. The declared floor is
    /// `1/m`, which Metropolis weights always satisfy.
    pub fn seeded_random(m: usize, interval: usize, seed: u64, edge_prob: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument(
                "agent count must be positive".into(),
            ));
        }
        if interval == 0 {
            return Err(Error::InvalidArgument(
                "interval B must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&edge_prob) {
            return Err(Error::InvalidArgument(format!(
                "edge probability {edge_prob} outside [0, 1]"
            )));
        }
        Ok(Self::build(
            m,
            1.0 / m as f64,
            interval,
            ScheduleKind::SeededRandom { seed, edge_prob },
        ))
    }

    /// Overrides the declared weight floor.
    pub fn with_eta(mut self, eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "eta = {eta} outside (0, 1)"
            )));
        }
        self.eta = eta;
        Ok(self)
    }

    /// Overrides the declared connectivity interval `B`.
    pub fn with_interval(mut self, interval: usize) -> Result<Self> {
        if interval == 0 {
            return Err(Error::InvalidArgument(
                "interval B must be at least 1".into(),
            ));
        }
        self.interval = interval;
        Ok(self)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn interval(&self) -> usize {
        self.interval
    }

    pub fn kind(&self) -> &ScheduleKind {
        &self.kind
    }

    /// Number of slots available, `None` when unbounded.
    pub fn len(&self) -> Option<usize> {
        match &self.kind {
            ScheduleKind::Periodic {
                matrices,
                cyclic: false,
            } => Some(matrices.len()),
            _ => None,
        }
    }

    /// `A(t)`.
    pub fn matrix(&self, t: usize) -> Result<Cow<'_, AdjacencyMatrix>> {
        match &self.kind {
            ScheduleKind::Static(a) => Ok(Cow::Borrowed(a)),
            ScheduleKind::Periodic { matrices, cyclic } => {
                if *cyclic {
                    Ok(Cow::Borrowed(&matrices[t % matrices.len()]))
                } else {
                    matrices
                        .get(t)
                        .map(Cow::Borrowed)
                        .ok_or(Error::ScheduleExhausted {
                            slot: t,
                            len: matrices.len(),
                        })
                }
            }
            ScheduleKind::SeededRandom { seed, edge_prob } => {
                let edges = random_slot_edges(self.m, self.interval, *seed, *edge_prob, t);
                Ok(Cow::Owned(metropolis_weights(&edges, self.m)?))
            }
        }
    }
}

fn random_slot_edges(
    m: usize,
    interval: usize,
    seed: u64,
    edge_prob: f64,
    t: usize,
) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(t as u64);
    if t % interval == 0 {
        random_spanning_tree(m, &mut rng)
    } else {
        let mut edges = Vec::new();
        for i in 0..m {
            for j in (i + 1)..m {
                if rng.gen_bool(edge_prob) {
                    edges.push((i, j));
                }
            }
        }
        edges
    }
}

/// Random labelled tree: visit nodes in shuffled order and attach each one
/// to a uniformly chosen node already in the tree.
pub fn random_spanning_tree<R: Rng>(m: usize, rng: &mut R) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let mut edges = Vec::with_capacity(m.saturating_sub(1));
    for pos in 1..m {
        let parent = order[rng.gen_range(0..pos)];
        let child = order[pos];
        edges.push((parent.min(child), parent.max(child)));
    }
    edges
}

/// Edge sets of common fixed topologies on nodes `0..m`.
pub mod topology {
    pub fn complete(m: usize) -> Vec<(usize, usize)> {
        (0..m)
            .flat_map(|i| ((i + 1)..m).map(move |j| (i, j)))
            .collect()
    }

    pub fn path(m: usize) -> Vec<(usize, usize)> {
        (1..m).map(|i| (i - 1, i)).collect()
    }

    pub fn ring(m: usize) -> Vec<(usize, usize)> {
        let mut e = path(m);
        if m > 2 {
            e.push((0, m - 1));
        }
        e
    }

    pub fn star(m: usize) -> Vec<(usize, usize)> {
        (1..m).map(|i| (0, i)).collect()
    }

    /// The two perfect-ish matchings of the path `0-1-...-(m-1)`: edges
    /// `{2i, 2i+1}` and edges `{2i+1, 2i+2}`. Their union is the path.
    pub fn path_matchings(m: usize) -> [Vec<(usize, usize)>; 2] {
        let p = path(m);
        let even = p.iter().copied().filter(|(a, _)| a % 2 == 0).collect();
        let odd = p.iter().copied().filter(|(a, _)| a % 2 == 1).collect();
        [even, odd]
    }
}

/// Periodic schedule alternating between the two path matchings, with
/// Metropolis weights. Connected over every window of two slots.
pub fn alternating_path_schedule(m: usize) -> Result<GraphSchedule> {
    let [even, odd] = topology::path_matchings(m);
    GraphSchedule::periodic(vec![
        metropolis_weights(&even, m)?,
        metropolis_weights(&odd, m)?,
    ])
}

/// Random periodic schedule: the edges of one random spanning tree are
/// scattered over the `period` slots and each slot additionally receives
/// random edges with probability `edge_prob`. The union over a period is
/// connected, so `B = period`.
pub fn random_periodic_schedule(
    m: usize,
    period: usize,
    seed: u64,
    edge_prob: f64,
) -> Result<GraphSchedule> {
    if period == 0 {
        return Err(Error::InvalidArgument("period must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut slots: Vec<Vec<(usize, usize)>> = vec![Vec::new(); period];
    for e in random_spanning_tree(m, &mut rng) {
        slots[rng.gen_range(0..period)].push(e);
    }
    for slot in slots.iter_mut() {
        for i in 0..m {
            for j in (i + 1)..m {
                if rng.gen_bool(edge_prob) && !slot.contains(&(i, j)) {
                    slot.push((i, j));
                }
            }
        }
        slot.sort_unstable();
    }
    let mats = slots
        .iter()
        .map(|e| metropolis_weights(e, m))
        .collect::<Result<Vec<_>>>()?;
    GraphSchedule::periodic(mats)
}

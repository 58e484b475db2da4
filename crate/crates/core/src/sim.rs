//! Continuous-time Monte Carlo of the freshness process.
//!
//! Every rate in the network is an independent Poisson clock. Their
//! superposition is simulated as one exponential clock of total rate `R`
//! followed by a categorical draw of which clock fired.
//!
//! Transitions act on the per-node freshness bits as follows:
//!
//! * source self-update: every node becomes stale (bit 0);
//! * source -> `j`: node `j` becomes fresh;
//! * gossip `i -> j`: `bit_j = max(bit_i, bit_j)`.
//!
//! Bits are right-continuous: the value set by an event holds until the next
//! one, so time is credited to the accumulators before each flip.
//!
//! Randomness comes from ChaCha8 seeded with the 64-bit run seed; replication
//! `r` reads stream `r` of that generator, so results do not depend on the
//! order in which replications execute.

use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::network::{GossipNetwork, NodeId, NodeSet};

pub type SimRng = ChaCha8Rng;

/// Generator for replication `replication` of a run seeded with `seed`.
pub fn replication_rng(seed: u64, replication: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replication);
    rng
}

// Uniform on [0, 1) with 53 random bits.
fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Transition {
    SourceSelf,
    SourceToNode(NodeId),
    Gossip { from: NodeId, to: NodeId },
}

/// Cumulative rate table over every positive-rate transition.
#[derive(Debug, Clone)]
pub struct EventTable {
    cumulative: Vec<f64>,
    transitions: Vec<Transition>,
}

impl EventTable {
    pub fn new(net: &GossipNetwork) -> Result<Self> {
        let mut cumulative = Vec::new();
        let mut transitions = Vec::new();
        let mut total = 0.0;
        let mut push = |rate: f64, t: Transition| {
            if rate > 0.0 {
                total += rate;
                cumulative.push(total);
                transitions.push(t);
            }
        };
        push(net.lambda_e(), Transition::SourceSelf);
        for (j, &rate) in net.source_rates().iter().enumerate() {
            push(rate, Transition::SourceToNode(NodeId(j)));
        }
        for i in 0..net.node_count() {
            for &(j, rate) in net.out_edges(NodeId(i)) {
                push(
                    rate,
                    Transition::Gossip {
                        from: NodeId(i),
                        to: NodeId(j),
                    },
                );
            }
        }
        if transitions.is_empty() {
            return Err(Error::ZeroEventRate);
        }
        Ok(EventTable {
            cumulative,
            transitions,
        })
    }

    /// Sum of all transition rates.
    pub fn total_rate(&self) -> f64 {
        *self.cumulative.last().expect("table is never empty")
    }

    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    /// Transitions with their individual rates.
    pub fn transitions(&self) -> impl Iterator<Item = (Transition, f64)> + '_ {
        self.transitions.iter().enumerate().map(|(at, &t)| {
            let below = if at == 0 {
                0.0
            } else {
                self.cumulative[at - 1]
            };
            (t, self.cumulative[at] - below)
        })
    }

    /// Time to the next event and the transition that fires.
    pub fn next_event(&self, rng: &mut impl RngCore) -> (f64, Transition) {
        let total = self.total_rate();
        let dwell = -libm::log(1.0 - uniform(rng)) / total;
        let target = uniform(rng) * total;
        let at = self
            .cumulative
            .partition_point(|&c| c <= target)
            .min(self.transitions.len() - 1);
        (dwell, self.transitions[at])
    }
}

/// Freshness bits, clock and time-integrals of one replication.
#[derive(Debug, Clone)]
pub struct SimState {
    bits: Vec<bool>,
    clock: f64,
    measure_from: f64,
    accumulators: Vec<f64>,
    tracked: Option<NodeSet>,
    tracked_accumulator: f64,
    events: u64,
}

impl SimState {
    /// All nodes stale at time 0; time before `measure_from` is not credited.
    pub fn new(n: usize, measure_from: f64) -> Self {
        SimState {
            bits: vec![false; n],
            clock: 0.0,
            measure_from,
            accumulators: vec![0.0; n],
            tracked: None,
            tracked_accumulator: 0.0,
            events: 0,
        }
    }

    /// Also integrates the freshness of `set` (fresh when any member is).
    pub fn tracking(mut self, set: NodeSet) -> Self {
        self.tracked = Some(set);
        self
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn set_bits(&mut self, bits: &[bool]) {
        self.bits.copy_from_slice(bits);
    }

    pub fn clock(&self) -> f64 {
        self.clock
    }

    pub fn accumulators(&self) -> &[f64] {
        &self.accumulators
    }

    pub fn tracked_accumulator(&self) -> f64 {
        self.tracked_accumulator
    }

    pub fn events(&self) -> u64 {
        self.events
    }

    fn set_is_fresh(&self, set: NodeSet) -> bool {
        set.iter().any(|j| self.bits[j])
    }

    /// Lets `dwell` time pass with the current bits.
    pub fn advance(&mut self, dwell: f64) {
        let end = self.clock + dwell;
        let credited = end - self.clock.max(self.measure_from);
        if credited > 0.0 {
            for (acc, &bit) in self.accumulators.iter_mut().zip(&self.bits) {
                if bit {
                    *acc += credited;
                }
            }
            if let Some(set) = self.tracked {
                if self.set_is_fresh(set) {
                    self.tracked_accumulator += credited;
                }
            }
        }
        self.clock = end;
    }

    pub fn apply(&mut self, transition: Transition) {
        match transition {
            Transition::SourceSelf => self.bits.iter_mut().for_each(|b| *b = false),
            Transition::SourceToNode(j) => self.bits[j.0] = true,
            Transition::Gossip { from, to } => {
                self.bits[to.0] = self.bits[to.0] || self.bits[from.0];
            }
        }
        self.events += 1;
    }

    /// Advance by `dwell`, then fire `transition`.
    pub fn step(&mut self, dwell: f64, transition: Transition) {
        self.advance(dwell);
        self.apply(transition);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub horizon: f64,
    /// Initial stretch excluded from the averages.
    pub warmup: f64,
    pub replications: usize,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.warmup.is_finite() && self.warmup >= 0.0) {
            return Err(Error::InvalidParameter(
                "warmup must be finite and nonnegative",
            ));
        }
        if !(self.horizon.is_finite() && self.horizon > self.warmup) {
            return Err(Error::InvalidParameter("horizon must exceed warmup"));
        }
        if self.replications == 0 {
            return Err(Error::InvalidParameter(
                "at least one replication is needed",
            ));
        }
        Ok(())
    }

    pub fn window(&self) -> f64 {
        self.horizon - self.warmup
    }
}

/// Time-averaged freshness from one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationOutcome {
    pub node_means: Vec<f64>,
    pub set_mean: Option<f64>,
    pub events: u64,
}

/// Runs replication `replication` of `cfg`, optionally tracking `set`.
pub fn run_replication(
    net: &GossipNetwork,
    table: &EventTable,
    cfg: &SimConfig,
    replication: u64,
    set: Option<NodeSet>,
) -> ReplicationOutcome {
    let mut rng = replication_rng(cfg.seed, replication);
    let mut state = SimState::new(net.node_count(), cfg.warmup);
    if let Some(set) = set {
        state = state.tracking(set);
    }
    loop {
        let (dwell, transition) = table.next_event(&mut rng);
        if state.clock() + dwell >= cfg.horizon {
            state.advance(cfg.horizon - state.clock());
            break;
        }
        state.step(dwell, transition);
    }
    let window = cfg.window();
    ReplicationOutcome {
        node_means: state.accumulators().iter().map(|a| a / window).collect(),
        set_mean: set.map(|_| state.tracked_accumulator() / window),
        events: state.events(),
    }
}

/// Mean freshness across replications with its standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct SimEstimate {
    pub means: Vec<f64>,
    /// Sample standard deviation over `sqrt(replications)`; absent for a
    /// single replication.
    pub std_errors: Option<Vec<f64>>,
    pub replications: usize,
}

impl SimEstimate {
    /// Aggregates per-replication values, `samples[r][j]` for entry `j`.
    /// Samples are combined in the order given.
    pub fn from_replications(samples: &[Vec<f64>]) -> Self {
        let reps = samples.len();
        assert!(reps > 0, "no replications to aggregate");
        let width = samples[0].len();
        let mut means = vec![0.0; width];
        for row in samples {
            for (m, x) in means.iter_mut().zip(row) {
                *m += x;
            }
        }
        means.iter_mut().for_each(|m| *m /= reps as f64);
        let std_errors = (reps >= 2).then(|| {
            (0..width)
                .map(|j| {
                    let ss: f64 = samples
                        .iter()
                        .map(|row| {
                            let d = row[j] - means[j];
                            d * d
                        })
                        .sum();
                    libm::sqrt(ss / (reps - 1) as f64) / libm::sqrt(reps as f64)
                })
                .collect()
        });
        SimEstimate {
            means,
            std_errors,
            replications: reps,
        }
    }

    pub fn std_error(&self, entry: usize) -> Option<f64> {
        self.std_errors.as_ref().map(|se| se[entry])
    }
}

/// Per-node freshness estimates.
pub fn simulate(net: &GossipNetwork, cfg: &SimConfig) -> Result<SimEstimate> {
    cfg.validate()?;
    let table = EventTable::new(net)?;
    let samples: Vec<Vec<f64>> = (0..cfg.replications as u64)
        .map(|r| run_replication(net, &table, cfg, r, None).node_means)
        .collect();
    Ok(SimEstimate::from_replications(&samples))
}

/// Freshness estimate of `set`, as a single-entry [`SimEstimate`].
pub fn simulate_set(net: &GossipNetwork, set: NodeSet, cfg: &SimConfig) -> Result<SimEstimate> {
    cfg.validate()?;
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = net.node_count();
    if let Some(node) = set.max_member().filter(|&m| m >= n) {
        return Err(Error::NodeOutOfRange { node, n });
    }
    let table = EventTable::new(net)?;
    let samples: Vec<Vec<f64>> = (0..cfg.replications as u64)
        .map(|r| {
            let out = run_replication(net, &table, cfg, r, Some(set));
            vec![out.set_mean.expect("set tracked")]
        })
        .collect();
    Ok(SimEstimate::from_replications(&samples))
}

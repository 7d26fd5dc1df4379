//! Gossip-based embedding: random initial placement, then repeated sweeps in which
//! every user picks a swap candidate and the two exchange slots when that lowers their
//! combined local cost.
//!
//! The local cost of user `i` sitting in slot `x` is `Σ_{k ∈ N_i} s_ik · d(x, slot(k))`
//! where `d` is either the identifier distance or the greedy hop count. A swap of `i` and
//! `j` happens only when `C_i + C_j` strictly drops, everyone else held in place.

use std::cell::Cell;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{SocialGraph, StrengthMode, StrengthProvider, StrengthTable};
use crate::metrics::{snapshot_metrics, IterationReport, MetricsConfig};
use crate::overlay::{build_ring, DistanceMode, IdMode, Placement, Ring};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Scheme {
    /// Any other user, uniformly.
    Random,
    /// A finger of a uniformly chosen friend.
    #[default]
    Direct,
    /// A finger of the strongest friend.
    Greedy,
    /// A finger of a friend drawn from the `smart_width` strongest.
    Smart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CostMetric {
    #[default]
    RingDistance,
    HopCount,
}

/// Order in which users initiate gossip within a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ExecutionOrder {
    /// Fresh random permutation every sweep.
    #[default]
    RandomOrder,
    DescendingDegree,
    AscendingDegree,
}

/// What one iteration means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum IterationUnit {
    /// Every user initiates exactly one attempt.
    #[default]
    Sweep,
    /// A single gossip attempt.
    Attempt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GossipConfig {
    pub scheme: Scheme,
    pub metric: CostMetric,
    pub distance: DistanceMode,
    pub ordering: ExecutionOrder,
    pub iterations: usize,
    pub seed: u64,
    pub smart_width: usize,
    pub strength_mode: StrengthMode,
    pub unit: IterationUnit,
    /// Snapshot metrics are evaluated on iterations divisible by this, and on the last.
    pub metrics_every: usize,
    pub metrics: MetricsConfig,
}

impl Default for GossipConfig {
    fn default() -> Self {
        GossipConfig {
            scheme: Scheme::Direct,
            metric: CostMetric::RingDistance,
            distance: DistanceMode::Circular,
            ordering: ExecutionOrder::RandomOrder,
            iterations: 500,
            seed: 0,
            smart_width: 5,
            strength_mode: StrengthMode::CommonNeighbors,
            unit: IterationUnit::Sweep,
            metrics_every: 1,
            metrics: MetricsConfig::default(),
        }
    }
}

impl GossipConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::Config("iterations must be at least 1".into()));
        }
        if self.smart_width == 0 {
            return Err(Error::Config("smart_width must be at least 1".into()));
        }
        if self.metrics_every == 0 {
            return Err(Error::Config("metrics_every must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of one swap evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapDecision<T> {
    pub initiator: usize,
    pub candidate: usize,
    pub cost_before: T,
    pub cost_after: T,
    pub swapped: bool,
}

/// Derived RNG streams of one seed.
const RING_STREAM: u64 = 1;
const PLACEMENT_STREAM: u64 = 2;
const GOSSIP_STREAM: u64 = 3;

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Uniform index below `len`; consumes no randomness when there is a single choice.
fn pick<R: Rng>(rng: &mut R, len: usize) -> usize {
    if len == 1 {
        0
    } else {
        rng.random_range(0..len)
    }
}

pub struct EngineState<T> {
    graph: Arc<SocialGraph>,
    ring: Arc<Ring<T>>,
    placement: Placement,
    config: GossipConfig,
    strengths: StrengthTable<T>,
    /// Neighbours by descending strength, for the Greedy and Smart schemes.
    ranked: Vec<Vec<u32>>,
    order: Vec<u32>,
    cursor: usize,
    rng: ChaCha8Rng,
    swaps: u64,
    attempts: u64,
    moved: Vec<bool>,
    movers: usize,
    iteration: usize,
    route_evaluations: Cell<u64>,
}

impl<T: Scalar> EngineState<T> {
    /// Builds a ring of `graph.node_count()` slots with `k` long links and places users by
    /// a uniform random permutation. Ring, placement and gossip draws use separate streams
    /// of `config.seed`, so configurations differing only in scheme or ordering start from
    /// the same overlay.
    pub fn initialize(
        graph: Arc<SocialGraph>,
        k: usize,
        id_mode: IdMode,
        config: GossipConfig,
        strengths: &StrengthProvider<T>,
    ) -> Result<Self> {
        let ring = build_ring(graph.node_count(), k, stream_seed(config.seed, RING_STREAM), id_mode)?;
        let placement = Placement::random(graph.node_count(), &mut stream(config.seed, PLACEMENT_STREAM));
        Self::with_parts(graph, Arc::new(ring), placement, config, strengths)
    }

    /// Starts from an explicit ring and placement.
    pub fn with_parts(
        graph: Arc<SocialGraph>,
        ring: Arc<Ring<T>>,
        placement: Placement,
        config: GossipConfig,
        strengths: &StrengthProvider<T>,
    ) -> Result<Self> {
        config.validate()?;
        let n = graph.node_count();
        if ring.len() != n || placement.len() != n {
            return Err(Error::InvalidPlacement(format!(
                "{} users, {} slots, placement of {}",
                n,
                ring.len(),
                placement.len()
            )));
        }
        if strengths.mode() != config.strength_mode {
            return Err(Error::Config(format!(
                "strength provider is {:?} but config asks for {:?}",
                strengths.mode(),
                config.strength_mode
            )));
        }
        let table = StrengthTable::build(&graph, strengths)?;
        let ranked = match config.scheme {
            Scheme::Greedy | Scheme::Smart => (0..n)
                .map(|i| table.ranked_neighbors(&graph, i).into_iter().map(|j| j as u32).collect())
                .collect(),
            Scheme::Random | Scheme::Direct => Vec::new(),
        };
        let mut order: Vec<u32> = (0..n as u32).collect();
        match config.ordering {
            ExecutionOrder::RandomOrder => {}
            ExecutionOrder::DescendingDegree => {
                order.sort_by_key(|&u| (std::cmp::Reverse(graph.degree(u as usize)), u))
            }
            ExecutionOrder::AscendingDegree => order.sort_by_key(|&u| (graph.degree(u as usize), u)),
        }
        let rng = stream(config.seed, GOSSIP_STREAM);
        Ok(EngineState {
            graph,
            ring,
            placement,
            strengths: table,
            ranked,
            order,
            cursor: 0,
            rng,
            swaps: 0,
            attempts: 0,
            moved: vec![false; n],
            movers: 0,
            iteration: 0,
            route_evaluations: Cell::new(0),
            config,
        })
    }

    pub fn graph(&self) -> &SocialGraph {
        &self.graph
    }

    pub fn ring(&self) -> &Ring<T> {
        &self.ring
    }

    pub fn placement(&self) -> &Placement {
        &self.placement
    }

    pub fn config(&self) -> &GossipConfig {
        &self.config
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn cumulative_swaps(&self) -> u64 {
        self.swaps
    }

    pub fn cumulative_attempts(&self) -> u64 {
        self.attempts
    }

    /// Greedy routes computed by hop-count cost evaluations so far.
    pub fn route_evaluations(&self) -> u64 {
        self.route_evaluations.get()
    }

    /// Users in the order they initiate gossip under a degree ordering; for the random
    /// order, the permutation of the most recent sweep.
    pub fn initiator_order(&self) -> impl Iterator<Item = usize> + '_ {
        self.order.iter().map(|&u| u as usize)
    }

    fn distance(&self, from_slot: usize, to_slot: usize) -> T {
        match self.config.metric {
            CostMetric::RingDistance => self
                .config
                .distance
                .distance(self.ring.id(from_slot), self.ring.id(to_slot)),
            CostMetric::HopCount => {
                self.route_evaluations.set(self.route_evaluations.get() + 1);
                T::of_usize(self.ring.route_hops(from_slot, to_slot))
            }
        }
    }

    /// Cost of user `i` sitting in `at_slot`, with `moved = Some((user, slot))` placing one
    /// other user hypothetically.
    fn cost_with(&self, i: usize, at_slot: usize, moved: Option<(usize, usize)>) -> T {
        let mut cost = T::zero();
        for (&j, &s) in self.graph.neighbors(i).iter().zip(self.strengths.of(i)) {
            if s == T::zero() {
                continue;
            }
            let j = j as usize;
            let slot = match moved {
                Some((user, slot)) if user == j => slot,
                _ => self.placement.slot_of(j),
            };
            cost = cost + s * self.distance(at_slot, slot);
        }
        cost
    }

    /// `C_i` for user `i` placed at `at_slot`, all other users where they are.
    pub fn node_cost(&self, i: usize, at_slot: usize) -> T {
        self.cost_with(i, at_slot, None)
    }

    /// Sum of every user's local cost under the current placement.
    pub fn total_cost(&self) -> T {
        (0..self.graph.node_count())
            .map(|i| self.node_cost(i, self.placement.slot_of(i)))
            .fold(T::zero(), |a, b| a + b)
    }

    /// Picks a swap candidate for `i` under the configured scheme.
    pub fn select_peer(&mut self, i: usize) -> Option<usize> {
        let n = self.graph.node_count();
        if self.config.scheme == Scheme::Random {
            if n < 2 {
                return None;
            }
            let j = self.rng.random_range(0..n - 1);
            return Some(if j >= i { j + 1 } else { j });
        }
        let friends = self.graph.neighbors(i);
        if friends.is_empty() {
            return None;
        }
        let intermediary = match self.config.scheme {
            Scheme::Direct => friends[pick(&mut self.rng, friends.len())],
            Scheme::Greedy => self.ranked[i][0],
            Scheme::Smart => {
                let width = self.config.smart_width.min(friends.len());
                self.ranked[i][pick(&mut self.rng, width)]
            }
            Scheme::Random => unreachable!(),
        } as usize;
        let slot = self.placement.slot_of(intermediary);
        let candidates: Vec<usize> = self
            .ring
            .fingers(slot)
            .map(|f| self.placement.user_at(f))
            .filter(|&u| u != i)
            .collect();
        if candidates.is_empty() {
            return None;
        }
        Some(candidates[pick(&mut self.rng, candidates.len())])
    }

    /// Compares `C_i + C_j` before and after exchanging the slots of `i` and `j` and
    /// performs the exchange when the cost strictly decreases.
    pub fn evaluate_swap(&mut self, i: usize, j: usize) -> Result<SwapDecision<T>> {
        let n = self.graph.node_count();
        if i >= n {
            return Err(Error::UnknownUser(i));
        }
        if j >= n {
            return Err(Error::UnknownUser(j));
        }
        if i == j {
            return Err(Error::SelfPair(i));
        }
        let (si, sj) = (self.placement.slot_of(i), self.placement.slot_of(j));
        let cost_before = self.cost_with(i, si, None) + self.cost_with(j, sj, None);
        let cost_after = self.cost_with(i, sj, Some((j, si))) + self.cost_with(j, si, Some((i, sj)));
        let swapped = cost_before > cost_after;
        if swapped {
            self.placement.swap_users(i, j)?;
            self.swaps += 1;
            for u in [i, j] {
                if !std::mem::replace(&mut self.moved[u], true) {
                    self.movers += 1;
                }
            }
        }
        Ok(SwapDecision {
            initiator: i,
            candidate: j,
            cost_before,
            cost_after,
            swapped,
        })
    }

    fn attempt(&mut self, i: usize, on_decision: &mut impl FnMut(&SwapDecision<T>)) {
        self.attempts += 1;
        if let Some(j) = self.select_peer(i) {
            let decision = self.evaluate_swap(i, j).expect("candidate differs from initiator");
            on_decision(&decision);
        }
    }

    /// Runs one iteration and reports it.
    pub fn run_iteration(&mut self) -> IterationReport {
        self.run_iteration_with(|_| {})
    }

    /// Like [`EngineState::run_iteration`], handing every swap evaluation to `on_decision`.
    pub fn run_iteration_with(&mut self, mut on_decision: impl FnMut(&SwapDecision<T>)) -> IterationReport {
        let (swaps0, attempts0) = (self.swaps, self.attempts);
        match self.config.unit {
            IterationUnit::Sweep => {
                if self.config.ordering == ExecutionOrder::RandomOrder {
                    self.order.shuffle(&mut self.rng);
                }
                for idx in 0..self.order.len() {
                    let i = self.order[idx] as usize;
                    self.attempt(i, &mut on_decision);
                }
            }
            IterationUnit::Attempt => {
                if self.cursor == 0 && self.config.ordering == ExecutionOrder::RandomOrder {
                    self.order.shuffle(&mut self.rng);
                }
                let i = self.order[self.cursor] as usize;
                self.cursor = (self.cursor + 1) % self.order.len();
                self.attempt(i, &mut on_decision);
            }
        }
        self.iteration += 1;
        let evaluate = self.iteration.is_multiple_of(self.config.metrics_every) || self.iteration == self.config.iterations;
        self.report(self.swaps - swaps0, self.attempts - attempts0, evaluate)
    }

    /// Iteration-0 row describing the current snapshot before any gossip.
    pub fn baseline_report(&self) -> IterationReport {
        self.report(0, 0, true)
    }

    fn report(&self, swaps: u64, attempts: u64, with_metrics: bool) -> IterationReport {
        IterationReport {
            iteration: self.iteration,
            swaps_this_iter: swaps,
            attempts_this_iter: attempts,
            cumulative_swaps: self.swaps,
            cumulative_attempts: self.attempts,
            movers_fraction: self.movers as f64 / self.graph.node_count().max(1) as f64,
            metrics: with_metrics
                .then(|| snapshot_metrics(&self.graph, &self.ring, &self.placement, &self.config.metrics)),
        }
    }

    /// Runs `config.iterations` iterations, one report each.
    pub fn run(&mut self) -> Vec<IterationReport> {
        let total = self.config.iterations;
        let mut reports = Vec::with_capacity(total);
        while self.iteration < total {
            let report = self.run_iteration();
            if let Some(lat) = report.avg_friend_latency() {
                log::debug!(
                    "iteration {}: latency {:.4}, swaps {}/{}",
                    report.iteration,
                    lat,
                    report.swaps_this_iter,
                    report.attempts_this_iter
                );
            }
            reports.push(report);
        }
        if self.config.metric == CostMetric::HopCount {
            log::info!("hop-count cost evaluated {} greedy routes", self.route_evaluations());
        }
        reports
    }
}

fn stream_seed(seed: u64, id: u64) -> u64 {
    stream(seed, id).random()
}

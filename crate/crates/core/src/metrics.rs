//! Evaluation metrics over a (graph, ring, placement) snapshot: friend lookup latency,
//! migration cost and the two reliability measures.
//!
//! Hop counts are summed as integers and per-user fractions are collected in user order
//! before a sequential sum, so results do not depend on the rayon thread count.

use std::io::Write;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::SocialGraph;
use crate::overlay::{Placement, Ring};
use crate::scalar::Scalar;

/// How "within i hops in the overlay" is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum HopMode {
    /// Hop count of the greedy lookup from the user's slot.
    #[default]
    GreedyRoute,
    /// Shortest path over outgoing fingers.
    Bfs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsConfig {
    /// Largest number of directed friend pairs routed exhaustively for latency.
    pub sample_cap: usize,
    pub sample_seed: u64,
    /// Hop thresholds `1..=max_hops` for the i-hop reliability.
    pub max_hops: usize,
    pub hop_mode: HopMode,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            sample_cap: 200_000,
            sample_seed: 0,
            max_hops: 3,
            hop_mode: HopMode::GreedyRoute,
        }
    }
}

/// Mean over users with at least one friend, plus the degree-weighted mean.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct UserMean {
    pub mean: f64,
    pub degree_weighted: f64,
}

/// Mean greedy hop count over friend pairs, routing both directions of every sampled
/// edge. `None` for an edgeless graph.
pub fn avg_friend_latency<T: Scalar>(
    g: &SocialGraph,
    ring: &Ring<T>,
    placement: &Placement,
    sample_cap: usize,
    seed: u64,
) -> Option<f64> {
    let m = g.edge_count();
    if m == 0 {
        return None;
    }
    if 2 * m <= sample_cap {
        let total: u64 = (0..g.node_count())
            .into_par_iter()
            .map(|i| {
                let from = placement.slot_of(i);
                g.neighbors(i)
                    .iter()
                    .map(|&j| ring.route_hops(from, placement.slot_of(j as usize)) as u64)
                    .sum::<u64>()
            })
            .sum();
        return Some(total as f64 / (2 * m) as f64);
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = sample(&mut rng, m, (sample_cap / 2).max(1));
    let picked: Vec<usize> = picked.into_iter().collect();
    let total: u64 = picked
        .par_iter()
        .map(|&e| {
            let (a, b) = edges[e];
            let (sa, sb) = (placement.slot_of(a), placement.slot_of(b));
            (ring.route_hops(sa, sb) + ring.route_hops(sb, sa)) as u64
        })
        .sum();
    Some(total as f64 / (2 * picked.len()) as f64)
}

/// Cumulative swaps over cumulative attempts; `None` before any attempt.
pub fn migration_cost(swaps: u64, attempts: u64) -> Option<f64> {
    (attempts > 0).then(|| swaps as f64 / attempts as f64)
}

/// Fraction of each user's fingers (successor, predecessor, long links) occupied by
/// friends, averaged over users with at least one friend.
pub fn reliability_finger<T: Scalar>(g: &SocialGraph, ring: &Ring<T>, placement: &Placement) -> UserMean {
    let per_user: Vec<Option<(f64, usize)>> = (0..g.node_count())
        .into_par_iter()
        .map(|u| {
            let degree = g.degree(u);
            if degree == 0 {
                return None;
            }
            let slot = placement.slot_of(u);
            let friends = ring
                .fingers(slot)
                .filter(|&f| g.has_edge(u, placement.user_at(f)))
                .count();
            Some((friends as f64 / ring.finger_count(slot) as f64, degree))
        })
        .collect();
    user_mean(&per_user)
}

/// For each `i` in `1..=max_hops`, the fraction of a user's friends reachable within `i`
/// overlay hops, averaged over users with at least one friend. Non-decreasing in `i`.
pub fn reliability_ihop<T: Scalar>(
    g: &SocialGraph,
    ring: &Ring<T>,
    placement: &Placement,
    max_hops: usize,
    mode: HopMode,
) -> Vec<UserMean> {
    let per_user: Vec<Option<(Vec<usize>, usize)>> = (0..g.node_count())
        .into_par_iter()
        .map(|u| {
            let degree = g.degree(u);
            if degree == 0 {
                return None;
            }
            let from = placement.slot_of(u);
            let mut within = vec![0usize; max_hops + 1];
            for &f in g.neighbors(u) {
                let to = placement.slot_of(f as usize);
                let hops = match mode {
                    HopMode::GreedyRoute => Some(ring.route_hops(from, to)),
                    HopMode::Bfs => ring.bfs_hops_within(from, to, max_hops),
                };
                if let Some(h) = hops.filter(|&h| h <= max_hops) {
                    within[h] += 1;
                }
            }
            // prefix sums: within[i] = friends at <= i hops
            for i in 1..=max_hops {
                within[i] += within[i - 1];
            }
            Some((within, degree))
        })
        .collect();
    (1..=max_hops)
        .map(|i| {
            let fractions: Vec<Option<(f64, usize)>> = per_user
                .iter()
                .map(|u| u.as_ref().map(|(within, degree)| (within[i] as f64 / *degree as f64, *degree)))
                .collect();
            user_mean(&fractions)
        })
        .collect()
}

fn user_mean(per_user: &[Option<(f64, usize)>]) -> UserMean {
    let (mut sum, mut weighted, mut users, mut weight) = (0.0, 0.0, 0usize, 0usize);
    for &(fraction, degree) in per_user.iter().flatten() {
        sum += fraction;
        weighted += fraction * degree as f64;
        users += 1;
        weight += degree;
    }
    if users == 0 {
        return UserMean::default();
    }
    UserMean {
        mean: sum / users as f64,
        degree_weighted: weighted / weight as f64,
    }
}

/// All snapshot metrics at once.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMetrics {
    pub avg_friend_latency: Option<f64>,
    pub reliability_finger: UserMean,
    pub reliability_ihop: Vec<UserMean>,
}

pub fn snapshot_metrics<T: Scalar>(
    g: &SocialGraph,
    ring: &Ring<T>,
    placement: &Placement,
    config: &MetricsConfig,
) -> SnapshotMetrics {
    SnapshotMetrics {
        avg_friend_latency: avg_friend_latency(g, ring, placement, config.sample_cap, config.sample_seed),
        reliability_finger: reliability_finger(g, ring, placement),
        reliability_ihop: reliability_ihop(g, ring, placement, config.max_hops, config.hop_mode),
    }
}

/// One row of the per-iteration log. Ratios are fractions in [0,1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub iteration: usize,
    pub swaps_this_iter: u64,
    pub attempts_this_iter: u64,
    pub cumulative_swaps: u64,
    pub cumulative_attempts: u64,
    /// Distinct users that moved at least once so far, over all users.
    pub movers_fraction: f64,
    /// Absent on iterations where metrics were not evaluated.
    pub metrics: Option<SnapshotMetrics>,
}

impl IterationReport {
    pub fn per_iteration_fraction(&self) -> Option<f64> {
        migration_cost(self.swaps_this_iter, self.attempts_this_iter)
    }

    pub fn cumulative_migration_fraction(&self) -> Option<f64> {
        migration_cost(self.cumulative_swaps, self.cumulative_attempts)
    }

    pub fn avg_friend_latency(&self) -> Option<f64> {
        self.metrics.as_ref().and_then(|m| m.avg_friend_latency)
    }
}

/// Fixed leading columns; degree-weighted reliabilities and the mover fraction follow.
pub const CSV_COLUMNS: [&str; 10] = [
    "iteration",
    "avg_latency",
    "swaps",
    "attempts",
    "per_iter_fraction",
    "cum_fraction",
    "rel_finger",
    "rel_1hop",
    "rel_2hop",
    "rel_3hop",
];

pub const CSV_EXTRA_COLUMNS: [&str; 5] = [
    "movers_fraction",
    "rel_finger_dw",
    "rel_1hop_dw",
    "rel_2hop_dw",
    "rel_3hop_dw",
];

pub fn write_csv_header<W: Write>(mut out: W) -> std::io::Result<()> {
    let cols: Vec<&str> = CSV_COLUMNS.iter().chain(&CSV_EXTRA_COLUMNS).copied().collect();
    writeln!(out, "{}", cols.join(","))
}

/// Writes one row; absent values are empty fields. Only the first three hop thresholds
/// have columns.
pub fn write_csv_row<W: Write>(mut out: W, r: &IterationReport) -> std::io::Result<()> {
    let opt = |v: Option<f64>| v.map(|v| format!("{v:.6}")).unwrap_or_default();
    let m = r.metrics.as_ref();
    let hop = |i: usize, weighted: bool| {
        opt(m.and_then(|m| m.reliability_ihop.get(i)).map(|u| if weighted { u.degree_weighted } else { u.mean }))
    };
    let fields = [
        r.iteration.to_string(),
        opt(r.avg_friend_latency()),
        r.swaps_this_iter.to_string(),
        r.attempts_this_iter.to_string(),
        opt(r.per_iteration_fraction()),
        opt(r.cumulative_migration_fraction()),
        opt(m.map(|m| m.reliability_finger.mean)),
        hop(0, false),
        hop(1, false),
        hop(2, false),
        format!("{:.6}", r.movers_fraction),
        opt(m.map(|m| m.reliability_finger.degree_weighted)),
        hop(0, true),
        hop(1, true),
        hop(2, true),
    ];
    writeln!(out, "{}", fields.join(","))
}

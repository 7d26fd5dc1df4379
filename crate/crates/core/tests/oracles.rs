mod common;

use std::sync::Arc;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use socialdht::engine::{EngineState, GossipConfig, Scheme};
use socialdht::graph::{strength, SocialGraph, StrengthProvider};
use socialdht::metrics::{avg_friend_latency, reliability_finger, reliability_ihop, HopMode};
use socialdht::overlay::{build_ring, IdMode, Placement};

#[test]
fn exhaustive_latency_matches_all_pairs_routing() {
    for (case, &(n, p, k)) in [(12, 0.4, 2), (50, 0.1, 4), (120, 0.05, 7), (200, 0.03, 8), (200, 0.2, 0)]
        .iter()
        .enumerate()
    {
        let seed = 100 + case as u64;
        let g = random_graph(n, p, seed);
        let ring = build_ring::<f64>(n, k, seed, IdMode::UniformRandom).unwrap();
        let placement = Placement::random(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let got = avg_friend_latency(&g, &ring, &placement, usize::MAX, 0).unwrap();
        assert_eq!(got, oracle_latency(&g, &ring, &placement), "n={n} k={k}");
    }
}

#[test]
fn friend_cycle_on_cycle_only_ring() {
    // users 0..4 form a cycle and sit on consecutive slots of an 8-slot ring without
    // long links: forward pairs cost 1, backward pairs wrap (7), and 3->0 / 0->3 cost 5 / 3
    let g = SocialGraph::from_edges(8, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
    let ring = build_ring::<f64>(8, 0, 0, IdMode::EvenlySpaced).unwrap();
    let placement = Placement::identity(8);
    let got = avg_friend_latency(&g, &ring, &placement, usize::MAX, 0).unwrap();
    let cycle_gap = |a: usize, b: usize| (b + 8 - a) % 8;
    let expected = [(0, 1), (1, 2), (2, 3), (3, 0)]
        .iter()
        .map(|&(a, b)| cycle_gap(a, b) + cycle_gap(b, a))
        .sum::<usize>() as f64
        / 8.0;
    assert_eq!(expected, 4.0);
    assert_eq!(got, expected);
}

#[test]
fn adjacent_friends_give_one_hop_forward_only() {
    // path 0-1-...-9 on consecutive slots of a 10-slot ring, no long links
    let n = 10;
    let g = SocialGraph::from_edges(n, (0..n - 1).map(|i| (i, i + 1))).unwrap();
    let ring = build_ring::<f64>(n, 0, 0, IdMode::EvenlySpaced).unwrap();
    let placement = Placement::identity(n);
    let lat = avg_friend_latency(&g, &ring, &placement, usize::MAX, 0).unwrap();
    // forward 1 hop, backward n-1 hops
    assert_eq!(lat, (1 + (n - 1)) as f64 / 2.0);

    // every friend is the immediate successor or predecessor: all are fingers
    let rel = reliability_finger(&g, &ring, &placement);
    let ends = 2.0 * 0.5; // users 0 and 9 have one friend among two fingers
    assert!((rel.mean - (ends + 8.0) / 10.0).abs() < 1e-12);

    // within one greedy hop: only the successor direction
    let hop1 = &reliability_ihop(&g, &ring, &placement, 3, HopMode::GreedyRoute)[0];
    let mut brute = 0.0;
    for u in 0..n {
        let friends: Vec<usize> = g.neighbors(u).iter().map(|&f| f as usize).collect();
        let near = friends.iter().filter(|&&f| oracle_hops(&ring, u, f) <= 1).count();
        brute += near as f64 / friends.len() as f64;
    }
    assert!((hop1.mean - brute / n as f64).abs() < 1e-12);
    assert!((hop1.mean - 0.5).abs() < 1e-12);
}

#[test]
fn strength_matches_brute_force_counts() {
    for seed in 0..6 {
        let g = random_graph(60 + seed as usize * 8, 0.15, seed);
        let p = StrengthProvider::<f64>::CommonNeighbors;
        for i in 0..g.node_count() {
            for j in 0..g.node_count() {
                if i == j {
                    continue;
                }
                let s_ij = strength(&g, i, j, &p).unwrap();
                let s_ji = strength(&g, j, i, &p).unwrap();
                assert_eq!(s_ij, brute_strength(&g, i, j));
                let common = g.common_neighbors(i, j) as f64;
                assert!((s_ij * g.degree(i) as f64 - common).abs() < 1e-9);
                assert!((s_ji * g.degree(j) as f64 - common).abs() < 1e-9);
            }
        }
    }
}

fn optimal_cost(g: &SocialGraph, ids: &[f64]) -> f64 {
    let n = g.node_count();
    let mut best = f64::INFINITY;
    let mut slot_of = vec![0; n];
    for_each_permutation(n, |slot_to_user| {
        for (slot, &u) in slot_to_user.iter().enumerate() {
            slot_of[u] = slot;
        }
        best = best.min(oracle_total_cost(g, ids, &slot_of));
    });
    best
}

#[test]
fn gossip_never_beats_exhaustive_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 3..=7 {
        for trial in 0..6 {
            let g = random_graph(n, rng.random_range(0.3..0.9), rng.random());
            if g.edge_count() == 0 {
                continue;
            }
            let g = Arc::new(g);
            for scheme in [Scheme::Random, Scheme::Direct, Scheme::Greedy, Scheme::Smart] {
                let config = GossipConfig {
                    scheme,
                    iterations: 40,
                    seed: trial,
                    ..GossipConfig::default()
                };
                let mut engine =
                    EngineState::initialize(g.clone(), 2, IdMode::UniformRandom, config, &StrengthProvider::CommonNeighbors)
                        .unwrap();
                let ids = engine.ring().ids().to_vec();
                let optimum = optimal_cost(&g, &ids);
                engine.run();
                let slot_of: Vec<usize> = (0..n).map(|u| engine.placement().slot_of(u)).collect();
                let reached = oracle_total_cost(&g, &ids, &slot_of);
                assert!((engine.total_cost() - reached).abs() < 1e-9);
                assert!(reached >= optimum - 1e-12, "n={n} {scheme:?}: {reached} < optimum {optimum}");
            }
        }
    }
}

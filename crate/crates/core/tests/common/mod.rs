#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use socialdht::graph::SocialGraph;
use socialdht::overlay::{Placement, Ring};

/// Erdős–Rényi style graph with edge probability `p`.
pub fn random_graph(n: usize, p: f64, seed: u64) -> SocialGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(p) {
                edges.push((a, b));
            }
        }
    }
    SocialGraph::from_edges(n, edges).unwrap()
}

/// Common-neighbor strength counted by scanning every user.
pub fn brute_strength(g: &SocialGraph, i: usize, j: usize) -> f64 {
    let deg = (0..g.node_count()).filter(|&x| g.has_edge(i, x)).count();
    if deg == 0 {
        return 0.0;
    }
    let common = (0..g.node_count())
        .filter(|&x| g.has_edge(i, x) && g.has_edge(j, x))
        .count();
    common as f64 / deg as f64
}

fn clockwise(from: f64, to: f64) -> f64 {
    let d = to - from;
    if d < 0.0 {
        d + 1.0
    } else {
        d
    }
}

/// Greedy lookup in identifier space: forward to the successor or long link covering the
/// most clockwise distance without passing the target id.
pub fn oracle_hops(ring: &Ring<f64>, src: usize, dst: usize) -> usize {
    let target = ring.id(dst);
    let mut cur = src;
    let mut hops = 0;
    while cur != dst {
        let here = ring.id(cur);
        let remaining = clockwise(here, target);
        let mut best = ring.successor(cur);
        let mut covered = clockwise(here, ring.id(best));
        for &t in ring.long_links(cur) {
            let c = clockwise(here, ring.id(t as usize));
            if c <= remaining && c > covered {
                best = t as usize;
                covered = c;
            }
        }
        cur = best;
        hops += 1;
        assert!(hops <= ring.len(), "oracle routing looped");
    }
    hops
}

/// Mean hops over both directions of every friend pair.
pub fn oracle_latency(g: &SocialGraph, ring: &Ring<f64>, placement: &Placement) -> f64 {
    let mut total = 0usize;
    let mut pairs = 0usize;
    for a in 0..g.node_count() {
        for b in 0..g.node_count() {
            if a != b && g.has_edge(a, b) {
                total += oracle_hops(ring, placement.slot_of(a), placement.slot_of(b));
                pairs += 1;
            }
        }
    }
    total as f64 / pairs as f64
}

/// Circular identifier distance from first principles.
pub fn ring_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    d.min(1.0 - d)
}

/// `Σ_i Σ_{k∈N_i} s_ik · d(slot_i, slot_k)` for a slot assignment given as `slot_of[user]`.
pub fn oracle_total_cost(g: &SocialGraph, ids: &[f64], slot_of: &[usize]) -> f64 {
    let n = g.node_count();
    let mut cost = 0.0;
    for i in 0..n {
        for k in 0..n {
            if g.has_edge(i, k) {
                cost += brute_strength(g, i, k) * ring_gap(ids[slot_of[i]], ids[slot_of[k]]);
            }
        }
    }
    cost
}

/// Heap's algorithm over `0..n`.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0; n];
    f(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

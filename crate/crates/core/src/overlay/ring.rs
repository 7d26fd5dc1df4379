use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::SocialGraph;
use crate::scalar::Scalar;

/// Redraws allowed per long link before the link is left unfilled.
pub const LONG_LINK_RETRIES: usize = 32;

/// How slot identifiers are laid out on the unit ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum IdMode {
    /// `n` distinct uniform draws from (0,1], sorted.
    #[default]
    UniformRandom,
    /// `i/n` for `i = 1..=n`.
    EvenlySpaced,
}

/// A fixed Symphony overlay: sorted slot identifiers in (0,1], ring short links and
/// harmonic long links. Slot `s` has predecessor `s-1` and successor `s+1` (mod n).
#[derive(Debug, Clone, PartialEq)]
pub struct Ring<T> {
    ids: Vec<T>,
    k: usize,
    long_links: Vec<Vec<u32>>,
    /// Ring point each long link was drawn for, parallel to `long_links`.
    long_points: Vec<Vec<T>>,
}

/// Clockwise identifier distance from `a` to `b` for the harmonic law: `n^(u-1)`.
pub fn harmonic_distance(n: usize, u: f64) -> f64 {
    (n as f64).powf(u - 1.0)
}

impl<T: Scalar> Ring<T> {
    /// Assembles a ring from explicit parts. Each link's draw point is taken to be the
    /// target's identifier.
    pub fn from_parts(ids: Vec<T>, k: usize, long_links: Vec<Vec<usize>>) -> Result<Self> {
        let long_points = long_links
            .iter()
            .map(|links| links.iter().map(|&t| ids.get(t).copied().unwrap_or_else(T::one)).collect())
            .collect();
        Self::from_parts_with_points(ids, k, long_links, long_points)
    }

    pub fn from_parts_with_points(
        ids: Vec<T>,
        k: usize,
        long_links: Vec<Vec<usize>>,
        long_points: Vec<Vec<T>>,
    ) -> Result<Self> {
        let n = ids.len();
        if n < 3 {
            return Err(Error::RingTooSmall(n));
        }
        if let Some(bad) = ids.iter().find(|&&x| !(x > T::zero() && x <= T::one())) {
            return Err(Error::InvalidRing(format!("identifier {bad} outside (0,1]")));
        }
        if ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidRing("identifiers must be strictly increasing".into()));
        }
        if long_links.len() != n || long_points.len() != n {
            return Err(Error::InvalidRing(format!("expected long-link lists for {n} slots")));
        }
        let mut links = Vec::with_capacity(n);
        for (s, (targets, points)) in long_links.iter().zip(&long_points).enumerate() {
            if targets.len() > k {
                return Err(Error::InvalidRing(format!("slot {s} has more than k={k} long links")));
            }
            if targets.len() != points.len() {
                return Err(Error::InvalidRing(format!("slot {s}: link/point count mismatch")));
            }
            for (pos, &t) in targets.iter().enumerate() {
                if t >= n {
                    return Err(Error::InvalidRing(format!("slot {s} links to unknown slot {t}")));
                }
                if t == s {
                    return Err(Error::InvalidRing(format!("slot {s} links to itself")));
                }
                if targets[..pos].contains(&t) {
                    return Err(Error::InvalidRing(format!("slot {s} links to {t} twice")));
                }
            }
            links.push(targets.iter().map(|&t| t as u32).collect());
        }
        Ok(Ring {
            ids,
            k,
            long_links: links,
            long_points,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Long links per slot the ring was built for (some may be unfilled).
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn ids(&self) -> &[T] {
        &self.ids
    }

    pub fn id(&self, slot: usize) -> T {
        self.ids[slot]
    }

    pub fn successor(&self, slot: usize) -> usize {
        if slot + 1 == self.ids.len() {
            0
        } else {
            slot + 1
        }
    }

    pub fn predecessor(&self, slot: usize) -> usize {
        if slot == 0 {
            self.ids.len() - 1
        } else {
            slot - 1
        }
    }

    pub fn long_links(&self, slot: usize) -> &[u32] {
        &self.long_links[slot]
    }

    pub fn long_points(&self, slot: usize) -> &[T] {
        &self.long_points[slot]
    }

    /// Outgoing fingers of `slot`: successor, predecessor, then long links.
    /// Entries may repeat when a long link lands on a ring neighbour.
    pub fn fingers(&self, slot: usize) -> impl Iterator<Item = usize> + '_ {
        [self.successor(slot), self.predecessor(slot)]
            .into_iter()
            .chain(self.long_links[slot].iter().map(|&t| t as usize))
    }

    pub fn finger_count(&self, slot: usize) -> usize {
        2 + self.long_links[slot].len()
    }

    /// Slot managing `point`: the smallest identifier `>= point`, wrapping to slot 0.
    pub fn manager_of(&self, point: T) -> usize {
        let idx = self.ids.partition_point(|&id| id < point);
        if idx == self.ids.len() {
            0
        } else {
            idx
        }
    }

    /// Number of clockwise slot steps from `from` to `to`.
    #[inline]
    pub fn clockwise_gap(&self, from: usize, to: usize) -> usize {
        if to >= from {
            to - from
        } else {
            to + self.ids.len() - from
        }
    }

    /// Undirected finger graph: one user per slot, one edge per (slot, finger) pair.
    pub fn finger_graph(&self) -> SocialGraph {
        let edges = (0..self.len()).flat_map(|s| self.fingers(s).map(move |t| (s, t)));
        SocialGraph::from_edges(self.len(), edges).expect("finger targets are valid slots")
    }

    pub(crate) fn replace_long_links(&self, long_links: Vec<Vec<u32>>) -> Self {
        Ring {
            ids: self.ids.clone(),
            k: self.k,
            long_links,
            long_points: self.long_points.clone(),
        }
    }
}

/// Builds a Symphony ring of `n` slots with up to `k` harmonic long links per slot.
pub fn build_ring<T: Scalar>(n: usize, k: usize, seed: u64, id_mode: IdMode) -> Result<Ring<T>> {
    if n < 3 {
        return Err(Error::RingTooSmall(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids = match id_mode {
        IdMode::EvenlySpaced => {
            let n_t = T::of_usize(n);
            (1..=n).map(|i| T::of_usize(i) / n_t).collect()
        }
        IdMode::UniformRandom => uniform_ids(n, &mut rng),
    };
    let mut ring = Ring {
        ids,
        k,
        long_links: Vec::with_capacity(n),
        long_points: Vec::with_capacity(n),
    };
    for s in 0..n {
        let mut links: Vec<u32> = Vec::with_capacity(k);
        let mut points = Vec::with_capacity(k);
        for _ in 0..k {
            for _ in 0..LONG_LINK_RETRIES {
                let point = harmonic_point(ring.ids[s], n, rng.random::<f64>());
                let target = ring.manager_of(point);
                if target != s && !links.contains(&(target as u32)) {
                    links.push(target as u32);
                    points.push(point);
                    break;
                }
            }
        }
        ring.long_links.push(links);
        ring.long_points.push(points);
    }
    Ok(ring)
}

/// `own + n^(u-1)` wrapped into (0,1].
pub(crate) fn harmonic_point<T: Scalar>(own: T, n: usize, u: f64) -> T {
    let point = own + T::of_f64(harmonic_distance(n, u));
    if point > T::one() {
        point - T::one()
    } else {
        point
    }
}

fn uniform_ids<T: Scalar>(n: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    let mut ids: Vec<T> = Vec::with_capacity(n);
    while ids.len() < n {
        let missing = n - ids.len();
        // 1 - u maps [0,1) onto (0,1]
        ids.extend((0..missing).map(|_| T::of_f64(1.0 - rng.random::<f64>())));
        ids.sort_by(|a, b| a.partial_cmp(b).expect("uniform draws are finite"));
        ids.dedup();
    }
    ids
}

/// `⌈log₂ n⌉`, the default long-link count.
pub fn default_k(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four() -> Ring<f64> {
        Ring::from_parts(vec![0.1, 0.3, 0.6, 0.9], 0, vec![vec![]; 4]).unwrap()
    }

    #[test]
    fn manager_uses_successor_convention() {
        let r = four();
        assert_eq!(r.manager_of(0.31), 2);
        assert_eq!(r.manager_of(0.95), 0);
        assert_eq!(r.manager_of(0.3), 1);
        assert_eq!(r.manager_of(0.05), 0);
        assert_eq!(r.manager_of(1.0), 0);
    }

    #[test]
    fn evenly_spaced_cycle() {
        let r = build_ring::<f64>(8, 0, 1, IdMode::EvenlySpaced).unwrap();
        assert_eq!(r.ids(), &[0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0]);
        for s in 0..8 {
            assert_eq!(r.successor(r.predecessor(s)), s);
            assert!(r.long_links(s).is_empty());
        }
    }

    #[test]
    fn rejects_tiny_rings_and_bad_parts() {
        assert!(matches!(build_ring::<f64>(2, 1, 0, IdMode::UniformRandom), Err(Error::RingTooSmall(2))));
        assert!(Ring::<f64>::from_parts(vec![0.1, 0.5, 0.5], 0, vec![vec![]; 3]).is_err());
        assert!(Ring::<f64>::from_parts(vec![0.0, 0.5, 0.7], 0, vec![vec![]; 3]).is_err());
        assert!(Ring::<f64>::from_parts(vec![0.1, 0.5, 0.7], 1, vec![vec![0], vec![], vec![]]).is_err());
        assert!(Ring::<f64>::from_parts(vec![0.1, 0.5, 0.7], 2, vec![vec![1, 1], vec![], vec![]]).is_err());
    }

    #[test]
    fn random_ring_invariants() {
        for seed in 0..4 {
            let r = build_ring::<f64>(500, 9, seed, IdMode::UniformRandom).unwrap();
            assert_eq!(r.len(), 500);
            assert!(r.ids().windows(2).all(|w| w[0] < w[1]));
            assert!(r.ids().iter().all(|&x| x > 0.0 && x <= 1.0));
            for s in 0..r.len() {
                let links = r.long_links(s);
                assert!(links.len() <= 9);
                assert!(!links.contains(&(s as u32)));
                let mut sorted = links.to_vec();
                sorted.sort_unstable();
                sorted.dedup();
                assert_eq!(sorted.len(), links.len());
                for (&t, &p) in links.iter().zip(r.long_points(s)) {
                    assert_eq!(r.manager_of(p), t as usize);
                }
            }
        }
    }

    #[test]
    fn f32_ring_builds() {
        let r = build_ring::<f32>(2000, 11, 3, IdMode::UniformRandom).unwrap();
        assert_eq!(r.len(), 2000);
        assert!(r.ids().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn same_seed_same_ring() {
        let a = build_ring::<f64>(300, 8, 42, IdMode::UniformRandom).unwrap();
        let b = build_ring::<f64>(300, 8, 42, IdMode::UniformRandom).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn default_k_is_ceil_log2() {
        assert_eq!(default_k(4039), 12);
        assert_eq!(default_k(10000), 14);
        assert_eq!(default_k(1024), 10);
        assert_eq!(default_k(1025), 11);
        assert_eq!(default_k(7115), 13);
    }

    #[test]
    fn harmonic_distance_range() {
        assert_eq!(harmonic_distance(100, 0.0), 0.01);
        assert_eq!(harmonic_distance(100, 1.0), 1.0);
    }

    #[test]
    fn finger_graph_of_cycle() {
        let g = four().finger_graph();
        assert_eq!(g.edge_count(), 4);
        assert!(g.has_edge(0, 3));
    }
}

use super::Ring;
use crate::scalar::Scalar;

/// Distance between two identifiers on the unit ring, in [0, 0.5].
#[inline]
pub fn circular_distance<T: Scalar>(a: T, b: T) -> T {
    let d = (a - b).abs();
    d.min(T::one() - d)
}

/// Identifier-space distance used by the ring-distance cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum DistanceMode {
    /// `min(|a-b|, 1-|a-b|)`
    #[default]
    Circular,
    /// Plain `|a-b|`, ignoring wraparound.
    LiteralAbs,
}

impl DistanceMode {
    #[inline]
    pub fn distance<T: Scalar>(self, a: T, b: T) -> T {
        match self {
            DistanceMode::Circular => circular_distance(a, b),
            DistanceMode::LiteralAbs => (a - b).abs(),
        }
    }
}

/// Slots visited by one greedy lookup.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutePath {
    pub hop_count: usize,
    pub visited: Vec<usize>,
}

impl<T: Scalar> Ring<T> {
    /// Next slot of a clockwise greedy lookup from `current` towards `dst`: the successor
    /// or long link that gets furthest clockwise without passing `dst`.
    #[inline]
    fn greedy_next(&self, current: usize, dst: usize) -> usize {
        let remaining = self.clockwise_gap(current, dst);
        let mut best = self.successor(current);
        let mut best_gap = 1;
        for &t in self.long_links(current) {
            let gap = self.clockwise_gap(current, t as usize);
            if gap <= remaining && gap > best_gap {
                best = t as usize;
                best_gap = gap;
            }
        }
        best
    }

    /// Unidirectional clockwise greedy lookup from slot `src` to slot `dst`.
    pub fn greedy_route(&self, src: usize, dst: usize) -> RoutePath {
        let mut visited = vec![src];
        let mut current = src;
        while current != dst {
            let next = self.greedy_next(current, dst);
            assert!(
                self.clockwise_gap(next, dst) < self.clockwise_gap(current, dst),
                "greedy step from {current} towards {dst} made no progress"
            );
            visited.push(next);
            current = next;
        }
        RoutePath {
            hop_count: visited.len() - 1,
            visited,
        }
    }

    /// Hop count of [`Ring::greedy_route`] without recording the path.
    #[inline]
    pub fn route_hops(&self, src: usize, dst: usize) -> usize {
        let mut hops = 0;
        let mut current = src;
        while current != dst {
            current = self.greedy_next(current, dst);
            hops += 1;
        }
        hops
    }

    /// Fewest finger hops from `src` to `dst` if it is at most `limit`, by breadth-first
    /// search over outgoing fingers.
    pub fn bfs_hops_within(&self, src: usize, dst: usize, limit: usize) -> Option<usize> {
        if src == dst {
            return Some(0);
        }
        let mut frontier = vec![src];
        let mut seen = std::collections::HashSet::from([src]);
        for depth in 1..=limit {
            let mut next = Vec::new();
            for &s in &frontier {
                for f in self.fingers(s) {
                    if f == dst {
                        return Some(depth);
                    }
                    if seen.insert(f) {
                        next.push(f);
                    }
                }
            }
            frontier = next;
        }
        None
    }
}

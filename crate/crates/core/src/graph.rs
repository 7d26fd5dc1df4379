//! Undirected social graph, SNAP edge-list loading and common-neighbour tie strength.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::overlay::circular_distance;
use crate::scalar::Scalar;

/// Immutable undirected simple graph over dense user ids `0..node_count`.
///
/// Neighbour lists are sorted, so intersections are linear merges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SocialGraph {
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
    original_ids: Vec<u64>,
}

/// Counters gathered while reading an edge list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub data_lines: usize,
    pub self_loops: usize,
    /// Lines that repeated an edge already seen (in either direction).
    pub duplicates: usize,
    pub directed_input: bool,
}

impl SocialGraph {
    /// Builds a graph over `node_count` users. Self-loops and repeated edges are dropped.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); node_count];
        for (a, b) in edges {
            if a >= node_count {
                return Err(Error::UnknownUser(a));
            }
            if b >= node_count {
                return Err(Error::UnknownUser(b));
            }
            if a == b {
                continue;
            }
            adjacency[a].push(b as u32);
            adjacency[b].push(a as u32);
        }
        Ok(Self::from_adjacency(adjacency, (0..node_count as u64).collect()))
    }

    fn from_adjacency(mut adjacency: Vec<Vec<u32>>, original_ids: Vec<u64>) -> Self {
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let edge_count = adjacency.iter().map(Vec::len).sum::<usize>() / 2;
        SocialGraph {
            adjacency,
            edge_count,
            original_ids,
        }
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbour ids of `i` (the set N_i).
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency
            .get(i)
            .is_some_and(|n| n.binary_search(&(j as u32)).is_ok())
    }

    /// Each undirected edge once, as `(i, j)` with `i < j`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, list)| {
            list.iter()
                .map(|&j| j as usize)
                .filter(move |&j| j > i)
                .map(move |j| (i, j))
        })
    }

    /// Id the user carried in the source file.
    pub fn original_id(&self, i: usize) -> u64 {
        self.original_ids[i]
    }

    pub fn max_degree_node(&self) -> Option<usize> {
        (0..self.node_count()).max_by_key(|&i| (self.degree(i), std::cmp::Reverse(i)))
    }

    /// `|N_i ∩ N_j|`
    pub fn common_neighbors(&self, i: usize, j: usize) -> usize {
        sorted_intersection_len(&self.adjacency[i], &self.adjacency[j])
    }

    /// Subgraph induced by `nodes`, relabelled densely in the given order.
    /// Original ids carry over.
    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<Self> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (new, &old) in nodes.iter().enumerate() {
            if old >= self.node_count() {
                return Err(Error::UnknownUser(old));
            }
            index.insert(old, new as u32);
        }
        let adjacency = nodes
            .iter()
            .map(|&old| {
                self.adjacency[old]
                    .iter()
                    .filter_map(|nb| index.get(&(*nb as usize)).copied())
                    .collect()
            })
            .collect();
        let original_ids = nodes.iter().map(|&old| self.original_ids[old]).collect();
        Ok(Self::from_adjacency(adjacency, original_ids))
    }

    /// Parses SNAP edge-list text. Ids are remapped densely in ascending order of the
    /// original ids, so writing the graph back and reloading reproduces it exactly.
    pub fn parse_edge_list<R: BufRead>(reader: R, directed_input: bool) -> Result<(Self, LoadStats)> {
        let mut stats = LoadStats {
            directed_input,
            ..LoadStats::default()
        };
        let mut raw = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let lineno = idx + 1;
            let line = line.map_err(|e| Error::Parse {
                line: lineno,
                reason: e.to_string(),
            })?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split_whitespace();
            let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(Error::Parse {
                    line: lineno,
                    reason: format!("expected two ids, got {trimmed:?}"),
                });
            };
            let parse = |s: &str| {
                s.parse::<u64>().map_err(|_| Error::Parse {
                    line: lineno,
                    reason: format!("not a non-negative integer id: {s:?}"),
                })
            };
            let (a, b) = (parse(a)?, parse(b)?);
            stats.data_lines += 1;
            if a == b {
                stats.self_loops += 1;
                continue;
            }
            raw.push((a, b));
        }
        if raw.is_empty() {
            return Err(Error::EmptyGraph);
        }

        let mut original_ids: Vec<u64> = raw.iter().flat_map(|&(a, b)| [a, b]).collect();
        original_ids.sort_unstable();
        original_ids.dedup();
        let dense: HashMap<u64, u32> = original_ids
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, i as u32))
            .collect();

        let mut adjacency = vec![Vec::new(); original_ids.len()];
        for &(a, b) in &raw {
            let (a, b) = (dense[&a], dense[&b]);
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
        }
        let graph = Self::from_adjacency(adjacency, original_ids);
        stats.duplicates = raw.len() - graph.edge_count;
        Ok((graph, stats))
    }

    /// Writes one `src dst` line per undirected edge using the original ids.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# Nodes: {} Edges: {}", self.node_count(), self.edge_count())?;
        for (i, j) in self.edges() {
            writeln!(out, "{}\t{}", self.original_ids[i], self.original_ids[j])?;
        }
        Ok(())
    }
}

/// Reads a SNAP edge-list file. Gzip archives must be decompressed first.
pub fn load_edge_list(path: impl AsRef<Path>, directed_input: bool) -> Result<(SocialGraph, LoadStats)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let (graph, stats) = SocialGraph::parse_edge_list(BufReader::new(file), directed_input)?;
    log::info!(
        "loaded {}: {} nodes, {} undirected edges ({} data lines, {} self-loops, {} duplicate/reverse arcs)",
        path.display(),
        graph.node_count(),
        graph.edge_count(),
        stats.data_lines,
        stats.self_loops,
        stats.duplicates
    );
    Ok((graph, stats))
}

fn sorted_intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut x, mut y, mut count) = (0, 0, 0);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                x += 1;
                y += 1;
            }
        }
    }
    count
}

/// How tie strength between two users is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
pub enum StrengthMode {
    /// `|N_i ∩ N_j| / |N_i|`
    #[default]
    CommonNeighbors,
    /// `1 - circular distance` between reference identifiers.
    IdDistance,
}

/// Source of tie strengths.
#[derive(Debug, Clone, PartialEq)]
pub enum StrengthProvider<T> {
    CommonNeighbors,
    /// One reference identifier in (0,1] per user.
    IdDistance { reference: Vec<T> },
}

impl<T: Scalar> StrengthProvider<T> {
    pub fn mode(&self) -> StrengthMode {
        match self {
            StrengthProvider::CommonNeighbors => StrengthMode::CommonNeighbors,
            StrengthProvider::IdDistance { .. } => StrengthMode::IdDistance,
        }
    }

    fn value(&self, g: &SocialGraph, i: usize, j: usize) -> T {
        match self {
            StrengthProvider::CommonNeighbors => {
                let degree = g.degree(i);
                if degree == 0 {
                    T::zero()
                } else {
                    T::of_usize(g.common_neighbors(i, j)) / T::of_usize(degree)
                }
            }
            StrengthProvider::IdDistance { reference } => {
                T::one() - circular_distance(reference[i], reference[j])
            }
        }
    }
}

/// Strength of the tie from `i` to `j`. Not symmetric under `CommonNeighbors`:
/// the denominator is the degree of `i`. Degree-0 callers get 0.
pub fn strength<T: Scalar>(g: &SocialGraph, i: usize, j: usize, p: &StrengthProvider<T>) -> Result<T> {
    let n = g.node_count();
    if i >= n {
        return Err(Error::UnknownUser(i));
    }
    if j >= n {
        return Err(Error::UnknownUser(j));
    }
    if i == j {
        return Err(Error::SelfPair(i));
    }
    if let StrengthProvider::IdDistance { reference } = p {
        if reference.len() != n {
            return Err(Error::Config(format!(
                "id-distance reference has {} entries for {} users",
                reference.len(),
                n
            )));
        }
    }
    Ok(p.value(g, i, j))
}

/// Up to `k` neighbours of `i` by descending strength, ties by ascending id.
pub fn top_k_strongest<T: Scalar>(
    g: &SocialGraph,
    i: usize,
    k: usize,
    p: &StrengthProvider<T>,
) -> Vec<usize> {
    let mut ranked: Vec<(T, usize)> = g
        .neighbors(i)
        .iter()
        .map(|&j| (p.value(g, i, j as usize), j as usize))
        .collect();
    rank_descending(&mut ranked);
    ranked.into_iter().take(k).map(|(_, j)| j).collect()
}

fn rank_descending<T: Scalar>(ranked: &mut [(T, usize)]) {
    ranked.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
}

/// Strengths `s_ij` for every adjacent pair, laid out parallel to the adjacency lists.
#[derive(Debug, Clone)]
pub struct StrengthTable<T> {
    per_user: Vec<Vec<T>>,
}

impl<T: Scalar> StrengthTable<T> {
    pub fn build(g: &SocialGraph, p: &StrengthProvider<T>) -> Result<Self> {
        if let StrengthProvider::IdDistance { reference } = p {
            if reference.len() != g.node_count() {
                return Err(Error::Config(format!(
                    "id-distance reference has {} entries for {} users",
                    reference.len(),
                    g.node_count()
                )));
            }
        }
        let per_user = (0..g.node_count())
            .into_par_iter()
            .map(|i| {
                g.neighbors(i)
                    .iter()
                    .map(|&j| p.value(g, i, j as usize))
                    .collect()
            })
            .collect();
        Ok(StrengthTable { per_user })
    }

    /// Strengths aligned with `g.neighbors(i)`.
    pub fn of(&self, i: usize) -> &[T] {
        &self.per_user[i]
    }

    /// All neighbours of `i` ranked like [`top_k_strongest`].
    pub fn ranked_neighbors(&self, g: &SocialGraph, i: usize) -> Vec<usize> {
        let mut ranked: Vec<(T, usize)> = self.per_user[i]
            .iter()
            .zip(g.neighbors(i))
            .map(|(&s, &j)| (s, j as usize))
            .collect();
        rank_descending(&mut ranked);
        ranked.into_iter().map(|(_, j)| j).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // edges {(1,2),(1,3),(2,3),(1,4)} with user 0 isolated
    fn small() -> SocialGraph {
        SocialGraph::from_edges(5, [(1, 2), (1, 3), (2, 3), (1, 4)]).unwrap()
    }

    #[test]
    fn strength_is_normalised_by_callers_degree() {
        let g = small();
        let p = StrengthProvider::<f64>::CommonNeighbors;
        assert_eq!(strength(&g, 1, 2, &p).unwrap(), 1.0 / 3.0);
        assert_eq!(strength(&g, 2, 1, &p).unwrap(), 0.5);
    }

    #[test]
    fn strength_without_common_friend_is_zero() {
        let g = SocialGraph::from_edges(5, [(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
        let p = StrengthProvider::<f64>::CommonNeighbors;
        assert_eq!(strength(&g, 3, 4, &p).unwrap(), 0.0);
    }

    #[test]
    fn strength_rejects_bad_pairs() {
        let g = small();
        let p = StrengthProvider::<f64>::CommonNeighbors;
        assert!(matches!(strength(&g, 2, 2, &p), Err(Error::SelfPair(2))));
        assert!(matches!(strength(&g, 2, 9, &p), Err(Error::UnknownUser(9))));
        // isolated caller divides by zero, defined as 0
        assert_eq!(strength(&g, 0, 1, &p).unwrap(), 0.0);
    }

    #[test]
    fn id_distance_strength() {
        let g = small();
        let p = StrengthProvider::IdDistance {
            reference: vec![0.1f64, 0.2, 0.9, 0.5, 0.6],
        };
        let s = strength(&g, 1, 2, &p).unwrap();
        assert!((s - 0.7).abs() < 1e-12);
        assert_eq!(s, strength(&g, 2, 1, &p).unwrap());
    }

    #[test]
    fn top_k_breaks_ties_by_id() {
        let g = small();
        let p = StrengthProvider::<f64>::CommonNeighbors;
        assert_eq!(top_k_strongest(&g, 1, 2, &p), vec![2, 3]);
        assert_eq!(top_k_strongest(&g, 4, 5, &p), vec![1]);
        assert!(top_k_strongest(&g, 0, 3, &p).is_empty());
    }

    #[test]
    fn top_k_on_star_is_id_ordered() {
        let g = SocialGraph::from_edges(6, (1..6).map(|l| (0, l))).unwrap();
        let p = StrengthProvider::<f64>::CommonNeighbors;
        assert_eq!(top_k_strongest(&g, 0, 10, &p), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn strength_table_matches_pointwise() {
        let g = small();
        let p = StrengthProvider::<f64>::CommonNeighbors;
        let table = StrengthTable::build(&g, &p).unwrap();
        for i in 0..g.node_count() {
            for (&j, &s) in g.neighbors(i).iter().zip(table.of(i)) {
                assert_eq!(s, strength(&g, i, j as usize, &p).unwrap());
            }
            assert_eq!(table.ranked_neighbors(&g, i), top_k_strongest(&g, i, usize::MAX, &p));
        }
    }

    #[test]
    fn parse_symmetrises_and_drops_loops() {
        let text = "# comment\n0 1\n1 0\n1 1\n";
        let (g, stats) = SocialGraph::parse_edge_list(text.as_bytes(), true).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (2, 1));
        assert_eq!(stats.self_loops, 1);
        assert_eq!(stats.duplicates, 1);
    }

    #[test]
    fn parse_remaps_sparse_ids() {
        let (g, _) = SocialGraph::parse_edge_list("100 7\n7 42\n".as_bytes(), false).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.original_id(0), 7);
        assert_eq!(g.original_id(2), 100);
        assert!(g.has_edge(0, 2) && g.has_edge(0, 1) && !g.has_edge(1, 2));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = SocialGraph::parse_edge_list("0 1\n# x\n2 three\n".as_bytes(), false).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = SocialGraph::parse_edge_list("0 1 2\n".as_bytes(), false).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = SocialGraph::parse_edge_list("# only\n5 5\n".as_bytes(), false).unwrap_err();
        assert!(matches!(err, Error::EmptyGraph));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(load_edge_list("/nonexistent/edges.txt", false), Err(Error::Io { .. })));
    }

    #[test]
    fn induced_subgraph_keeps_internal_edges() {
        let g = small();
        let sub = g.induced_subgraph(&[3, 1, 4]).unwrap();
        assert_eq!(sub.node_count(), 3);
        assert_eq!(sub.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert_eq!(sub.original_id(0), 3);
    }
}

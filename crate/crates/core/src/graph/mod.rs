//! Labelled undirected graphs on vertices `0..v`.
//!
//! Adjacency is stored as one bitset row per vertex, so edge tests are O(1)
//! and the exhaustive enumerations over millions of small graphs stay cheap.

mod mcs;

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::vertex_set::{Vertex, VertexSet};

pub use mcs::{is_decomposable, maximum_cardinality_search, CliqueDecomposition, McsResult};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    v: usize,
    words: usize,
    adj: Vec<u64>,
}

impl Graph {
    /// Edgeless graph on `v` vertices.
    pub fn new(v: usize) -> Result<Self> {
        if v == 0 {
            return Err(Error::InvalidGraph("a graph needs at least one vertex".into()));
        }
        let words = v.div_ceil(64);
        Ok(Self { v, words, adj: vec![0; v * words] })
    }

    pub fn complete(v: usize) -> Result<Self> {
        let mut g = Self::new(v)?;
        for i in 0..v {
            for j in i + 1..v {
                g.set(i, j, true);
            }
        }
        Ok(g)
    }

    pub fn from_edges(v: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::new(v)?;
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    /// Decodes a graph from a bit code where bit `k` is the `k`-th pair
    /// `(i, j)`, `i < j`, in lexicographic order.
    pub fn from_code(v: usize, code: u64) -> Result<Self> {
        let mut g = Self::new(v)?;
        let mut k = 0;
        for i in 0..v {
            for j in i + 1..v {
                if code >> k & 1 == 1 {
                    g.set(i, j, true);
                }
                k += 1;
            }
        }
        Ok(g)
    }

    /// Inverse of [`Graph::from_code`]; only defined for `v <= 11`.
    pub fn code(&self) -> u64 {
        assert!(self.v * (self.v - 1) / 2 <= 64, "graph too large for a u64 code");
        let mut code = 0u64;
        let mut k = 0;
        for i in 0..self.v {
            for j in i + 1..self.v {
                if self.has_edge(i, j) {
                    code |= 1 << k;
                }
                k += 1;
            }
        }
        code
    }

    pub fn vertex_count(&self) -> usize {
        self.v
    }

    fn check(&self, i: usize) -> Result<()> {
        if i >= self.v {
            Err(Error::UnknownVertex { vertex: i, count: self.v })
        } else {
            Ok(())
        }
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, on: bool) {
        let (wi, bi) = (i * self.words + j / 64, j % 64);
        let (wj, bj) = (j * self.words + i / 64, i % 64);
        if on {
            self.adj[wi] |= 1 << bi;
            self.adj[wj] |= 1 << bj;
        } else {
            self.adj[wi] &= !(1 << bi);
            self.adj[wj] &= !(1 << bj);
        }
    }

    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(Error::InvalidGraph(format!("self-loop at vertex {i}")));
        }
        self.set(i, j, true);
        Ok(())
    }

    pub fn remove_edge(&mut self, i: usize, j: usize) -> Result<()> {
        self.check(i)?;
        self.check(j)?;
        if i != j {
            self.set(i, j, false);
        }
        Ok(())
    }

    /// Flips the pair `(i, j)`; returns whether the edge is now present.
    pub fn toggle_edge(&mut self, i: usize, j: usize) -> Result<bool> {
        let present = self.has_edge(i, j);
        if present {
            self.remove_edge(i, j)?;
        } else {
            self.add_edge(i, j)?;
        }
        Ok(!present)
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i < self.v && j < self.v && self.adj[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[u64] {
        &self.adj[i * self.words..(i + 1) * self.words]
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let b = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(w * 64 + b)
                }
            })
        })
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.v).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.v).flat_map(move |i| self.neighbors(i).filter(move |&j| j > i).map(move |j| (i, j)))
    }

    pub fn is_complete_on(&self, set: &VertexSet) -> bool {
        let s = set.as_slice();
        s.iter().enumerate().all(|(k, &a)| s[k + 1..].iter().all(|&b| self.has_edge(a as usize, b as usize)))
    }

    /// The subgraph induced on `u`, relabelled `0..|u|` in increasing label order.
    pub fn induced_subgraph(&self, u: &VertexSet) -> Result<Graph> {
        if let Some(max) = u.max_vertex() {
            self.check(max as usize)?;
        }
        let members: Vec<usize> = u.iter().map(|x| x as usize).collect();
        let mut g = Graph::new(members.len().max(1))?;
        for (a, &i) in members.iter().enumerate() {
            for (b, &j) in members.iter().enumerate().skip(a + 1) {
                if self.has_edge(i, j) {
                    g.set(a, b, true);
                }
            }
        }
        Ok(g)
    }

    /// Parses the edge-list format: a `v <count>` line followed by `i j` pairs.
    /// Blank lines and `#` comments are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Graph> {
        let mut graph: Option<Graph> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: lineno + 1, message };
            let fields: Vec<&str> = line.split_whitespace().collect();
            match &mut graph {
                None => {
                    if fields.len() != 2 || fields[0] != "v" {
                        return Err(err(format!("expected `v <count>`, found `{line}`")));
                    }
                    let v: usize = fields[1].parse().map_err(|_| err(format!("bad vertex count `{}`", fields[1])))?;
                    graph = Some(Graph::new(v).map_err(|e| err(e.to_string()))?);
                }
                Some(g) => {
                    if fields.len() != 2 {
                        return Err(err(format!("expected `i j`, found `{line}`")));
                    }
                    let parse = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad vertex `{s}`")));
                    let (i, j) = (parse(fields[0])?, parse(fields[1])?);
                    g.add_edge(i, j).map_err(|e| err(e.to_string()))?;
                }
            }
        }
        graph.ok_or_else(|| Error::Parse { line: 0, message: "missing `v <count>` header".into() })
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("v {}\n", self.v);
        for (i, j) in self.edges() {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }

    /// Vertex set as a [`VertexSet`].
    pub fn vertices(&self) -> VertexSet {
        VertexSet::from_sorted(0..self.v as Vertex)
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph(v={}, edges={:?})", self.v, self.edges().collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vset;

    #[test]
    fn edges_are_symmetric_and_loop_free() {
        let mut g = Graph::new(70).unwrap();
        g.add_edge(3, 68).unwrap();
        assert!(g.has_edge(68, 3));
        assert_eq!(g.edge_count(), 1);
        assert!(g.add_edge(4, 4).is_err());
        assert_eq!(g.add_edge(0, 70), Err(Error::UnknownVertex { vertex: 70, count: 70 }));
        assert_eq!(g.neighbors(68).collect::<Vec<_>>(), vec![3]);
        assert!(Graph::new(0).is_err());
    }

    #[test]
    fn code_round_trip() {
        for code in [0u64, 1, 0b101101, (1 << 21) - 1] {
            assert_eq!(Graph::from_code(7, code).unwrap().code(), code);
        }
        assert_eq!(Graph::complete(7).unwrap().code(), (1 << 21) - 1);
    }

    #[test]
    fn induced_subgraph_of_k4_on_pair_is_an_edge() {
        let k4 = Graph::complete(4).unwrap();
        let sub = k4.induced_subgraph(&vset![0, 1]).unwrap();
        assert_eq!(sub.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn induced_on_everything_is_identity() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (3, 4), (0, 4)]).unwrap();
        assert_eq!(g.induced_subgraph(&g.vertices()).unwrap(), g);
        assert!(matches!(g.induced_subgraph(&vset![1, 9]), Err(Error::UnknownVertex { vertex: 9, .. })));
    }

    #[test]
    fn edge_list_format() {
        let text = "# a path\nv 4\n\n0 1\n1 2 # middle\n2 3\n";
        let g = Graph::parse_edge_list(text).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(Graph::parse_edge_list(&g.to_edge_list()).unwrap(), g);
        assert!(matches!(Graph::parse_edge_list("v 3\n0 5\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Graph::parse_edge_list("0 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(Graph::parse_edge_list("").is_err());
    }
}

use std::collections::HashMap;

use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::graph::{maximum_cardinality_search, Graph};
use crate::junction_tree::{count_junction_trees, JunctionTree};

/// Sorted list of clique bitmasks; identifies a decomposable graph.
pub type CliqueKey = Vec<u16>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphEntry {
    pub code: u64,
    pub cliques: CliqueKey,
    pub mu: u64,
}

/// Every decomposable graph on `v` labelled vertices with its μ.
#[derive(Clone, Debug)]
pub struct GraphTable {
    pub v: usize,
    /// Number of graphs examined.
    pub scanned: u64,
    entries: Vec<GraphEntry>,
    index: HashMap<CliqueKey, usize>,
}

/// Clique key of the graph a junction tree represents.
pub fn clique_key(j: &JunctionTree) -> CliqueKey {
    let mut key: CliqueKey = j.node_ids().iter().map(|&n| j.clique(n).iter().fold(0u16, |m, x| m | 1 << x)).collect();
    key.sort_unstable();
    key
}

/// Scans all `2^{v(v−1)/2}` graphs on `v ≤ 8` vertices, keeping the
/// decomposable ones. μ comes from the contraction counter.
pub fn enumerate_decomposable(v: usize) -> GraphTable {
    enumerate_decomposable_with(v, |j| count_junction_trees(j).to_u64().expect("μ fits in u64 for v ≤ 8"))
}

/// As [`enumerate_decomposable`] with a caller-supplied μ routine.
pub fn enumerate_decomposable_with<F>(v: usize, mu: F) -> GraphTable
where
    F: Fn(&JunctionTree) -> u64 + Sync,
{
    assert!((1..=8).contains(&v), "exhaustive enumeration supports 1 ≤ v ≤ 8");
    let pairs = v * (v - 1) / 2;
    let total: u64 = 1 << pairs;
    let chunk = 1u64 << 14;
    let mut entries: Vec<GraphEntry> = (0..total.div_ceil(chunk))
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut local = Vec::new();
            for code in c * chunk..((c + 1) * chunk).min(total) {
                let g = Graph::from_code(v, code).expect("valid code");
                let mcs = maximum_cardinality_search(&g);
                if let Some(d) = mcs.decomposition {
                    let j = JunctionTree::from_decomposition(v, &d);
                    let cliques = clique_key(&j);
                    local.push(GraphEntry { code, cliques, mu: mu(&j) });
                }
            }
            local
        })
        .collect();
    entries.sort_unstable_by_key(|e| e.code);
    let index = entries.iter().enumerate().map(|(i, e)| (e.cliques.clone(), i)).collect();
    GraphTable { v, scanned: total, entries, index }
}

impl GraphTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[GraphEntry] {
        &self.entries
    }

    pub fn count_with_mu(&self, mu: u64) -> usize {
        self.entries.iter().filter(|e| e.mu == mu).count()
    }

    /// Sum of μ over all graphs: the number of junction trees on `v` vertices.
    pub fn total_mu(&self) -> u128 {
        self.entries.iter().map(|e| e.mu as u128).sum()
    }

    pub fn index_of_key(&self, key: &CliqueKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn index_of_tree(&self, j: &JunctionTree) -> Option<usize> {
        self.index_of_key(&clique_key(j))
    }

    pub fn index_of_graph(&self, g: &Graph) -> Option<usize> {
        let d = maximum_cardinality_search(g).decomposition?;
        self.index_of_tree(&JunctionTree::from_decomposition(g.vertex_count(), &d))
    }

    /// Entry indices from most to fewest junction trees, ties by code.
    pub fn order_by_mu_desc(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.entries.len()).collect();
        order.sort_by(|&a, &b| self.entries[b].mu.cmp(&self.entries[a].mu).then(self.entries[a].code.cmp(&self.entries[b].code)));
        order
    }

    /// Graph probabilities when junction trees are uniform (`∝ μ`).
    pub fn probabilities_jt_uniform(&self) -> Vec<f64> {
        let total = self.total_mu() as f64;
        self.entries.iter().map(|e| e.mu as f64 / total).collect()
    }

    /// Uniform graph probabilities.
    pub fn probabilities_graph_uniform(&self) -> Vec<f64> {
        vec![1.0 / self.entries.len() as f64; self.entries.len()]
    }
}

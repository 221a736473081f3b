//! Maximum cardinality search: chordality recognition and clique extraction.

use std::collections::BTreeSet;

use super::Graph;
use crate::vertex_set::{Vertex, VertexSet};

/// Cliques of a decomposable graph in an order with the running
/// intersection property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueDecomposition {
    pub cliques: Vec<VertexSet>,
    /// `separators[i - 1] = cliques[i] ∩ (cliques[0] ∪ … ∪ cliques[i - 1])`,
    /// empty when `cliques[i]` starts a new connected component.
    pub separators: Vec<VertexSet>,
    /// `parents[i - 1]` is an earlier clique containing `separators[i - 1]`.
    pub parents: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct McsResult {
    pub ordering: Vec<usize>,
    pub decomposable: bool,
    pub decomposition: Option<CliqueDecomposition>,
}

/// Runs maximum cardinality search. Ties between unnumbered vertices with the
/// same count of numbered neighbours go to the smallest label.
pub fn maximum_cardinality_search(g: &Graph) -> McsResult {
    let v = g.vertex_count();
    let mut label = vec![0usize; v];
    let mut position = vec![usize::MAX; v];
    let mut buckets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); v];
    buckets[0].extend(0..v);
    let mut top = 0;
    let mut ordering = Vec::with_capacity(v);
    let mut picked_label = Vec::with_capacity(v);

    for step in 0..v {
        while buckets[top].is_empty() {
            top -= 1;
        }
        let x = buckets[top].pop_first().expect("non-empty bucket");
        position[x] = step;
        ordering.push(x);
        picked_label.push(label[x]);
        for y in g.neighbors(x) {
            if position[y] == usize::MAX {
                buckets[label[y]].remove(&y);
                label[y] += 1;
                buckets[label[y]].insert(y);
                top = top.max(label[y]);
            }
        }
    }

    // Zero fill-in test: for every vertex, its earlier neighbours other than
    // the latest one must all be adjacent to that latest one.
    let mut decomposable = true;
    'outer: for &x in &ordering {
        let latest = g.neighbors(x).filter(|&y| position[y] < position[x]).max_by_key(|&y| position[y]);
        if let Some(u) = latest {
            for w in g.neighbors(x) {
                if w != u && position[w] < position[x] && !g.has_edge(w, u) {
                    decomposable = false;
                    break 'outer;
                }
            }
        }
    }
    if !decomposable {
        return McsResult { ordering, decomposable, decomposition: None };
    }

    let mut cliques: Vec<VertexSet> = Vec::new();
    let mut separators = Vec::new();
    let mut parents = Vec::new();
    let mut clique_of = vec![0usize; v];
    for (i, &x) in ordering.iter().enumerate() {
        let earlier: VertexSet = g.neighbors(x).filter(|&y| position[y] < i).map(|y| y as Vertex).collect();
        if i == 0 || picked_label[i] <= picked_label[i - 1] {
            let parent = match earlier.iter().max_by_key(|&y| position[y as usize]) {
                Some(u) => clique_of[u as usize],
                None => cliques.len().saturating_sub(1),
            };
            let mut clique = earlier.clone();
            clique.insert(x as Vertex);
            if !cliques.is_empty() {
                separators.push(earlier);
                parents.push(parent);
            }
            cliques.push(clique);
        } else {
            let current = cliques.last_mut().expect("a clique is open");
            debug_assert_eq!(&earlier, current);
            current.insert(x as Vertex);
        }
        clique_of[x] = cliques.len() - 1;
    }

    McsResult { ordering, decomposable, decomposition: Some(CliqueDecomposition { cliques, separators, parents }) }
}

pub fn is_decomposable(g: &Graph) -> bool {
    maximum_cardinality_search(g).decomposable
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vset;

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn short_chordless_cycles_are_rejected() {
        assert!(!is_decomposable(&cycle(4)));
        assert!(!is_decomposable(&cycle(5)));
        assert!(is_decomposable(&cycle(3)));
        let r = maximum_cardinality_search(&cycle(4));
        assert!(r.decomposition.is_none());
        assert_eq!(r.ordering.len(), 4);
    }

    #[test]
    fn complete_graph_is_one_clique() {
        let r = maximum_cardinality_search(&Graph::complete(4).unwrap());
        let d = r.decomposition.unwrap();
        assert_eq!(d.cliques, vec![vset![0, 1, 2, 3]]);
        assert!(d.separators.is_empty());
    }

    #[test]
    fn edgeless_graph_has_singletons_and_empty_separators() {
        let d = maximum_cardinality_search(&Graph::new(5).unwrap()).decomposition.unwrap();
        assert_eq!(d.cliques.len(), 5);
        assert!(d.separators.iter().all(VertexSet::is_empty));
        assert!(is_decomposable(&Graph::new(1).unwrap()));
    }

    #[test]
    fn ties_go_to_smallest_label() {
        let r = maximum_cardinality_search(&Graph::new(3).unwrap());
        assert_eq!(r.ordering, vec![0, 1, 2]);
    }

    #[test]
    fn running_intersection_on_a_chordal_example() {
        // Two triangles sharing edge (1,2) plus a pendant 4-3.
        let g = Graph::from_edges(5, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)]).unwrap();
        let d = maximum_cardinality_search(&g).decomposition.unwrap();
        assert_eq!(d.cliques.len(), 3);
        for (i, sep) in d.separators.iter().enumerate() {
            let clique = &d.cliques[i + 1];
            let earlier = d.cliques[..=i].iter().fold(VertexSet::new(), |acc, c| acc.union(c));
            assert_eq!(&clique.intersection(&earlier), sep);
            assert!(sep.is_subset(&d.cliques[d.parents[i]]));
        }
        let total: usize = d.cliques.iter().map(VertexSet::len).sum::<usize>() - d.separators.iter().map(VertexSet::len).sum::<usize>();
        assert_eq!(total, 5);
    }
}

//! Uniform redraw of a junction tree among all equivalent ones.

use std::collections::HashMap;

use rand::Rng;

use super::count::{class_components, weight_classes, Dsu};
use super::JunctionTree;
use crate::vertex_set::VertexSet;

/// Returns a junction tree for the same graph drawn uniformly from all μ of
/// them: the contraction schedule of the counting routine, with a uniform
/// spanning tree (Wilson's loop-erased random walks) drawn in each
/// component of each weight class.
pub fn randomize_junction_tree<R: Rng + ?Sized>(j: &JunctionTree, rng: &mut R) -> JunctionTree {
    let ids = j.node_ids().to_vec();
    let cliques: Vec<&VertexSet> = ids.iter().map(|&n| j.clique(n)).collect();
    let mut dsu = Dsu::new(cliques.len());
    let mut chosen: Vec<(usize, usize)> = Vec::with_capacity(cliques.len().saturating_sub(1));
    for pairs in weight_classes(&cliques) {
        let comps = class_components(&mut dsu, &pairs);
        for (roots, edges) in &comps {
            let slot: HashMap<usize, usize> = roots.iter().enumerate().map(|(i, &r)| (r, i)).collect();
            let ends: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (slot[&dsu.find(a)], slot[&dsu.find(b)])).collect();
            for e in wilson(roots.len(), &ends, rng) {
                chosen.push(edges[e]);
            }
        }
        for &(a, b) in &chosen {
            dsu.union(a, b);
        }
    }

    let mut out = JunctionTree::empty(j.vertex_count());
    for c in &cliques {
        out.add_node((*c).clone());
    }
    for (a, b) in chosen {
        let sep = cliques[a].intersection(cliques[b]);
        out.add_link(a, b, sep);
    }
    out
}

/// Uniform spanning tree of a connected multigraph; returns edge indices.
fn wilson<R: Rng + ?Sized>(k: usize, edges: &[(usize, usize)], rng: &mut R) -> Vec<usize> {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (e, &(a, b)) in edges.iter().enumerate() {
        incident[a].push(e);
        incident[b].push(e);
    }
    let mut in_tree = vec![false; k];
    let mut next = vec![usize::MAX; k];
    in_tree[0] = true;
    let mut tree = Vec::with_capacity(k - 1);
    for start in 1..k {
        let mut u = start;
        while !in_tree[u] {
            let e = incident[u][rng.random_range(0..incident[u].len())];
            next[u] = e;
            let (a, b) = edges[e];
            u = if a == u { b } else { a };
        }
        let mut u = start;
        while !in_tree[u] {
            in_tree[u] = true;
            let e = next[u];
            tree.push(e);
            let (a, b) = edges[e];
            u = if a == u { b } else { a };
        }
    }
    tree
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::junction_tree::tests::seven_vertex_graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn complete_graph_is_unchanged() {
        let j = JunctionTree::build(&Graph::complete(5).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(randomize_junction_tree(&j, &mut rng), j);
        }
    }

    #[test]
    fn randomized_trees_stay_valid_and_equivalent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = seven_vertex_graph();
        let j = JunctionTree::build(&g).unwrap();
        let mut seen = std::collections::HashSet::new();
        for _ in 0..200 {
            let r = randomize_junction_tree(&j, &mut rng);
            assert!(r.validate(), "{:?}", r.check());
            assert_eq!(r.graph_of(), g);
            seen.insert(r.canonical());
        }
        assert_eq!(seen.len(), 3);
    }
}

use crate::error::{Error, Result};
use crate::graph::{maximum_cardinality_search, Graph};
use crate::junction_tree::JunctionTree;

/// All `c^{c−2}` labelled trees on `c` nodes, decoded from Prüfer sequences.
pub fn labelled_trees(c: usize) -> Vec<Vec<(usize, usize)>> {
    match c {
        0 => return Vec::new(),
        1 => return vec![Vec::new()],
        2 => return vec![vec![(0, 1)]],
        _ => {}
    }
    let len = c - 2;
    let total = c.pow(len as u32);
    let mut out = Vec::with_capacity(total);
    let mut seq = vec![0usize; len];
    for mut k in 0..total {
        for s in seq.iter_mut() {
            *s = k % c;
            k /= c;
        }
        out.push(decode_pruefer(&seq, c));
    }
    out
}

fn decode_pruefer(seq: &[usize], c: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; c];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(c - 1);
    for &s in seq {
        let leaf = (0..c).find(|&i| degree[i] == 1).expect("a leaf exists");
        edges.push((leaf.min(s), leaf.max(s)));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..c).filter(|&i| degree[i] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Every junction tree of `g`: all spanning trees on its cliques that pass
/// [`JunctionTree::validate`].
pub fn brute_force_junction_trees(g: &Graph) -> Result<Vec<JunctionTree>> {
    let d = maximum_cardinality_search(g).decomposition.ok_or(Error::NotDecomposable)?;
    let cliques = d.cliques;
    let mut out = Vec::new();
    for links in labelled_trees(cliques.len()) {
        let j = JunctionTree::from_parts(g.vertex_count(), cliques.clone(), &links)?;
        if j.validate() {
            out.push(j);
        }
    }
    Ok(out)
}

//! Counting the junction trees that represent the same graph.
//!
//! A spanning tree of the junction graph (every pair of cliques linked,
//! weighted by the size of their intersection) has the junction property iff
//! its total weight is maximal. The maximum-weight spanning trees are counted
//! class by class, heaviest first: within a weight class each connected
//! component of the crossing links (between super-nodes formed by the heavier
//! classes) contributes its spanning tree count, then is contracted.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::{JunctionTree, NodeId};
use crate::vertex_set::VertexSet;

pub(crate) struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// Clique pairs of the junction graph grouped by intersection size,
/// heaviest class first. Pair entries index into `cliques`.
pub(crate) fn weight_classes(cliques: &[&VertexSet]) -> Vec<Vec<(usize, usize)>> {
    let max_w = cliques.iter().map(|c| c.len()).max().unwrap_or(0);
    let mut classes = vec![Vec::new(); max_w + 1];
    for i in 0..cliques.len() {
        for k in i + 1..cliques.len() {
            classes[cliques[i].intersection_len(cliques[k])].push((i, k));
        }
    }
    classes.reverse();
    classes
}

/// Super-node roots of one component and the class pairs joining them.
pub(crate) type Component = (Vec<usize>, Vec<(usize, usize)>);

/// One weight class after contraction: connected components of the
/// multigraph on super-nodes.
pub(crate) fn class_components(dsu: &mut Dsu, pairs: &[(usize, usize)]) -> Vec<Component> {
    let crossing: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(a, b)| dsu.find(a) != dsu.find(b)).collect();
    if crossing.is_empty() {
        return Vec::new();
    }
    let mut roots: Vec<usize> = crossing.iter().flat_map(|&(a, b)| [dsu.find(a), dsu.find(b)]).collect();
    roots.sort_unstable();
    roots.dedup();
    let slot: HashMap<usize, usize> = roots.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut local = Dsu::new(roots.len());
    for &(a, b) in &crossing {
        local.union(slot[&dsu.find(a)], slot[&dsu.find(b)]);
    }
    let mut groups: HashMap<usize, Component> = HashMap::new();
    for (i, &r) in roots.iter().enumerate() {
        groups.entry(local.find(i)).or_default().0.push(r);
    }
    for &(a, b) in &crossing {
        groups.get_mut(&local.find(slot[&dsu.find(a)])).unwrap().1.push((a, b));
    }
    let mut out: Vec<_> = groups.into_values().collect();
    out.sort_by_key(|(r, _)| r[0]);
    out
}

/// Number of spanning trees of a multigraph on `k` nodes given as a list of
/// edges (parallel edges count separately), by the matrix-tree theorem.
pub fn spanning_tree_count(k: usize, edges: &[(usize, usize)]) -> BigUint {
    if k <= 1 {
        return BigUint::one();
    }
    let n = k - 1;
    let mut lap = vec![vec![0i128; n]; n];
    for &(a, b) in edges {
        if a == b {
            continue;
        }
        if a < n {
            lap[a][a] += 1;
        }
        if b < n {
            lap[b][b] += 1;
        }
        if a < n && b < n {
            lap[a][b] -= 1;
            lap[b][a] -= 1;
        }
    }
    if let Some(det) = bareiss_i128(lap.clone()) {
        return BigUint::try_from(det).expect("Laplacian minors are non-negative");
    }
    let big: Vec<Vec<BigInt>> = lap.into_iter().map(|row| row.into_iter().map(BigInt::from).collect()).collect();
    bareiss_big(big).to_biguint().expect("Laplacian minors are non-negative")
}

/// Fraction-free Gaussian elimination; `None` on overflow.
fn bareiss_i128(mut m: Vec<Vec<i128>>) -> Option<i128> {
    let n = m.len();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            let swap = (k + 1..n).find(|&r| m[r][k] != 0)?;
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = m[i][j].checked_mul(m[k][k])?.checked_sub(m[i][k].checked_mul(m[k][j])?)?;
                m[i][j] = t / prev;
            }
        }
        prev = m[k][k];
    }
    Some(sign * m[n - 1][n - 1])
}

fn bareiss_big(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut negate = false;
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    negate = !negate;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = t / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

/// μ: the number of junction trees representing `graph_of(j)`, by
/// max-weight spanning tree counting over the junction graph.
pub fn count_junction_trees(j: &JunctionTree) -> BigUint {
    let ids = j.node_ids();
    let cliques: Vec<&VertexSet> = ids.iter().map(|&n| j.clique(n)).collect();
    let mut dsu = Dsu::new(cliques.len());
    let mut total = BigUint::one();
    for pairs in weight_classes(&cliques) {
        let comps = class_components(&mut dsu, &pairs);
        for (roots, edges) in &comps {
            let slot: HashMap<usize, usize> = roots.iter().enumerate().map(|(i, &r)| (r, i)).collect();
            let local: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (slot[&dsu.find(a)], slot[&dsu.find(b)])).collect();
            total *= spanning_tree_count(roots.len(), &local);
        }
        for (_, edges) in comps {
            for (a, b) in edges {
                dsu.union(a, b);
            }
        }
    }
    total
}

/// μ computed separator by separator from the current tree alone.
///
/// For a distinct separator `S` occurring `m` times, the cliques containing
/// `S` form a subtree; cutting its `m` links labelled exactly `S` leaves
/// `m + 1` pieces of sizes `f_1..f_{m+1}`, and any reconnection of the pieces
/// by `m` links is again a junction tree. The number of trees joining pieces
/// of those sizes is `(Σ f)^(m-1) Π f`, and the choices for different
/// separators are independent. Agrees with [`count_junction_trees`]; this
/// route touches only the cliques around each separator.
pub fn count_by_separators(j: &JunctionTree) -> BigUint {
    let mut distinct: HashMap<&VertexSet, usize> = HashMap::new();
    for l in j.links() {
        *distinct.entry(&l.separator).or_default() += 1;
    }
    let mut total = BigUint::one();
    let mut slot = vec![usize::MAX; j.nodes.len()];
    for (sep, m) in distinct {
        let members: Vec<NodeId> = j.nodes_containing_set(sep);
        for (i, &n) in members.iter().enumerate() {
            slot[n] = i;
        }
        let mut dsu = Dsu::new(members.len());
        for &a in &members {
            for (b, link) in j.neighbors(a) {
                if slot[b] != usize::MAX && j.link(link).separator.len() > sep.len() {
                    dsu.union(slot[a], slot[b]);
                }
            }
        }
        let mut sizes: HashMap<usize, u64> = HashMap::new();
        for i in 0..members.len() {
            *sizes.entry(dsu.find(i)).or_default() += 1;
        }
        for &n in &members {
            slot[n] = usize::MAX;
        }
        debug_assert_eq!(sizes.len(), m + 1, "separator {sep:?} splits into {} pieces", sizes.len());
        let pieces = sizes.len() as u32;
        total *= BigUint::from(members.len() as u64).pow(pieces - 2);
        for f in sizes.into_values() {
            total *= f;
        }
    }
    total
}

/// `ln(a / b)`, reducing the exact ratio before converting to floating point.
pub fn mu_log_ratio(a: &BigUint, b: &BigUint) -> f64 {
    let g = a.gcd(b);
    let (num, den) = (a / &g, b / &g);
    ln_big(&num) - ln_big(&den)
}

fn ln_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        if let Some(f) = x.to_f64() {
            if f.is_finite() {
                return f.ln();
            }
        }
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of μ for the graph represented by `j`.
pub fn log_mu(j: &JunctionTree) -> f64 {
    ln_big(&count_by_separators(j))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::junction_tree::tests::seven_vertex_graph;
    use crate::vset;

    fn mu(g: &Graph) -> BigUint {
        count_junction_trees(&JunctionTree::build(g).unwrap())
    }

    #[test]
    fn edgeless_graph_follows_cayley() {
        for n in 1..=8u32 {
            let expected = if n == 1 { BigUint::one() } else { BigUint::from(n).pow(n - 2) };
            let j = JunctionTree::build(&Graph::new(n as usize).unwrap()).unwrap();
            assert_eq!(count_junction_trees(&j), expected);
            assert_eq!(count_by_separators(&j), expected);
        }
        assert_eq!(mu(&Graph::new(7).unwrap()), BigUint::from(16_807u32));
    }

    #[test]
    fn complete_graph_has_one_tree() {
        assert_eq!(mu(&Graph::complete(6).unwrap()), BigUint::one());
    }

    #[test]
    fn shared_separator_star() {
        // Three cliques all meeting in {1}: any of the 3 trees on 3 nodes.
        let g = seven_vertex_graph();
        assert_eq!(mu(&g), BigUint::from(3u32));
        assert_eq!(count_by_separators(&JunctionTree::build(&g).unwrap()), BigUint::from(3u32));
    }

    #[test]
    fn nested_separators() {
        let j =
            JunctionTree::from_parts(6, vec![vset![1, 2, 3], vset![2, 3, 4], vset![3, 5], vset![0]], &[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(j.validate());
        // {2,3}: 1 way; {3}: pieces {A,B},{C} -> 2; {}: pieces of sizes 3 and 1 -> 3.
        assert_eq!(count_junction_trees(&j), BigUint::from(6u32));
        assert_eq!(count_by_separators(&j), BigUint::from(6u32));
    }

    #[test]
    fn matrix_tree_small_cases() {
        assert_eq!(spanning_tree_count(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]), BigUint::from(16u32));
        assert_eq!(spanning_tree_count(2, &[(0, 1), (0, 1), (1, 0)]), BigUint::from(3u32));
        assert_eq!(spanning_tree_count(3, &[(0, 1)]), BigUint::zero());
        // K_30 forces the big-integer fallback: 30^28 overflows i128 mid-elimination.
        let k30: Vec<(usize, usize)> = (0..30).flat_map(|a| (a + 1..30).map(move |b| (a, b))).collect();
        assert_eq!(spanning_tree_count(30, &k30), BigUint::from(30u32).pow(28));
    }

    #[test]
    fn log_ratio_is_exact_for_reducible_ratios() {
        let a = BigUint::from(7u32).pow(300);
        let b = BigUint::from(7u32).pow(298) * 3u32;
        assert!((mu_log_ratio(&a, &b) - (49f64 / 3.0).ln()).abs() < 1e-14);
        assert!((ln_big(&BigUint::from(2u32).pow(2000)) - 2000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }
}

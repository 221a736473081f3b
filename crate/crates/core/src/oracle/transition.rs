use std::collections::HashMap;

use crate::error::Result;
use crate::graph::{is_decomposable, Graph};
use crate::junction_tree::{CanonicalTree, JunctionTree};
use crate::moves::{classify_neighbors, connect_move, disconnect_move, reverse_proposal, Arity, Case, Side};
use crate::sampler::AcceptanceRule;
use crate::vertex_set::VertexSet;

use super::trees::brute_force_junction_trees;

/// Every junction tree of every decomposable graph on `v` vertices.
pub fn all_junction_trees(v: usize) -> Result<Vec<JunctionTree>> {
    assert!(v <= 5, "junction-tree state spaces are only enumerated for v ≤ 5");
    let mut out = Vec::new();
    for code in 0..1u64 << (v * (v - 1) / 2) {
        let g = Graph::from_code(v, code)?;
        if is_decomposable(&g) {
            out.extend(brute_force_junction_trees(&g)?);
        }
    }
    Ok(out)
}

/// Exact kernel of the junction-tree chain over all states at a given `v`.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    pub states: Vec<JunctionTree>,
    pub log_target: Vec<f64>,
    /// Row-major `n × n`.
    pub p: Vec<f64>,
}

impl TransitionMatrix {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.p[i * self.states.len() + j]
    }

    pub fn stationary_target(&self) -> Vec<f64> {
        let max = self.log_target.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = self.log_target.iter().map(|l| (l - max).exp()).collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    }

    /// `max_j |(π̃P)_j − π̃_j|`.
    pub fn stationarity_residual(&self) -> f64 {
        let n = self.states.len();
        let pi = self.stationary_target();
        (0..n)
            .map(|j| {
                let flow: f64 = (0..n).map(|i| pi[i] * self.get(i, j)).sum();
                (flow - pi[j]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Outcome subsets of `pool` with the probability the sampler draws each.
fn weighted_subsets(pool: &VertexSet, arity: Arity) -> Vec<(VertexSet, f64)> {
    let items = pool.as_slice();
    let a = items.len();
    match arity {
        Arity::Single => items.iter().map(|&x| (VertexSet::singleton(x), 1.0 / a as f64)).collect(),
        Arity::Multi => (1u32..1 << a)
            .map(|mask| {
                let set: VertexSet = (0..a).filter(|&i| mask >> i & 1 == 1).map(|i| items[i]).collect();
                let w = 1.0 / (a as f64 * binomial(a, set.len()));
                (set, w)
            })
            .collect(),
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Ordered `(X, Y)` splits of a clique with the probability the sampler
/// draws each.
fn weighted_splits(clique: &VertexSet, arity: Arity) -> Vec<(VertexSet, VertexSet, f64)> {
    let items = clique.as_slice();
    let m = items.len();
    let mut out = Vec::new();
    // Each vertex goes to X (1), Y (2) or S (0).
    let total = 3usize.pow(m as u32);
    for mut code in 0..total {
        let (mut x, mut y) = (VertexSet::new(), VertexSet::new());
        for &it in items {
            match code % 3 {
                1 => x.insert(it),
                2 => y.insert(it),
                _ => false,
            };
            code /= 3;
        }
        if x.is_empty() || y.is_empty() {
            continue;
        }
        let w = match arity {
            Arity::Single if x.len() == 1 && y.len() == 1 => 1.0 / (m * (m - 1)) as f64,
            Arity::Single => continue,
            Arity::Multi => {
                let big_m = x.len() + y.len();
                let order = factorial(x.len()) * factorial(y.len()) * factorial(m - big_m) / factorial(m);
                order / ((m - 1) * (big_m - 1)) as f64
            }
        };
        out.push((x, y, w));
    }
    out
}

fn acceptance(rule: AcceptanceRule, log_pi: f64, log_q: f64) -> f64 {
    match rule {
        AcceptanceRule::Standard => (log_pi + log_q).min(0.0).exp(),
        AcceptanceRule::TwoStage => log_pi.min(0.0).exp() * log_q.min(0.0).exp(),
    }
}

/// Assembles the exact transition kernel over all junction trees on `v`
/// vertices by enumerating every raw outcome of the proposal mechanism (fair
/// coin, anchor draw, subset or partition draw, side coin flips). Only the
/// acceptance probability uses the crate's `q` bookkeeping.
pub fn transition_matrix<F>(v: usize, log_target: F, arity: Arity, rule: AcceptanceRule) -> Result<TransitionMatrix>
where
    F: Fn(&JunctionTree) -> f64,
{
    let states = all_junction_trees(v)?;
    let n = states.len();
    let index: HashMap<CanonicalTree, usize> = states.iter().enumerate().map(|(i, j)| (j.canonical(), i)).collect();
    let lt: Vec<f64> = states.iter().map(&log_target).collect();
    let mut p = vec![0.0; n * n];
    for (i, j) in states.iter().enumerate() {
        let mut moved = 0.0;
        let mut add = |next: &JunctionTree, mass: f64, lq: f64| -> f64 {
            let t = index[&next.canonical()];
            let flow = mass * acceptance(rule, lt[t] - lt[i], lq);
            p[i * n + t] += flow;
            flow
        };

        let links = j.links();
        for link in links {
            let wl = 0.5 / links.len() as f64;
            let (a, b) = (link.a, link.b);
            for (x, wx) in weighted_subsets(&j.clique(a).difference(&link.separator), arity) {
                for (y, wy) in weighted_subsets(&j.clique(b).difference(&link.separator), arity) {
                    let prop = connect_move(j, a, b, x.clone(), y, arity)?;
                    let next = crate::moves::apply(j, &prop)?;
                    let lq = reverse_proposal(&next, &prop)? - prop.log_q_forward;
                    moved += add(&next, wl * wx * wy, lq);
                }
            }
        }

        let wc = 0.5 / j.clique_count() as f64;
        for &node in j.node_ids() {
            let clique = j.clique(node);
            if clique.len() < 2 {
                continue;
            }
            for (x, y, w) in weighted_splits(clique, arity) {
                let s = clique.difference(&x.union(&y));
                let Some(cls) = classify_neighbors(j, node, &x, &y, &s) else { continue };
                let case = match (cls.cx, cls.cy) {
                    (None, None) => Case::A,
                    (Some(_), None) if cls.nx.len() == 1 => Case::B,
                    (None, Some(_)) if cls.ny.len() == 1 => Case::C,
                    (Some(_), Some(_)) if cls.n0.is_empty() && cls.nx.len() == 1 && cls.ny.len() == 1 => Case::D,
                    _ => continue,
                };
                let flips = if case == Case::A { cls.n0.len() } else { 0 };
                for mask in 0u32..1 << flips {
                    let sides: Vec<_> = cls
                        .n0
                        .iter()
                        .take(flips)
                        .enumerate()
                        .map(|(k, &nb)| (nb, if mask >> k & 1 == 1 { Side::Y } else { Side::X }))
                        .collect();
                    let prop = disconnect_move(j, node, x.clone(), y.clone(), s.clone(), arity, sides)?;
                    let next = crate::moves::apply(j, &prop)?;
                    let lq = reverse_proposal(&next, &prop)? - prop.log_q_forward;
                    moved += add(&next, wc * w / (1u64 << flips) as f64, lq);
                }
            }
        }
        p[i * n + i] += 1.0 - moved;
    }
    Ok(TransitionMatrix { states, log_target: lt, p })
}

/// Stationarity residual `max |π̃P − π̃|` of the exact kernel.
pub fn transition_matrix_check<F>(v: usize, log_target: F, arity: Arity, rule: AcceptanceRule) -> Result<f64>
where
    F: Fn(&JunctionTree) -> f64,
{
    Ok(transition_matrix(v, log_target, arity, rule)?.stationarity_residual())
}

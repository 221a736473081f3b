use rand::Rng;

use crate::error::Result;
use crate::graph::{is_decomposable, Graph};

#[derive(Clone, Debug)]
pub struct GgRun {
    pub graph: Graph,
    pub log_score: f64,
    pub proposed: u64,
    pub accepted: u64,
}

/// Graph-state Metropolis–Hastings: toggle a uniformly chosen vertex pair,
/// reject if the result is not decomposable, otherwise accept on the
/// `π(G)` ratio (the pair proposal is symmetric). `observer` sees the graph
/// after every sweep.
pub fn reference_gg_sampler<R, S, F>(g0: &Graph, mut log_score: S, sweeps: u64, rng: &mut R, mut observer: F) -> Result<GgRun>
where
    R: Rng + ?Sized,
    S: FnMut(&Graph) -> Result<f64>,
    F: FnMut(u64, &Graph),
{
    let v = g0.vertex_count();
    let mut g = g0.clone();
    let mut current = log_score(&g)?;
    let (mut proposed, mut accepted) = (0, 0);
    for sweep in 1..=sweeps {
        if v >= 2 {
            let a = rng.random_range(0..v);
            let mut b = rng.random_range(0..v - 1);
            if b >= a {
                b += 1;
            }
            g.toggle_edge(a, b)?;
            if is_decomposable(&g) {
                proposed += 1;
                let cand = log_score(&g)?;
                let lr = cand - current;
                if lr >= 0.0 || rng.random::<f64>().ln() < lr {
                    current = cand;
                    accepted += 1;
                } else {
                    g.toggle_edge(a, b)?;
                }
            } else {
                g.toggle_edge(a, b)?;
            }
        }
        observer(sweep, &g);
    }
    Ok(GgRun { graph: g, log_score: current, proposed, accepted })
}

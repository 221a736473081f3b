use rand::RngCore;

use crate::error::Result;
use crate::junction_tree::JunctionTree;
use crate::moves::{Direction, MoveProposal};
use crate::vertex_set::VertexSet;

/// Unnormalised log probability of the graph represented by a junction tree.
pub trait GraphScore {
    /// `log π{G(J)}` up to a constant shared by all graphs.
    fn log_score(&mut self, j: &JunctionTree) -> Result<f64>;

    /// `log π{G(J′)} − log π{G(J)}` where `J′ = next` results from applying `p`
    /// to `j`. The default recomputes both scores.
    fn log_move_ratio(&mut self, j: &JunctionTree, next: &JunctionTree, p: &MoveProposal) -> Result<f64> {
        let _ = p;
        Ok(self.log_score(next)? - self.log_score(j)?)
    }

    /// Updates model parameters given the current graph; returns whether
    /// anything changed.
    fn update_parameters(&mut self, j: &JunctionTree, rng: &mut dyn RngCore) -> Result<bool> {
        let _ = (j, rng);
        Ok(false)
    }

    fn parameter_names(&self) -> Vec<&'static str> {
        Vec::new()
    }

    fn parameter_values(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<S: GraphScore + ?Sized> GraphScore for &mut S {
    fn log_score(&mut self, j: &JunctionTree) -> Result<f64> {
        (**self).log_score(j)
    }
    fn log_move_ratio(&mut self, j: &JunctionTree, next: &JunctionTree, p: &MoveProposal) -> Result<f64> {
        (**self).log_move_ratio(j, next, p)
    }
    fn update_parameters(&mut self, j: &JunctionTree, rng: &mut dyn RngCore) -> Result<bool> {
        (**self).update_parameters(j, rng)
    }
    fn parameter_names(&self) -> Vec<&'static str> {
        (**self).parameter_names()
    }
    fn parameter_values(&self) -> Vec<f64> {
        (**self).parameter_values()
    }
}

/// `π(G) ∝ 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Uniform;

impl GraphScore for Uniform {
    fn log_score(&mut self, _: &JunctionTree) -> Result<f64> {
        Ok(0.0)
    }
    fn log_move_ratio(&mut self, _: &JunctionTree, _: &JunctionTree, _: &MoveProposal) -> Result<f64> {
        Ok(0.0)
    }
}

/// `π(G) ∝ exp(−c|E|)`.
#[derive(Clone, Copy, Debug)]
pub struct EdgePenalty(pub f64);

impl GraphScore for EdgePenalty {
    fn log_score(&mut self, j: &JunctionTree) -> Result<f64> {
        Ok(-self.0 * j.edge_count() as f64)
    }
    fn log_move_ratio(&mut self, _: &JunctionTree, _: &JunctionTree, p: &MoveProposal) -> Result<f64> {
        Ok(-self.0 * signed_edge_delta(p))
    }
}

/// An inner score minus `alpha` per edge.
#[derive(Clone, Debug)]
pub struct Penalized<S> {
    pub inner: S,
    pub alpha: f64,
}

impl<S: GraphScore> GraphScore for Penalized<S> {
    fn log_score(&mut self, j: &JunctionTree) -> Result<f64> {
        Ok(self.inner.log_score(j)? - self.alpha * j.edge_count() as f64)
    }
    fn log_move_ratio(&mut self, j: &JunctionTree, next: &JunctionTree, p: &MoveProposal) -> Result<f64> {
        Ok(self.inner.log_move_ratio(j, next, p)? - self.alpha * signed_edge_delta(p))
    }
    fn update_parameters(&mut self, j: &JunctionTree, rng: &mut dyn RngCore) -> Result<bool> {
        self.inner.update_parameters(j, rng)
    }
    fn parameter_names(&self) -> Vec<&'static str> {
        self.inner.parameter_names()
    }
    fn parameter_values(&self) -> Vec<f64> {
        self.inner.parameter_values()
    }
}

pub(crate) fn signed_edge_delta(p: &MoveProposal) -> f64 {
    let d = p.edge_delta() as f64;
    match p.direction {
        Direction::Connect => d,
        Direction::Disconnect => -d,
    }
}

/// Change in a clique–separator factorised log density `Σ_C h(C) − Σ_S h(S)`
/// under `p`: a connect replaces `{X∪S, Y∪S}` by `{X∪Y∪S, S}` in every case,
/// a disconnect does the opposite.
pub fn subset_cross_ratio(p: &MoveProposal, mut h: impl FnMut(&VertexSet) -> Result<f64>) -> Result<f64> {
    let xs = p.x.union(&p.s);
    let ys = p.y.union(&p.s);
    let xys = xs.union(&p.y);
    let joined = h(&xys)? + h(&p.s)? - h(&xs)? - h(&ys)?;
    Ok(match p.direction {
        Direction::Connect => joined,
        Direction::Disconnect => -joined,
    })
}

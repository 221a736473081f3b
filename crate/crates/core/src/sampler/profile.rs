//! Gaussian profile log-likelihood of a decomposable graph, with the
//! covariance fixed at its maximum likelihood estimate for that graph.

use std::collections::HashMap;

use nalgebra::DMatrix;

use super::{subset_cross_ratio, GraphScore};
use crate::error::{Error, Result};
use crate::ggim::Dataset;
use crate::junction_tree::JunctionTree;
use crate::moves::MoveProposal;
use crate::vertex_set::VertexSet;

/// For the zero-mean Gaussian model, the maximised log-likelihood of `G`
/// factorises over cliques and separators with
/// `h(D) = −n/2 · (ln det S_D + |D|(1 + ln 2π))`, `S = YᵀY/n`.
#[derive(Clone, Debug)]
pub struct ProfileLikelihood {
    n: usize,
    covariance: DMatrix<f64>,
    cache: HashMap<VertexSet, f64>,
}

impl ProfileLikelihood {
    pub fn new(data: &Dataset) -> Self {
        let (n, v) = (data.n(), data.v());
        let covariance =
            DMatrix::from_fn(v, v, |i, j| data.column(i).iter().zip(data.column(j)).map(|(a, b)| a * b).sum::<f64>() / n as f64);
        Self { n, covariance, cache: HashMap::new() }
    }

    pub fn subset_term(&mut self, d: &VertexSet) -> Result<f64> {
        if d.is_empty() {
            return Ok(0.0);
        }
        if let Some(&h) = self.cache.get(d) {
            return Ok(h);
        }
        let idx: Vec<usize> = d.iter().map(|x| x as usize).collect();
        let block = DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.covariance[(idx[a], idx[b])]);
        let chol =
            block.cholesky().ok_or_else(|| Error::InvalidData(format!("sample covariance on {d} is singular; more replicates needed")))?;
        let log_det = 2.0 * chol.l().diagonal().iter().map(|x| x.ln()).sum::<f64>();
        let k = d.len() as f64;
        let h = -0.5 * self.n as f64 * (log_det + k * (1.0 + (2.0 * std::f64::consts::PI).ln()));
        self.cache.insert(d.clone(), h);
        Ok(h)
    }
}

impl GraphScore for ProfileLikelihood {
    fn log_score(&mut self, j: &JunctionTree) -> Result<f64> {
        let mut total = 0.0;
        for &node in j.node_ids() {
            total += self.subset_term(j.clique(node))?;
        }
        for l in j.links() {
            total -= self.subset_term(&l.separator)?;
        }
        Ok(total)
    }

    fn log_move_ratio(&mut self, _j: &JunctionTree, _next: &JunctionTree, p: &MoveProposal) -> Result<f64> {
        subset_cross_ratio(p, |d| self.subset_term(d))
    }
}

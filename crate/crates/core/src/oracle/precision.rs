use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ggim::{Dataset, GgimParams};
use crate::graph::{maximum_cardinality_search, Graph};
use crate::vertex_set::VertexSet;

/// Dense precision matrix of the intra-class model on a decomposable graph.
#[derive(Clone, Debug)]
pub struct PrecisionOracle {
    pub k: DMatrix<f64>,
    pub log_det_k: f64,
}

fn intra_class_inverse(d: &VertexSet, p: &GgimParams) -> Result<DMatrix<f64>> {
    let m = d.len();
    let sigma = DMatrix::from_fn(m, m, |i, j| if i == j { p.sigma2 } else { p.rho * p.sigma2 });
    sigma.try_inverse().ok_or_else(|| Error::ParamOutOfRange("singular intra-class block".into()))
}

fn add_padded(k: &mut DMatrix<f64>, d: &VertexSet, block: &DMatrix<f64>, sign: f64) {
    let idx: Vec<usize> = d.iter().map(|x| x as usize).collect();
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            k[(i, j)] += sign * block[(a, b)];
        }
    }
}

/// `K = Σ_C pad(Σ_C^{-1}) − Σ_S pad(Σ_S^{-1})` from a clique decomposition,
/// with each block inverted numerically.
pub fn precision_matrix_oracle(g: &Graph, p: &GgimParams) -> Result<PrecisionOracle> {
    p.check()?;
    let v = g.vertex_count();
    let d = maximum_cardinality_search(g).decomposition.ok_or(Error::NotDecomposable)?;
    let mut k = DMatrix::zeros(v, v);
    for c in &d.cliques {
        add_padded(&mut k, c, &intra_class_inverse(c, p)?, 1.0);
    }
    for s in d.separators.iter().filter(|s| !s.is_empty()) {
        add_padded(&mut k, s, &intra_class_inverse(s, p)?, -1.0);
    }
    let chol = k.clone().cholesky().ok_or_else(|| Error::ParamOutOfRange("precision matrix is not positive definite".into()))?;
    let log_det_k = 2.0 * chol.l().diagonal().iter().map(|x| x.ln()).sum::<f64>();
    Ok(PrecisionOracle { k, log_det_k })
}

/// `Σ_r log N(y^(r); 0, K^{-1})`.
pub fn mvn_log_density(oracle: &PrecisionOracle, data: &Dataset) -> f64 {
    let v = data.v();
    let mut total = 0.0;
    for r in 0..data.n() {
        let y = DVector::from_vec(data.row(r));
        let quad = (y.transpose() * &oracle.k * &y)[(0, 0)];
        total += -0.5 * (v as f64 * (2.0 * std::f64::consts::PI).ln() - oracle.log_det_k + quad);
    }
    total
}

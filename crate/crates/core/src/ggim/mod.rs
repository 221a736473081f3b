//! Graphical Gaussian intra-class model: `y ~ N(0, Σ_G(σ², ρ))`, where
//! `Σ_G` has `σ²` on the diagonal, `ρσ²` on the edges of a decomposable `G`
//! and zero precision off the graph.

mod data;
mod stats;

use std::sync::Arc;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Gamma, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::junction_tree::{log_mu, JunctionTree};
use crate::moves::MoveProposal;
use crate::sampler::{subset_cross_ratio, GraphScore};
use crate::vertex_set::VertexSet;

pub use data::Dataset;
pub use stats::{StatsCache, SubsetStats, DEFAULT_CACHE_CAPACITY};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GgimParams {
    pub sigma2: f64,
    pub rho: f64,
    pub v: usize,
}

impl GgimParams {
    pub fn new(sigma2: f64, rho: f64, v: usize) -> Result<Self> {
        let p = Self { sigma2, rho, v };
        p.check()?;
        Ok(p)
    }

    pub fn rho_lower_bound(v: usize) -> f64 {
        if v <= 1 {
            f64::NEG_INFINITY
        } else {
            -1.0 / (v as f64 - 1.0)
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.v == 0 {
            return Err(Error::ParamOutOfRange("dimension must be positive".into()));
        }
        if !(self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return Err(Error::ParamOutOfRange(format!("sigma2 = {} must be positive", self.sigma2)));
        }
        if !(self.rho > Self::rho_lower_bound(self.v) && self.rho < 1.0) {
            return Err(Error::ParamOutOfRange(format!("rho = {} outside (-1/(v-1), 1) for v = {}", self.rho, self.v)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GraphPrior {
    Uniform,
    /// `p(G) ∝ exp(−c|E|)`.
    EdgePenalty(f64),
}

impl GraphPrior {
    pub fn log_prior(&self, n_edges: usize) -> f64 {
        match *self {
            GraphPrior::Uniform => 0.0,
            GraphPrior::EdgePenalty(c) => -c * n_edges as f64,
        }
    }
}

/// `σ^{-2} ~ Gamma(alpha, rate = beta)`, `ρ` uniform on its range, and a
/// graph prior.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PriorSpec {
    pub alpha: f64,
    pub beta: f64,
    pub graph_prior: GraphPrior,
}

impl Default for PriorSpec {
    fn default() -> Self {
        Self { alpha: 1.0, beta: 1.0, graph_prior: GraphPrior::Uniform }
    }
}

impl PriorSpec {
    pub fn check(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.beta > 0.0) {
            return Err(Error::ParamOutOfRange("Gamma prior needs alpha, beta > 0".into()));
        }
        Ok(())
    }
}

/// `1 − ρ + v_D ρ`, guarded against non-positive values.
fn denom(v_d: usize, rho: f64) -> Result<f64> {
    let d = 1.0 - rho + v_d as f64 * rho;
    if d > 0.0 && d.is_finite() {
        Ok(d)
    } else {
        Err(Error::ParamOutOfRange(format!("1 - rho + v_D rho = {d} for v_D = {v_d}, rho = {rho}")))
    }
}

/// Replicate-summed log density of `y_D` under the intra-class model on `D`.
pub fn subset_log_density(stats: &SubsetStats, n: usize, p: &GgimParams) -> Result<f64> {
    if stats.v_d == 0 {
        return Ok(0.0);
    }
    let vd = stats.v_d as f64;
    let dd = denom(stats.v_d, p.rho)?;
    let one_minus = 1.0 - p.rho;
    let per_rep = -0.5 * vd * (LN_2PI + p.sigma2.ln()) - 0.5 * ((vd - 1.0) * one_minus.ln() + dd.ln());
    let quad = (stats.q2 - p.rho * stats.q1 / dd) / (2.0 * p.sigma2 * one_minus);
    Ok(n as f64 * per_rep - quad)
}

/// `log p(y | G, σ², ρ)` as `Σ_C − Σ_S` of subset densities.
pub fn joint_log_density(data: &Dataset, j: &JunctionTree, p: &GgimParams, cache: &mut StatsCache) -> Result<f64> {
    check_dims(data, j, p)?;
    let n = data.n();
    let mut total = 0.0;
    for &node in j.node_ids() {
        total += subset_log_density(&cache.get(data, j.clique(node)), n, p)?;
    }
    for l in j.links() {
        total -= subset_log_density(&cache.get(data, &l.separator), n, p)?;
    }
    Ok(total)
}

fn check_dims(data: &Dataset, j: &JunctionTree, p: &GgimParams) -> Result<()> {
    p.check()?;
    if data.v() != j.vertex_count() || p.v != data.v() {
        return Err(Error::InvalidData(format!(
            "dimension mismatch: data has {} columns, graph {} vertices, parameters v = {}",
            data.v(),
            j.vertex_count(),
            p.v
        )));
    }
    Ok(())
}

/// `f(D) = 1 + v_D ρ/(1 − ρ)`.
pub fn f_term(v_d: usize, rho: f64) -> f64 {
    1.0 + v_d as f64 * rho / (1.0 - rho)
}

/// `H(D) = q1(D)/(1 − ρ + v_D ρ)`; zero for the empty set.
pub fn h_term(stats: &SubsetStats, rho: f64) -> Result<f64> {
    if stats.v_d == 0 {
        return Ok(0.0);
    }
    Ok(stats.q1 / denom(stats.v_d, rho)?)
}

/// Log density change when `{A∪S, B∪S}` are replaced by `{A∪B∪S, S}` in
/// the clique–separator factorisation.
pub fn log_cross_ratio(a: &VertexSet, b: &VertexSet, s: &VertexSet, data: &Dataset, p: &GgimParams, cache: &mut StatsCache) -> Result<f64> {
    p.check()?;
    if a.is_empty() || b.is_empty() || a.intersects(b) || a.intersects(s) || b.intersects(s) {
        return Err(Error::InvalidData("A, B must be non-empty and A, B, S pairwise disjoint".into()));
    }
    let as_ = a.union(s);
    let bs = b.union(s);
    let abs = as_.union(b);
    let st: Vec<SubsetStats> = [&as_, &bs, &abs, s].iter().map(|d| cache.get(data, d)).collect();
    let rho = p.rho;
    let f = |x: &SubsetStats| f_term(x.v_d, rho).ln();
    let log_f = f(&st[0]) + f(&st[1]) - f(&st[2]) - f(&st[3]);
    let h = h_term(&st[2], rho)? + h_term(&st[3], rho)? - h_term(&st[0], rho)? - h_term(&st[1], rho)?;
    Ok(0.5 * data.n() as f64 * log_f + rho / (2.0 * p.sigma2 * (1.0 - rho)) * h)
}

/// `log p(y|G,σ²,ρ) + log p(G) − [mu_correction] log μ(G)`.
pub fn graph_log_target(
    j: &JunctionTree,
    data: &Dataset,
    p: &GgimParams,
    prior: &PriorSpec,
    cache: &mut StatsCache,
    mu_correction: bool,
) -> Result<f64> {
    let mut t = joint_log_density(data, j, p, cache)? + prior.graph_prior.log_prior(j.edge_count());
    if mu_correction {
        t -= log_mu(j);
    }
    Ok(t)
}

/// Draws `n` replicates from `N(0, Σ_G(σ², ρ))`, visiting the tree from its
/// lowest-index node and drawing each clique's new vertices given its
/// separator with the parent.
pub fn simulate_data<R: Rng + ?Sized>(j: &JunctionTree, p: &GgimParams, n: usize, rng: &mut R) -> Result<Dataset> {
    p.check()?;
    if p.v != j.vertex_count() {
        return Err(Error::InvalidData("parameter dimension differs from the graph".into()));
    }
    if n == 0 {
        return Err(Error::InvalidData("need at least one replicate".into()));
    }
    let v = j.vertex_count();
    // (separator, new vertices) in visiting order.
    let mut plan: Vec<(VertexSet, VertexSet)> = Vec::new();
    let root = *j.node_ids().iter().min().expect("a tree has nodes");
    let mut seen = vec![false; j.node_ids().iter().max().map_or(0, |m| m + 1)];
    let mut queue = std::collections::VecDeque::from([(root, VertexSet::new())]);
    seen[root] = true;
    while let Some((node, sep)) = queue.pop_front() {
        plan.push((sep.clone(), j.clique(node).difference(&sep)));
        let mut nbrs: Vec<_> = j.neighbors(node).collect();
        nbrs.sort_unstable();
        for (m, l) in nbrs {
            if !seen[m] {
                seen[m] = true;
                queue.push_back((m, j.link(l).separator.clone()));
            }
        }
    }
    let rho = p.rho;
    let a = ((1.0 - rho) * p.sigma2).sqrt();
    let mut columns = vec![0.0; n * v];
    let mut z = Vec::new();
    for r in 0..n {
        for (sep, fresh) in &plan {
            let k = fresh.len();
            if k == 0 {
                continue;
            }
            let c = if sep.is_empty() { rho / (1.0 - rho) } else { rho / denom(sep.len(), rho)? };
            let s_sum: f64 = sep.iter().map(|i| columns[i as usize * n + r]).sum();
            let mean = if sep.is_empty() { 0.0 } else { c * s_sum };
            let kf = k as f64;
            let b = (-1.0 + (1.0 + c * kf).sqrt()) / kf;
            z.clear();
            z.extend((0..k).map(|_| rng.sample::<f64, _>(StandardNormal)));
            let tot: f64 = z.iter().sum();
            for (idx, i) in fresh.iter().enumerate() {
                columns[i as usize * n + r] = mean + a * (z[idx] + b * tot);
            }
        }
    }
    Ok(Dataset::from_columns(n, v, columns))
}

/// `Q = Σ_r yᵀy − ρ Σ_C H(C) + ρ Σ_S H(S)`.
pub fn quadratic_form(data: &Dataset, j: &JunctionTree, rho: f64, cache: &mut StatsCache) -> Result<f64> {
    let mut h = 0.0;
    for &node in j.node_ids() {
        h += h_term(&cache.get(data, j.clique(node)), rho)?;
    }
    for l in j.links() {
        h -= h_term(&cache.get(data, &l.separator), rho)?;
    }
    Ok(data.total_square_sum() - rho * h)
}

/// Exact draw of `σ²` from its full conditional:
/// `σ^{-2} | ρ, G, y ~ Gamma(α + nv/2, rate β + Q/(2(1−ρ)))`.
pub fn gibbs_update_sigma2<R: Rng + ?Sized>(
    data: &Dataset,
    j: &JunctionTree,
    rho: f64,
    prior: &PriorSpec,
    cache: &mut StatsCache,
    rng: &mut R,
) -> Result<f64> {
    prior.check()?;
    let (shape, rate) = sigma2_posterior(data, j, rho, prior, cache)?;
    let precision = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::ParamOutOfRange(e.to_string()))?.sample(rng);
    Ok(1.0 / precision)
}

/// Shape and rate of the Gamma full conditional of `σ^{-2}`.
pub fn sigma2_posterior(data: &Dataset, j: &JunctionTree, rho: f64, prior: &PriorSpec, cache: &mut StatsCache) -> Result<(f64, f64)> {
    GgimParams::new(1.0, rho, data.v())?;
    let q = quadratic_form(data, j, rho, cache)?;
    let shape = prior.alpha + (data.n() * data.v()) as f64 / 2.0;
    let rate = prior.beta + q / (2.0 * (1.0 - rho));
    Ok((shape, rate))
}

/// `g(ρ) = ln[{ρ + 1/(v−1)}/(1 − ρ)]`.
pub fn rho_transform(rho: f64, v: usize) -> f64 {
    ((rho + 1.0 / (v as f64 - 1.0)) / (1.0 - rho)).ln()
}

/// Inverse of [`rho_transform`].
pub fn rho_inverse(g: f64, v: usize) -> f64 {
    let vf = v as f64;
    1.0 - (vf / (vf - 1.0)) / (g.exp() + 1.0)
}

/// One random-walk Metropolis step for `ρ` on the `g` scale with a
/// `N(0, step²)` innovation and a uniform prior on the valid range. Returns
/// the new value and whether the proposal was accepted.
pub fn mh_update_rho<R: Rng + ?Sized>(
    data: &Dataset,
    j: &JunctionTree,
    p: &GgimParams,
    step: f64,
    cache: &mut StatsCache,
    rng: &mut R,
) -> Result<(f64, bool)> {
    p.check()?;
    let v = p.v;
    if v < 2 {
        return Ok((p.rho, false));
    }
    let z: f64 = Normal::new(0.0, step).map_err(|e| Error::ParamOutOfRange(e.to_string()))?.sample(rng);
    let proposed = rho_inverse(rho_transform(p.rho, v) + z, v);
    let cand = GgimParams { rho: proposed, ..*p };
    if cand.check().is_err() {
        return Ok((p.rho, false));
    }
    let jac = |r: f64| ((r + 1.0 / (v as f64 - 1.0)) * (1.0 - r)).ln();
    let log_alpha = joint_log_density(data, j, &cand, cache)? - joint_log_density(data, j, p, cache)? + jac(proposed) - jac(p.rho);
    if log_alpha >= 0.0 || rng.random::<f64>().ln() < log_alpha {
        Ok((proposed, true))
    } else {
        Ok((p.rho, false))
    }
}

/// Graph posterior under the intra-class model, usable as a chain score.
/// `σ²` and `ρ` are refreshed by [`GraphScore::update_parameters`] unless
/// held fixed.
#[derive(Clone, Debug)]
pub struct GgimModel {
    data: Arc<Dataset>,
    pub params: GgimParams,
    pub prior: PriorSpec,
    pub rho_step: f64,
    pub fixed_parameters: bool,
    cache: StatsCache,
    rho_proposals: u64,
    rho_accepts: u64,
}

impl GgimModel {
    pub fn new(data: Arc<Dataset>, params: GgimParams, prior: PriorSpec) -> Result<Self> {
        params.check()?;
        prior.check()?;
        if params.v != data.v() {
            return Err(Error::InvalidData(format!("data has {} columns but v = {}", data.v(), params.v)));
        }
        Ok(Self {
            data,
            params,
            prior,
            rho_step: 0.5,
            fixed_parameters: false,
            cache: StatsCache::default(),
            rho_proposals: 0,
            rho_accepts: 0,
        })
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn cache(&self) -> &StatsCache {
        &self.cache
    }

    pub fn rho_acceptance_rate(&self) -> f64 {
        if self.rho_proposals == 0 {
            0.0
        } else {
            self.rho_accepts as f64 / self.rho_proposals as f64
        }
    }
}

impl GraphScore for GgimModel {
    fn log_score(&mut self, j: &JunctionTree) -> Result<f64> {
        Ok(joint_log_density(&self.data, j, &self.params, &mut self.cache)? + self.prior.graph_prior.log_prior(j.edge_count()))
    }

    fn log_move_ratio(&mut self, _j: &JunctionTree, _next: &JunctionTree, p: &MoveProposal) -> Result<f64> {
        let mut lr = log_cross_ratio(&p.x, &p.y, &p.s, &self.data, &self.params, &mut self.cache)?;
        if p.direction == crate::moves::Direction::Disconnect {
            lr = -lr;
        }
        Ok(lr - edge_prior_delta(&self.prior.graph_prior, p))
    }

    fn update_parameters(&mut self, j: &JunctionTree, rng: &mut dyn RngCore) -> Result<bool> {
        if self.fixed_parameters {
            return Ok(false);
        }
        self.params.sigma2 = gibbs_update_sigma2(&self.data, j, self.params.rho, &self.prior, &mut self.cache, rng)?;
        let (rho, accepted) = mh_update_rho(&self.data, j, &self.params, self.rho_step, &mut self.cache, rng)?;
        self.params.rho = rho;
        self.rho_proposals += 1;
        self.rho_accepts += accepted as u64;
        Ok(true)
    }

    fn parameter_names(&self) -> Vec<&'static str> {
        vec!["sigma2", "rho"]
    }

    fn parameter_values(&self) -> Vec<f64> {
        vec![self.params.sigma2, self.params.rho]
    }
}

/// `−Δ log p(G)` for the move.
fn edge_prior_delta(prior: &GraphPrior, p: &MoveProposal) -> f64 {
    match *prior {
        GraphPrior::Uniform => 0.0,
        GraphPrior::EdgePenalty(c) => c * crate::sampler::signed_edge_delta(p),
    }
}

/// Generic clique–separator evaluation of a move, used to cross-check the
/// closed-form cross ratio.
pub fn move_density_change(data: &Dataset, p: &MoveProposal, params: &GgimParams, cache: &mut StatsCache) -> Result<f64> {
    subset_cross_ratio(p, |d| subset_log_density(&cache.get(data, d), data.n(), params))
}

#[cfg(test)]
mod tests;

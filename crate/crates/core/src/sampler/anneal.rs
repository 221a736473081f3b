//! Simulated annealing for the maximum penalised-likelihood graph.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{mh_step, ChainOptions, ChainState, ChainStats, GraphScore, Penalized, TargetDistribution, Trace, TraceRecord};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::junction_tree::JunctionTree;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnnealOptions {
    /// Temperature multiplier applied after every sweep.
    pub cooling_factor: f64,
    pub penalty_per_edge: f64,
    pub initial_temperature: f64,
}

impl AnnealOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.cooling_factor > 0.0 && self.cooling_factor <= 1.0) {
            return Err(Error::Config(format!("cooling factor {} outside (0, 1]", self.cooling_factor)));
        }
        if self.initial_temperature.is_nan() || self.initial_temperature <= 0.0 || !self.penalty_per_edge.is_finite() {
            return Err(Error::Config("initial temperature must be positive and the penalty finite".into()));
        }
        Ok(())
    }
}

/// `α = ln((v − 1)/d − 1)`, the per-edge penalty favouring graphs of average
/// degree about `d`.
pub fn penalty_per_edge(v: usize, d: f64) -> Result<f64> {
    let arg = (v as f64 - 1.0) / d - 1.0;
    if arg.is_nan() || arg <= 0.0 {
        return Err(Error::Config(format!("degree parameter {d} too large for {v} vertices")));
    }
    Ok(arg.ln())
}

#[derive(Clone, Debug)]
pub struct AnnealResult {
    pub best_graph: Graph,
    pub best_tree: JunctionTree,
    /// Penalised log-likelihood of the best graph (untempered).
    pub best_score: f64,
    pub best_first_sweep: u64,
    /// Sweeps the chain spent in the best graph.
    pub best_visits: u64,
    pub final_state: ChainState,
    pub final_temperature: f64,
    pub trace: Trace,
    pub stats: ChainStats,
}

/// Metropolis–Hastings on `exp{(log L(G) − α|E|)/T}` with geometric cooling.
/// The μ correction is off: this searches over graphs rather than sampling.
pub fn anneal<S: GraphScore>(j0: JunctionTree, score: S, a_opts: &AnnealOptions, opts: &ChainOptions) -> Result<AnnealResult> {
    a_opts.validate()?;
    opts.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut target = TargetDistribution {
        score: Penalized { inner: score, alpha: a_opts.penalty_per_edge },
        mu_correction: false,
        temperature: a_opts.initial_temperature,
    };
    let mut state = ChainState::new(j0, &mut target)?;
    let mut names = target.score.parameter_names();
    names.push("temperature");
    let mut trace = Trace::new(names);
    let mut stats = ChainStats::default();

    let mut best_tree = state.tree.clone();
    let mut best_graph = best_tree.graph_of();
    let mut best_score = state.log_score();
    let mut best_first_sweep = 0;
    let mut best_visits = 0;
    for sweep in 1..=opts.sweeps {
        let out = mh_step(&mut state, &mut target, opts.arity, opts.rule, &mut rng)?;
        stats.sweeps += 1;
        stats.proposed += out.proposed as u64;
        stats.accepted += out.accepted as u64;
        if sweep % opts.randomize_tree_every == 0 {
            state.randomize(&mut rng);
        }
        let s = state.log_score();
        let tol = 1e-9 * s.abs().max(1.0);
        if s > best_score + tol {
            best_score = s;
            best_tree = state.tree.clone();
            best_graph = best_tree.graph_of();
            best_first_sweep = sweep;
            best_visits = 1;
        } else if s >= best_score - tol && state.tree.graph_of() == best_graph {
            best_visits += 1;
        }
        if sweep % opts.thin == 0 {
            let mut params = target.score.parameter_values();
            params.push(target.temperature);
            trace.push(TraceRecord {
                sweep,
                log_target: s,
                n_edges: state.tree.edge_count(),
                n_cliques: state.tree.clique_count(),
                accepted: out.accepted,
                params,
            });
        }
        target.temperature *= a_opts.cooling_factor;
    }
    Ok(AnnealResult {
        best_graph,
        best_tree,
        best_score,
        best_first_sweep,
        best_visits,
        final_state: state,
        final_temperature: target.temperature,
        trace,
        stats,
    })
}

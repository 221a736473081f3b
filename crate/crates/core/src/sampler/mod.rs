//! Metropolis–Hastings chain on junction trees.
//!
//! The chain targets `π̃(J) = π{G(J)} / μ{G(J)}` (or `π{G(J)}` with the μ
//! correction switched off). Each sweep flips a fair coin between a connect
//! and a disconnect proposal; the coin's 1/2 cancels in the acceptance
//! ratio.

mod anneal;
mod profile;
mod score;
mod trace;

use num_bigint::BigUint;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::junction_tree::{count_by_separators, mu_log_ratio, randomize_junction_tree, JunctionTree};
use crate::moves::{self, Arity, Direction, MoveProposal, Proposal};
use crate::vertex_set::VertexSet;

pub use anneal::{anneal, penalty_per_edge, AnnealOptions, AnnealResult};
pub use profile::ProfileLikelihood;
pub(crate) use score::signed_edge_delta;
pub use score::{subset_cross_ratio, EdgePenalty, GraphScore, Penalized, Uniform};
pub use trace::{EdgeFrequencies, Trace, TraceRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcceptanceRule {
    Standard,
    TwoStage,
}

/// Target `π̃` built from a graph score, optionally divided by `μ(G)` and
/// tempered by `1/T`.
#[derive(Clone, Debug)]
pub struct TargetDistribution<S> {
    pub score: S,
    pub mu_correction: bool,
    pub temperature: f64,
}

impl<S: GraphScore> TargetDistribution<S> {
    pub fn new(score: S, mu_correction: bool) -> Self {
        Self { score, mu_correction, temperature: 1.0 }
    }

    /// `log π̃(J)` at temperature one.
    pub fn log_target(&mut self, j: &JunctionTree) -> Result<f64> {
        let s = self.score.log_score(j)?;
        Ok(if self.mu_correction { s - crate::junction_tree::log_mu(j) } else { s })
    }
}

#[derive(Clone, Debug)]
pub struct ChainOptions {
    pub sweeps: u64,
    pub thin: u64,
    pub param_update_every: u64,
    pub randomize_tree_every: u64,
    pub rule: AcceptanceRule,
    pub arity: Arity,
    pub seed: u64,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            sweeps: 1000,
            thin: 100,
            param_update_every: 1000,
            randomize_tree_every: 1000,
            rule: AcceptanceRule::Standard,
            arity: Arity::Single,
            seed: 1,
        }
    }
}

impl ChainOptions {
    pub fn validate(&self) -> Result<()> {
        if self.thin == 0 || self.param_update_every == 0 || self.randomize_tree_every == 0 {
            return Err(Error::Config("thin and update cadences must be at least 1".into()));
        }
        Ok(())
    }
}

/// The chain's current tree together with cached quantities.
#[derive(Clone, Debug)]
pub struct ChainState {
    pub tree: JunctionTree,
    /// `μ(G)` of the current graph; kept only when the target needs it.
    mu: Option<BigUint>,
    /// Untempered `log π{G(J)}`.
    log_score: f64,
}

impl ChainState {
    pub fn new<S: GraphScore>(tree: JunctionTree, target: &mut TargetDistribution<S>) -> Result<Self> {
        let log_score = target.score.log_score(&tree)?;
        let mu = target.mu_correction.then(|| count_by_separators(&tree));
        Ok(Self { tree, mu, log_score })
    }

    pub fn log_score(&self) -> f64 {
        self.log_score
    }

    /// `log π̃` of the current state.
    pub fn log_target(&self) -> f64 {
        match &self.mu {
            Some(mu) => self.log_score - mu_log_ratio(mu, &BigUint::from(1u8)),
            None => self.log_score,
        }
    }

    /// Re-evaluates the score, e.g. after model parameters changed.
    pub fn refresh<S: GraphScore>(&mut self, target: &mut TargetDistribution<S>) -> Result<()> {
        self.log_score = target.score.log_score(&self.tree)?;
        Ok(())
    }

    /// Replaces the tree by a uniformly drawn equivalent one; `π̃` is unchanged.
    pub fn randomize<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        self.tree = randomize_junction_tree(&self.tree, rng);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StepOutcome {
    pub direction: Direction,
    /// False when the proposal mechanism itself rejected.
    pub proposed: bool,
    pub accepted: bool,
}

/// Accepts with probability `min{1, π-ratio}·min{1, q-ratio}`, testing the
/// q-ratio first so the π-ratio is only evaluated when needed.
pub fn two_stage_accept<R: Rng + ?Sized>(log_pi_ratio: f64, log_q_ratio: f64, rng: &mut R) -> bool {
    two_stage_lazy(log_q_ratio, || Ok(log_pi_ratio), rng).expect("infallible")
}

fn two_stage_lazy<R: Rng + ?Sized>(log_q_ratio: f64, log_pi_ratio: impl FnOnce() -> Result<f64>, rng: &mut R) -> Result<bool> {
    if log_q_ratio < 0.0 && rng.random::<f64>().ln() >= log_q_ratio {
        return Ok(false);
    }
    let lp = log_pi_ratio()?;
    Ok(lp >= 0.0 || rng.random::<f64>().ln() < lp)
}

fn standard_accept<R: Rng + ?Sized>(log_ratio: f64, rng: &mut R) -> bool {
    log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio
}

/// One Metropolis–Hastings update of `state`.
pub fn mh_step<S: GraphScore, R: Rng + ?Sized>(
    state: &mut ChainState,
    target: &mut TargetDistribution<S>,
    arity: Arity,
    rule: AcceptanceRule,
    rng: &mut R,
) -> Result<StepOutcome> {
    let direction = if rng.random_bool(0.5) { Direction::Connect } else { Direction::Disconnect };
    let p = match moves::propose(&state.tree, direction, arity, rng) {
        Proposal::Move(p) => p,
        Proposal::Reject(_) => return Ok(StepOutcome { direction, proposed: false, accepted: false }),
    };
    let next = moves::apply(&state.tree, &p)?;
    let log_q_ratio = moves::reverse_proposal(&next, &p)? - p.log_q_forward;

    let mut delta_score = 0.0;
    let mut new_mu = None;
    let mut log_pi_ratio = || -> Result<f64> {
        delta_score = target.score.log_move_ratio(&state.tree, &next, &p)?;
        let mut lp = delta_score / target.temperature;
        if let Some(mu) = &state.mu {
            let m = count_by_separators(&next);
            lp += mu_log_ratio(mu, &m);
            new_mu = Some(m);
        }
        Ok(lp)
    };
    let accepted = match rule {
        AcceptanceRule::Standard => {
            let lp = log_pi_ratio()?;
            standard_accept(lp + log_q_ratio, rng)
        }
        AcceptanceRule::TwoStage => two_stage_lazy(log_q_ratio, &mut log_pi_ratio, rng)?,
    };
    if accepted {
        state.tree = next;
        state.log_score += delta_score;
        if new_mu.is_some() {
            state.mu = new_mu;
        }
    }
    Ok(StepOutcome { direction, proposed: true, accepted })
}

/// Counters accumulated over a run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChainStats {
    pub sweeps: u64,
    pub proposed: u64,
    pub accepted: u64,
}

impl ChainStats {
    pub fn acceptance_rate(&self) -> f64 {
        if self.sweeps == 0 {
            0.0
        } else {
            self.accepted as f64 / self.sweeps as f64
        }
    }
}

#[derive(Clone, Debug)]
pub struct ChainRun {
    pub state: ChainState,
    pub trace: Trace,
    pub stats: ChainStats,
}

/// Runs `opts.sweeps` updates from `j0`. `observer` sees the state after
/// every sweep (sweep index starting at 1).
///
/// Within a sweep the order is: MH update, tree randomization, parameter
/// update, trace record, observer.
pub fn run_chain<S, F>(j0: JunctionTree, target: &mut TargetDistribution<S>, opts: &ChainOptions, mut observer: F) -> Result<ChainRun>
where
    S: GraphScore,
    F: FnMut(u64, &ChainState),
{
    opts.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut state = ChainState::new(j0, target)?;
    let mut trace = Trace::new(target.score.parameter_names());
    let mut stats = ChainStats::default();
    for sweep in 1..=opts.sweeps {
        let out = mh_step(&mut state, target, opts.arity, opts.rule, &mut rng)?;
        stats.sweeps += 1;
        stats.proposed += out.proposed as u64;
        stats.accepted += out.accepted as u64;
        if sweep % opts.randomize_tree_every == 0 {
            state.randomize(&mut rng);
        }
        if sweep % opts.param_update_every == 0 {
            step_parameters(&mut state, target, &mut rng)?;
        }
        if sweep % opts.thin == 0 {
            trace.push(TraceRecord {
                sweep,
                log_target: state.log_target(),
                n_edges: state.tree.edge_count(),
                n_cliques: state.tree.clique_count(),
                accepted: out.accepted,
                params: target.score.parameter_values(),
            });
        }
        observer(sweep, &state);
    }
    Ok(ChainRun { state, trace, stats })
}

fn step_parameters<S: GraphScore>(state: &mut ChainState, target: &mut TargetDistribution<S>, rng: &mut dyn RngCore) -> Result<()> {
    if target.score.update_parameters(&state.tree, rng)? {
        state.refresh(target)?;
    }
    Ok(())
}

/// Single-edge connect moves leading from `j` to the single-clique tree,
/// one added edge per move.
pub fn irreducibility_path(j: &JunctionTree) -> Result<Vec<MoveProposal>> {
    let mut path = Vec::new();
    let mut cur = j.clone();
    while let Some(link) = cur.links().first() {
        let (a, b) = (link.a, link.b);
        let x = cur.clique(a).difference(&link.separator).min_vertex().expect("cliques are not nested");
        let y = cur.clique(b).difference(&link.separator).min_vertex().expect("cliques are not nested");
        let p = moves::connect_move(&cur, a, b, VertexSet::singleton(x), VertexSet::singleton(y), Arity::Single)?;
        cur = moves::apply(&cur, &p)?;
        path.push(p);
    }
    Ok(path)
}

//! Command-line front end: argument types and one function per subcommand.
//!
//! Every file written carries `#` metadata lines (tool version, seed, and
//! the parsed configuration) so runs can be reproduced from their outputs.

use std::fmt::Debug;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::ggim::{simulate_data, Dataset, GgimModel, GgimParams, GraphPrior, PriorSpec};
use crate::junction_tree::{count_by_separators, count_junction_trees, log_mu};
use crate::moves::Arity;
use crate::oracle::{
    brute_force_junction_trees, enumerate_decomposable, enumerate_decomposable_with, equal_mass_bins, transition_matrix_check,
    FrequencyRecorder,
};
use crate::sampler::{
    anneal, penalty_per_edge, run_chain, AcceptanceRule, AnnealOptions, ChainOptions, EdgeFrequencies, EdgePenalty, GraphScore, Penalized,
    ProfileLikelihood, TargetDistribution,
};
use crate::{Graph, JunctionTree};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Bins used for the χ² comparison in `sample`.
const SAMPLE_BINS: usize = 50;
const SAMPLE_BATCHES: usize = 50;

#[derive(Parser, Debug)]
#[command(name = "jtree-mcmc", version, about = "MCMC over decomposable graphs with junction trees as the chain state")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the built-in oracle checks; nonzero exit on any failure.
    Verify,
    /// Sample junction trees under a flat or graph-uniform target.
    Sample(SampleArgs),
    /// Sample the graph, σ² and ρ posterior of the intra-class model.
    Fit(FitArgs),
    /// Simulate data from the intra-class model on a decomposable graph.
    Simulate(SimulateArgs),
    /// Replicated simulated annealing for the penalised-likelihood graph.
    Anneal(AnnealArgs),
    /// Count the junction trees of a decomposable graph.
    CountJt(CountJtArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ArityArg {
    Single,
    Multi,
}

impl From<ArityArg> for Arity {
    fn from(a: ArityArg) -> Self {
        match a {
            ArityArg::Single => Arity::Single,
            ArityArg::Multi => Arity::Multi,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Standard,
    TwoStage,
}

impl From<RuleArg> for AcceptanceRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Standard => AcceptanceRule::Standard,
            RuleArg::TwoStage => AcceptanceRule::TwoStage,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Every junction tree equally likely.
    JtUniform,
    /// Every decomposable graph equally likely.
    GraphUniform,
}

#[derive(Args, Debug, Clone)]
pub struct ChainArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000)]
    pub sweeps: u64,
    /// Write a trace record every this many sweeps.
    #[arg(long, default_value_t = 100)]
    pub thin: u64,
    #[arg(long, value_enum, default_value_t = ArityArg::Single)]
    pub arity: ArityArg,
    #[arg(long, value_enum, default_value_t = RuleArg::Standard)]
    pub rule: RuleArg,
    /// Sweeps between parameter updates.
    #[arg(long, default_value_t = 1000)]
    pub param_every: u64,
    /// Sweeps between junction tree randomizations.
    #[arg(long, default_value_t = 1000)]
    pub randomize_every: u64,
}

impl ChainArgs {
    fn options(&self) -> ChainOptions {
        ChainOptions {
            sweeps: self.sweeps,
            thin: self.thin,
            param_update_every: self.param_every,
            randomize_tree_every: self.randomize_every,
            rule: self.rule.into(),
            arity: self.arity.into(),
            seed: self.seed,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct SampleArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Vertex count of the edgeless start graph.
    #[arg(long, short = 'v', required_unless_present = "graph")]
    pub vertices: Option<usize>,
    /// Start graph (edge-list file); overrides `--vertices`.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Divide the target by μ(G); `on` is the same as `--mode graph-uniform`.
    #[arg(long, value_enum)]
    pub mu_correction: Option<Switch>,
    /// Per-edge log penalty added to the flat score.
    #[arg(long, default_value_t = 0.0)]
    pub edge_penalty: f64,
    /// Sweeps discarded before the frequency comparison (default 1% of the run).
    #[arg(long)]
    pub burn_in: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum, default_value_t = Switch::On)]
    pub mu_correction: Switch,
    /// Shape of the Gamma prior on 1/σ².
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Rate of the Gamma prior on 1/σ².
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Random-walk step on the transformed ρ scale.
    #[arg(long, default_value_t = 0.5)]
    pub rho_step: f64,
    /// Graph prior `exp(−c|E|)`; zero gives the uniform prior.
    #[arg(long, default_value_t = 0.0)]
    pub edge_penalty: f64,
    /// Sweeps excluded from the edge frequencies (default: first half).
    #[arg(long)]
    pub burn_in: Option<u64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, short = 'n')]
    pub n: usize,
    #[arg(long)]
    pub sigma2: f64,
    #[arg(long)]
    pub rho: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct AnnealArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long)]
    pub data: PathBuf,
    /// Target average degree; the per-edge penalty is ln((v − 1)/d − 1).
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
    #[arg(long, default_value_t = 0.999_999)]
    pub cooling: f64,
    #[arg(long, default_value_t = 1.0)]
    pub initial_temperature: f64,
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    /// Reference graph whose penalised score each replicate is compared with.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct CountJtArgs {
    #[arg(long)]
    pub graph: PathBuf,
}

/// Runs a parsed command line, writing the human-readable report to `out`.
/// Returns the process exit code.
pub fn run(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<u8> {
    match &cli.command {
        Command::Verify => cmd_verify(out),
        Command::Sample(a) => cmd_sample(a, out).map(|_| 0),
        Command::Fit(a) => cmd_fit(a, out).map(|_| 0),
        Command::Simulate(a) => cmd_simulate(a, out).map(|_| 0),
        Command::Anneal(a) => cmd_anneal(a, out).map(|_| 0),
        Command::CountJt(a) => cmd_count_jt(a, out).map(|_| 0),
    }
}

/// `#`-prefixed metadata block.
pub fn metadata(command: &str, seed: Option<u64>, config: &impl Debug, extra: &[(&str, String)]) -> String {
    let mut s = format!("# jtree-mcmc {VERSION}\n# command: {command}\n");
    if let Some(seed) = seed {
        s.push_str(&format!("# seed: {seed}\n"));
    }
    s.push_str(&format!("# config: {config:?}\n"));
    for (k, v) in extra {
        s.push_str(&format!("# {k}: {v}\n"));
    }
    s
}

fn create(dir: &Path, name: &str, meta: &str) -> anyhow::Result<BufWriter<File>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let mut w = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
    w.write_all(meta.as_bytes())?;
    Ok(w)
}

fn read_graph(path: &Path) -> anyhow::Result<Graph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Graph::parse_edge_list(&text).with_context(|| format!("parsing {}", path.display()))
}

fn read_data(path: &Path) -> anyhow::Result<Dataset> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Dataset::read_csv(file).with_context(|| format!("reading {}", path.display()))
}

fn edge_list_line(g: &Graph) -> String {
    let edges: Vec<String> = g.edges().map(|(i, j)| format!("{i}-{j}")).collect();
    format!("v={} [{}]", g.vertex_count(), edges.join(" "))
}

/// The oracle suite with the crate's μ counter.
pub fn cmd_verify(out: &mut dyn Write) -> anyhow::Result<u8> {
    verify_with(|j| count_junction_trees(j).to_u64().unwrap_or(u64::MAX), out)
}

/// The oracle suite with a caller-supplied μ routine: enumeration constants
/// at seven vertices, μ against brute-force spanning trees up to five
/// vertices, and exact stationarity residuals at four vertices. Returns 0
/// when every check passes and 1 otherwise.
pub fn verify_with<F>(mu: F, out: &mut dyn Write) -> anyhow::Result<u8>
where
    F: Fn(&JunctionTree) -> u64 + Sync,
{
    let mut failures = 0;
    let mut check = |out: &mut dyn Write, ok: bool, what: String| -> anyhow::Result<()> {
        writeln!(out, "{} {what}", if ok { "PASS" } else { "FAIL" })?;
        failures += !ok as u32;
        Ok(())
    };

    let table = enumerate_decomposable_with(7, &mu);
    let edgeless = table.index_of_graph(&Graph::new(7)?).map(|i| table.entries()[i].mu);
    check(out, table.scanned == 2_097_152, format!("graphs scanned on 7 vertices: {}", table.scanned))?;
    check(out, table.len() == 617_675, format!("decomposable graphs: {}", table.len()))?;
    check(out, table.count_with_mu(1) == 187_447, format!("graphs with a unique junction tree: {}", table.count_with_mu(1)))?;
    check(out, edgeless == Some(16_807), format!("junction trees of the edgeless graph: {}", edgeless.unwrap_or(0)))?;

    let mut mismatches = 0;
    let mut graphs = 0;
    for v in 1..=5 {
        for e in enumerate_decomposable_with(v, &mu).entries() {
            let j = JunctionTree::build(&Graph::from_code(v, e.code)?)?;
            graphs += 1;
            if brute_force_junction_trees(&j.graph_of())?.len() as u64 != e.mu {
                mismatches += 1;
            }
        }
    }
    check(out, mismatches == 0, format!("μ equals the spanning-tree count on {graphs} graphs up to 5 vertices ({mismatches} mismatches)"))?;

    let mut worst: f64 = 0.0;
    for arity in [Arity::Single, Arity::Multi] {
        for rule in [AcceptanceRule::Standard, AcceptanceRule::TwoStage] {
            worst = worst.max(transition_matrix_check(4, |_| 0.0, arity, rule)?);
            worst = worst.max(transition_matrix_check(4, |j| -(mu(j) as f64).ln(), arity, rule)?);
        }
    }
    check(out, worst < 1e-12, format!("stationarity residual at 4 vertices: {worst:.3e}"))?;
    writeln!(out, "{}", if failures == 0 { "all checks passed" } else { "some checks failed" })?;
    Ok(u8::from(failures > 0))
}

fn mu_mode(mode: Option<Mode>, mu: Option<Switch>) -> anyhow::Result<bool> {
    match (mode, mu) {
        (Some(Mode::JtUniform), Some(Switch::On)) | (Some(Mode::GraphUniform), Some(Switch::Off)) => {
            bail!("--mode and --mu-correction disagree")
        }
        (Some(m), _) => Ok(m == Mode::GraphUniform),
        (None, Some(s)) => Ok(s == Switch::On),
        (None, None) => Ok(false),
    }
}

pub fn cmd_sample(a: &SampleArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let mu_correction = mu_mode(a.mode, a.mu_correction)?;
    let g0 = match (&a.graph, a.vertices) {
        (Some(p), _) => read_graph(p)?,
        (None, Some(v)) => Graph::new(v)?,
        (None, None) => bail!("give --vertices or --graph"),
    };
    let v = g0.vertex_count();
    let j0 = JunctionTree::build(&g0)?;
    let opts = a.chain.options();
    let meta = metadata("sample", Some(a.chain.seed), a, &[("mu_correction", mu_correction.to_string())]);

    let table = (2..=7).contains(&v).then(|| enumerate_decomposable(v));
    let burn_in = a.burn_in.unwrap_or(a.chain.sweeps / 100).min(a.chain.sweeps);
    let order_probs = table.as_ref().map(|t| {
        let probs = if mu_correction { t.probabilities_graph_uniform() } else { t.probabilities_jt_uniform() };
        (t.order_by_mu_desc(), probs)
    });
    let mut recorder = table.as_ref().zip(order_probs.as_ref()).map(|(t, (order, probs))| {
        let bins = equal_mass_bins(order, probs, SAMPLE_BINS.min(t.len()));
        FrequencyRecorder::new(t, bins, a.chain.sweeps - burn_in, SAMPLE_BATCHES)
    });

    let mut target = TargetDistribution::new(EdgePenalty(a.edge_penalty), mu_correction);
    let run = run_chain(j0, &mut target, &opts, |sweep, st| {
        if sweep > burn_in {
            if let Some(r) = recorder.as_mut() {
                r.record(&st.tree);
            }
        }
    })?;

    let mut w = create(&a.out, "trace.csv", &meta)?;
    run.trace.write_csv(&mut w)?;
    w.flush()?;
    writeln!(out, "sweeps {} acceptance rate {:.4}", run.stats.sweeps, run.stats.acceptance_rate())?;
    if let (Some(r), Some((order, probs))) = (recorder, order_probs) {
        let mut w = create(&a.out, "cdf.csv", &meta)?;
        writeln!(w, "expected,observed")?;
        for (e, o) in r.cdf(&order, probs.as_slice()) {
            writeln!(w, "{e},{o}")?;
        }
        w.flush()?;
        if r.draws() > 0 {
            let c = r.chi_square();
            writeln!(
                out,
                "chi-square {:.2} inflation {:.2} corrected {:.2} df {} p-value {:.4}",
                c.statistic, c.inflation, c.corrected, c.df, c.p_value
            )?;
        }
    }
    Ok(())
}

pub fn cmd_fit(a: &FitArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let data = Arc::new(read_data(&a.data)?);
    let v = data.v();
    let graph_prior = if a.edge_penalty == 0.0 { GraphPrior::Uniform } else { GraphPrior::EdgePenalty(a.edge_penalty) };
    let prior = PriorSpec { alpha: a.alpha, beta: a.beta, graph_prior };
    let mut model = GgimModel::new(data, GgimParams::new(1.0, 0.0, v)?, prior)?;
    model.rho_step = a.rho_step;
    let mut target = TargetDistribution::new(model, a.mu_correction == Switch::On);
    let opts = a.chain.options();
    let burn_in = a.burn_in.unwrap_or(a.chain.sweeps / 2);
    let mut freq = EdgeFrequencies::new(v);
    let run = run_chain(JunctionTree::build(&Graph::new(v)?)?, &mut target, &opts, |sweep, st| {
        if sweep > burn_in && sweep % a.chain.thin == 0 {
            freq.record(&st.tree.graph_of());
        }
    })?;

    let meta = metadata("fit", Some(a.chain.seed), a, &[]);
    let mut w = create(&a.out, "trace.csv", &meta)?;
    run.trace.write_csv(&mut w)?;
    w.flush()?;
    let mut w = create(&a.out, "edges.csv", &meta)?;
    freq.write_csv(&mut w)?;
    w.flush()?;
    let mut w = create(&a.out, "final_graph.txt", &meta)?;
    w.write_all(run.state.tree.graph_of().to_edge_list().as_bytes())?;
    w.flush()?;

    writeln!(out, "sweeps {} acceptance rate {:.4}", run.stats.sweeps, run.stats.acceptance_rate())?;
    if let (Some(s2), Some(rho)) = (run.trace.param_mean(0, burn_in), run.trace.param_mean(1, burn_in)) {
        writeln!(out, "posterior mean sigma2 {s2:.4} rho {rho:.4}")?;
    }
    Ok(())
}

pub fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let g = read_graph(&a.graph)?;
    let j = JunctionTree::build(&g)?;
    let params = GgimParams::new(a.sigma2, a.rho, g.vertex_count())?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let data = simulate_data(&j, &params, a.n, &mut rng)?;
    let meta = metadata(
        "simulate",
        Some(a.seed),
        a,
        &[("graph", edge_list_line(&g)), ("sigma2", a.sigma2.to_string()), ("rho", a.rho.to_string())],
    );
    let mut w = create(&a.out, "data.csv", &meta)?;
    data.write_csv(&mut w)?;
    w.flush()?;
    writeln!(out, "wrote {} rows of {} variables", data.n(), data.v())?;
    Ok(())
}

/// Seed of replicate `r`, well separated from its neighbours.
pub fn replicate_seed(seed: u64, r: usize) -> u64 {
    seed.wrapping_add((r as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

pub fn cmd_anneal(a: &AnnealArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    if a.replicates == 0 {
        bail!("--replicates must be at least 1");
    }
    let data = read_data(&a.data)?;
    let v = data.v();
    let alpha = penalty_per_edge(v, a.d)?;
    let a_opts = AnnealOptions { cooling_factor: a.cooling, penalty_per_edge: alpha, initial_temperature: a.initial_temperature };
    a_opts.validate()?;
    let profile = ProfileLikelihood::new(&data);
    let reference = match &a.graph {
        Some(p) => {
            let g = read_graph(p)?;
            let mut score = Penalized { inner: profile.clone(), alpha };
            Some(score.log_score(&JunctionTree::build(&g)?)?)
        }
        None => None,
    };
    let j0 = JunctionTree::build(&Graph::new(v)?)?;
    let results: Vec<_> = (0..a.replicates)
        .into_par_iter()
        .map(|r| {
            let opts = ChainOptions { seed: replicate_seed(a.chain.seed, r), ..a.chain.options() };
            anneal(j0.clone(), profile.clone(), &a_opts, &opts)
        })
        .collect::<crate::Result<_>>()?;

    let mut extra = vec![("alpha", alpha.to_string())];
    if let Some(s) = reference {
        extra.push(("reference_score", s.to_string()));
    }
    let meta = metadata("anneal", Some(a.chain.seed), a, &extra);
    let mut w = create(&a.out, "replicates.csv", &meta)?;
    writeln!(w, "replicate,seed,best_score,n_edges,first_sweep,visits")?;
    for (r, res) in results.iter().enumerate() {
        writeln!(
            w,
            "{r},{},{},{},{},{}",
            replicate_seed(a.chain.seed, r),
            res.best_score,
            res.best_graph.edge_count(),
            res.best_first_sweep,
            res.best_visits
        )?;
    }
    w.flush()?;
    let mut w = create(&a.out, "trace.csv", &meta)?;
    results[0].trace.write_csv(&mut w)?;
    w.flush()?;

    let best = results.iter().max_by(|x, y| x.best_score.total_cmp(&y.best_score)).expect("at least one replicate");
    let mut w = create(&a.out, "best_graph.txt", &meta)?;
    w.write_all(best.best_graph.to_edge_list().as_bytes())?;
    w.flush()?;
    let reached = results.iter().filter(|r| (r.best_score - best.best_score).abs() <= 1e-9 * best.best_score.abs().max(1.0)).count();
    writeln!(out, "alpha {alpha:.6}")?;
    writeln!(
        out,
        "best score {:.6} with {} edges, reached by {reached} of {} replicates",
        best.best_score,
        best.best_graph.edge_count(),
        results.len()
    )?;
    if let Some(s) = reference {
        let tol = 1e-9 * s.abs().max(1.0);
        let ok = results.iter().filter(|r| r.best_score >= s - tol).count();
        writeln!(out, "reference score {s:.6}; {ok} of {} replicates at or above it", results.len())?;
    }
    Ok(())
}

pub fn cmd_count_jt(a: &CountJtArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let g = read_graph(&a.graph)?;
    let j = JunctionTree::build(&g)?;
    let by_contraction = count_junction_trees(&j);
    let by_separators = count_by_separators(&j);
    if by_contraction != by_separators {
        bail!("junction tree counts disagree: {by_contraction} vs {by_separators}");
    }
    writeln!(out, "cliques {} edges {}", j.clique_count(), g.edge_count())?;
    writeln!(out, "junction trees {by_contraction}")?;
    writeln!(out, "log count {:.6}", log_mu(&j))?;
    Ok(())
}

//! C interface to the junction tree sampler.
//!
//! Objects are opaque heap handles created by `jm_*_new`/`jm_*_build`
//! functions and released with the matching `jm_*_free`. Every fallible
//! function returns a [`JmStatus`]; on failure a description is available
//! from [`jm_last_error_message`] on the same thread until the next call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use jtree_mcmc::ggim::{Dataset, GgimModel, GgimParams, PriorSpec};
use jtree_mcmc::junction_tree::{count_by_separators, log_mu};
use jtree_mcmc::moves::Arity;
use jtree_mcmc::sampler::{mh_step, AcceptanceRule, ChainState, GraphScore, TargetDistribution, Uniform};
use jtree_mcmc::{Error, Graph, JunctionTree};
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotDecomposable = 3,
    InvalidGraph = 4,
    ParseError = 5,
    InvalidData = 6,
    Overflow = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JmArity {
    Single = 0,
    Multi = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JmRule {
    Standard = 0,
    TwoStage = 1,
}

/// Undirected graph on vertices `0..v`.
pub struct JmGraph(Graph);

/// Junction tree of a decomposable graph.
pub struct JmJunctionTree(JunctionTree);

enum Model {
    Uniform(TargetDistribution<Uniform>),
    Ggim(Box<TargetDistribution<GgimModel>>),
}

/// A running Markov chain with its random number generator.
pub struct JmSampler {
    model: Model,
    state: ChainState,
    rng: ChaCha8Rng,
    arity: Arity,
    rule: AcceptanceRule,
    sweeps: u64,
    accepted: u64,
    param_every: u64,
    randomize_every: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> JmStatus {
    match err {
        Error::NotDecomposable => JmStatus::NotDecomposable,
        Error::UnknownVertex { .. } | Error::InvalidGraph(_) => JmStatus::InvalidGraph,
        Error::Parse { .. } => JmStatus::ParseError,
        Error::InvalidData(_) => JmStatus::InvalidData,
        Error::InvalidProposal(_) | Error::ParamOutOfRange(_) | Error::Config(_) => JmStatus::InvalidArgument,
    }
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), (JmStatus, String)>) -> JmStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => JmStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            JmStatus::Panic
        }
    }
}

fn lib(err: Error) -> (JmStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (JmStatus, String) {
    (JmStatus::NullPointer, format!("{what} is null"))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, (JmStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn handle_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, (JmStatus, String)> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), (JmStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn jm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn jm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Edgeless graph on `v` vertices.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn jm_graph_new(v: usize, out: *mut *mut JmGraph) -> JmStatus {
    guard(|| {
        let g = Graph::new(v).map_err(lib)?;
        write_out(out, Box::into_raw(Box::new(JmGraph(g))))
    })
}

/// Parses the edge-list text format (`v <count>` then `i j` lines).
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn jm_graph_parse(text: *const c_char, out: *mut *mut JmGraph) -> JmStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let s = CStr::from_ptr(text).to_str().map_err(|e| (JmStatus::ParseError, e.to_string()))?;
        let g = Graph::parse_edge_list(s).map_err(lib)?;
        write_out(out, Box::into_raw(Box::new(JmGraph(g))))
    })
}

/// # Safety
/// `g` must come from this library and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn jm_graph_free(g: *mut JmGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn jm_graph_add_edge(g: *mut JmGraph, i: usize, j: usize) -> JmStatus {
    guard(|| handle_mut(g, "graph")?.0.add_edge(i, j).map_err(lib))
}

/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn jm_graph_remove_edge(g: *mut JmGraph, i: usize, j: usize) -> JmStatus {
    guard(|| handle_mut(g, "graph")?.0.remove_edge(i, j).map_err(lib))
}

/// False for null handles and out-of-range vertices.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn jm_graph_has_edge(g: *const JmGraph, i: usize, j: usize) -> bool {
    g.as_ref().is_some_and(|g| g.0.has_edge(i, j))
}

/// Zero for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn jm_graph_vertex_count(g: *const JmGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.vertex_count())
}

/// Zero for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn jm_graph_edge_count(g: *const JmGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.edge_count())
}

/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn jm_graph_is_decomposable(g: *const JmGraph) -> bool {
    g.as_ref().is_some_and(|g| jtree_mcmc::graph::is_decomposable(&g.0))
}

/// # Safety
/// `g` must be a live graph handle and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn jm_junction_tree_build(g: *const JmGraph, out: *mut *mut JmJunctionTree) -> JmStatus {
    guard(|| {
        let j = JunctionTree::build(&handle(g, "graph")?.0).map_err(lib)?;
        write_out(out, Box::into_raw(Box::new(JmJunctionTree(j))))
    })
}

/// # Safety
/// `j` must come from this library and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn jm_junction_tree_free(j: *mut JmJunctionTree) {
    if !j.is_null() {
        drop(Box::from_raw(j));
    }
}

/// # Safety
/// `j` must be null or a live junction tree handle.
#[no_mangle]
pub unsafe extern "C" fn jm_junction_tree_clique_count(j: *const JmJunctionTree) -> usize {
    j.as_ref().map_or(0, |j| j.0.clique_count())
}

/// Number of junction trees of the underlying graph; `Overflow` when it does
/// not fit in 64 bits (use [`jm_junction_tree_log_count`] then).
///
/// # Safety
/// `j` must be a live junction tree handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn jm_junction_tree_count(j: *const JmJunctionTree, out: *mut u64) -> JmStatus {
    guard(|| {
        let mu = count_by_separators(&handle(j, "junction tree")?.0);
        let n = mu.to_u64().ok_or_else(|| (JmStatus::Overflow, format!("count {mu} exceeds 64 bits")))?;
        write_out(out, n)
    })
}

/// Natural log of the junction tree count.
///
/// # Safety
/// `j` must be a live junction tree handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn jm_junction_tree_log_count(j: *const JmJunctionTree, out: *mut f64) -> JmStatus {
    guard(|| write_out(out, log_mu(&handle(j, "junction tree")?.0)))
}

/// The graph a junction tree represents, as a new handle.
///
/// # Safety
/// `j` must be a live junction tree handle and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn jm_junction_tree_graph(j: *const JmJunctionTree, out: *mut *mut JmGraph) -> JmStatus {
    guard(|| {
        let g = handle(j, "junction tree")?.0.graph_of();
        write_out(out, Box::into_raw(Box::new(JmGraph(g))))
    })
}

fn new_sampler(start: &Graph, model: Model, seed: u64, arity: JmArity, rule: JmRule) -> Result<JmSampler, (JmStatus, String)> {
    let j0 = JunctionTree::build(start).map_err(lib)?;
    let mut model = model;
    let state = match &mut model {
        Model::Uniform(t) => ChainState::new(j0, t),
        Model::Ggim(t) => ChainState::new(j0, t.as_mut()),
    }
    .map_err(lib)?;
    Ok(JmSampler {
        model,
        state,
        rng: ChaCha8Rng::seed_from_u64(seed),
        arity: match arity {
            JmArity::Single => Arity::Single,
            JmArity::Multi => Arity::Multi,
        },
        rule: match rule {
            JmRule::Standard => AcceptanceRule::Standard,
            JmRule::TwoStage => AcceptanceRule::TwoStage,
        },
        sweeps: 0,
        accepted: 0,
        param_every: 1000,
        randomize_every: 1000,
    })
}

/// Chain over junction trees starting at `start` whose graph marginal is
/// uniform over junction trees (`mu_correction = false`) or over
/// decomposable graphs (`mu_correction = true`).
///
/// # Safety
/// `start` must be a live graph handle and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn jm_sampler_new(
    start: *const JmGraph,
    seed: u64,
    arity: JmArity,
    rule: JmRule,
    mu_correction: bool,
    out: *mut *mut JmSampler,
) -> JmStatus {
    guard(|| {
        let start = &handle(start, "graph")?.0;
        let s = new_sampler(start, Model::Uniform(TargetDistribution::new(Uniform, mu_correction)), seed, arity, rule)?;
        write_out(out, Box::into_raw(Box::new(s)))
    })
}

/// Posterior chain for the intra-class Gaussian model on `data`, an `n × v`
/// row-major array, starting from the edgeless graph with `σ² = 1`, `ρ = 0`
/// and default priors.
///
/// # Safety
/// `data` must point to `n * v` readable doubles and `out` be valid for a
/// pointer write.
#[no_mangle]
pub unsafe extern "C" fn jm_sampler_new_ggim(
    data: *const f64,
    n: usize,
    v: usize,
    seed: u64,
    arity: JmArity,
    rule: JmRule,
    out: *mut *mut JmSampler,
) -> JmStatus {
    guard(|| {
        if data.is_null() {
            return Err(null("data"));
        }
        let len = n.checked_mul(v).ok_or_else(|| (JmStatus::InvalidArgument, "n * v overflows".to_string()))?;
        let flat = std::slice::from_raw_parts(data, len);
        let rows: Vec<Vec<f64>> = if v == 0 { Vec::new() } else { flat.chunks(v).map(<[f64]>::to_vec).collect() };
        let dataset = Dataset::from_rows(v, &rows).map_err(lib)?;
        let params = GgimParams::new(1.0, 0.0, v).map_err(lib)?;
        let model = GgimModel::new(Arc::new(dataset), params, PriorSpec::default()).map_err(lib)?;
        let start = Graph::new(v).map_err(lib)?;
        let s = new_sampler(&start, Model::Ggim(Box::new(TargetDistribution::new(model, true))), seed, arity, rule)?;
        write_out(out, Box::into_raw(Box::new(s)))
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn jm_sampler_free(s: *mut JmSampler) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Sets how often (in sweeps) parameters are updated and the junction tree
/// is redrawn. Both must be at least 1.
///
/// # Safety
/// `s` must be a live sampler handle.
#[no_mangle]
pub unsafe extern "C" fn jm_sampler_set_cadence(s: *mut JmSampler, param_every: u64, randomize_every: u64) -> JmStatus {
    guard(|| {
        let s = handle_mut(s, "sampler")?;
        if param_every == 0 || randomize_every == 0 {
            return Err((JmStatus::InvalidArgument, "cadences must be at least 1".into()));
        }
        s.param_every = param_every;
        s.randomize_every = randomize_every;
        Ok(())
    })
}

fn sweep<S: GraphScore>(s: &mut JmSampler, target: &mut TargetDistribution<S>) -> jtree_mcmc::Result<bool> {
    let out = mh_step(&mut s.state, target, s.arity, s.rule, &mut s.rng)?;
    s.sweeps += 1;
    if s.sweeps.is_multiple_of(s.randomize_every) {
        s.state.randomize(&mut s.rng);
    }
    if s.sweeps.is_multiple_of(s.param_every) && target.score.update_parameters(&s.state.tree, &mut s.rng)? {
        s.state.refresh(target)?;
    }
    Ok(out.accepted)
}

/// Advances the chain by `sweeps` updates; `accepted` (may be null) receives
/// how many of them were accepted.
///
/// # Safety
/// `s` must be a live sampler handle; `accepted` null or valid for a write.
#[no_mangle]
pub unsafe extern "C" fn jm_sampler_run(s: *mut JmSampler, sweeps: u64, accepted: *mut u64) -> JmStatus {
    guard(|| {
        let s = handle_mut(s, "sampler")?;
        let mut model = std::mem::replace(&mut s.model, Model::Uniform(TargetDistribution::new(Uniform, false)));
        let mut n = 0;
        let result = (0..sweeps).try_for_each(|_| {
            let ok = match &mut model {
                Model::Uniform(t) => sweep(s, t)?,
                Model::Ggim(t) => sweep(s, t.as_mut())?,
            };
            n += ok as u64;
            Ok::<_, Error>(())
        });
        s.model = model;
        s.accepted += n;
        result.map_err(lib)?;
        if !accepted.is_null() {
            accepted.write(n);
        }
        Ok(())
    })
}

/// Total sweeps run so far.
///
/// # Safety
/// `s` must be null or a live sampler handle.
#[no_mangle]
pub unsafe extern "C" fn jm_sampler_sweeps(s: *const JmSampler) -> u64 {
    s.as_ref().map_or(0, |s| s.sweeps)
}

/// Current untempered log score (log-likelihood plus log prior for the
/// Gaussian model, zero for the flat target).
///
/// # Safety
/// `s` must be a live sampler handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn jm_sampler_log_score(s: *const JmSampler, out: *mut f64) -> JmStatus {
    guard(|| write_out(out, handle(s, "sampler")?.state.log_score()))
}

/// Current `σ²` and `ρ` of the Gaussian model; `InvalidArgument` for the
/// flat target.
///
/// # Safety
/// `s` must be a live sampler handle; `sigma2` and `rho` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jm_sampler_parameters(s: *const JmSampler, sigma2: *mut f64, rho: *mut f64) -> JmStatus {
    guard(|| match &handle(s, "sampler")?.model {
        Model::Ggim(t) => {
            write_out(sigma2, t.score.params.sigma2)?;
            write_out(rho, t.score.params.rho)
        }
        Model::Uniform(_) => Err((JmStatus::InvalidArgument, "the flat target has no parameters".into())),
    })
}

/// Snapshot of the current graph as a new handle.
///
/// # Safety
/// `s` must be a live sampler handle and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn jm_sampler_graph(s: *const JmSampler, out: *mut *mut JmGraph) -> JmStatus {
    guard(|| {
        let g = handle(s, "sampler")?.state.tree.graph_of();
        write_out(out, Box::into_raw(Box::new(JmGraph(g))))
    })
}

/// Snapshot of the current junction tree as a new handle.
///
/// # Safety
/// `s` must be a live sampler handle and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn jm_sampler_junction_tree(s: *const JmSampler, out: *mut *mut JmJunctionTree) -> JmStatus {
    guard(|| {
        let j = handle(s, "sampler")?.state.tree.clone();
        write_out(out, Box::into_raw(Box::new(JmJunctionTree(j))))
    })
}

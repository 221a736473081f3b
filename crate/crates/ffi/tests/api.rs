use std::ffi::{CStr, CString};
use std::ptr;

use jtree_mcmc_ffi::*;

fn last_error() -> String {
    let p = jm_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn parse(text: &str) -> *mut JmGraph {
    let c = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { jm_graph_parse(c.as_ptr(), &mut g) }, JmStatus::Ok);
    g
}

#[test]
fn graph_round_trip() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(jm_graph_new(4, &mut g), JmStatus::Ok);
        assert_eq!(jm_graph_add_edge(g, 0, 1), JmStatus::Ok);
        assert_eq!(jm_graph_add_edge(g, 1, 3), JmStatus::Ok);
        assert!(jm_graph_has_edge(g, 3, 1));
        assert!(!jm_graph_has_edge(g, 0, 9));
        assert_eq!(jm_graph_edge_count(g), 2);
        assert_eq!(jm_graph_vertex_count(g), 4);
        assert_eq!(jm_graph_remove_edge(g, 0, 1), JmStatus::Ok);
        assert_eq!(jm_graph_edge_count(g), 1);
        assert_eq!(jm_graph_add_edge(g, 2, 2), JmStatus::InvalidGraph);
        assert!(last_error().contains("self-loop"));
        jm_graph_free(g);
    }
}

#[test]
fn errors_are_reported_per_call() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(jm_graph_new(0, &mut g), JmStatus::InvalidGraph);
        assert!(g.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(jm_graph_new(3, ptr::null_mut()), JmStatus::NullPointer);
        assert_eq!(jm_graph_add_edge(ptr::null_mut(), 0, 1), JmStatus::NullPointer);
        let bad = CString::new("v 3\n0 x\n").unwrap();
        assert_eq!(jm_graph_parse(bad.as_ptr(), &mut g), JmStatus::ParseError);
        assert!(last_error().contains("line 2"));
        assert_eq!(jm_graph_new(3, &mut g), JmStatus::Ok);
        assert!(jm_last_error_message().is_null());
        jm_graph_free(g);
        jm_graph_free(ptr::null_mut());
    }
}

#[test]
fn junction_tree_counts() {
    unsafe {
        let cycle = parse("v 4\n0 1\n1 2\n2 3\n3 0\n");
        assert!(!jm_graph_is_decomposable(cycle));
        let mut j = ptr::null_mut();
        assert_eq!(jm_junction_tree_build(cycle, &mut j), JmStatus::NotDecomposable);
        jm_graph_free(cycle);

        let edgeless = parse("v 7\n");
        assert_eq!(jm_junction_tree_build(edgeless, &mut j), JmStatus::Ok);
        let mut n = 0;
        assert_eq!(jm_junction_tree_count(j, &mut n), JmStatus::Ok);
        assert_eq!(n, 16_807);
        let mut ln = 0.0;
        assert_eq!(jm_junction_tree_log_count(j, &mut ln), JmStatus::Ok);
        assert!((ln - 16_807f64.ln()).abs() < 1e-12);
        assert_eq!(jm_junction_tree_clique_count(j), 7);
        let mut back = ptr::null_mut();
        assert_eq!(jm_junction_tree_graph(j, &mut back), JmStatus::Ok);
        assert_eq!(jm_graph_edge_count(back), 0);
        jm_graph_free(back);
        jm_junction_tree_free(j);
        jm_graph_free(edgeless);

        // 30 isolated vertices: 30^28 junction trees overflow 64 bits.
        let big = parse("v 30\n");
        assert_eq!(jm_junction_tree_build(big, &mut j), JmStatus::Ok);
        assert_eq!(jm_junction_tree_count(j, &mut n), JmStatus::Overflow);
        assert_eq!(jm_junction_tree_log_count(j, &mut ln), JmStatus::Ok);
        assert!((ln - 28.0 * 30f64.ln()).abs() < 1e-9);
        jm_junction_tree_free(j);
        jm_graph_free(big);
    }
}

fn run_uniform(seed: u64) -> (u64, Vec<(usize, usize)>) {
    unsafe {
        let start = parse("v 6\n0 1\n");
        let mut s = ptr::null_mut();
        assert_eq!(jm_sampler_new(start, seed, JmArity::Multi, JmRule::TwoStage, true, &mut s), JmStatus::Ok);
        jm_graph_free(start);
        let mut acc = 0;
        assert_eq!(jm_sampler_run(s, 5_000, &mut acc), JmStatus::Ok);
        assert_eq!(jm_sampler_run(s, 10, ptr::null_mut()), JmStatus::Ok);
        assert_eq!(jm_sampler_sweeps(s), 5_010);
        let mut g = ptr::null_mut();
        assert_eq!(jm_sampler_graph(s, &mut g), JmStatus::Ok);
        assert!(jm_graph_is_decomposable(g));
        let edges = (0..6).flat_map(|i| (i + 1..6).map(move |k| (i, k))).filter(|&(i, k)| jm_graph_has_edge(g, i, k)).collect();
        let mut j = ptr::null_mut();
        assert_eq!(jm_sampler_junction_tree(s, &mut j), JmStatus::Ok);
        jm_junction_tree_free(j);
        let (mut s2, mut r) = (0.0, 0.0);
        assert_eq!(jm_sampler_parameters(s, &mut s2, &mut r), JmStatus::InvalidArgument);
        jm_graph_free(g);
        jm_sampler_free(s);
        (acc, edges)
    }
}

#[test]
fn sampler_is_deterministic_per_seed() {
    let a = run_uniform(11);
    assert!(a.0 > 0);
    assert_eq!(a, run_uniform(11));
}

#[test]
fn ggim_sampler_updates_parameters() {
    // Rows from a fixed deterministic sequence; only the mechanics are tested.
    let (n, v) = (40, 3);
    let data: Vec<f64> = (0..n * v).map(|k| ((k * 7919 % 101) as f64 - 50.0) / 10.0).collect();
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(jm_sampler_new_ggim(data.as_ptr(), n, v, 5, JmArity::Single, JmRule::Standard, &mut s), JmStatus::Ok);
        assert_eq!(jm_sampler_set_cadence(s, 0, 1), JmStatus::InvalidArgument);
        assert_eq!(jm_sampler_set_cadence(s, 10, 10), JmStatus::Ok);
        assert_eq!(jm_sampler_run(s, 2_000, ptr::null_mut()), JmStatus::Ok);
        let (mut s2, mut rho) = (0.0, 0.0);
        assert_eq!(jm_sampler_parameters(s, &mut s2, &mut rho), JmStatus::Ok);
        assert!(s2 > 0.0 && s2 != 1.0);
        assert!(rho > -0.5 && rho < 1.0);
        let mut ls = 0.0;
        assert_eq!(jm_sampler_log_score(s, &mut ls), JmStatus::Ok);
        assert!(ls.is_finite());
        jm_sampler_free(s);

        assert_eq!(jm_sampler_new_ggim(data.as_ptr(), 0, v, 5, JmArity::Single, JmRule::Standard, &mut s), JmStatus::InvalidData);
        assert_eq!(jm_sampler_new_ggim(ptr::null(), n, v, 5, JmArity::Single, JmRule::Standard, &mut s), JmStatus::NullPointer);
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(jm_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

use proptest::prelude::{any, proptest, ProptestConfig};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::graph::{is_decomposable, Graph};
use crate::vset;

fn tree(v: usize, cliques: Vec<VertexSet>, links: &[(usize, usize)]) -> JunctionTree {
    JunctionTree::from_parts(v, cliques, links).unwrap()
}

fn node_with(j: &JunctionTree, c: &VertexSet) -> NodeId {
    *j.node_ids().iter().find(|&&n| j.clique(n) == c).unwrap()
}

fn assert_close(a: f64, b: f64) {
    assert!((a - b).abs() < 1e-12, "{a} vs {b}");
}

#[test]
fn single_clique_rejects_connect() {
    let j = JunctionTree::build(&Graph::complete(4).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    assert_eq!(propose_connect(&j, Arity::Single, &mut rng), Proposal::Reject(RejectReason::NoSeparators));
}

#[test]
fn edgeless_rejects_every_disconnect() {
    let j = JunctionTree::build(&Graph::new(5).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..50 {
        assert_eq!(propose_disconnect(&j, Arity::Multi, &mut rng), Proposal::Reject(RejectReason::SingletonClique));
    }
}

#[test]
fn trivial_connect_probability_is_one_over_links() {
    let j = JunctionTree::build(&Graph::new(6).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let Proposal::Move(p) = propose_connect(&j, Arity::Single, &mut rng) else { panic!() };
    assert_eq!(p.case, Case::A);
    assert_close(p.log_q_forward, -(5f64).ln());
}

#[test]
fn two_vertex_round_trip() {
    let j = JunctionTree::build(&Graph::new(2).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let Proposal::Move(p) = propose_connect(&j, Arity::Single, &mut rng) else { panic!() };
    assert_close(p.log_q_forward, 0.0);
    let joined = apply(&j, &p).unwrap();
    assert_eq!(joined.sorted_cliques(), vec![vset![0, 1]]);
    let rev = reverse_move(&joined, &p).unwrap();
    assert_eq!(rev.direction, Direction::Disconnect);
    assert_eq!(rev.case, Case::A);
    assert_close(rev.log_q_forward, 0.0);
    assert_eq!(apply(&joined, &rev).unwrap(), j);
}

#[test]
fn k2_disconnect_splits_into_singletons() {
    let j = JunctionTree::build(&Graph::complete(2).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let Proposal::Move(p) = propose_disconnect(&j, Arity::Single, &mut rng) else { panic!() };
    assert_eq!((p.x.clone(), p.y.clone(), p.case), (vset![0], vset![1], Case::A));
    assert_close(p.log_q_forward, 0.0);
    let split = apply(&j, &p).unwrap();
    assert_eq!(split.clique_count(), 2);
    assert!(split.links()[0].separator.is_empty());
}

#[test]
fn case_b_extends_separator_and_small_clique() {
    let j = tree(5, vec![vset![1, 2, 3], vset![2, 4], vset![0]], &[(0, 1), (0, 2)]);
    let p = connect_move(&j, 0, 1, vset![1], vset![4], Arity::Single).unwrap();
    assert_eq!(p.case, Case::B);
    let out = apply(&j, &p).unwrap();
    assert!(out.validate());
    assert_eq!(out.sorted_cliques(), vec![vset![0], vset![1, 2, 3], vset![1, 2, 4]]);
    let l = out.find_link(0, 1).unwrap();
    assert_eq!(out.link(l).separator, vset![1, 2]);
    let mut expected = j.graph_of();
    expected.add_edge(1, 4).unwrap();
    assert_eq!(out.graph_of(), expected);
    // |S(J)| = 2, m_X − s = 2, m_Y − s = 1.
    assert_close(p.log_q_forward, -(4f64).ln());
}

#[test]
fn seven_vertex_example_connects_through_case_c() {
    let g = crate::junction_tree::tests::seven_vertex_graph();
    let j = tree(7, vec![vset![0, 1], vset![1, 2, 3, 4], vset![1, 5, 6]], &[(0, 2), (1, 2)]);
    assert_eq!(j.graph_of(), g);
    let p = connect_move(&j, 0, 2, vset![0], vset![6], Arity::Single).unwrap();
    assert_eq!(p.case, Case::C);
    let out = apply(&j, &p).unwrap();
    assert!(out.validate());
    assert_eq!(out.sorted_cliques(), vec![vset![0, 1, 6], vset![1, 2, 3, 4], vset![1, 5, 6]]);

    let rev = reverse_move(&out, &p).unwrap();
    assert_eq!(rev.anchor, Anchor::Clique(node_with(&out, &vset![0, 1, 6])));
    assert_eq!((rev.x.clone(), rev.y.clone(), rev.s.clone()), (vset![0], vset![6], vset![1]));
    // Three cliques, m = 3, case (c): no side factor.
    assert_close(rev.log_q_forward, (1.0f64 / 3.0 * 2.0 / 6.0).ln());
    assert_eq!(apply(&out, &rev).unwrap(), j);
}

#[test]
fn case_d_inserts_and_removes_middle_clique() {
    let j = tree(5, vec![vset![0, 1, 2], vset![2, 3, 4]], &[(0, 1)]);
    let p = connect_move(&j, 0, 1, vset![1], vset![3], Arity::Single).unwrap();
    assert_eq!(p.case, Case::D);
    let out = apply(&j, &p).unwrap();
    assert!(out.validate());
    assert_eq!(out.clique_count(), 3);
    let mid = node_with(&out, &vset![1, 2, 3]);
    let seps: Vec<VertexSet> = out.neighbors(mid).map(|(_, l)| out.link(l).separator.clone()).collect();
    assert!(seps.contains(&vset![1, 2]) && seps.contains(&vset![2, 3]));

    let rev = reverse_move(&out, &p).unwrap();
    assert_eq!(rev.case, Case::D);
    assert_eq!(apply(&out, &rev).unwrap(), j);
}

#[test]
fn neighbour_meeting_both_sides_blocks_disconnect() {
    let j = tree(4, vec![vset![0, 1, 2], vset![0, 1, 3]], &[(0, 1)]);
    assert!(classify_neighbors(&j, 0, &vset![0], &vset![1], &vset![2]).is_none());
    assert!(disconnect_move(&j, 0, vset![0], vset![1], vset![2], Arity::Single, vec![]).is_err());
}

#[test]
fn single_disconnect_probability_case_b() {
    let j = tree(5, vec![vset![1, 2, 3], vset![1, 2, 4], vset![0]], &[(0, 1), (0, 2)]);
    let node = node_with(&j, &vset![1, 2, 4]);
    let p = disconnect_move(&j, node, vset![1], vset![4], vset![2], Arity::Single, vec![]).unwrap();
    assert_eq!(p.case, Case::B);
    assert_close(p.log_q_forward, (1.0f64 / 3.0 * 2.0 / 6.0).ln());
}

#[test]
fn multi_probabilities_match_closed_forms() {
    // m_X − s = 2, m_Y − s = 1, N_X = 2, N_Y = 1.
    let j = tree(5, vec![vset![1, 2, 3], vset![2, 4], vset![0]], &[(0, 1), (0, 2)]);
    let p = connect_move(&j, 0, 1, vset![1, 3], vset![4], Arity::Multi).unwrap();
    assert_close(p.log_q_forward, (0.5f64 * 0.5 * (2.0 * 1.0 / 2.0)).ln());

    // m = 2 forces M = 2, N = 1; one N0 neighbour.
    let j = tree(3, vec![vset![0, 1], vset![2]], &[(0, 1)]);
    let p = disconnect_move(&j, 0, vset![0], vset![1], VertexSet::new(), Arity::Multi, vec![(1, Side::Y)]).unwrap();
    assert_close(p.log_q_forward, (0.5f64 * 0.5).ln());
}

#[test]
fn sampled_connect_frequencies_match_probability() {
    let j = tree(5, vec![vset![1, 2, 3], vset![2, 4], vset![0]], &[(0, 1), (0, 2)]);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let target = connect_move(&j, 0, 1, vset![1, 3], vset![4], Arity::Multi).unwrap();
    let draws = 200_000;
    let hits = (0..draws).filter(|_| matches!(propose_connect(&j, Arity::Multi, &mut rng), Proposal::Move(p) if p == target)).count();
    let expected = target.log_q_forward.exp();
    let sd = (expected * (1.0 - expected) / draws as f64).sqrt();
    assert!((hits as f64 / draws as f64 - expected).abs() < 5.0 * sd);
}

#[test]
fn single_and_multi_moves_reach_the_same_tree() {
    let j = tree(5, vec![vset![1, 2, 3], vset![2, 4], vset![0]], &[(0, 1), (0, 2)]);
    let s = connect_move(&j, 0, 1, vset![3], vset![4], Arity::Single).unwrap();
    let m = connect_move(&j, 0, 1, vset![3], vset![4], Arity::Multi).unwrap();
    assert_eq!(apply(&j, &s).unwrap(), apply(&j, &m).unwrap());
}

#[test]
fn mismatched_proposal_is_rejected() {
    let j = tree(5, vec![vset![1, 2, 3], vset![2, 4], vset![0]], &[(0, 1), (0, 2)]);
    let mut p = connect_move(&j, 0, 1, vset![1], vset![4], Arity::Single).unwrap();
    p.case = Case::D;
    assert!(matches!(apply(&j, &p), Err(Error::InvalidProposal(_))));
}

fn random_walk(v: usize, arity: Arity, seed: u64, steps: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut j = JunctionTree::build(&Graph::new(v).unwrap()).unwrap();
    for _ in 0..steps {
        let dir = if rng.random_bool(0.5) { Direction::Connect } else { Direction::Disconnect };
        let Proposal::Move(p) = propose(&j, dir, arity, &mut rng) else { continue };
        assert_close(p.log_q_forward, proposal_probability(&j, &p).unwrap());
        let next = apply(&j, &p).unwrap();
        next.check().unwrap();
        let (g0, g1) = (j.graph_of(), next.graph_of());
        assert!(is_decomposable(&g1));
        let delta = p.edge_delta();
        match dir {
            Direction::Connect => assert_eq!(g1.edge_count(), g0.edge_count() + delta),
            Direction::Disconnect => assert_eq!(g0.edge_count(), g1.edge_count() + delta),
        }
        for a in p.x.iter() {
            for b in p.y.iter() {
                assert_eq!(g0.has_edge(a as usize, b as usize), dir == Direction::Disconnect);
                assert_eq!(g1.has_edge(a as usize, b as usize), dir == Direction::Connect);
            }
        }
        let rev = reverse_move(&next, &p).unwrap();
        assert_eq!(apply(&next, &rev).unwrap(), j);
        let back = reverse_move(&j, &rev).unwrap();
        assert_eq!(back, p);
        if rng.random_bool(0.5) {
            j = next;
        }
    }
}

#[test]
fn long_random_walks_preserve_every_invariant() {
    for (i, v) in (5..=9).enumerate() {
        random_walk(v, Arity::Single, 100 + i as u64, 2000);
        random_walk(v, Arity::Multi, 200 + i as u64, 2000);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn moves_round_trip(v in 2usize..=12, seed in any::<u64>(), multi in any::<bool>()) {
        random_walk(v, if multi { Arity::Multi } else { Arity::Single }, seed, 300);
    }
}

#[test]
fn sampled_disconnect_frequencies_match_probability() {
    // Clique {1,2,3,4} with a neighbour {0,1}: both arities, every outcome.
    let j = tree(5, vec![vset![1, 2, 3, 4], vset![0, 1]], &[(0, 1)]);
    for arity in [Arity::Single, Arity::Multi] {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let draws = 400_000;
        let mut seen: std::collections::HashMap<String, (u64, f64)> = std::collections::HashMap::new();
        for _ in 0..draws {
            if let Proposal::Move(p) = propose_disconnect(&j, arity, &mut rng) {
                let key = format!("{:?}", (p.anchor, &p.x, &p.y, &p.sides));
                seen.entry(key).or_insert((0, p.log_q_forward.exp())).0 += 1;
            }
        }
        assert!(seen.len() > 3);
        for (key, (hits, q)) in seen {
            let sd = (q * (1.0 - q) / draws as f64).sqrt();
            assert!((hits as f64 / draws as f64 - q).abs() < 5.0 * sd, "{arity:?} {key}: {} vs {q}", hits as f64 / draws as f64);
        }
    }
}

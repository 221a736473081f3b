use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::graph::Graph;
use crate::moves::{self, Arity, Direction, Proposal};
use crate::oracle::{mvn_log_density, precision_matrix_oracle};
use crate::sampler::{GraphScore, Penalized};
use crate::vset;

fn normal_log_density(y: f64, var: f64) -> f64 {
    -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + y * y / var)
}

fn random_data(n: usize, v: usize, rng: &mut ChaCha8Rng) -> Dataset {
    let rows: Vec<Vec<f64>> = (0..n).map(|_| (0..v).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
    Dataset::from_rows(v, &rows).unwrap()
}

/// Random decomposable tree reached by a short random walk.
fn random_tree(v: usize, steps: usize, rng: &mut ChaCha8Rng) -> JunctionTree {
    let mut j = JunctionTree::build(&Graph::new(v).unwrap()).unwrap();
    for _ in 0..steps {
        let dir = if rng.random_bool(0.6) { Direction::Connect } else { Direction::Disconnect };
        if let Proposal::Move(p) = moves::propose(&j, dir, Arity::Multi, rng) {
            j = moves::apply(&j, &p).unwrap();
        }
    }
    j
}

#[test]
fn single_variable_is_plain_normal() {
    let d = Dataset::from_rows(1, &[vec![1.5], vec![-0.5]]).unwrap();
    let p = GgimParams::new(2.0, 0.0, 1).unwrap();
    let s = SubsetStats::compute(&d, &vset![0]);
    let want = normal_log_density(1.5, 2.0) + normal_log_density(-0.5, 2.0);
    assert!((subset_log_density(&s, 2, &p).unwrap() - want).abs() < 1e-12);
    // ρ drops out for a single variable.
    let p2 = GgimParams { rho: 0.7, v: 5, ..p };
    assert!((subset_log_density(&s, 2, &p2).unwrap() - want).abs() < 1e-12);
}

#[test]
fn zero_correlation_is_independent() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let d = random_data(4, 3, &mut rng);
    let p = GgimParams::new(1.7, 0.0, 3).unwrap();
    let s = SubsetStats::compute(&d, &vset![0, 1, 2]);
    let want: f64 = (0..4).flat_map(|r| (0..3).map(move |i| (r, i))).map(|(r, i)| normal_log_density(d.value(r, i), 1.7)).sum();
    assert!((subset_log_density(&s, 4, &p).unwrap() - want).abs() < 1e-12);
}

#[test]
fn bivariate_matches_explicit_inverse() {
    let d = Dataset::from_rows(2, &[vec![1.0, 1.0]]).unwrap();
    let p = GgimParams::new(1.0, 0.5, 2).unwrap();
    // Σ = [[1, .5], [.5, 1]], det = .75, yᵀΣ⁻¹y = (1 − 2·.5 + 1)/.75 · 1 = 4/3.
    let want = -(2.0 * std::f64::consts::PI).ln() - 0.5 * 0.75f64.ln() - 0.5 * (4.0 / 3.0);
    let got = subset_log_density(&SubsetStats::compute(&d, &vset![0, 1]), 1, &p).unwrap();
    assert!((got - want).abs() < 1e-12);
}

#[test]
fn joint_density_matches_precision_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in 0..30 {
        let v = 2 + k % 9;
        let j = random_tree(v, 40, &mut rng);
        let sigma2 = rng.random_range(0.5..40.0);
        let rho = rng.random_range(GgimParams::rho_lower_bound(v) * 0.9..0.9);
        let p = GgimParams::new(sigma2, rho, v).unwrap();
        let d = random_data(5, v, &mut rng);
        let got = joint_log_density(&d, &j, &p, &mut StatsCache::default()).unwrap();
        let oracle = mvn_log_density(&precision_matrix_oracle(&j.graph_of(), &p).unwrap(), &d);
        assert!(((got - oracle) / oracle).abs() < 1e-9, "v={v}: {got} vs {oracle}");
    }
}

#[test]
fn density_sizes_telescope() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let j = random_tree(9, 60, &mut rng);
    let total: usize =
        j.node_ids().iter().map(|&n| j.clique(n).len()).sum::<usize>() - j.links().iter().map(|l| l.separator.len()).sum::<usize>();
    assert_eq!(total, 9);
}

#[test]
fn cross_ratio_vanishes_without_correlation() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let d = random_data(3, 5, &mut rng);
    let p = GgimParams::new(3.0, 0.0, 5).unwrap();
    let r = log_cross_ratio(&vset![0], &vset![3, 4], &vset![1], &d, &p, &mut StatsCache::default()).unwrap();
    assert_eq!(r, 0.0);
}

#[test]
fn cross_ratio_equals_density_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let d = random_data(7, 6, &mut rng);
    let p = GgimParams::new(2.5, 0.35, 6).unwrap();
    let mut cache = StatsCache::default();
    let mut j = JunctionTree::build(&Graph::new(6).unwrap()).unwrap();
    let mut checked = 0;
    while checked < 300 {
        let dir = if rng.random_bool(0.5) { Direction::Connect } else { Direction::Disconnect };
        let arity = if rng.random_bool(0.5) { Arity::Single } else { Arity::Multi };
        let Proposal::Move(m) = moves::propose(&j, dir, arity, &mut rng) else { continue };
        let next = moves::apply(&j, &m).unwrap();
        let direct = joint_log_density(&d, &next, &p, &mut cache).unwrap() - joint_log_density(&d, &j, &p, &mut cache).unwrap();
        let mut cr = log_cross_ratio(&m.x, &m.y, &m.s, &d, &p, &mut cache).unwrap();
        if dir == Direction::Disconnect {
            cr = -cr;
        }
        assert!((cr - direct).abs() < 1e-10 * direct.abs().max(1.0), "{cr} vs {direct}");
        let generic = move_density_change(&d, &m, &p, &mut cache).unwrap();
        assert!((generic - direct).abs() < 1e-10 * direct.abs().max(1.0));
        j = next;
        checked += 1;
    }
}

#[test]
fn cache_is_transparent_and_bounded() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let d = random_data(20, 8, &mut rng);
    let j = random_tree(8, 50, &mut rng);
    let p = GgimParams::new(1.3, 0.1, 8).unwrap();
    let mut big = StatsCache::default();
    let mut tiny = StatsCache::with_capacity(2);
    let a = joint_log_density(&d, &j, &p, &mut big).unwrap();
    let b = joint_log_density(&d, &j, &p, &mut tiny).unwrap();
    let c = joint_log_density(&d, &j, &p, &mut big).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
    assert_eq!(a.to_bits(), c.to_bits());
    assert!(tiny.len() <= 2);
    assert!(big.hits() > 0);
    for set in [vset![0, 1, 2], vset![3], vset![2, 5, 6, 7]] {
        let s = SubsetStats::compute(&d, &set);
        assert!(s.q1 >= 0.0 && s.q2 >= 0.0 && s.q1 <= s.v_d as f64 * s.q2 + 1e-9);
    }
}

#[test]
fn out_of_range_parameters_are_errors() {
    assert!(GgimParams::new(1.0, 1.0, 4).is_err());
    assert!(GgimParams::new(1.0, -1.0 / 3.0, 4).is_err());
    assert!(GgimParams::new(0.0, 0.1, 4).is_err());
    let s = SubsetStats { v_d: 5, q1: 1.0, q2: 1.0 };
    let p = GgimParams { sigma2: 1.0, rho: -0.3, v: 5 };
    assert!(matches!(subset_log_density(&s, 1, &p), Err(Error::ParamOutOfRange(_))));
}

#[test]
fn simulated_edgeless_data_has_the_right_variance() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let j = JunctionTree::build(&Graph::new(3).unwrap()).unwrap();
    let d = simulate_data(&j, &GgimParams::new(4.0, 0.3, 3).unwrap(), 40_000, &mut rng).unwrap();
    for i in 0..3 {
        let var = d.column_square_sum(i) / d.n() as f64;
        assert!((var - 4.0).abs() < 0.15, "{var}");
    }
    let cov: f64 = d.column(0).iter().zip(d.column(1)).map(|(a, b)| a * b).sum::<f64>() / d.n() as f64;
    assert!(cov.abs() < 0.15);
}

#[test]
fn simulated_path_matches_completed_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
    let p = GgimParams::new(2.0, 0.4, 4).unwrap();
    let j = JunctionTree::build(&g).unwrap();
    let n = 100_000;
    let d = simulate_data(&j, &p, n, &mut rng).unwrap();
    let sigma = precision_matrix_oracle(&g, &p).unwrap().k.try_inverse().unwrap();
    for a in 0..4 {
        for b in a..4 {
            let emp: f64 = d.column(a).iter().zip(d.column(b)).map(|(x, y)| x * y).sum::<f64>() / n as f64;
            let se = ((sigma[(a, a)] * sigma[(b, b)] + sigma[(a, b)].powi(2)) / n as f64).sqrt();
            assert!((emp - sigma[(a, b)]).abs() < 3.5 * se, "({a},{b}): {emp} vs {}", sigma[(a, b)]);
        }
    }
}

#[test]
fn sigma2_posterior_shape() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let d = random_data(1000, 50, &mut rng);
    let j = JunctionTree::build(&Graph::new(50).unwrap()).unwrap();
    let (shape, rate) = sigma2_posterior(&d, &j, 0.0, &PriorSpec::default(), &mut StatsCache::default()).unwrap();
    assert_eq!(shape, 25_001.0);
    assert!((rate - (1.0 + d.total_square_sum() / 2.0)).abs() < 1e-9);
}

#[test]
fn sigma2_draws_follow_the_gamma_conditional() {
    use statrs::distribution::{ContinuousCDF, Gamma as GammaDist};
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let d = random_data(10, 4, &mut rng);
    let j = JunctionTree::build(&Graph::from_edges(4, [(0, 1), (1, 2)]).unwrap()).unwrap();
    let prior = PriorSpec::default();
    let mut cache = StatsCache::default();
    let (shape, rate) = sigma2_posterior(&d, &j, 0.25, &prior, &mut cache).unwrap();
    let dist = GammaDist::new(shape, rate).unwrap();
    let n = 20_000;
    let mut u: Vec<f64> =
        (0..n).map(|_| dist.cdf(1.0 / gibbs_update_sigma2(&d, &j, 0.25, &prior, &mut cache, &mut rng).unwrap())).collect();
    u.sort_by(f64::total_cmp);
    let ks =
        u.iter().enumerate().map(|(i, &x)| ((i + 1) as f64 / n as f64 - x).abs().max((x - i as f64 / n as f64).abs())).fold(0.0, f64::max);
    assert!(ks < 1.63 / (n as f64).sqrt(), "KS {ks}");
}

#[test]
fn rho_transform_round_trips_and_stays_in_range() {
    for v in [2, 5, 50] {
        let lo = GgimParams::rho_lower_bound(v);
        for k in 1..100 {
            let rho = lo + (1.0 - lo) * k as f64 / 100.0;
            assert!((rho_inverse(rho_transform(rho, v), v) - rho).abs() < 1e-12);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let d = random_data(5, 50, &mut rng);
    let j = JunctionTree::build(&Graph::new(50).unwrap()).unwrap();
    let mut p = GgimParams::new(5.0, 0.0, 50).unwrap();
    let mut cache = StatsCache::default();
    for _ in 0..500 {
        p.rho = mh_update_rho(&d, &j, &p, 3.0, &mut cache, &mut rng).unwrap().0;
        assert!(p.rho > -1.0 / 49.0 && p.rho < 1.0);
    }
}

#[test]
fn rho_chain_matches_grid_posterior() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let v = 5;
    let g = Graph::from_edges(v, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4)]).unwrap();
    let j = JunctionTree::build(&g).unwrap();
    let d = simulate_data(&j, &GgimParams::new(1.0, 0.4, v).unwrap(), 50, &mut rng).unwrap();
    let mut cache = StatsCache::default();
    let lo = GgimParams::rho_lower_bound(v);
    // Grid posterior over equal-width cells on the ρ scale.
    let cells = 400;
    let width = (1.0 - lo) / cells as f64;
    let logp: Vec<f64> = (0..cells)
        .map(|k| joint_log_density(&d, &j, &GgimParams::new(1.0, lo + (k as f64 + 0.5) * width, v).unwrap(), &mut cache).unwrap())
        .collect();
    let max = logp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logp.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = w.iter().sum();
    let mean_grid: f64 = w.iter().enumerate().map(|(k, wk)| wk / z * (lo + (k as f64 + 0.5) * width)).sum();
    let mut p = GgimParams::new(1.0, 0.0, v).unwrap();
    let (burn, n) = (2_000, 200_000);
    let mut sum = 0.0;
    for it in 0..burn + n {
        p.rho = mh_update_rho(&d, &j, &p, 0.5, &mut cache, &mut rng).unwrap().0;
        if it >= burn {
            sum += p.rho;
        }
    }
    let mean_chain = sum / n as f64;
    assert!((mean_chain - mean_grid).abs() < 0.01, "{mean_chain} vs {mean_grid}");
}

#[test]
fn graph_target_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let d = random_data(6, 5, &mut rng);
    let p = GgimParams::new(2.0, 0.25, 5).unwrap();
    let mut cache = StatsCache::default();
    let j0 = JunctionTree::build(&Graph::from_edges(5, [(0, 1), (1, 2)]).unwrap()).unwrap();
    let m = moves::connect_move(&j0, 0, 1, vset![0], vset![2], Arity::Single);
    let (a, b) = (j0.node_ids()[0], j0.node_ids()[1]);
    let m = m.or_else(|_| {
        moves::connect_move(&j0, a, b, j0.clique(a).difference(j0.clique(b)), j0.clique(b).difference(j0.clique(a)), Arity::Single)
    });
    let m = m.unwrap();
    let j1 = moves::apply(&j0, &m).unwrap();
    let uni = PriorSpec::default();
    let t0 = graph_log_target(&j0, &d, &p, &uni, &mut cache, false).unwrap();
    let t1 = graph_log_target(&j1, &d, &p, &uni, &mut cache, false).unwrap();
    let cr = log_cross_ratio(&m.x, &m.y, &m.s, &d, &p, &mut cache).unwrap();
    assert!((t1 - t0 - cr).abs() < 1e-10);

    let pen = PriorSpec { graph_prior: GraphPrior::EdgePenalty(2.0), ..uni };
    let p1 = graph_log_target(&j1, &d, &p, &pen, &mut cache, false).unwrap();
    let p0 = graph_log_target(&j0, &d, &p, &pen, &mut cache, false).unwrap();
    assert!((p1 - p0 - (cr - 2.0)).abs() < 1e-10);

    let with_mu = graph_log_target(&j0, &d, &p, &uni, &mut cache, true).unwrap();
    assert!((t0 - with_mu - log_mu(&j0)).abs() < 1e-12);

    let mut model = GgimModel::new(Arc::new(d), p, pen).unwrap();
    let fast = model.log_move_ratio(&j0, &j1, &m).unwrap();
    assert!((fast - (p1 - p0)).abs() < 1e-10);
    let mut penalised = Penalized { inner: model, alpha: 1.0 };
    let fast = penalised.log_move_ratio(&j0, &j1, &m).unwrap();
    assert!((fast - (p1 - p0 - 1.0)).abs() < 1e-10);
}

#[test]
fn csv_round_trip_and_header_detection() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let d = random_data(4, 3, &mut rng);
    let mut buf = Vec::new();
    d.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("y0,y1,y2\n"));
    assert_eq!(Dataset::read_csv(text.as_bytes()).unwrap(), d);
    let bare = "# comment\n1,2\n3,4\n";
    let d2 = Dataset::read_csv(bare.as_bytes()).unwrap();
    assert_eq!((d2.n(), d2.v(), d2.value(1, 0)), (2, 2, 3.0));
    assert!(Dataset::read_csv("a,b\n".as_bytes()).is_err());
    assert!(Dataset::read_csv("1,2\n3\n".as_bytes()).is_err());
    assert!(Dataset::read_csv("1,2\nx,4\n".as_bytes()).is_err());
}

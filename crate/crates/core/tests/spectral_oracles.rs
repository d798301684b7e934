use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use robnet::graph::{largest_connected_component, Graph, NodeMask};
use robnet::spectral::{laplacian, spectral_measures, symmetric_eigenvalues};

fn graph_strategy(min_n: usize, max_n: usize) -> impl Strategy<Value = Graph> {
    (min_n..=max_n)
        .prop_flat_map(|n| {
            let pairs = proptest::collection::vec((0..n, 0..n), 0..=2 * n);
            (Just(n), pairs)
        })
        .prop_map(|(n, pairs)| {
            let edges: Vec<(usize, usize)> = pairs.into_iter().filter(|(u, v)| u != v).collect();
            Graph::from_edges_lossy(n, false, &edges)
        })
}

fn connected(g: &Graph) -> bool {
    largest_connected_component(g, &NodeMask::full(g.node_count())) == g.node_count()
}

/// Fraction-free elimination determinant of an integer matrix.
fn bareiss(mut a: Vec<Vec<i128>>) -> i128 {
    let n = a.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    if n == 0 {
        1
    } else {
        sign * a[n - 1][n - 1]
    }
}

/// Number of eigenvalues of `a` below `x`, by Sylvester's law of inertia on
/// exact leading principal minors of `a - xI`. `None` when a minor vanishes.
fn count_below(a: &[f64], n: usize, x: f64) -> Option<usize> {
    let q = |v: f64| BigRational::from_float(v).unwrap();
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| q(a[i * n + j]) - if i == j { q(x) } else { BigRational::zero() }).collect())
        .collect();
    let mut negatives = 0;
    for k in 0..n {
        let pivot = m[k][k].clone();
        if pivot.is_zero() {
            return None;
        }
        if pivot.is_negative() {
            negatives += 1;
        }
        for i in k + 1..n {
            let f = &m[i][k] / &pivot;
            for j in k..n {
                let sub = &f * &m[k][j];
                m[i][j] -= sub;
            }
        }
    }
    Some(negatives)
}

fn check_spectrum(a: &[f64], n: usize) -> Result<(), TestCaseError> {
    let ev = symmetric_eigenvalues(a, n).unwrap();
    prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
    let frob: f64 = a.iter().map(|x| x * x).sum();
    prop_assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-8);
    prop_assert!((ev.iter().map(|l| l * l).sum::<f64>() - frob).abs() < 1e-8);
    // Probe between every pair of separated neighbours and past both ends.
    let mut probes = vec![(ev[0] - 1.0, 0), (ev[n - 1] + 1.0, n)];
    for k in 1..n {
        if ev[k] - ev[k - 1] > 1e-6 {
            probes.push(((ev[k] + ev[k - 1]) / 2.0, k));
        }
    }
    for (x, expected) in probes {
        let got = count_below(a, n, x).or_else(|| count_below(a, n, x + 1e-9)).unwrap();
        prop_assert_eq!(got, expected, "probe at {}", x);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigenvalues_match_inertia_counts(g in graph_strategy(1, 9)) {
        let n = g.node_count();
        check_spectrum(&g.adjacency_matrix(), n)?;
        check_spectrum(&laplacian(&g), n)?;
    }

    #[test]
    fn kirchhoff_spanning_trees(g in graph_strategy(2, 12)) {
        prop_assume!(connected(&g));
        let n = g.node_count();
        let l = laplacian(&g);
        let reduced: Vec<Vec<i128>> = (1..n).map(|i| (1..n).map(|j| l[i * n + j] as i128).collect()).collect();
        let trees = bareiss(reduced) as f64;
        let st = spectral_measures(&g).unwrap().st_log.unwrap().exp();
        prop_assert!(((st - trees) / trees).abs() <= 1e-6, "{} vs {}", st, trees);
    }

    #[test]
    fn classical_bounds(g in graph_strategy(1, 14)) {
        let r = spectral_measures(&g).unwrap();
        let n = g.node_count();
        prop_assert_eq!(r.ac > 1e-9, connected(&g) && n > 1);
        prop_assert_eq!(r.ef.is_some(), connected(&g));
        prop_assert_eq!(r.st_log.is_some(), connected(&g));
        if let Some(ef) = r.ef {
            prop_assert!(n == 1 || ef > 0.0);
        }
        let max_deg = (0..n).map(|v| g.neighbors(v).len()).max().unwrap() as f64;
        prop_assert!(r.sr >= g.average_degree() - 1e-9 && r.sr <= max_deg + 1e-9);
        prop_assert!(r.sg >= -1e-12 && r.ac >= 0.0);
    }

    #[test]
    fn adding_an_edge_never_hurts(g in graph_strategy(3, 12), pick in any::<prop::sample::Index>()) {
        let n = g.node_count();
        let missing: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !g.has_edge(u, v))
            .collect();
        prop_assume!(!missing.is_empty());
        let mut edges = g.edges().to_vec();
        edges.push(missing[pick.index(missing.len())]);
        let h = Graph::from_edges(n, false, &edges).unwrap();
        let (a, b) = (spectral_measures(&g).unwrap(), spectral_measures(&h).unwrap());
        prop_assert!(b.nc >= a.nc - 1e-9);
        prop_assert!(b.sr >= a.sr - 1e-9);
        if let (Some(x), Some(y)) = (a.st_log, b.st_log) {
            prop_assert!(y >= x - 1e-9);
        }
    }
}

#[test]
fn bareiss_matches_small_cases() {
    assert_eq!(bareiss(vec![vec![2, 1], vec![1, 2]]), 3);
    assert_eq!(bareiss(vec![vec![0, 1], vec![1, 0]]), -1);
    // Reduced Laplacian of K4: 16 spanning trees.
    assert_eq!(bareiss(vec![vec![3, -1, -1], vec![-1, 3, -1], vec![-1, -1, 3]]), 16);
}

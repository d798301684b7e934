use std::collections::{BTreeMap, VecDeque};

use proptest::prelude::*;

use robnet::graph::Graph;
use robnet::lfr::{
    assemble_neighborhood, encode, select_nodes, Attribute, Labeling, LfrConfig, NodeFeatures,
};

fn graph_strategy(min_n: usize, max_n: usize) -> impl Strategy<Value = Graph> {
    (min_n..=max_n, any::<bool>())
        .prop_flat_map(|(n, directed)| {
            let pairs = proptest::collection::vec((0..n, 0..n), 0..=2 * n);
            (Just(n), Just(directed), pairs)
        })
        .prop_map(|(n, directed, pairs)| {
            let edges: Vec<(usize, usize)> = pairs.into_iter().filter(|(u, v)| u != v).collect();
            Graph::from_edges_lossy(n, directed, &edges)
        })
}

fn config_strategy() -> impl Strategy<Value = LfrConfig> {
    (1..12usize, 1..6usize, any::<bool>(), 0..3usize).prop_map(|(w, g, bet, attrs)| LfrConfig {
        w,
        g,
        labeling: if bet { Labeling::Betweenness } else { Labeling::Degree },
        attributes: [
            vec![Attribute::Degree, Attribute::Clustering],
            vec![Attribute::Degree, Attribute::Betweenness],
            vec![Attribute::Betweenness, Attribute::Clustering],
        ][attrs]
            .clone(),
    })
}

fn relabel(g: &Graph, perm: &[usize]) -> Graph {
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|&(u, v)| (perm[u], perm[v])).collect();
    Graph::from_edges(g.node_count(), g.is_directed(), &edges).unwrap()
}

/// Reorders `perm` so nodes with equal scores keep their relative id order,
/// which leaves every id tie-break unchanged.
fn tie_preserving(mut perm: Vec<usize>, scores: &[i64]) -> Vec<usize> {
    let mut classes: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (v, &s) in scores.iter().enumerate() {
        classes.entry(s).or_default().push(v);
    }
    for members in classes.values() {
        let mut targets: Vec<usize> = members.iter().map(|&v| perm[v]).collect();
        targets.sort_unstable();
        for (&v, t) in members.iter().zip(targets) {
            perm[v] = t;
        }
    }
    perm
}

fn bfs(g: &Graph, s: usize) -> Vec<usize> {
    let mut d = vec![usize::MAX; g.node_count()];
    d[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &v in g.neighbors(u) {
            if d[v] == usize::MAX {
                d[v] = d[u] + 1;
                q.push_back(v);
            }
        }
    }
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bounded_padded_and_pure(g in graph_strategy(1, 30), cfg in config_strategy()) {
        let t = encode(&g, &cfg);
        prop_assert_eq!(t.data.len(), cfg.w * cfg.g * cfg.h());
        prop_assert!(t.data.iter().all(|x| (0.0..=1.0).contains(x)));
        for i in g.node_count()..cfg.w {
            prop_assert!(t.field(i).iter().all(|&x| x == 0.0));
        }
        prop_assert_eq!(t, encode(&g, &cfg));
    }

    #[test]
    fn relabeling_commutes_with_encoding(
        (g, perm) in graph_strategy(2, 30).prop_flat_map(|g| {
            let n = g.node_count();
            (Just(g), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
        }),
        cfg in config_strategy(),
    ) {
        let scores = NodeFeatures::compute(&g, &cfg).scores;
        let perm = tie_preserving(perm, &scores);
        // Betweenness sums in node order, so allow rounding noise.
        let (a, b) = (encode(&g, &cfg).data, encode(&relabel(&g, &perm), &cfg).data);
        prop_assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-6), "{:?} vs {:?}", a, b);
    }

    #[test]
    fn far_edges_of_unselected_nodes_do_not_matter(g in graph_strategy(40, 60), pick in any::<prop::sample::Index>()) {
        let cfg = LfrConfig::new(4, 3);
        let roots = select_nodes(&g, &cfg);
        let balls: Vec<(Vec<usize>, usize)> = roots
            .iter()
            .map(|&r| {
                let radius = assemble_neighborhood(&g, r, cfg.g).iter().map(|&(_, d)| d).max().unwrap();
                (bfs(&g.to_undirected(), r), radius)
            })
            .collect();
        let far = |v: usize| !roots.contains(&v)
            && balls.iter().all(|(d, radius)| d[v] == usize::MAX || d[v] >= radius + 2);
        let candidates: Vec<(usize, usize)> =
            g.edges().iter().copied().filter(|&(u, v)| far(u) && far(v)).collect();
        prop_assume!(!candidates.is_empty());
        let drop = pick.index(candidates.len());
        let kept: Vec<(usize, usize)> = g.edges().iter().copied().filter(|&e| e != candidates[drop]).collect();
        let h = Graph::from_edges(g.node_count(), g.is_directed(), &kept).unwrap();
        prop_assert_eq!(encode(&g, &cfg).data, encode(&h, &cfg).data);
    }
}

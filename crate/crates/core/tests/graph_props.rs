use proptest::prelude::*;

use robnet::graph::{
    betweenness, betweenness_masked, clustering_coefficients, degree, induced_subgraph,
    largest_connected_component, DegreeMode, Graph, NodeMask,
};

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n, any::<bool>())
        .prop_flat_map(|(n, directed)| {
            let pairs = proptest::collection::vec((0..n, 0..n), 0..=3 * n);
            (Just(n), Just(directed), pairs)
        })
        .prop_map(|(n, directed, pairs)| {
            let edges: Vec<(usize, usize)> = pairs.into_iter().filter(|(u, v)| u != v).collect();
            Graph::from_edges_lossy(n, directed, &edges)
        })
}

fn permuted(g: &Graph, perm: &[usize]) -> Graph {
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|&(u, v)| (perm[u], perm[v])).collect();
    Graph::from_edges(g.node_count(), g.is_directed(), &edges).unwrap()
}

fn perm_strategy(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

proptest! {
    #[test]
    fn degree_sums(g in graph_strategy(30)) {
        let n = g.node_count();
        let sum = |mode| (0..n).map(|v| degree(&g, v, mode).unwrap()).sum::<usize>();
        if g.is_directed() {
            prop_assert_eq!(sum(DegreeMode::Out), g.edge_count());
            prop_assert_eq!(sum(DegreeMode::In), g.edge_count());
        } else {
            prop_assert_eq!(sum(DegreeMode::Total), 2 * g.edge_count());
        }
    }

    #[test]
    fn betweenness_follows_relabeling(
        (g, perm) in graph_strategy(25).prop_flat_map(|g| {
            let n = g.node_count();
            (Just(g), perm_strategy(n))
        })
    ) {
        let b = betweenness(&g);
        let bp = betweenness(&permuted(&g, &perm));
        for v in 0..g.node_count() {
            prop_assert!((b[v] - bp[perm[v]]).abs() < 1e-9);
        }
    }

    #[test]
    fn lcc_shrinks_under_removal(
        (g, order) in graph_strategy(30).prop_flat_map(|g| {
            let n = g.node_count();
            (Just(g), perm_strategy(n))
        })
    ) {
        let mut mask = NodeMask::full(g.node_count());
        let mut last = largest_connected_component(&g, &mask);
        for v in order {
            mask.remove(v);
            let now = largest_connected_component(&g, &mask);
            prop_assert!(now <= last);
            last = now;
        }
        prop_assert_eq!(last, 0);
    }

    #[test]
    fn masked_metrics_match_subgraph(
        (g, alive) in graph_strategy(25).prop_flat_map(|g| {
            let n = g.node_count();
            (Just(g), proptest::collection::vec(any::<bool>(), n))
        })
    ) {
        let mask = NodeMask::from_alive(alive);
        let sub = induced_subgraph(&g, &mask);
        let b = betweenness_masked(&g, &mask);
        let bs = betweenness(&sub.graph);
        let full = NodeMask::full(sub.graph.node_count());
        prop_assert_eq!(largest_connected_component(&g, &mask), largest_connected_component(&sub.graph, &full));
        for (i, &v) in sub.original_ids.iter().enumerate() {
            prop_assert!((b[v] - bs[i]).abs() < 1e-9);
        }
        for v in 0..g.node_count() {
            if !mask.is_alive(v) {
                prop_assert_eq!(b[v], 0.0);
            }
        }
    }

    #[test]
    fn clustering_in_unit_interval(g in graph_strategy(30)) {
        prop_assert!(clustering_coefficients(&g).iter().all(|c| (0.0..=1.0).contains(c)));
    }
}

use proptest::prelude::*;

use robnet::graph::{largest_connected_component, Graph, NodeMask};
use robnet::netgen::{generate, GenSpec, Model};

fn weakly_connected(g: &Graph) -> bool {
    largest_connected_component(g, &NodeMask::full(g.node_count())) == g.node_count()
}

fn target_edges(model: Model, n: usize, k: f64) -> usize {
    ((k * n as f64 / 2.0).round() as usize).max(model.min_edges(n))
}

#[test]
fn exact_sizes_for_every_model_and_seed() {
    for model in Model::ALL {
        let (lo, hi) = model.degree_range();
        for seed in 0..20 {
            let n = 40 + 3 * seed as usize;
            let k = lo + (hi - lo) * seed as f64 / 19.0;
            let m = target_edges(model, n, k);
            for directed in [false, true] {
                let g = generate(&GenSpec::new(model, n, m, directed, seed)).unwrap();
                assert_eq!((g.node_count(), g.edge_count()), (n, m), "{model} seed {seed}");
                assert_eq!(g.is_directed(), directed);
            }
        }
    }
}

#[test]
fn backbone_models_stay_connected() {
    for model in [Model::Qs, Model::SwNw, Model::SwWs] {
        for seed in 0..20 {
            let n = 30 + seed as usize;
            for m in [model.min_edges(n), 2 * n, 3 * n] {
                for directed in [false, true] {
                    let g = generate(&GenSpec::new(model, n, m, directed, seed)).unwrap();
                    assert!(weakly_connected(&g), "{model} n={n} m={m} directed={directed}");
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn same_seed_same_edges(model in 0..9usize, n in 12..60usize, seed in any::<u64>(), directed in any::<bool>()) {
        let model = Model::ALL[model];
        let (lo, hi) = model.degree_range();
        let m = target_edges(model, n, (lo + hi) / 2.0);
        let spec = GenSpec::new(model, n, m, directed, seed);
        let a = generate(&spec).unwrap();
        let b = generate(&spec).unwrap();
        prop_assert_eq!(a.edges(), b.edges());
        prop_assert_eq!(a.edge_count(), m);
    }
}

//! Property tests for the structural invariants that hold on every input.

use proptest::prelude::*;

use specglauber::corpus;
use specglauber::gibbs::{partition_and_marginals, Boundary, GibbsParams};
use specglauber::graph::{pair_extension, Graph};
use specglauber::sawtree::{brute_force_walk_count, saw_tree, SpinConvention};

/// Arbitrary small simple graph from a vertex count and raw pair list.
fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2usize..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..(n * n)).prop_map(move |pairs| {
            let edges: Vec<(usize, usize)> = pairs.into_iter().filter(|(u, v)| u != v).collect();
            Graph::build(n, &edges).expect("filtered pairs are valid")
        })
    })
}

fn arb_connected_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (4usize..=max_n, 0usize..40, any::<u64>())
        .prop_map(|(n, extra, seed)| corpus::random_connected(n, n - 1 + extra, seed))
}

proptest! {
    #[test]
    fn build_graph_invariants(g in arb_graph(9)) {
        // neighbour lists are symmetric, sorted, and edge-consistent
        let mut degree_sum = 0;
        for v in 0..g.vertex_count() {
            let nb = g.neighbors(v);
            degree_sum += nb.len();
            prop_assert!(nb.windows(2).all(|w| w[0] < w[1]));
            for &u in nb {
                prop_assert!(g.neighbors(u).contains(&v));
                prop_assert!(g.has_edge(u, v) && g.has_edge(v, u));
            }
        }
        prop_assert_eq!(degree_sum, 2 * g.edge_count());
        // the oriented edge set is closed under reversal
        let m = g.oriented_edges();
        prop_assert_eq!(m.len(), 2 * g.edge_count());
        for e in &m {
            prop_assert!(m.contains(&e.reverse()));
            prop_assert_eq!(e.reverse().reverse(), *e);
        }
    }

    #[test]
    fn pair_extension_order_invariance(g in arb_connected_graph(7), a in 0usize..7, b in 0usize..7) {
        let n = g.vertex_count();
        let (u, w) = (a % n, b % n);
        prop_assume!(u != w);
        let first = pair_extension(&g, u, w).unwrap();
        let second = pair_extension(&g, w, u).unwrap();
        prop_assert_eq!(&first.labels, &second.labels);
        prop_assert_eq!(&first.graph, &second.graph);
    }

    #[test]
    fn saw_tree_counts_match_brute_force(g in arb_connected_graph(7), r in 0usize..7) {
        let w = r % g.vertex_count();
        let t = saw_tree(&g, w, &Boundary::free(), SpinConvention::EdgeOrder).unwrap();
        prop_assert_eq!(t.node_count(), brute_force_walk_count(&g, w, &Boundary::free()));
    }

    #[test]
    fn saw_tree_of_tree_graph_is_the_graph(n in 2usize..9, seed in any::<u64>(), r in 0usize..9) {
        // a random spanning tree has no cycles: the walk tree is the graph
        // itself rooted at w, with no fixed spins
        let g = corpus::random_connected(n, n - 1, seed);
        let w = r % n;
        let t = saw_tree(&g, w, &Boundary::free(), SpinConvention::EdgeOrder).unwrap();
        prop_assert_eq!(t.node_count(), n);
        prop_assert!(t.nodes.iter().all(|node| node.fixed_spin.is_none()));
        // per-vertex copies are unique
        for v in 0..n {
            prop_assert_eq!(t.copies_of(v).len(), 1);
        }
    }

    #[test]
    fn marginals_are_probabilities(
        g in arb_connected_graph(7),
        lam in 0.05f64..4.0,
        beta in 0.2f64..2.0,
    ) {
        for p in [GibbsParams::hardcore(lam), GibbsParams::ising(beta)] {
            let m = partition_and_marginals(&g, &p, &Boundary::free()).unwrap();
            for (_, &prob) in &m.marginals {
                prop_assert!((0.0..=1.0).contains(&prob));
            }
            if p.model == specglauber::gibbs::ModelTag::Ising {
                for (_, &prob) in &m.marginals {
                    prop_assert!((prob - 0.5).abs() < 1e-12);
                }
            }
        }
    }
}

mod common;

use common::{any_graph, any_subcubic};
use proptest::prelude::*;
use smc_core::generators::{gen_g3, gen_random_cubic};
use smc_core::measure::{rat, ScWeights};
use smc_core::separator::{
    bisect_heuristic, greedy_order, nice_path_decomposition, separate_balanced_by_measure, separate_cubic,
    separate_cubic_seeded, verify_separation,
};
use smc_core::{Graph, Separation, Side};
use smc_oracles::{brute_min_bisection, brute_pathwidth};

#[test]
fn separation_moves_and_sides() {
    let mut s = Separation::trivial(0..4);
    assert_eq!(s.side(2), Some(Side::Right));
    s.move_to(2, Side::Sep);
    s.move_to(3, Side::Left);
    assert_eq!(s.len(), 4);
    s.swap_sides();
    assert_eq!(s.side(3), Some(Side::Right));
    assert_eq!(s.remove(2), Some(Side::Sep));
    assert_eq!(s.side(2), None);
}

#[test]
fn crossing_edge_is_rejected() {
    let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
    let s = Separation::new([0].into(), Default::default(), [1].into());
    assert!(!verify_separation(&g, &s));
    let s = Separation::new([0].into(), [1].into(), Default::default());
    assert!(verify_separation(&g, &s));
}

#[test]
fn cubic_separators_are_small() {
    for n in [20usize, 40, 80] {
        let g = gen_random_cubic(n, n as u64).unwrap();
        let s = separate_cubic(&g);
        assert!(verify_separation(&g, &s));
        assert!(s.part(Side::Sep).len() * 2 <= n, "n={n} |S|={}", s.part(Side::Sep).len());
    }
    let g = gen_g3(16).unwrap();
    assert!(verify_separation(&g, &separate_cubic_seeded(&g, 9)));
}

proptest! {
    #[test]
    fn path_decompositions_are_valid_and_nice(g in any_graph(11)) {
        let pd = nice_path_decomposition(&g);
        prop_assert!(pd.is_valid_for(&g));
        prop_assert!(pd.is_nice());
        prop_assert!(pd.width() >= brute_pathwidth(&g).unwrap());
        let order = greedy_order(&g);
        prop_assert_eq!(order.len(), g.num_vertices());
    }

    #[test]
    fn bisection_is_balanced_and_not_below_optimum(g in any_graph(12), seed in any::<u64>()) {
        let b = bisect_heuristic(&g, seed);
        prop_assert_eq!(b.a.len() + b.b.len(), g.num_vertices());
        prop_assert!(b.a.len().abs_diff(b.b.len()) <= 1);
        prop_assert!(b.a.is_disjoint(&b.b));
        let cut = g.edges().iter().filter(|(u, v)| b.a.contains(u) != b.a.contains(v)).count();
        prop_assert_eq!(cut, b.cut);
        prop_assert!(b.cut >= brute_min_bisection(&g).unwrap());
    }

    #[test]
    fn cubic_separation_partitions_vertices(g in any_subcubic(40)) {
        let s = separate_cubic(&g);
        prop_assert!(verify_separation(&g, &s));
        prop_assert!(s.is_partition_of(&g.vertex_set()));
    }

    #[test]
    fn measure_sweep_respects_cap(g in any_subcubic(40)) {
        let w = ScWeights::published();
        let b = w.big_b();
        let weight = |v| w.right(g.degree(v)).clone();
        let s = separate_balanced_by_measure(&g, &weight, &b);
        prop_assert!(verify_separation(&g, &s));
        let mu = |side| s.part(side).iter().map(|&v| weight(v)).fold(rat(0, 1), |a, x| a + x);
        let d = mu(Side::Left) - mu(Side::Right);
        let d = if d < rat(0, 1) { -d } else { d };
        prop_assert!(d <= b);
    }

    #[test]
    fn restrict_keeps_separation_valid(g in any_subcubic(20), k in 0usize..20) {
        let s = separate_cubic(&g);
        let keep = g.vertices().filter(|v| v % (k + 2) != 0).collect();
        let h = g.induced_subgraph(&keep).unwrap();
        prop_assert!(verify_separation(&h, &s.restrict(&keep)));
    }
}

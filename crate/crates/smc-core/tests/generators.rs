use proptest::prelude::*;
use smc_core::generators::{
    g4_x, g5_parts, g5_y, gen_g3, gen_g4, gen_g5, gen_random_csp, gen_random_cubic, gen_random_graph,
    gen_random_subcubic, simplify_skeleton, trace_lower_bound, Family, GenError,
};
use smc_core::Graph;

fn degree_histogram(g: &Graph) -> Vec<usize> {
    let mut h = vec![0; g.max_degree() + 1];
    for v in g.vertices() {
        h[g.degree(v)] += 1;
    }
    h
}

fn trace(f: Family) -> usize {
    trace_lower_bound(&f.generate().unwrap(), f).unwrap().reduction_iii_count
}

#[test]
fn parameters_are_validated() {
    assert!(matches!(gen_g3(6), Err(GenError::BadParams(_))));
    assert!(matches!(gen_g4(8, 3), Err(GenError::BadParams(_))));
    assert!(matches!(gen_g4(8, 10), Err(GenError::BadParams(_))));
    assert!(matches!(gen_g5(30), Err(GenError::BadParams(_))));
    assert!(gen_random_cubic(7, 0).is_err());
}

#[test]
fn trace_rejects_foreign_graphs() {
    let g = gen_g3(8).unwrap();
    assert!(matches!(trace_lower_bound(&g, Family::G5 { n: 40 }), Err(GenError::FamilyMismatch(_))));
}

#[test]
fn cubic_family() {
    for n in (4..=200).step_by(4) {
        let g = gen_g3(n).unwrap();
        assert_eq!(g.num_vertices(), n);
        assert!(g.vertices().all(|v| g.degree(v) == 3), "n={n}");
        assert!(g.is_connected());
        let t = trace_lower_bound(&g, Family::G3 { n }).unwrap();
        assert_eq!(t.reduction_iii_count, n / 4);
        assert!(t.guard_failures.is_empty());
    }
}

#[test]
fn degree_four_family_structure() {
    for n3 in (8..=100).step_by(4) {
        let g = gen_g4(n3, 2).unwrap();
        assert_eq!(degree_histogram(&g), vec![0, 0, 1, n3]);
        for n4 in (4..=n3).step_by(2) {
            let g = gen_g4(n3, n4).unwrap();
            assert_eq!(g.num_vertices(), n3 + n4 - 1);
            let h = degree_histogram(&g);
            assert_eq!(h.len(), 5, "({n3},{n4})");
            assert_eq!(h[4], 2 * n4 - 5);
            assert_eq!(h[3], n3 + n4 - 1 - h[4]);
            assert!(g.has_vertex(g4_x(n3, n4)));
        }
    }
}

// Each extra pair of path vertices costs the adversary exactly one more branching.
#[test]
fn degree_four_recurrence() {
    for n3 in (8..=48).step_by(8) {
        for n4 in (6..=n3).step_by(2) {
            let big = trace(Family::G4 { n3, n4 });
            let small = trace(Family::G4 { n3, n4: n4 - 2 });
            assert_eq!(big, small + 1, "({n3},{n4})");
        }
    }
}

#[test]
fn degree_four_base_cases() {
    for n3 in (8..=48).step_by(4) {
        assert_eq!(trace(Family::G4 { n3, n4: 0 }), n3 / 4);
        assert_eq!(trace(Family::G4 { n3, n4: 2 }), n3 / 4);
    }
}

#[test]
fn degree_five_family_structure() {
    for n in [40, 80, 120, 160, 200] {
        let g = gen_g5(n).unwrap();
        let (n3, n4, n5) = g5_parts(n);
        assert_eq!(n3 + n4 + n5, n);
        assert_eq!(g.num_vertices(), n - 1);
        assert!(g.max_degree() <= 5);
        assert!(g.vertices().all(|v| g.degree(v) >= 3));
        assert_eq!(g.degree(g5_y(n, 1)), 5);
        let t = trace_lower_bound(&g, Family::G5 { n }).unwrap();
        assert!(t.guard_failures.is_empty(), "n={n}: {:?}", t.guard_failures);
    }
}

#[test]
fn trace_steps_shrink_the_graph() {
    let f = Family::G4 { n3: 16, n4: 8 };
    let g = f.generate().unwrap();
    let t = trace_lower_bound(&g, f).unwrap();
    assert_eq!(t.steps.len(), t.reduction_iii_count);
    let orders: Vec<usize> = t.steps.iter().map(|s| s.order_after).collect();
    assert!(orders.windows(2).all(|w| w[1] < w[0]));
    assert!(t.steps.iter().all(|s| s.degree >= 3));
}

#[test]
fn skeleton_simplification_removes_low_degree_vertices() {
    let mut g = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (3, 4)]).unwrap();
    simplify_skeleton(&mut g);
    assert!(g.vertices().all(|v| g.degree(v) >= 3));
}

proptest! {
    #[test]
    fn random_cubic_is_cubic_and_seeded(half in 2usize..60, seed in any::<u64>()) {
        let g = gen_random_cubic(2 * half, seed).unwrap();
        prop_assert_eq!(g.num_vertices(), 2 * half);
        prop_assert!(g.vertices().all(|v| g.degree(v) == 3));
        prop_assert_eq!(g, gen_random_cubic(2 * half, seed).unwrap());
    }

    #[test]
    fn random_subcubic_respects_degree(n in 0usize..80, p in 0.0..1.0f64, seed in any::<u64>()) {
        let g = gen_random_subcubic(n, p, seed);
        prop_assert_eq!(g.num_vertices(), n);
        prop_assert!(g.max_degree() <= 3);
    }

    #[test]
    fn random_graph_is_seeded(n in 0usize..30, p in 0.0..1.0f64, seed in any::<u64>()) {
        prop_assert_eq!(gen_random_graph(n, p, seed), gen_random_graph(n, p, seed));
    }

    #[test]
    fn random_csp_has_requested_shape(n in 2usize..15, m in 0usize..20, r in 2usize..5, seed in any::<u64>()) {
        let m = m.min(n * (n - 1) / 2);
        let i = gen_random_csp(n, m, r, seed).unwrap();
        prop_assert_eq!(i.num_vertices(), n);
        prop_assert_eq!(i.graph().num_edges(), m);
        prop_assert_eq!(i.r(), r);
    }
}

mod common;

use common::{any_graph, any_subcubic};
use proptest::prelude::*;
use smc_core::generators::gen_g3;
use smc_core::{Graph, GraphError};

#[test]
fn rejects_loops_and_duplicates() {
    let mut g = Graph::with_vertices(2);
    assert_eq!(g.add_edge(0, 0), Err(GraphError::SelfLoop(0)));
    g.add_edge(0, 1).unwrap();
    assert_eq!(g.add_edge(1, 0), Err(GraphError::DuplicateEdge(0, 1)));
    assert!(matches!(g.add_edge(0, 7), Err(GraphError::UnknownVertex(7))));
}

#[test]
fn text_errors() {
    assert!(matches!(Graph::from_text("graph 2 2\n0 1\n"), Err(GraphError::Parse { .. })));
    assert!(matches!(Graph::from_text("graph 2 1\n0 0\n"), Err(GraphError::Parse { .. })));
    assert!(matches!(Graph::from_text("digraph 2 1\n0 1\n"), Err(GraphError::Parse { .. })));
    let g = Graph::from_text("# comment\ngraph 3 1\n\n1 2  # trailing\n").unwrap();
    assert_eq!(g.num_edges(), 1);
    assert_eq!(g.shifted(5).to_text(), Err(GraphError::NonContiguous));
}

#[test]
fn cubic_structure_of_small_graphs() {
    let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    assert!(k4.cubic_structure().unwrap().is_cubic());
    let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    assert!(path.cubic_structure().unwrap().is_empty());
    // theta graph: two degree-3 vertices joined by three paths
    let theta = Graph::from_edges(5, &[(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)]).unwrap();
    let mg = theta.cubic_structure().unwrap();
    assert_eq!(mg.num_vertices(), 2);
    assert_eq!(mg.multiplicity(0, 1), 3);
    let mut star = Graph::with_vertices(5);
    for v in 1..5 {
        star.add_edge(0, v).unwrap();
    }
    assert_eq!(star.cubic_structure(), Err(GraphError::DegreeTooLarge(0, 4)));
}

proptest! {
    #[test]
    fn text_round_trip(g in any_graph(20)) {
        prop_assert_eq!(Graph::from_text(&g.to_text().unwrap()).unwrap(), g);
    }

    #[test]
    fn handshake(g in any_graph(25)) {
        let sum: usize = g.vertices().map(|v| g.degree(v)).sum();
        prop_assert_eq!(sum, 2 * g.num_edges());
        prop_assert_eq!(g.edges().len(), g.num_edges());
    }

    #[test]
    fn components_partition_vertices(g in any_graph(25)) {
        let comps = g.connected_components();
        let total: usize = comps.iter().map(|c| c.len()).sum();
        prop_assert_eq!(total, g.num_vertices());
        for (u, v) in g.edges() {
            prop_assert!(comps.iter().any(|c| c.contains(&u) && c.contains(&v)));
        }
    }

    #[test]
    fn vertex_deletion(g in any_graph(15), k in 0usize..15) {
        prop_assume!(g.has_vertex(k));
        let h = g.remove_vertex(k).unwrap();
        prop_assert_eq!(h.num_vertices() + 1, g.num_vertices());
        prop_assert_eq!(h.num_edges() + g.degree(k), g.num_edges());
        let keep = g.vertex_set().into_iter().filter(|&v| v != k).collect();
        prop_assert_eq!(g.induced_subgraph(&keep).unwrap(), h);
    }

    #[test]
    fn union_with_shift(a in any_graph(10), b in any_graph(10)) {
        let u = a.disjoint_union(&b.shifted(100)).unwrap();
        prop_assert_eq!(u.num_vertices(), a.num_vertices() + b.num_vertices());
        prop_assert_eq!(u.num_edges(), a.num_edges() + b.num_edges());
        if a.num_vertices() > 0 {
            prop_assert!(a.disjoint_union(&a).is_err());
        }
    }

    #[test]
    fn cubic_structure_is_cubic(g in any_subcubic(30)) {
        let mg = g.cubic_structure().unwrap();
        prop_assert!(mg.is_cubic());
        prop_assert!(mg.num_vertices() <= g.vertices().filter(|&v| g.degree(v) == 3).count());
    }
}

#[test]
fn cubic_family_is_its_own_structure() {
    let g = gen_g3(12).unwrap();
    assert_eq!(g.cubic_structure().unwrap().to_simple(), g);
}

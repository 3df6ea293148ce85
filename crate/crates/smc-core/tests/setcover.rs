mod common;

use common::{any_graph, any_subcubic};
use proptest::prelude::*;
use smc_core::counts::CountVector;
use smc_core::max2csp::Policy;
use smc_core::measure::ScWeights;
use smc_core::setcover::{
    count_ds_general, ds_to_sc, sc3_count, sc_count, sc_count_with, sc_dp, ScError, ScIncidence, ScOptions,
};
use smc_core::Graph;
use smc_oracles::{brute_domset_graph, brute_setcover};

fn any_family(max_u: usize, max_s: usize) -> impl Strategy<Value = ScIncidence> {
    (0..=max_u).prop_flat_map(move |u| {
        proptest::collection::vec(proptest::collection::btree_set(0..u.max(1), 0..=u), 0..=max_s).prop_map(
            move |sets| {
                let sets: Vec<Vec<usize>> =
                    sets.into_iter().map(|s| s.into_iter().filter(|&e| e < u).collect()).collect();
                ScIncidence::new(u, &sets).unwrap()
            },
        )
    })
}

/// Families where every element and set has degree at most `d`.
fn bounded(max_u: usize, max_s: usize, d: usize) -> impl Strategy<Value = ScIncidence> {
    any_family(max_u, max_s).prop_map(move |i| {
        let mut load = vec![0usize; i.element_vertices().len()];
        let elements = i.element_vertices();
        let sets: Vec<Vec<usize>> = i
            .set_members()
            .into_iter()
            .map(|(_, es)| {
                let mut kept = Vec::new();
                for e in es {
                    let k = elements.iter().position(|&x| x == e).unwrap();
                    if kept.len() < d && load[k] < d {
                        load[k] += 1;
                        kept.push(k);
                    }
                }
                kept
            })
            .collect();
        ScIncidence::new(elements.len(), &sets).unwrap()
    })
}

#[test]
fn uncoverable_and_trivial_families() {
    let i = ScIncidence::new(2, &[vec![0], vec![0]]).unwrap();
    assert_eq!(sc_count(&i), CountVector::zero());
    let i = ScIncidence::new(0, &[vec![], vec![]]).unwrap();
    assert_eq!(sc_count(&i), CountVector::from_u64s(&[1, 2, 1]));
    assert!(matches!(ScIncidence::new(1, &[vec![3]]), Err(ScError::ElementOutOfRange { .. })));
}

#[test]
fn degree_limits_are_checked() {
    let wide = ScIncidence::new(4, &[vec![0, 1, 2, 3]]).unwrap();
    assert!(matches!(sc3_count(&wide, &ScWeights::published()), Err(ScError::DegreeTooLarge { .. })));
    let tri = ScIncidence::new(3, &[vec![0, 1, 2]]).unwrap();
    assert!(matches!(sc_dp(&tri), Err(ScError::DegreeTooLarge { .. })));
}

#[test]
fn closed_neighborhood_encoding() {
    let p3 = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
    let i = ds_to_sc(&p3);
    assert_eq!(i.num_sets(), 3);
    assert_eq!(i.element_vertices(), vec![0, 2, 4]);
    assert_eq!(i.incidence().neighbors(3).len(), 3);
    assert!(i.is_consistent());
}

#[test]
fn text_rejects_bad_input() {
    for bad in
        ["", "setcover 2\n", "setcover 2 1\nset 0 5\n", "setcover 1 2\nset 0 0\n", "setcover 1 1\nset 0 0\nset 0 0\n"]
    {
        assert!(matches!(ScIncidence::from_text(bad), Err(ScError::Parse { .. })), "{bad:?}");
    }
}

proptest! {
    #[test]
    fn count_matches_enumeration(i in any_family(8, 8)) {
        prop_assert_eq!(sc_count(&i), brute_setcover(&i).unwrap());
    }

    #[test]
    fn policies_agree(i in any_family(9, 9)) {
        let local = ScOptions { policy: Policy::Local, ..Default::default() };
        let exhaustive = ScOptions { base_limit: 0, ..Default::default() };
        let want = sc_count(&i);
        prop_assert_eq!(&sc_count_with(&i, &local).0, &want);
        prop_assert_eq!(&sc_count_with(&i, &exhaustive).0, &want);
    }

    #[test]
    fn subcubic_counter_matches(i in bounded(8, 8, 3)) {
        prop_assert_eq!(sc3_count(&i, &ScWeights::published()).unwrap(), brute_setcover(&i).unwrap());
    }

    #[test]
    fn degree_two_counter_matches(i in bounded(8, 8, 2)) {
        prop_assert_eq!(sc_dp(&i).unwrap(), brute_setcover(&i).unwrap());
    }

    #[test]
    fn general_domination(g in any_graph(11)) {
        prop_assert_eq!(count_ds_general(&g), brute_domset_graph(&g).unwrap());
    }

    #[test]
    fn reduction_preserves_counts(g in any_subcubic(10)) {
        prop_assert_eq!(sc_count(&ds_to_sc(&g)), brute_domset_graph(&g).unwrap());
    }

    #[test]
    fn audited_runs_have_no_measure_violations(g in any_graph(14)) {
        let (_, st) = sc_count_with(&ds_to_sc(&g), &ScOptions { audit: true, ..Default::default() });
        let bad: Vec<_> = st.audit.violations.iter().filter(|v| v.kind != smc_core::audit::AuditKind::Balance).collect();
        prop_assert!(bad.is_empty(), "{:?}", bad);
    }

    #[test]
    fn text_round_trip(i in any_family(8, 8)) {
        let j = ScIncidence::from_text(&i.to_text()).unwrap();
        prop_assert_eq!(sc_count(&j), sc_count(&i));
        prop_assert_eq!(j.to_text(), i.to_text());
    }
}

mod common;

use common::{any_graph, any_subcubic};
use proptest::prelude::*;
use smc_core::generators::{gen_random_csp, random_csp_on};
use smc_core::max2csp::{
    encode_max2sat, encode_maxcut, parse_dimacs, solve, solve_general, solve_with, CspError, CspInstance, Policy,
    SolveOptions,
};
use smc_core::Graph;
use smc_oracles::brute_max2csp;

fn any_csp(max_n: usize) -> impl Strategy<Value = CspInstance> {
    (any_graph(max_n), 2usize..=3, any::<u64>(), -4i64..=4).prop_map(|(g, r, s, nil)| {
        let mut i = random_csp_on(&g, r, 6, s);
        i.set_nil(nil);
        i
    })
}

fn any_subcubic_csp(max_n: usize) -> impl Strategy<Value = CspInstance> {
    (any_subcubic(max_n), 2usize..=4, any::<u64>()).prop_map(|(g, r, s)| random_csp_on(&g, r, 5, s))
}

fn optimum(i: &CspInstance) -> i64 {
    brute_max2csp(i).unwrap().score
}

#[test]
fn maxcut_small_graphs() {
    let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
    assert_eq!(solve_general(&encode_maxcut(&k4)).unwrap().0.score, 4);
    let c5 = Graph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
    assert_eq!(solve_general(&encode_maxcut(&c5)).unwrap().0.score, 4);
    assert_eq!(solve(&encode_maxcut(&Graph::new())).unwrap().0.score, 0);
}

#[test]
fn max2sat_counts_satisfied_clauses() {
    let (n, clauses) = parse_dimacs("c demo\np cnf 2 4\n1 2 0\n-1 2 0\n1 -2 0\n-1 -2 0\n").unwrap();
    let i = encode_max2sat(n, &clauses).unwrap();
    assert_eq!(solve_general(&i).unwrap().0.score, 3);
    let taut = encode_max2sat(1, &[vec![1, -1], vec![1]]).unwrap();
    assert_eq!(solve_general(&taut).unwrap().0.score, 2);
    assert!(matches!(encode_max2sat(3, &[vec![1, 2, 3]]), Err(CspError::ClauseTooWide(1, 3))));
}

#[test]
fn malformed_text_is_a_parse_error() {
    for bad in ["", "max2csp 1 0 0\n", "max2csp 2 1 0\nv 0 1\n", "nonsense"] {
        let e = CspInstance::from_text(bad).unwrap_err();
        assert!(e.is_parse(), "{bad:?} gave {e}");
    }
}

#[test]
fn reductions_reject_wrong_degrees() {
    let i = encode_maxcut(&Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap());
    assert!(matches!(i.reduce0(1), Err(CspError::WrongDegree { .. })));
    assert!(matches!(i.reduce_iii(1), Err(CspError::WrongDegree { .. })));
    assert!(i.reduce_ii(1).is_ok());
}

#[test]
fn dense_random_instances_match_enumeration() {
    for seed in 0..20 {
        let i = gen_random_csp(9, 20, 2 + seed as usize % 2, seed).unwrap();
        assert_eq!(solve_general(&i).unwrap().0.score, optimum(&i));
    }
}

proptest! {
    #[test]
    fn general_solver_is_exact(i in any_csp(9)) {
        let (sol, _) = solve_general(&i).unwrap();
        prop_assert_eq!(sol.score, optimum(&i));
        prop_assert_eq!(i.evaluate(&sol.assignment).unwrap(), sol.score);
    }

    #[test]
    fn policies_agree_on_subcubic(i in any_subcubic_csp(12)) {
        let sep = solve_with(&i, &SolveOptions::default()).unwrap().0;
        let loc = solve_with(&i, &SolveOptions { policy: Policy::Local, ..Default::default() }).unwrap().0;
        prop_assert_eq!(sep.score, loc.score);
        prop_assert_eq!(i.evaluate(&sep.assignment).unwrap(), sep.score);
        prop_assert_eq!(i.evaluate(&loc.assignment).unwrap(), loc.score);
    }

    #[test]
    fn audited_runs_are_clean(i in any_subcubic_csp(16)) {
        let (_, st) = solve_with(&i, &SolveOptions { audit: true, ..Default::default() }).unwrap();
        prop_assert!(st.audit.is_clean(), "{:?}", st.audit.violations);
    }

    #[test]
    fn text_round_trip(i in any_csp(8)) {
        let j = CspInstance::from_text(&i.to_text()).unwrap();
        prop_assert_eq!(&j, &i);
    }

    #[test]
    fn low_degree_reductions_preserve_optimum(i in any_csp(8)) {
        let opt = optimum(&i);
        for v in i.graph().vertices() {
            let reduced = match i.graph().degree(v) {
                0 => i.reduce0(v).unwrap(),
                1 => i.reduce_i(v).unwrap(),
                2 => i.reduce_ii(v).unwrap(),
                _ => {
                    let best = i.reduce_iii(v).unwrap().iter().map(optimum).max().unwrap();
                    prop_assert_eq!(best, opt);
                    continue;
                }
            };
            prop_assert_eq!(optimum(&reduced), opt);
        }
    }

    #[test]
    fn thread_count_does_not_change_result(i in any_subcubic_csp(14), t in 1usize..4) {
        let a = solve_with(&i, &SolveOptions::default()).unwrap().0;
        let b = solve_with(&i, &SolveOptions { threads: t, ..Default::default() }).unwrap().0;
        prop_assert_eq!(a.score, b.score);
    }
}

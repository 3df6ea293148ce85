#![allow(dead_code)]

use proptest::prelude::*;
use smc_core::generators::{gen_random_graph, gen_random_subcubic};
use smc_core::Graph;

pub fn any_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (0..=max_n, 0.0..1.0f64, any::<u64>()).prop_map(|(n, p, s)| gen_random_graph(n, p, s))
}

pub fn any_subcubic(max_n: usize) -> impl Strategy<Value = Graph> {
    (0..=max_n, 0.2..1.0f64, any::<u64>()).prop_map(|(n, p, s)| gen_random_subcubic(n, p, s))
}

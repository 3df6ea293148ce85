//! Lower-bound graph families, their adversarial traces, and seeded random
//! instances.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Graph, Vertex};
use crate::max2csp::{CspInstance, Score};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("no simple graph found after {0} attempts")]
    Exhausted(usize),
    #[error("graph does not match the {0} construction")]
    FamilyMismatch(Family),
}

fn bad(msg: impl Into<String>) -> GenError {
    GenError::BadParams(msg.into())
}

/// Vertex a_i of the cubic family, 1-based.
fn a(i: usize) -> Vertex {
    i - 1
}

/// `n` divisible by 4, at least 4. Vertex a_i has id i - 1.
pub fn gen_g3(n: usize) -> Result<Graph, GenError> {
    if n < 4 || n % 4 != 0 {
        return Err(bad(format!("g3 needs n divisible by 4 and at least 4, got {n}")));
    }
    let mut g = Graph::with_vertices(n);
    let cycle: Vec<usize> = (1..=n).filter(|i| i % 4 != 0).collect();
    for k in 0..cycle.len() {
        let (u, v) = (cycle[k], cycle[(k + 1) % cycle.len()]);
        if !g.has_edge(a(u), a(v)) {
            g.add_edge(a(u), a(v)).unwrap();
        }
    }
    for i in 1..=n / 4 {
        for d in 1..=3 {
            g.add_edge(a(4 * i), a(4 * i - d)).unwrap();
        }
    }
    Ok(g)
}

/// Id of x_i in `gen_g4(n3, _)`.
pub fn g4_x(n3: usize, i: usize) -> Vertex {
    n3 + i - 2
}

/// `n3` divisible by 4, `n4 ≤ n3` even. Vertices a_1..a_{n3} are 0..n3,
/// path vertices x_2..x_{n4} follow.
pub fn gen_g4(n3: usize, n4: usize) -> Result<Graph, GenError> {
    if n4 % 2 != 0 || n4 > n3 {
        return Err(bad(format!("g4 needs even n4 ≤ n3, got ({n3}, {n4})")));
    }
    let mut g = gen_g3(n3)?;
    if n4 == 0 {
        return Ok(g);
    }
    for i in (1..n4).step_by(2) {
        g.remove_edge(a(i), a(i + 1));
    }
    let x = |i| g4_x(n3, i);
    for i in 2..=n4 {
        g.add_vertex(x(i));
        g.add_edge(x(i), a(i)).unwrap();
        if i > 2 {
            g.add_edge(x(i), x(i - 1)).unwrap();
        }
    }
    g.add_edge(x(2), a(1)).unwrap();
    for i in (4..=n4).step_by(2) {
        g.add_edge(x(i), a(i - 1)).unwrap();
        g.add_edge(x(i - 1), a(i)).unwrap();
    }
    Ok(g)
}

/// Part sizes (n₃, n₄, n₅) of the degree-5 family.
pub fn g5_parts(n: usize) -> (usize, usize, usize) {
    (n / 5, 3 * n / 5, n / 5)
}

/// Id of y_i in `gen_g5(n)`.
pub fn g5_y(n: usize, i: usize) -> Vertex {
    let (n3, n4, _) = g5_parts(n);
    (n3 + n4 / 2) + n4 / 2 - 1 + i - 1
}

/// `n` divisible by 40. Built on `gen_g4(n3 + n4/2, n4/2)`; y_1..y_{n5}
/// follow its vertices. Each y_i takes its three free edges from the
/// degree-≤4 vertices among a_1..a_{n4} and the x path, scanning
/// round-robin from the last pick; y_1's first free edge goes to a
/// degree-3 vertex that no later y touches, so it ends at degree 4.
pub fn gen_g5(n: usize) -> Result<Graph, GenError> {
    if n == 0 || n % 40 != 0 {
        return Err(bad(format!("g5 needs n divisible by 40, got {n}")));
    }
    let (n3, n4, n5) = g5_parts(n);
    let (m3, m4) = (n3 + n4 / 2, n4 / 2);
    let mut g = gen_g4(m3, m4)?;
    let y = |i| g5_y(n, i);
    for i in 1..=n5 {
        g.add_vertex(y(i));
    }
    for i in 1..=n5 {
        g.add_edge(y(i), a(m4 + i)).unwrap();
        if i < n5 {
            g.add_edge(a(m4 + i), y(i + 1)).unwrap();
        } else {
            g.add_edge(a(m4 + i), y(1)).unwrap();
        }
    }
    let candidates: Vec<Vertex> = (1..=m4.max(1)).map(a).chain((2..=m4).map(|i| g4_x(m3, i))).collect();
    let mut ptr = 0;
    let mut reserved = None;
    for i in 1..=n5 {
        for k in 0..3 {
            let need4 = i == 1 && k == 0;
            let pick = (0..candidates.len()).map(|d| (ptr + d) % candidates.len()).find(|&j| {
                let c = candidates[j];
                let d = g.degree(c);
                d < 5 && !g.has_edge(c, y(i)) && (!need4 || d == 3) && reserved != Some(c)
            });
            let j = pick.ok_or_else(|| bad(format!("g5({n}): no free endpoint for y_{i}")))?;
            g.add_edge(y(i), candidates[j]).unwrap();
            if need4 {
                reserved = Some(candidates[j]);
            }
            ptr = (j + 1) % candidates.len();
        }
    }
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    G3 { n: usize },
    G4 { n3: usize, n4: usize },
    G5 { n: usize },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::G3 { n } => write!(f, "g3({n})"),
            Family::G4 { n3, n4 } => write!(f, "g4({n3},{n4})"),
            Family::G5 { n } => write!(f, "g5({n})"),
        }
    }
}

impl Family {
    pub fn generate(&self) -> Result<Graph, GenError> {
        match *self {
            Family::G3 { n } => gen_g3(n),
            Family::G4 { n3, n4 } => gen_g4(n3, n4),
            Family::G5 { n } => gen_g5(n),
        }
    }

    /// Target counts: n/4; n4/2 − 2 + n3/4 for
    /// n4 ≥ 4; 19n/40 − 2.
    pub fn expected_branchings(&self) -> i64 {
        match *self {
            Family::G3 { n } => n as i64 / 4,
            Family::G4 { n3, n4 } if n4 >= 4 => n4 as i64 / 2 - 2 + n3 as i64 / 4,
            Family::G4 { n3, .. } => n3 as i64 / 4,
            Family::G5 { n } => 19 * n as i64 / 40 - 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub pivot: Vertex,
    pub degree: usize,
    /// Order of the graph after deleting the pivot and simplifying.
    pub order_after: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LbTrace {
    pub reduction_iii_count: usize,
    pub steps: Vec<TraceStep>,
    /// Steps whose pivot broke the local rule's preference (max degree,
    /// then a lower-degree neighbor when some max-degree vertex has one).
    pub guard_failures: Vec<usize>,
}

/// Degree-0/1 deletion and degree-2 suppression until none applies.
pub fn simplify_skeleton(g: &mut Graph) {
    while let Some(v) = g.vertices().filter(|&v| g.degree(v) <= 2).min_by_key(|&v| (g.degree(v), v)) {
        let nb = g.neighbors(v).to_vec();
        g.delete_vertex(v).unwrap();
        if let [u, w] = nb[..] {
            if !g.has_edge(u, w) {
                g.add_edge(u, w).unwrap();
            }
        }
    }
}

/// Follows one root-to-leaf path of the local-policy algorithm on the
/// constraint graph, with the adversarial pivots from the lower-bound
/// constructions: the y vertex of minimum index, then x_{n4−1}, then the
/// hub a_n. Total leaves are r^{reduction_iii_count}.
pub fn trace_lower_bound(g: &Graph, family: Family) -> Result<LbTrace, GenError> {
    if family.generate()? != *g {
        return Err(GenError::FamilyMismatch(family));
    }
    let (ys, xs, a_max): (BTreeSet<Vertex>, BTreeSet<Vertex>, Vertex) = match family {
        Family::G3 { n } => (BTreeSet::new(), BTreeSet::new(), n),
        Family::G4 { n3, n4 } => (BTreeSet::new(), (2..=n4).map(|i| g4_x(n3, i)).collect(), n3),
        Family::G5 { n } => {
            let (n3, n4, n5) = g5_parts(n);
            let m3 = n3 + n4 / 2;
            ((1..=n5).map(|i| g5_y(n, i)).collect(), (2..=n4 / 2).map(|i| g4_x(m3, i)).collect(), m3)
        }
    };
    let mut g = g.clone();
    let mut trace = LbTrace::default();
    loop {
        simplify_skeleton(&mut g);
        if g.is_empty() {
            break;
        }
        let live_x: Vec<Vertex> = xs.iter().copied().filter(|&v| g.has_vertex(v)).collect();
        let pivot = if let Some(&yv) = ys.iter().find(|&&v| g.has_vertex(v)) {
            yv
        } else if live_x.len() >= 2 {
            live_x[live_x.len() - 2]
        } else {
            g.vertices().filter(|&v| v < a_max).max().unwrap()
        };
        if !preferred(&g, pivot) {
            trace.guard_failures.push(trace.steps.len());
        }
        let degree = g.degree(pivot);
        g.delete_vertex(pivot).unwrap();
        trace.reduction_iii_count += 1;
        let mut after = g.clone();
        simplify_skeleton(&mut after);
        trace.steps.push(TraceStep { pivot, degree, order_after: after.num_vertices() });
    }
    Ok(trace)
}

fn preferred(g: &Graph, v: Vertex) -> bool {
    let d = g.max_degree();
    let has_low = |u: Vertex| g.neighbors(u).iter().any(|&w| g.degree(w) < d);
    g.degree(v) == d && (has_low(v) || !g.vertices().any(|u| g.degree(u) == d && has_low(u)))
}

/// Uniform-ish simple 3-regular graph by the pairing model with rejection.
pub fn gen_random_cubic(n: usize, seed: u64) -> Result<Graph, GenError> {
    if n < 4 || n % 2 != 0 {
        return Err(bad(format!("cubic graphs need even n ≥ 4, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const TRIES: usize = 10_000;
    'attempt: for _ in 0..TRIES {
        let mut points: Vec<Vertex> = (0..n).flat_map(|v| [v; 3]).collect();
        points.shuffle(&mut rng);
        let mut g = Graph::with_vertices(n);
        for p in points.chunks(2) {
            if p[0] == p[1] || g.has_edge(p[0], p[1]) {
                continue 'attempt;
            }
            g.add_edge(p[0], p[1]).unwrap();
        }
        return Ok(g);
    }
    Err(GenError::Exhausted(TRIES))
}

/// Erdős–Rényi G(n, p).
pub fn gen_random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::with_vertices(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p.clamp(0.0, 1.0)) {
                g.add_edge(u, v).unwrap();
            }
        }
    }
    g
}

/// Random graph of maximum degree 3: shuffled candidate edges added while
/// both endpoints have spare degree, keeping each with probability `p`.
pub fn gen_random_subcubic(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(Vertex, Vertex)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    pairs.shuffle(&mut rng);
    let mut g = Graph::with_vertices(n);
    for (u, v) in pairs {
        if g.degree(u) < 3 && g.degree(v) < 3 && rng.gen_bool(p.clamp(0.0, 1.0)) {
            g.add_edge(u, v).unwrap();
        }
    }
    g
}

/// Random scores in `-score_range..=score_range` on the given constraint graph.
pub fn random_csp_on(g: &Graph, r: usize, score_range: Score, seed: u64) -> CspInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inst = CspInstance::new(r.max(2)).expect("r ≥ 2");
    let r = inst.r();
    let mut draw = |k: usize| (0..k).map(|_| rng.gen_range(-score_range..=score_range)).collect::<Vec<_>>();
    for v in g.vertices() {
        inst.add_variable(v, draw(r)).unwrap();
    }
    for (u, v) in g.edges() {
        inst.add_constraint(u, v, draw(r * r)).unwrap();
    }
    inst
}

/// `m` distinct random edges on `n` vertices with random scores in -5..=5.
pub fn gen_random_csp(n: usize, m: usize, r: usize, seed: u64) -> Result<CspInstance, GenError> {
    if r < 2 {
        return Err(bad(format!("domain size must be at least 2, got {r}")));
    }
    if m > n * n.saturating_sub(1) / 2 {
        return Err(bad(format!("{m} edges do not fit on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(Vertex, Vertex)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    pairs.shuffle(&mut rng);
    let mut g = Graph::with_vertices(n);
    for &(u, v) in &pairs[..m] {
        g.add_edge(u, v).unwrap();
    }
    Ok(random_csp_on(&g, r, 5, rng.gen()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn degrees(g: &Graph) -> Vec<usize> {
        let mut h = vec![0; g.max_degree() + 1];
        for v in g.vertices() {
            h[g.degree(v)] += 1;
        }
        h
    }

    #[test]
    fn g3_small_cases() {
        let k4 = gen_g3(4).unwrap();
        assert_eq!(k4.num_edges(), 6);
        for n in (8..=40).step_by(4) {
            let g = gen_g3(n).unwrap();
            assert_eq!(degrees(&g), [0, 0, 0, n]);
            assert!(g.is_connected());
        }
        assert!(gen_g3(6).is_err());
    }

    #[test]
    fn g3_shrinks_by_four() {
        let mut g = gen_g3(40).unwrap();
        g.delete_vertex(a(40)).unwrap();
        simplify_skeleton(&mut g);
        assert_eq!(g, gen_g3(36).unwrap());
    }

    #[test]
    fn g4_degrees() {
        assert_eq!(gen_g4(8, 0).unwrap(), gen_g3(8).unwrap());
        let g = gen_g4(8, 4).unwrap();
        assert_eq!(g.num_vertices(), 11);
        assert_eq!(degrees(&g), [0, 0, 0, 8, 3]);
        let mut h = gen_g4(8, 2).unwrap();
        simplify_skeleton(&mut h);
        assert_eq!(h, gen_g3(8).unwrap());
    }

    #[test]
    fn g5_shape() {
        let g = gen_g5(40).unwrap();
        assert_eq!(g.num_vertices(), 39);
        assert_eq!(g.max_degree(), 5);
        for i in 1..=8 {
            assert_eq!(g.degree(g5_y(40, i)), 5);
        }
        assert!(g.neighbors(g5_y(40, 1)).iter().any(|&w| g.degree(w) == 4));
    }

    #[test]
    fn random_cubic_is_cubic_and_deterministic() {
        let g = gen_random_cubic(10, 3).unwrap();
        assert_eq!(degrees(&g), [0, 0, 0, 10]);
        assert_eq!(g, gen_random_cubic(10, 3).unwrap());
        assert_eq!(gen_random_cubic(4, 9).unwrap().num_edges(), 6);
    }
}

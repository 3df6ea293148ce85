//! Brute-force reference implementations. Nothing here calls a solver from
//! `smc-core`; only the instance types and their accessors are shared.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use smc_core::counts::CountVector;
use smc_core::domset::{Label, LabeledGraph};
use smc_core::max2csp::{CspInstance, CspSolution, Score};
use smc_core::setcover::ScIncidence;
use smc_core::{Graph, Vertex};

/// Largest search space any oracle will enumerate.
pub const GUARD: u128 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("search space {0} exceeds the oracle guard {GUARD}")]
    GuardExceeded(u128),
    #[error("instance carries annotations")]
    Annotated,
}

fn guard(base: u128, exp: usize) -> Result<(), OracleError> {
    let mut size: u128 = 1;
    for _ in 0..exp {
        size = size.saturating_mul(base);
        if size > GUARD {
            return Err(OracleError::GuardExceeded(size));
        }
    }
    Ok(())
}

/// Exhaustive search; ties go to the lexicographically smallest assignment
/// (vertices in increasing id order, smaller colors first).
pub fn brute_max2csp(i: &CspInstance) -> Result<CspSolution, OracleError> {
    let r = i.r();
    let vs: Vec<Vertex> = i.graph().vertices().collect();
    guard(r as u128, vs.len())?;
    let pos: BTreeMap<Vertex, usize> = vs.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let edges: Vec<(usize, usize, Vec<Score>)> = i
        .graph()
        .edges()
        .into_iter()
        .map(|(u, v)| (pos[&u], pos[&v], i.edge_table(u, v).expect("edge table")))
        .collect();
    let unary: Vec<&[Score]> = vs.iter().map(|&v| i.vertex_scores(v).expect("vertex scores")).collect();
    let mut colors = vec![0usize; vs.len()];
    let mut best: Option<(Score, Vec<usize>)> = None;
    loop {
        let mut s = i.nil();
        for (k, t) in unary.iter().enumerate() {
            s += t[colors[k]];
        }
        for (a, b, t) in &edges {
            s += t[colors[*a] * r + colors[*b]];
        }
        if best.as_ref().map_or(true, |(bs, _)| s > *bs) {
            best = Some((s, colors.clone()));
        }
        // odometer with the last vertex fastest, so enumeration is lexicographic
        let mut k = vs.len();
        loop {
            if k == 0 {
                let (score, c) = best.unwrap();
                let assignment = vs.iter().copied().zip(c).collect();
                return Ok(CspSolution { score, assignment });
            }
            k -= 1;
            colors[k] += 1;
            if colors[k] < r {
                break;
            }
            colors[k] = 0;
        }
    }
}

/// D may contain U and C vertices; every U and N vertex must be in D or
/// adjacent to it. Entry k counts such D of size k.
pub fn brute_domset(g: &LabeledGraph) -> Result<CountVector, OracleError> {
    let labels: Vec<Label> = g.graph().vertices().map(|v| g.label(v).expect("total labeling")).collect();
    count_dominating(g.graph(), &labels)
}

/// Plain domination: every vertex labeled U.
pub fn brute_domset_graph(g: &Graph) -> Result<CountVector, OracleError> {
    count_dominating(g, &vec![Label::U; g.num_vertices()])
}

fn count_dominating(g: &Graph, labels: &[Label]) -> Result<CountVector, OracleError> {
    let vs: Vec<Vertex> = g.vertices().collect();
    let n = vs.len();
    guard(2, n)?;
    let pos: BTreeMap<Vertex, usize> = vs.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let closed: Vec<u64> =
        vs.iter().map(|&v| g.neighbors(v).iter().fold(1u64 << pos[&v], |m, w| m | 1 << pos[w])).collect();
    let mut allowed = 0u64;
    let mut need = 0u64;
    for (k, l) in labels.iter().enumerate() {
        if *l != Label::N {
            allowed |= 1 << k;
        }
        if *l != Label::C {
            need |= 1 << k;
        }
    }
    let mut counts = vec![0u64; n + 1];
    for d in 0u64..(1 << n) {
        if d & !allowed != 0 {
            continue;
        }
        let dominated = (0..n).filter(|k| d >> k & 1 == 1).fold(0u64, |m, k| m | closed[k]);
        if need & !dominated == 0 {
            counts[d.count_ones() as usize] += 1;
        }
    }
    Ok(CountVector::from_u64s(&counts))
}

/// Entry k counts subfamilies of k sets whose union is the universe.
/// Identical sets are distinct members.
pub fn brute_setcover(i: &ScIncidence) -> Result<CountVector, OracleError> {
    if !i.annotated().is_empty() {
        return Err(OracleError::Annotated);
    }
    let members = i.set_members();
    let elements = i.element_vertices();
    guard(2, members.len())?;
    if elements.len() > 128 {
        return Err(OracleError::GuardExceeded(1 << 127));
    }
    let idx: BTreeMap<Vertex, usize> = elements.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let masks: Vec<u128> = members.iter().map(|(_, es)| es.iter().fold(0u128, |m, e| m | 1 << idx[e])).collect();
    let full: u128 = if elements.len() == 128 { u128::MAX } else { (1u128 << elements.len()) - 1 };
    let mut counts = vec![BigInt::zero(); members.len() + 1];
    for c in 0u64..(1 << members.len()) {
        let cover = (0..members.len()).filter(|k| c >> k & 1 == 1).fold(0u128, |m, k| m | masks[k]);
        if cover == full {
            counts[c.count_ones() as usize] += 1;
        }
    }
    Ok(CountVector::new(counts))
}

/// Fewest edges across a split into parts of sizes ⌊n/2⌋ and ⌈n/2⌉.
pub fn brute_min_bisection(g: &Graph) -> Result<usize, OracleError> {
    let vs: Vec<Vertex> = g.vertices().collect();
    let n = vs.len();
    guard(2, n)?;
    let pos: BTreeMap<Vertex, usize> = vs.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let edges: Vec<(usize, usize)> = g.edges().into_iter().map(|(u, v)| (pos[&u], pos[&v])).collect();
    let mut best = usize::MAX;
    for m in 0u64..(1 << n) {
        if m.count_ones() as usize != n / 2 {
            continue;
        }
        let cut = edges.iter().filter(|(u, v)| (m >> u & 1) != (m >> v & 1)).count();
        best = best.min(cut);
    }
    Ok(if n == 0 { 0 } else { best })
}

/// Exact pathwidth as the vertex separation number, by dynamic programming
/// over vertex subsets.
pub fn brute_pathwidth(g: &Graph) -> Result<usize, OracleError> {
    let vs: Vec<Vertex> = g.vertices().collect();
    let n = vs.len();
    guard(2, n)?;
    if n == 0 {
        return Ok(0);
    }
    let pos: BTreeMap<Vertex, usize> = vs.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let nb: Vec<u32> = vs.iter().map(|&v| g.neighbors(v).iter().fold(0u32, |m, w| m | 1 << pos[w])).collect();
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let boundary = |s: u32| (0..n).filter(|&k| s >> k & 1 == 1 && nb[k] & !s & full != 0).count();
    let mut f = vec![usize::MAX; 1 << n];
    f[0] = 0;
    for s in 1u32..=full {
        let b = boundary(s);
        let mut best = usize::MAX;
        for k in 0..n {
            if s >> k & 1 == 1 {
                best = best.min(f[(s & !(1 << k)) as usize]);
            }
        }
        f[s as usize] = best.max(b);
    }
    Ok(f[full as usize])
}

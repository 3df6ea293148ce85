//! Counting dominating sets of labeled subcubic graphs by three-way
//! branching on the cubic structure.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::audit::{AuditKind, AuditLog};
use crate::counts::CountVector;
use crate::graph::{Graph, GraphError, MultiGraph, Vertex};
use crate::max2csp::Policy;
use crate::policy::{apply_drag, count3, select_pivot, PivotAction};
use crate::separator::{greedy_order, separate_cubic, Separation, Side};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    /// Must be dominated.
    U,
    /// Not in the set, must be dominated.
    N,
    /// No constraint.
    C,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Label {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "U" => Ok(Label::U),
            "N" => Ok(Label::N),
            "C" => Ok(Label::C),
            _ => Err(format!("unknown label `{s}`")),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex {0} has degree {1}; at most 3 is supported")]
    DegreeTooLarge(Vertex, usize),
    #[error("degree-3 vertex {0} must be labeled U, found {1}")]
    LabelInvariant(Vertex, Label),
    #[error("vertex {0} has degree {1}, branching needs 3")]
    NotDegreeThree(Vertex, usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Subcubic graph with a total labeling; degree-3 vertices carry U.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    graph: Graph,
    labels: BTreeMap<Vertex, Label>,
}

impl LabeledGraph {
    /// All vertices labeled U.
    pub fn unlabeled(g: &Graph) -> Result<Self, DsError> {
        Self::new(g.clone(), g.vertices().map(|v| (v, Label::U)).collect())
    }

    /// Missing labels default to U.
    pub fn new(graph: Graph, mut labels: BTreeMap<Vertex, Label>) -> Result<Self, DsError> {
        labels.retain(|v, _| graph.has_vertex(*v));
        for v in graph.vertices() {
            let l = *labels.entry(v).or_insert(Label::U);
            let d = graph.degree(v);
            if d > 3 {
                return Err(DsError::DegreeTooLarge(v, d));
            }
            if d == 3 && l != Label::U {
                return Err(DsError::LabelInvariant(v, l));
            }
        }
        Ok(LabeledGraph { graph, labels })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn label(&self, v: Vertex) -> Option<Label> {
        self.labels.get(&v).copied()
    }

    pub fn labels(&self) -> &BTreeMap<Vertex, Label> {
        &self.labels
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    fn delete(&mut self, v: Vertex) {
        self.graph.delete_vertex(v).expect("vertex present");
        self.labels.remove(&v);
    }

    fn restrict(&self, vs: &BTreeSet<Vertex>) -> LabeledGraph {
        LabeledGraph {
            graph: self.graph.induced_subgraph(vs).expect("subset"),
            labels: vs.iter().map(|v| (*v, self.labels[v])).collect(),
        }
    }

    /// Graph format plus optional `label <id> <U|N|C>` lines.
    pub fn from_text(text: &str) -> Result<Self, DsError> {
        let mut graph_part = String::new();
        let mut labels = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if let Some(rest) = line.strip_prefix("label ") {
                let t: Vec<&str> = rest.split_whitespace().collect();
                let err = |msg: String| DsError::Parse { line: i + 1, msg };
                if t.len() != 2 {
                    return Err(err("expected `label <id> <U|N|C>`".into()));
                }
                let v: Vertex = t[0].parse().map_err(|_| err(format!("bad vertex id `{}`", t[0])))?;
                labels.insert(v, t[1].parse::<Label>().map_err(err)?);
                graph_part.push('\n');
            } else {
                graph_part.push_str(raw);
                graph_part.push('\n');
            }
        }
        let graph = Graph::from_text(&graph_part)?;
        if let Some(v) = labels.keys().find(|v| !graph.has_vertex(**v)) {
            return Err(DsError::Graph(GraphError::UnknownVertex(*v)));
        }
        Self::new(graph, labels)
    }

    /// Γ(G).
    pub fn cubic_structure(&self) -> MultiGraph {
        self.graph.cubic_structure().expect("subcubic")
    }
}

/// Three-way branching on a degree-3 vertex `x`: (in, optional, forbidden).
pub fn branch3(g: &LabeledGraph, x: Vertex) -> Result<(LabeledGraph, LabeledGraph, LabeledGraph), DsError> {
    if !g.graph.has_vertex(x) {
        return Err(GraphError::UnknownVertex(x).into());
    }
    let d = g.graph.degree(x);
    if d != 3 {
        return Err(DsError::NotDegreeThree(x, d));
    }
    let nb = g.graph.neighbors(x).to_vec();
    let mut g_in = g.clone();
    g_in.delete(x);
    for &w in &nb {
        match g.labels[&w] {
            Label::U => {
                g_in.labels.insert(w, Label::C);
            }
            Label::N => g_in.delete(w),
            Label::C => {}
        }
    }
    let mut g_opt = g.clone();
    g_opt.delete(x);
    let mut g_forb = g.clone();
    g_forb.delete(x);
    for &w in &nb {
        if g.labels[&w] == Label::C {
            g_forb.delete(w);
        } else {
            g_forb.labels.insert(w, Label::N);
        }
    }
    Ok((g_in, g_opt, g_forb))
}

#[derive(Clone, Debug)]
pub struct DsOptions {
    pub policy: Policy,
    /// Solve a component by path-decomposition DP once |V(Γ)| is at most this.
    pub core_limit: usize,
    /// Otherwise enumerate subsets once the component has at most this many vertices.
    pub enum_limit: usize,
    pub audit: bool,
}

impl Default for DsOptions {
    fn default() -> Self {
        DsOptions { policy: Policy::Separator, core_limit: 12, enum_limit: 20, audit: false }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DsStats {
    pub branchings: u64,
    pub dp_leaves: u64,
    pub enum_leaves: u64,
    pub max_depth: usize,
    pub separator_recomputes: u64,
    pub audit: AuditLog,
}

impl DsStats {
    pub fn leaves(&self) -> u64 {
        self.dp_leaves + self.enum_leaves
    }
}

/// Exact counts, indexed 0..=n.
pub fn count_ds(g: &LabeledGraph, sep: &Separation) -> CountVector {
    count_ds_from(g, sep.clone(), &DsOptions::default()).0
}

pub fn count_ds_with(g: &LabeledGraph, opts: &DsOptions) -> (CountVector, DsStats) {
    count_ds_from(g, Separation::trivial(g.graph.vertices()), opts)
}

fn count_ds_from(g: &LabeledGraph, sep: Separation, opts: &DsOptions) -> (CountVector, DsStats) {
    let mut stats = DsStats::default();
    let c = DsEngine { opts }.run(g.clone(), sep, false, 0, &mut stats);
    (c.padded(g.num_vertices()), stats)
}

/// Counts for an unlabeled subcubic graph.
pub fn count_ds_graph(g: &Graph) -> Result<CountVector, DsError> {
    Ok(count_ds(&LabeledGraph::unlabeled(g)?, &Separation::trivial(g.vertices())))
}

/// The vertex the separator policy branches on for (g, sep) once drags are
/// exhausted, and the separation at that point. `None` if Γ is empty.
pub fn ds_pivot(g: &LabeledGraph, sep: &Separation) -> Option<(Vertex, Separation)> {
    let gamma = g.cubic_structure();
    if gamma.is_empty() {
        return None;
    }
    let mut sep = fit_separation(&gamma, sep);
    let mut attempted = false;
    loop {
        match pivot_step(&gamma, &mut sep, &mut attempted, None) {
            Step::Branch(x) => return Some((x, sep)),
            Step::Continue => {}
        }
    }
}

enum Step {
    Branch(Vertex),
    Continue,
}

/// Restricts `sep` to V(Γ); unknown Γ vertices go to R, and any L–R edge
/// created by contraction pulls its R endpoint into S.
fn fit_separation(gamma: &MultiGraph, sep: &Separation) -> Separation {
    let vs = gamma.vertex_set();
    let mut out = sep.restrict(&vs);
    for v in &vs {
        if out.side(*v).is_none() {
            out.right.insert(*v);
        }
    }
    for v in vs {
        if out.left.contains(&v) {
            for w in gamma.neighbor_multiset(v) {
                if out.right.contains(&w) {
                    out.move_to(w, Side::Sep);
                }
            }
        }
    }
    out
}

fn pivot_step(gamma: &MultiGraph, sep: &mut Separation, attempted: &mut bool, stats: Option<&mut DsStats>) -> Step {
    if count3(gamma, sep, Side::Left) > count3(gamma, sep, Side::Right) {
        sep.swap_sides();
    }
    match select_pivot(gamma, sep) {
        PivotAction::Separate => {
            if *attempted {
                return Step::Branch(gamma.vertices().next().unwrap());
            }
            *attempted = true;
            if let Some(st) = stats {
                st.separator_recomputes += 1;
            }
            let new = separate_cubic(&gamma.to_simple());
            if new.sep.is_empty() {
                return Step::Branch(gamma.vertices().next().unwrap());
            }
            *sep = new;
            Step::Continue
        }
        PivotAction::Branch(s) => Step::Branch(s),
        // Γ is 3-regular, so a separator vertex of degree ≤ 2 cannot occur.
        PivotAction::ReduceInS { s, .. } => Step::Branch(s),
        action => {
            apply_drag(sep, action);
            Step::Continue
        }
    }
}

struct DsEngine<'a> {
    opts: &'a DsOptions,
}

impl DsEngine<'_> {
    fn run(&self, g: LabeledGraph, sep: Separation, attempted: bool, depth: usize, stats: &mut DsStats) -> CountVector {
        let out = self.run_inner(g, sep, attempted, depth, stats);
        if self.opts.audit && !out.is_nonnegative() {
            stats.audit.violate(AuditKind::Nonnegative, "count-ds", out.to_string());
        }
        out
    }

    fn run_inner(
        &self,
        g: LabeledGraph,
        sep: Separation,
        attempted: bool,
        depth: usize,
        stats: &mut DsStats,
    ) -> CountVector {
        stats.max_depth = stats.max_depth.max(depth);
        if g.graph.is_empty() {
            return CountVector::one();
        }
        let local = self.opts.policy == Policy::Local;
        if local {
            let Some(x) = g.graph.vertices().find(|&v| g.graph.degree(v) == 3) else {
                stats.dp_leaves += 1;
                return dp_count(&g);
            };
            return self.branch(&g, &sep, x, depth, stats);
        }
        let comps = g.graph.connected_components();
        if comps.len() > 1 {
            let mut acc = CountVector::one();
            for c in comps {
                let sub = g.restrict(&c);
                acc = acc.convolve(&self.run(sub, Separation::trivial(c), false, depth + 1, stats));
                if acc.is_zero() {
                    break;
                }
            }
            return acc;
        }
        let gamma = g.cubic_structure();
        if gamma.num_vertices() <= self.opts.core_limit {
            stats.dp_leaves += 1;
            return dp_count(&g);
        }
        if g.num_vertices() <= self.opts.enum_limit {
            stats.enum_leaves += 1;
            return enumerate_count(&g);
        }
        let mut sep = fit_separation(&gamma, &sep);
        let mut attempted = attempted;
        let x = loop {
            match pivot_step(&gamma, &mut sep, &mut attempted, Some(stats)) {
                Step::Branch(x) => break x,
                Step::Continue => {}
            }
        };
        self.branch(&g, &sep, x, depth, stats)
    }

    fn branch(&self, g: &LabeledGraph, sep: &Separation, x: Vertex, depth: usize, stats: &mut DsStats) -> CountVector {
        stats.branchings += 1;
        let (g_in, g_opt, g_forb) = branch3(g, x).expect("pivot has degree 3");
        let mut csep = sep.clone();
        csep.remove(x);
        if self.opts.audit && self.opts.policy == Policy::Separator {
            let base = g_opt.cubic_structure().num_vertices();
            for (name, child) in [("in", &g_in), ("forb", &g_forb)] {
                let k = child.cubic_structure().num_vertices();
                if k > base {
                    stats.audit.note(format!("branch {name} on {x}: |Γ| = {k} exceeds |Γ(G-x)| = {base}"));
                }
            }
        }
        let c_in = self.run(g_in, csep.clone(), false, depth + 1, stats);
        let c_opt = self.run(g_opt, csep.clone(), false, depth + 1, stats);
        let c_forb = self.run(g_forb, csep, false, depth + 1, stats);
        &(&c_in.shift(1) + &c_opt) - &c_forb
    }
}

/// Subset enumeration over the vertices allowed in the set.
fn enumerate_count(g: &LabeledGraph) -> CountVector {
    let vs: Vec<Vertex> = g.graph.vertices().collect();
    assert!(vs.len() < 64, "enumeration limited to 63 vertices");
    let idx: BTreeMap<Vertex, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut closed = vec![0u64; vs.len()];
    for (i, &v) in vs.iter().enumerate() {
        closed[i] = 1 << i;
        for w in g.graph.neighbors(v) {
            closed[i] |= 1 << idx[w];
        }
    }
    let cand: Vec<usize> = (0..vs.len()).filter(|&i| g.labels[&vs[i]] != Label::N).collect();
    let need: Vec<usize> = (0..vs.len()).filter(|&i| g.labels[&vs[i]] != Label::C).collect();
    let mut counts = vec![0u64; vs.len() + 1];
    for mask in 0u64..(1 << cand.len()) {
        let mut set = 0u64;
        for (b, &i) in cand.iter().enumerate() {
            if mask >> b & 1 == 1 {
                set |= 1 << i;
            }
        }
        if need.iter().all(|&i| closed[i] & set != 0) {
            counts[mask.count_ones() as usize] += 1;
        }
    }
    CountVector::from_u64s(&counts)
}

/// Vertex state in the DP frontier.
const IN: u8 = 0;
const DOMINATED: u8 = 1;
const OPEN: u8 = 2;

/// Dynamic programming along a greedy vertex order (a nice path
/// decomposition): the frontier holds introduced vertices with neighbors
/// still to come.
pub fn dp_count(g: &LabeledGraph) -> CountVector {
    let order = greedy_order(&g.graph);
    let pos: BTreeMap<Vertex, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    // last position among v and its neighbors: v is forgotten after that step
    let release: BTreeMap<Vertex, usize> = order
        .iter()
        .map(|&v| (v, g.graph.neighbors(v).iter().map(|w| pos[w]).chain([pos[&v]]).max().unwrap()))
        .collect();
    let mut frontier: Vec<Vertex> = Vec::new();
    let mut table: HashMap<Vec<u8>, Vec<BigInt>> = HashMap::from([(Vec::new(), vec![BigInt::from(1)])]);
    for (step, &v) in order.iter().enumerate() {
        let nb_pos: Vec<usize> =
            frontier.iter().enumerate().filter(|(_, u)| g.graph.has_edge(**u, v)).map(|(i, _)| i).collect();
        let label = g.labels[&v];
        let mut next: HashMap<Vec<u8>, Vec<BigInt>> = HashMap::new();
        for (state, poly) in table {
            if label != Label::N {
                let mut s = state.clone();
                for &i in &nb_pos {
                    if s[i] == OPEN {
                        s[i] = DOMINATED;
                    }
                }
                s.push(IN);
                add_poly(next.entry(s).or_default(), &poly, 1);
            }
            let mut s = state.clone();
            s.push(if nb_pos.iter().any(|&i| state[i] == IN) { DOMINATED } else { OPEN });
            add_poly(next.entry(s).or_default(), &poly, 0);
        }
        frontier.push(v);
        // forget every vertex whose closed neighborhood is now complete
        let keep: Vec<bool> = frontier.iter().map(|u| release[u] > step).collect();
        let mut reduced: HashMap<Vec<u8>, Vec<BigInt>> = HashMap::new();
        for (state, poly) in next {
            let ok =
                frontier.iter().zip(&state).zip(&keep).all(|((u, &st), &k)| k || st != OPEN || g.labels[u] == Label::C);
            if !ok {
                continue;
            }
            let s: Vec<u8> = state.iter().zip(&keep).filter(|(_, &k)| k).map(|(&x, _)| x).collect();
            add_poly(reduced.entry(s).or_default(), &poly, 0);
        }
        frontier = frontier.into_iter().zip(&keep).filter(|(_, &k)| k).map(|(u, _)| u).collect();
        table = reduced;
    }
    let mut out = CountVector::zero();
    for (_, poly) in table {
        out = &out + &CountVector::new(poly);
    }
    out
}

fn add_poly(acc: &mut Vec<BigInt>, p: &[BigInt], shift: usize) {
    if acc.len() < p.len() + shift {
        acc.resize(p.len() + shift, BigInt::zero());
    }
    for (i, c) in p.iter().enumerate() {
        acc[i + shift] += c;
    }
}

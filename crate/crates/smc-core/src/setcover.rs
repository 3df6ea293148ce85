//! Counting set covers per cardinality on the incidence graph, with
//! annotations and separator-driven branching on subcubic instances. Also
//! counts dominating sets of general graphs through the closed-neighborhood
//! translation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::audit::{AuditKind, AuditLog};
use crate::counts::CountVector;
use crate::graph::{content_lines, Graph, GraphError, Vertex};
use crate::max2csp::Policy;
use crate::measure::{to_f64, ScWeights};
use crate::separator::{separate_balanced_by_measure, verify_separation, Separation, Side};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("element {0} out of range (universe has {1} elements)")]
    ElementOutOfRange(usize, usize),
    #[error("max degree of I - A is {0}; this routine needs at most {1}")]
    DegreeTooLarge(usize, usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnnotationReason {
    /// Degree at most one in I - A.
    LowDegree,
    /// Degree two with the same two neighbors as another vertex.
    Duplicate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Annotation {
    pub vertex: Vertex,
    pub reason: AnnotationReason,
    /// Neighbors in I - A at annotation time.
    pub neighbors: Vec<Vertex>,
    /// Lowest-id such neighbor; the annotated vertex follows its side.
    pub attached: Option<Vertex>,
}

/// Bipartite set/element incidence graph with annotations and a separation
/// of the non-annotated vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScIncidence {
    incidence: Graph,
    sets: BTreeSet<Vertex>,
    annotated: BTreeSet<Vertex>,
    sep: Separation,
    log: Vec<Annotation>,
    num_sets: usize,
}

impl ScIncidence {
    /// Elements are `0..num_elements`; set `j` becomes vertex `num_elements + j`.
    pub fn new(num_elements: usize, sets: &[Vec<usize>]) -> Result<Self, ScError> {
        let mut g = Graph::with_vertices(num_elements);
        let mut set_ids = BTreeSet::new();
        for (j, members) in sets.iter().enumerate() {
            let x = num_elements + j;
            g.add_vertex(x);
            set_ids.insert(x);
            for &e in members.iter().collect::<BTreeSet<_>>() {
                if e >= num_elements {
                    return Err(ScError::ElementOutOfRange(e, num_elements));
                }
                g.add_edge(x, e)?;
            }
        }
        Ok(Self::from_parts(g, set_ids))
    }

    /// `incidence` must be bipartite between `sets` and the other vertices.
    pub fn from_parts(incidence: Graph, sets: BTreeSet<Vertex>) -> Self {
        let num_sets = sets.len();
        let sep = Separation::trivial(incidence.vertices());
        ScIncidence { incidence, sets, annotated: BTreeSet::new(), sep, log: Vec::new(), num_sets }
    }

    pub fn incidence(&self) -> &Graph {
        &self.incidence
    }

    pub fn is_set(&self, v: Vertex) -> bool {
        self.sets.contains(&v)
    }

    pub fn set_vertices(&self) -> &BTreeSet<Vertex> {
        &self.sets
    }

    pub fn element_vertices(&self) -> Vec<Vertex> {
        self.incidence.vertices().filter(|v| !self.sets.contains(v)).collect()
    }

    pub fn annotated(&self) -> &BTreeSet<Vertex> {
        &self.annotated
    }

    pub fn separation(&self) -> &Separation {
        &self.sep
    }

    pub fn annotation_log(&self) -> &[Annotation] {
        &self.log
    }

    pub fn num_sets(&self) -> usize {
        self.num_sets
    }

    /// (set vertex, its elements) for every set.
    pub fn set_members(&self) -> Vec<(Vertex, Vec<Vertex>)> {
        self.sets.iter().map(|&x| (x, self.incidence.neighbors(x).to_vec())).collect()
    }

    /// Degree in I - A.
    pub fn live_degree(&self, v: Vertex) -> usize {
        self.incidence.neighbors(v).iter().filter(|w| !self.annotated.contains(w)).count()
    }

    /// Bipartite across roles, annotated vertices present, and the separation
    /// a valid partition of I - A.
    pub fn is_consistent(&self) -> bool {
        let bip = self.incidence.edges().iter().all(|(u, v)| self.sets.contains(u) != self.sets.contains(v));
        let live: BTreeSet<Vertex> = self.incidence.vertices().filter(|v| !self.annotated.contains(v)).collect();
        let sub = self.incidence.induced_subgraph(&live).expect("subset");
        bip && self.annotated.iter().all(|v| self.incidence.has_vertex(*v))
            && self.sep.is_partition_of(&live)
            && verify_separation(&sub, &self.sep)
    }

    /// `setcover <|U|> <|S|>` then `set <id> <elements...>` per set.
    pub fn from_text(text: &str) -> Result<Self, ScError> {
        let perr = |line: usize, msg: String| ScError::Parse { line, msg };
        let mut lines = content_lines(text);
        let (ln, header) = lines.next().ok_or_else(|| perr(0, "missing header".into()))?;
        let t: Vec<&str> = header.split_whitespace().collect();
        if t.len() != 3 || t[0] != "setcover" {
            return Err(perr(ln, "expected `setcover <elements> <sets>`".into()));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| perr(ln, format!("bad number `{s}`")));
        let (u, s) = (num(t[1])?, num(t[2])?);
        let mut sets: Vec<Option<Vec<usize>>> = vec![None; s];
        for (ln, line) in lines {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t[0] != "set" || t.len() < 2 {
                return Err(perr(ln, "expected `set <id> <elements...>`".into()));
            }
            let vals: Vec<usize> = t[1..]
                .iter()
                .map(|x| x.parse().map_err(|_| perr(ln, format!("bad number `{x}`"))))
                .collect::<Result<_, _>>()?;
            let id = vals[0];
            if id >= s || sets[id].is_some() {
                return Err(perr(ln, format!("set id {id} out of range or repeated")));
            }
            if let Some(&e) = vals[1..].iter().find(|&&e| e >= u) {
                return Err(perr(ln, format!("element {e} out of range")));
            }
            sets[id] = Some(vals[1..].to_vec());
        }
        if let Some(j) = sets.iter().position(Option::is_none) {
            return Err(perr(0, format!("set {j} missing")));
        }
        let sets: Vec<Vec<usize>> = sets.into_iter().map(Option::unwrap).collect();
        Self::new(u, &sets)
    }

    /// Only meaningful for instances built by [`ScIncidence::new`].
    pub fn to_text(&self) -> String {
        let elements = self.element_vertices();
        let idx: BTreeMap<Vertex, usize> = elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut s = format!("setcover {} {}\n", elements.len(), self.sets.len());
        for (j, &x) in self.sets.iter().enumerate() {
            write!(s, "set {j}").unwrap();
            for e in self.incidence.neighbors(x) {
                write!(s, " {}", idx[e]).unwrap();
            }
            s.push('\n');
        }
        s
    }
}

/// Element `2v` for vertex v, set `2v + 1` for its closed neighborhood.
pub fn ds_to_sc(g: &Graph) -> ScIncidence {
    let mut inc = Graph::new();
    let mut sets = BTreeSet::new();
    for v in g.vertices() {
        inc.add_vertex(2 * v);
        inc.add_vertex(2 * v + 1);
        sets.insert(2 * v + 1);
    }
    for v in g.vertices() {
        inc.add_edge(2 * v + 1, 2 * v).unwrap();
        for &w in g.neighbors(v) {
            inc.add_edge(2 * v + 1, 2 * w).unwrap();
        }
    }
    ScIncidence::from_parts(inc, sets)
}

#[derive(Clone, Debug)]
pub struct ScOptions {
    pub policy: Policy,
    pub audit: bool,
    /// Instances with at most this many non-annotated vertices are counted directly.
    pub base_limit: usize,
    pub weights: ScWeights,
}

impl Default for ScOptions {
    fn default() -> Self {
        ScOptions { policy: Policy::Separator, audit: false, base_limit: 8, weights: ScWeights::published() }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScStats {
    pub branchings: u64,
    pub leaves: u64,
    pub max_depth: usize,
    pub annotations: u64,
    pub separator_recomputes: u64,
    pub separator_rejections: u64,
    /// (μ_r(R) + μ_s(S)) before / after, per accepted re-separation.
    pub sep_shrink: Vec<f64>,
    /// Degree-≥4 steps with a subcubic child.
    pub transitions: u64,
    /// Of those, children whose μ₃ exceeds μ₄.
    pub transition_excess: u64,
    pub audit: AuditLog,
}

pub fn sc_count(i: &ScIncidence) -> CountVector {
    sc_count_with(i, &ScOptions::default()).0
}

pub fn sc_count_with(i: &ScIncidence, opts: &ScOptions) -> (CountVector, ScStats) {
    let mut stats = ScStats::default();
    let engine = ScEngine::new(opts, &i.sets);
    let c = engine.run(Inst::from(i), 0, &mut stats);
    (c.padded(i.num_sets), stats)
}

/// Counts for an instance whose I - A is subcubic, entering the separator
/// routine directly.
pub fn sc3_count(i: &ScIncidence, w: &ScWeights) -> Result<CountVector, ScError> {
    let inst = Inst::from(i);
    let d = inst.max_deg();
    if d > 3 {
        return Err(ScError::DegreeTooLarge(d, 3));
    }
    let opts = ScOptions { weights: w.clone(), ..Default::default() };
    let engine = ScEngine::new(&opts, &i.sets);
    let mut stats = ScStats::default();
    let c = if d == 3 { engine.three_sc(inst, 0, &mut stats) } else { engine.run(inst, 0, &mut stats) };
    Ok(c.padded(i.num_sets))
}

/// Exact counts for an instance whose I - A has maximum degree ≤ 2.
pub fn sc_dp(i: &ScIncidence) -> Result<CountVector, ScError> {
    let inst = Inst::from(i);
    let d = inst.max_deg();
    if d > 2 {
        return Err(ScError::DegreeTooLarge(d, 2));
    }
    Ok(eliminate(&inst, &i.sets).padded(i.num_sets))
}

/// #Dominating Set of an arbitrary graph.
pub fn count_ds_general(g: &Graph) -> CountVector {
    sc_count(&ds_to_sc(g)).padded(g.num_vertices())
}

// ---------------------------------------------------------------- engine

#[derive(Clone, Debug)]
struct Inst {
    g: Graph,
    ann: BTreeSet<Vertex>,
    log: Vec<Annotation>,
    sep: Separation,
    attempted: bool,
}

impl From<&ScIncidence> for Inst {
    fn from(i: &ScIncidence) -> Self {
        Inst {
            g: i.incidence.clone(),
            ann: i.annotated.clone(),
            log: i.log.clone(),
            sep: i.sep.clone(),
            attempted: false,
        }
    }
}

impl Inst {
    fn deg(&self, v: Vertex) -> usize {
        self.g.neighbors(v).iter().filter(|w| !self.ann.contains(w)).count()
    }

    fn live_nb(&self, v: Vertex) -> Vec<Vertex> {
        self.g.neighbors(v).iter().copied().filter(|w| !self.ann.contains(w)).collect()
    }

    fn live(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.g.vertices().filter(|v| !self.ann.contains(v))
    }

    fn live_count(&self) -> usize {
        self.g.num_vertices() - self.ann.len()
    }

    fn max_deg(&self) -> usize {
        self.live().map(|v| self.deg(v)).max().unwrap_or(0)
    }

    fn remove(&mut self, v: Vertex) {
        self.g.delete_vertex(v).expect("vertex present");
        self.ann.remove(&v);
        self.sep.remove(v);
        self.log.retain(|a| a.vertex != v);
    }

    fn remove_closed(&mut self, v: Vertex) {
        for w in self.g.neighbors(v).to_vec() {
            self.remove(w);
        }
        self.remove(v);
    }

    fn annotate(&mut self, v: Vertex, reason: AnnotationReason) {
        let neighbors = self.live_nb(v);
        let attached = neighbors.first().copied();
        self.log.push(Annotation { vertex: v, reason, neighbors, attached });
        self.ann.insert(v);
        self.sep.remove(v);
    }

    fn restrict(&self, vs: &BTreeSet<Vertex>) -> Inst {
        let g = self.g.induced_subgraph(vs).expect("subset");
        let ann: BTreeSet<Vertex> = self.ann.intersection(vs).copied().collect();
        let log = self.log.iter().filter(|a| vs.contains(&a.vertex)).cloned().collect();
        let sep = Separation::trivial(vs.iter().copied().filter(|v| !ann.contains(v)));
        Inst { g, ann, log, sep, attempted: false }
    }

    fn live_graph(&self) -> Graph {
        let live: BTreeSet<Vertex> = self.live().collect();
        self.g.induced_subgraph(&live).expect("subset")
    }
}

#[derive(Clone, Copy, Debug)]
struct Wf {
    elt: [f64; 7],
    set: [f64; 7],
    sep: [f64; 4],
    right: [f64; 4],
    b: f64,
    log_base: f64,
}

impl Wf {
    fn new(w: &ScWeights) -> Self {
        let f = |xs: &[BigRational]| xs.iter().map(to_f64).collect::<Vec<_>>();
        Wf {
            elt: f(&w.w_elt).try_into().unwrap(),
            set: f(&w.w_set).try_into().unwrap(),
            sep: f(&w.w_sep).try_into().unwrap(),
            right: f(&w.w_right).try_into().unwrap(),
            b: to_f64(&w.big_b()),
            log_base: (1.0 + to_f64(&w.eps)).ln(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Regime {
    Sub,
    High,
}

enum Act3 {
    Drag(Separation, &'static str),
    BranchElement(Vertex),
    BranchSet(Vertex),
}

struct ScEngine<'a> {
    opts: &'a ScOptions,
    sets: &'a BTreeSet<Vertex>,
    w: Wf,
}

impl<'a> ScEngine<'a> {
    fn new(opts: &'a ScOptions, sets: &'a BTreeSet<Vertex>) -> Self {
        ScEngine { opts, sets, w: Wf::new(&opts.weights) }
    }

    fn auditing(&self) -> bool {
        self.opts.audit && self.opts.policy == Policy::Separator
    }

    fn mu_r(&self, inst: &Inst, part: &BTreeSet<Vertex>) -> f64 {
        part.iter().map(|&v| self.w.right[inst.deg(v).min(3)]).sum()
    }

    /// μ₃, with the larger of μ_r(L), μ_r(R) playing R.
    fn mu3(&self, inst: &Inst) -> f64 {
        let mu_s: f64 = inst.sep.sep.iter().map(|&v| self.w.sep[inst.deg(v).min(3)]).sum();
        let (a, b) = (self.mu_r(inst, &inst.sep.left), self.mu_r(inst, &inst.sep.right));
        let (l, r) = (a.min(b), a.max(b));
        let log = (r + mu_s).max(1.0).ln() / self.w.log_base;
        mu_s + r + (self.w.b - (r - l) / 2.0).max(0.0) + (1.0 + self.w.b) * log
    }

    fn mu4(&self, inst: &Inst) -> f64 {
        inst.live()
            .map(|v| {
                let d = inst.deg(v).min(6);
                if self.sets.contains(&v) {
                    self.w.set[d]
                } else {
                    self.w.elt[d]
                }
            })
            .sum()
    }

    fn mu(&self, inst: &Inst, regime: Regime) -> f64 {
        match regime {
            Regime::Sub => self.mu3(inst),
            Regime::High => self.mu4(inst),
        }
    }

    fn regime(inst: &Inst) -> Regime {
        if inst.max_deg() <= 3 {
            Regime::Sub
        } else {
            Regime::High
        }
    }

    /// Progress measure for subcubic steps.
    fn eta3(&self, inst: &Inst) -> f64 {
        let s2 = inst.sep.sep.iter().filter(|&&v| inst.deg(v) == 2).count();
        let all: BTreeSet<Vertex> = inst.live().collect();
        let w2 = self.w.right[2];
        let imb = self.mu_r(inst, &inst.sep.right) - self.mu_r(inst, &inst.sep.left);
        (s2 + inst.sep.sep.len()) as f64 * self.mu_r(inst, &all) / w2 + imb.abs() / w2
    }

    /// Solved without further branching.
    fn terminal(&self, inst: &Inst) -> bool {
        inst.max_deg() <= 2 || inst.live_count() <= self.opts.base_limit
    }

    /// Measure, progress and balance checks for one step. `subcubic_step`
    /// selects the separator-routine progress measure; otherwise progress is
    /// |V(I) \ A|.
    fn check(
        &self,
        stats: &mut ScStats,
        step: &'static str,
        parent: &Inst,
        children: &[&Inst],
        subcubic_step: bool,
        branch: bool,
    ) {
        if !self.auditing() {
            return;
        }
        let regime = Self::regime(parent);
        let mp = self.mu(parent, regime);
        let live: Vec<&&Inst> = children.iter().filter(|c| !self.terminal(c)).collect();
        let mus: Vec<Option<f64>> = children.iter().map(|c| (!self.terminal(c)).then(|| self.mu(c, regime))).collect();
        stats.audit.check_measure(step, 2.0, mp, &mus);
        if subcubic_step {
            let e = self.eta3(parent);
            let after: Vec<f64> = live.iter().map(|c| self.eta3(c)).collect();
            stats.audit.check_progress(step, e, &after);
        } else {
            let after: Vec<f64> = live.iter().map(|c| c.live_count() as f64).collect();
            stats.audit.check_progress(step, parent.live_count() as f64, &after);
        }
        if branch && regime == Regime::Sub {
            let (l, r) = (self.mu_r(parent, &parent.sep.left), self.mu_r(parent, &parent.sep.right));
            if r - l > self.w.b {
                for c in children {
                    let (l2, r2) = (self.mu_r(c, &c.sep.left), self.mu_r(c, &c.sep.right));
                    if r - r2 + 1e-9 < l - l2 {
                        stats.audit.violate(
                            AuditKind::Balance,
                            step,
                            format!("R drops {:.5}, L drops {:.5} at imbalance {:.5}", r - r2, l - l2, r - l),
                        );
                    }
                }
            }
        }
        if regime == Regime::High {
            for c in live {
                if c.max_deg() <= 3 {
                    stats.transitions += 1;
                    if self.mu3(c) > self.mu4(c) + 1e-9 {
                        stats.transition_excess += 1;
                    }
                }
            }
        }
        for c in children {
            if !verify_separation(&c.live_graph(), &c.sep) || !c.sep.is_partition_of(&c.live().collect()) {
                stats.audit.violate(AuditKind::Separation, step, format!("{:?}", c.sep));
            }
        }
    }

    fn run(&self, mut inst: Inst, depth: usize, stats: &mut ScStats) -> CountVector {
        stats.max_depth = stats.max_depth.max(depth);
        loop {
            if inst.g.is_empty() {
                return CountVector::one();
            }
            let comps = inst.g.connected_components();
            if comps.len() > 1 && self.opts.policy == Policy::Separator {
                return self.split(&inst, &comps, depth, stats);
            }
            let low = inst.live().find(|&v| inst.deg(v) <= 1);
            if let Some(v) = low {
                self.annotate_step(&mut inst, v, AnnotationReason::LowDegree, stats);
                continue;
            }
            if let Some(v) = find_duplicate(&inst) {
                self.annotate_step(&mut inst, v, AnnotationReason::Duplicate, stats);
                continue;
            }
            let (x, e) = self.max_pair(&inst);
            let dx = x.map_or(0, |x| inst.deg(x));
            let de = e.map_or(0, |e| inst.deg(e));
            if dx.max(de) <= 2 || inst.live_count() <= self.opts.base_limit {
                stats.leaves += 1;
                return eliminate(&inst, self.sets);
            }
            if dx.max(de) <= 3 && self.opts.policy == Policy::Separator {
                return self.three_sc(inst, depth, stats);
            }
            return self.branch_max(inst, true, depth, stats);
        }
    }

    fn annotate_step(&self, inst: &mut Inst, v: Vertex, reason: AnnotationReason, stats: &mut ScStats) {
        stats.annotations += 1;
        if self.auditing() {
            let before = inst.clone();
            inst.annotate(v, reason);
            self.check(stats, "annotate", &before, &[inst], false, false);
        } else {
            inst.annotate(v, reason);
        }
    }

    fn split(&self, inst: &Inst, comps: &[BTreeSet<Vertex>], depth: usize, stats: &mut ScStats) -> CountVector {
        let parts: Vec<Inst> = comps.iter().map(|c| inst.restrict(c)).collect();
        if self.auditing() {
            let regime = Self::regime(inst);
            let mus: Vec<Option<f64>> = parts.iter().map(|p| (!self.terminal(p)).then(|| self.mu(p, regime))).collect();
            stats.audit.check_measure("split", 2.0, self.mu(inst, regime), &mus);
        }
        let mut acc = CountVector::one();
        for p in parts {
            acc = acc.convolve(&self.run(p, depth + 1, stats));
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    /// Maximum-degree set and element of I - A, smallest id on ties.
    fn max_pair(&self, inst: &Inst) -> (Option<Vertex>, Option<Vertex>) {
        let mut x: Option<(usize, Vertex)> = None;
        let mut e: Option<(usize, Vertex)> = None;
        for v in inst.live() {
            let d = inst.deg(v);
            let slot = if self.sets.contains(&v) { &mut x } else { &mut e };
            if slot.map_or(true, |(bd, _)| d > bd) {
                *slot = Some((d, v));
            }
        }
        (x.map(|p| p.1), e.map(|p| p.1))
    }

    /// Branch on a maximum-degree vertex, preferring elements on ties.
    fn branch_max(&self, inst: Inst, reset: bool, depth: usize, stats: &mut ScStats) -> CountVector {
        let (x, e) = self.max_pair(&inst);
        let dx = x.map_or(0, |x| inst.deg(x));
        let de = e.map_or(0, |e| inst.deg(e));
        let fresh = |mut c: Inst| {
            if reset {
                c.sep = Separation::trivial(c.live());
            }
            c.attempted = false;
            c
        };
        let sub = !reset;
        if dx > de {
            let x = x.unwrap();
            self.branch_set(inst, x, fresh, sub, depth, stats)
        } else {
            let e = e.unwrap();
            self.branch_element(inst, e, fresh, sub, depth, stats)
        }
    }

    fn branch_set(
        &self,
        inst: Inst,
        x: Vertex,
        fresh: impl Fn(Inst) -> Inst,
        sub: bool,
        depth: usize,
        stats: &mut ScStats,
    ) -> CountVector {
        stats.branchings += 1;
        let mut discard = inst.clone();
        discard.remove(x);
        let mut take = inst.clone();
        take.remove_closed(x);
        let (discard, take) = (fresh(discard), fresh(take));
        self.check(stats, "branch-set", &inst, &[&discard, &take], sub, true);
        let c_take = self.run(take, depth + 1, stats);
        let c_discard = self.run(discard, depth + 1, stats);
        &c_take.shift(1) + &c_discard
    }

    fn branch_element(
        &self,
        inst: Inst,
        e: Vertex,
        fresh: impl Fn(Inst) -> Inst,
        sub: bool,
        depth: usize,
        stats: &mut ScStats,
    ) -> CountVector {
        stats.branchings += 1;
        let mut optional = inst.clone();
        optional.remove(e);
        let mut forbidden = inst.clone();
        forbidden.remove_closed(e);
        let (optional, forbidden) = (fresh(optional), fresh(forbidden));
        self.check(stats, "branch-element", &inst, &[&optional, &forbidden], sub, true);
        let c_opt = self.run(optional, depth + 1, stats);
        let c_forb = self.run(forbidden, depth + 1, stats);
        &c_opt - &c_forb
    }

    fn orient(&self, inst: &mut Inst) {
        if self.mu_r(inst, &inst.sep.left) > self.mu_r(inst, &inst.sep.right) {
            inst.sep.swap_sides();
        }
    }

    fn three_sc(&self, mut inst: Inst, depth: usize, stats: &mut ScStats) -> CountVector {
        loop {
            if inst.sep.sep.is_empty() {
                if !inst.attempted {
                    inst.attempted = true;
                    self.reseparate(&mut inst, stats);
                }
                if inst.sep.sep.is_empty() {
                    return self.branch_max(inst, false, depth, stats);
                }
            }
            self.orient(&mut inst);
            match self.choose3(&inst) {
                Act3::Drag(sep, step) => {
                    let before = inst.clone();
                    inst.sep = sep;
                    self.check(stats, step, &before, &[&inst], true, false);
                }
                Act3::BranchElement(s) => {
                    return self.branch_element(inst, s, |c| c, true, depth, stats);
                }
                Act3::BranchSet(s) => {
                    return self.branch_set(inst, s, |c| c, true, depth, stats);
                }
            }
        }
    }

    /// Bag-sweep separation of I - A balanced for μ_r, kept only if μ₃
    /// does not increase.
    fn reseparate(&self, inst: &mut Inst, stats: &mut ScStats) {
        stats.separator_recomputes += 1;
        let live = inst.live_graph();
        let w = &self.opts.weights;
        let weight = |v: Vertex| w.right(live.degree(v)).clone();
        let mut cand = inst.clone();
        cand.sep = separate_balanced_by_measure(&live, &weight, &w.big_b());
        self.orient(&mut cand);
        let size =
            |i: &Inst| self.mu_r(i, &i.sep.right) + i.sep.sep.iter().map(|&v| self.w.sep[i.deg(v).min(3)]).sum::<f64>();
        let (old, new) = (self.mu3(inst), self.mu3(&cand));
        if cand.sep.sep.is_empty() || new > old {
            stats.separator_rejections += 1;
            return;
        }
        stats.sep_shrink.push(size(inst) / size(&cand));
        if self.auditing() {
            stats.audit.check_measure("separate", 2.0, old, &[Some(new)]);
            if !verify_separation(&live, &cand.sep) {
                stats.audit.violate(AuditKind::Separation, "separate", format!("{:?}", cand.sep));
            }
        }
        inst.sep = cand.sep;
    }

    fn choose3(&self, inst: &Inst) -> Act3 {
        let sep = &inst.sep;
        let sides = |s: Vertex| {
            let mut c = [0usize; 3];
            for w in inst.live_nb(s) {
                match sep.side(w) {
                    Some(Side::Left) => c[0] += 1,
                    Some(Side::Sep) => c[1] += 1,
                    Some(Side::Right) => c[2] += 1,
                    None => {}
                }
            }
            c
        };
        let s_list: Vec<(Vertex, [usize; 3])> = sep.sep.iter().map(|&s| (s, sides(s))).collect();
        if let Some(&(s, _)) = s_list.iter().find(|(_, c)| c[0] == 0) {
            let mut n = sep.clone();
            n.move_to(s, Side::Right);
            return Act3::Drag(n, "drag-right");
        }
        if let Some(&(s, _)) = s_list.iter().find(|(_, c)| c[2] == 0) {
            let mut n = sep.clone();
            n.move_to(s, Side::Left);
            return Act3::Drag(n, "drag-left");
        }
        let imb = self.mu_r(inst, &sep.right) - self.mu_r(inst, &sep.left);
        if let Some(&(s, _)) = s_list.iter().find(|&&(s, _)| inst.deg(s) == 2) {
            let mut n = sep.clone();
            if imb <= 2.0 * self.w.b {
                let (path, end) = walk(inst, s, Side::Left);
                for p in path {
                    n.move_to(p, Side::Right);
                }
                n.move_to(s, Side::Right);
                n.move_to(end, Side::Sep);
            } else {
                let (path, end) = walk(inst, s, Side::Right);
                for p in path {
                    n.move_to(p, Side::Left);
                }
                n.move_to(s, Side::Left);
                n.move_to(end, Side::Sep);
            }
            return Act3::Drag(n, "drag-degree-2");
        }
        if imb > self.w.b {
            let right_nb = |s: Vertex| inst.live_nb(s).into_iter().find(|w| sep.right.contains(w)).unwrap();
            if let Some(&(s, _)) = s_list.iter().find(|&&(s, c)| c == [2, 0, 1] && inst.deg(right_nb(s)) == 3) {
                let r = right_nb(s);
                let mut n = sep.clone();
                n.move_to(s, Side::Left);
                n.move_to(r, Side::Sep);
                return Act3::Drag(n, "rotate");
            }
            let pulls = |s: Vertex| {
                let r = right_nb(s);
                let nb = inst.live_nb(r);
                nb.len() == 2 && nb.iter().any(|&w| w != s && sep.sep.contains(&w))
            };
            if let Some(&(s, _)) = s_list.iter().find(|&&(s, c)| c == [2, 0, 1] && pulls(s)) {
                let r = right_nb(s);
                let mut n = sep.clone();
                n.move_to(s, Side::Left);
                n.move_to(r, Side::Left);
                return Act3::Drag(n, "drag-pair-left");
            }
        }
        if let Some(&s) = sep.sep.iter().find(|s| !self.sets.contains(s)) {
            return Act3::BranchElement(s);
        }
        Act3::BranchSet(*sep.sep.iter().next().unwrap())
    }
}

/// From separator vertex `s` of degree 2, follow degree-2 vertices into
/// `side` until a degree-3 vertex or a separator vertex. Returns the path
/// and the stopping vertex.
fn walk(inst: &Inst, s: Vertex, side: Side) -> (Vec<Vertex>, Vertex) {
    let mut prev = s;
    let mut cur = inst.live_nb(s).into_iter().find(|w| inst.sep.side(*w) == Some(side)).unwrap();
    let mut path = Vec::new();
    while inst.deg(cur) == 2 && !inst.sep.sep.contains(&cur) {
        path.push(cur);
        let next = inst.live_nb(cur).into_iter().find(|&w| w != prev).unwrap();
        prev = cur;
        cur = next;
    }
    (path, cur)
}

/// Smaller vertex of the first pair (by ids) of degree-2 vertices of I - A
/// sharing both neighbors.
fn find_duplicate(inst: &Inst) -> Option<Vertex> {
    let mut seen: BTreeMap<Vec<Vertex>, Vertex> = BTreeMap::new();
    let mut best: Option<(Vertex, Vertex)> = None;
    for v in inst.live() {
        if inst.deg(v) != 2 {
            continue;
        }
        let nb = inst.live_nb(v);
        match seen.get(&nb) {
            Some(&u) => {
                if best.map_or(true, |b| (u, v) < b) {
                    best = Some((u, v));
                }
            }
            None => {
                seen.insert(nb, v);
            }
        }
    }
    best.map(|(u, _)| u)
}

type Poly = Vec<BigInt>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &mut Poly, b: &Poly) {
    if a.len() < b.len() {
        a.resize(b.len(), BigInt::zero());
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

struct Factor {
    scope: Vec<Vertex>,
    /// Indexed by the bits of the scope assignment, scope[0] lowest.
    table: Vec<Poly>,
}

/// Σ over independent sets J of I of Π x^{[v is a set]} · (−1)^{[v is an
/// element]}, which equals the set-cover count polynomial by
/// inclusion–exclusion over uncovered elements. Variables are eliminated in
/// annotation order first, then by minimum degree.
fn eliminate(inst: &Inst, sets: &BTreeSet<Vertex>) -> CountVector {
    let one = || vec![BigInt::one()];
    let mut factors: Vec<Factor> = Vec::new();
    for v in inst.g.vertices() {
        let w = if sets.contains(&v) { vec![BigInt::zero(), BigInt::one()] } else { vec![BigInt::from(-1)] };
        factors.push(Factor { scope: vec![v], table: vec![one(), w] });
    }
    for (u, v) in inst.g.edges() {
        factors.push(Factor { scope: vec![u, v], table: vec![one(), one(), one(), Vec::new()] });
    }
    let mut order: Vec<Vertex> = inst.log.iter().map(|a| a.vertex).filter(|v| inst.g.has_vertex(*v)).collect();
    let mut remaining: BTreeSet<Vertex> = inst.g.vertex_set();
    for v in &order {
        remaining.remove(v);
    }
    let mut done = 0;
    while done < order.len() || !remaining.is_empty() {
        let v = if done < order.len() {
            order[done]
        } else {
            // minimum number of distinct factor neighbors
            let mut nbs: BTreeMap<Vertex, BTreeSet<Vertex>> = BTreeMap::new();
            for f in &factors {
                for &a in &f.scope {
                    if remaining.contains(&a) {
                        nbs.entry(a).or_default().extend(f.scope.iter().copied().filter(|&b| b != a));
                    }
                }
            }
            let v = *remaining.iter().min_by_key(|v| (nbs.get(v).map_or(0, BTreeSet::len), **v)).unwrap();
            remaining.remove(&v);
            order.push(v);
            v
        };
        done += 1;
        let (touch, rest): (Vec<Factor>, Vec<Factor>) = factors.into_iter().partition(|f| f.scope.contains(&v));
        factors = rest;
        let scope: Vec<Vertex> = touch
            .iter()
            .flat_map(|f| f.scope.iter().copied())
            .filter(|&a| a != v)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut table = vec![Vec::new(); 1 << scope.len()];
        for (idx, slot) in table.iter_mut().enumerate() {
            for bit_v in 0..2usize {
                let mut prod = one();
                for f in &touch {
                    let mut k = 0;
                    for (j, a) in f.scope.iter().enumerate() {
                        let bit = if *a == v { bit_v } else { idx >> scope.iter().position(|b| b == a).unwrap() & 1 };
                        k |= bit << j;
                    }
                    prod = poly_mul(&prod, &f.table[k]);
                    if prod.is_empty() {
                        break;
                    }
                }
                poly_add(slot, &prod);
            }
        }
        factors.push(Factor { scope, table });
    }
    let mut total = one();
    for f in factors {
        total = poly_mul(&total, &f.table[0]);
    }
    CountVector::new(total).trimmed()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_singletons() {
        let i = ScIncidence::new(1, &[vec![0], vec![0]]).unwrap();
        assert_eq!(sc_count(&i), CountVector::from_u64s(&[0, 2, 1]));
        assert_eq!(sc_dp(&i).unwrap(), CountVector::from_u64s(&[0, 2, 1]));
    }

    #[test]
    fn single_forced_set() {
        let i = ScIncidence::new(2, &[vec![0, 1]]).unwrap();
        assert_eq!(sc_count(&i), CountVector::from_u64s(&[0, 1]));
    }

    #[test]
    fn empty_instance() {
        let i = ScIncidence::new(0, &[]).unwrap();
        assert_eq!(sc_dp(&i).unwrap(), CountVector::one());
    }

    #[test]
    fn closed_neighborhoods_of_p3() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let i = ds_to_sc(&g);
        let members: Vec<Vec<Vertex>> = i.set_members().into_iter().map(|(_, m)| m).collect();
        assert_eq!(members, vec![vec![0, 2], vec![0, 2, 4], vec![2, 4]]);
        assert_eq!(count_ds_general(&g), CountVector::from_u64s(&[0, 1, 3, 1]));
    }

    #[test]
    fn k4_dominating_sets() {
        let mut g = Graph::with_vertices(4);
        for u in 0..4 {
            for v in u + 1..4 {
                g.add_edge(u, v).unwrap();
            }
        }
        assert_eq!(count_ds_general(&g), CountVector::from_u64s(&[0, 4, 6, 4, 1]));
    }

    #[test]
    fn text_round_trip() {
        let i = ScIncidence::new(3, &[vec![0, 1], vec![1, 2], vec![]]).unwrap();
        assert_eq!(ScIncidence::from_text(&i.to_text()).unwrap(), i);
    }
}

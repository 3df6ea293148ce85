//! Max 2-CSP: instances, the four reductions, encoders, and the
//! separator-driven branching solver.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::audit::AuditLog;
use crate::graph::{content_lines, Graph, GraphError, Vertex};
use crate::measure::{to_f64, CspWeights};
use crate::policy::{apply_drag, count3, select_pivot, PivotAction};
use crate::separator::{separate_cubic, verify_separation, Separation, Side};

pub type Score = i64;
pub type Assignment = BTreeMap<Vertex, usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CspError {
    #[error("integer overflow in score arithmetic")]
    Overflow,
    #[error("domain size must be at least 2, got {0}")]
    BadDomain(usize),
    #[error("assignment misses vertex {0}")]
    PartialAssignment(Vertex),
    #[error("vertex {0} has color {1} outside the domain")]
    BadColor(Vertex, usize),
    #[error("vertex {vertex} has degree {found}, reduction needs {needed}")]
    WrongDegree { vertex: Vertex, found: usize, needed: &'static str },
    #[error("score table for {0} has length {1}, expected {2}")]
    BadTable(String, usize, usize),
    #[error("vertex {0} already present")]
    DuplicateVertex(Vertex),
    #[error("clause {0} has {1} literals; at most 2 are supported")]
    ClauseTooWide(usize, usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl CspError {
    pub fn is_parse(&self) -> bool {
        matches!(self, CspError::Parse { .. } | CspError::Graph(GraphError::Parse { .. }))
    }
}

fn add(a: Score, b: Score) -> Result<Score, CspError> {
    a.checked_add(b).ok_or(CspError::Overflow)
}

fn perr(line: usize, msg: impl Into<String>) -> CspError {
    CspError::Parse { line, msg: msg.into() }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CspInstance {
    r: usize,
    graph: Graph,
    s_nil: Score,
    s_v: BTreeMap<Vertex, Vec<Score>>,
    /// Keyed by (u, v) with u < v; entry `c_u * r + c_v`.
    s_e: BTreeMap<(Vertex, Vertex), Vec<Score>>,
}

/// Maps a child's optimal assignment back to its parent's.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Undo {
    Fixed { y: Vertex, color: usize },
    Pendant { y: Vertex, x: Vertex, choice: Vec<usize> },
    Series { y: Vertex, x: Vertex, z: Vertex, choice: Vec<usize> },
}

impl Undo {
    fn apply(&self, r: usize, phi: &mut Assignment) {
        match self {
            Undo::Fixed { y, color } => {
                phi.insert(*y, *color);
            }
            Undo::Pendant { y, x, choice } => {
                let c = choice[phi[x]];
                phi.insert(*y, c);
            }
            Undo::Series { y, x, z, choice } => {
                let c = choice[phi[x] * r + phi[z]];
                phi.insert(*y, c);
            }
        }
    }
}

fn transpose(t: &[Score], r: usize) -> Vec<Score> {
    let mut out = vec![0; r * r];
    for a in 0..r {
        for b in 0..r {
            out[b * r + a] = t[a * r + b];
        }
    }
    out
}

impl CspInstance {
    pub fn new(r: usize) -> Result<Self, CspError> {
        if r < 2 {
            return Err(CspError::BadDomain(r));
        }
        Ok(CspInstance { r, graph: Graph::new(), s_nil: 0, s_v: BTreeMap::new(), s_e: BTreeMap::new() })
    }

    /// Vertices `0..n` with zero scores.
    pub fn with_vertices(r: usize, n: usize) -> Result<Self, CspError> {
        let mut i = Self::new(r)?;
        for v in 0..n {
            i.add_variable(v, vec![0; r])?;
        }
        Ok(i)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn nil(&self) -> Score {
        self.s_nil
    }

    pub fn set_nil(&mut self, s: Score) {
        self.s_nil = s;
    }

    pub fn num_vertices(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn vertex_scores(&self, v: Vertex) -> Option<&[Score]> {
        self.s_v.get(&v).map(Vec::as_slice)
    }

    /// Table of edge uv indexed `c_u * r + c_v`, in the caller's orientation.
    pub fn edge_table(&self, u: Vertex, v: Vertex) -> Option<Vec<Score>> {
        if u < v {
            self.s_e.get(&(u, v)).cloned()
        } else {
            self.s_e.get(&(v, u)).map(|t| transpose(t, self.r))
        }
    }

    pub fn add_variable(&mut self, v: Vertex, scores: Vec<Score>) -> Result<(), CspError> {
        if self.graph.has_vertex(v) {
            return Err(CspError::DuplicateVertex(v));
        }
        if scores.len() != self.r {
            return Err(CspError::BadTable(format!("vertex {v}"), scores.len(), self.r));
        }
        self.graph.add_vertex(v);
        self.s_v.insert(v, scores);
        Ok(())
    }

    /// `table[c_u * r + c_v]`.
    pub fn add_constraint(&mut self, u: Vertex, v: Vertex, table: Vec<Score>) -> Result<(), CspError> {
        let r = self.r;
        if table.len() != r * r {
            return Err(CspError::BadTable(format!("edge {u}-{v}"), table.len(), r * r));
        }
        self.graph.add_edge(u, v)?;
        let (key, t) = if u < v { ((u, v), table) } else { ((v, u), transpose(&table, r)) };
        self.s_e.insert(key, t);
        Ok(())
    }

    /// Adds `table` onto the uv table, creating the edge if needed.
    fn merge_constraint(&mut self, u: Vertex, v: Vertex, table: Vec<Score>) -> Result<(), CspError> {
        let r = self.r;
        let (key, t) = if u < v { ((u, v), table) } else { ((v, u), transpose(&table, r)) };
        match self.s_e.get_mut(&key) {
            Some(old) => {
                for (o, x) in old.iter_mut().zip(t) {
                    *o = add(*o, x)?;
                }
            }
            None => {
                self.graph.add_edge(u, v)?;
                self.s_e.insert(key, t);
            }
        }
        Ok(())
    }

    fn pair(&self, u: Vertex, v: Vertex, cu: usize, cv: usize) -> Score {
        if u < v {
            self.s_e[&(u, v)][cu * self.r + cv]
        } else {
            self.s_e[&(v, u)][cv * self.r + cu]
        }
    }

    fn delete(&mut self, y: Vertex) {
        for w in self.graph.neighbors(y).to_vec() {
            self.s_e.remove(&(y.min(w), y.max(w)));
        }
        self.graph.delete_vertex(y).expect("vertex present");
        self.s_v.remove(&y);
    }

    pub fn evaluate(&self, phi: &Assignment) -> Result<Score, CspError> {
        let mut total = self.s_nil;
        for (&v, s) in &self.s_v {
            let c = *phi.get(&v).ok_or(CspError::PartialAssignment(v))?;
            if c >= self.r {
                return Err(CspError::BadColor(v, c));
            }
            total = add(total, s[c])?;
        }
        for (&(u, v), t) in &self.s_e {
            total = add(total, t[phi[&u] * self.r + phi[&v]])?;
        }
        Ok(total)
    }

    fn need_degree(&self, y: Vertex, ok: impl Fn(usize) -> bool, needed: &'static str) -> Result<(), CspError> {
        if !self.graph.has_vertex(y) {
            return Err(GraphError::UnknownVertex(y).into());
        }
        let d = self.graph.degree(y);
        if ok(d) {
            Ok(())
        } else {
            Err(CspError::WrongDegree { vertex: y, found: d, needed })
        }
    }

    pub fn reduce0(&self, y: Vertex) -> Result<CspInstance, CspError> {
        let mut i = self.clone();
        i.reduce0_mut(y)?;
        Ok(i)
    }

    pub fn reduce_i(&self, y: Vertex) -> Result<CspInstance, CspError> {
        let mut i = self.clone();
        i.reduce_i_mut(y)?;
        Ok(i)
    }

    pub fn reduce_ii(&self, y: Vertex) -> Result<CspInstance, CspError> {
        let mut i = self.clone();
        i.reduce_ii_mut(y)?;
        Ok(i)
    }

    /// One instance per color of `y`, in color order.
    pub fn reduce_iii(&self, y: Vertex) -> Result<Vec<CspInstance>, CspError> {
        self.need_degree(y, |d| d >= 3, "at least 3")?;
        (0..self.r).map(|c| self.fix(y, c)).collect()
    }

    fn reduce0_mut(&mut self, y: Vertex) -> Result<Undo, CspError> {
        self.need_degree(y, |d| d == 0, "0")?;
        let s = &self.s_v[&y];
        let color = argmax(s);
        self.s_nil = add(self.s_nil, s[color])?;
        self.delete(y);
        Ok(Undo::Fixed { y, color })
    }

    fn reduce_i_mut(&mut self, y: Vertex) -> Result<Undo, CspError> {
        self.need_degree(y, |d| d == 1, "1")?;
        let x = self.graph.neighbors(y)[0];
        let r = self.r;
        let mut choice = vec![0; r];
        let mut gain = vec![0; r];
        for c in 0..r {
            let vals: Vec<Score> =
                (0..r).map(|d| add(self.pair(x, y, c, d), self.s_v[&y][d])).collect::<Result<_, _>>()?;
            choice[c] = argmax(&vals);
            gain[c] = vals[choice[c]];
        }
        let sx = self.s_v.get_mut(&x).unwrap();
        for c in 0..r {
            sx[c] = add(sx[c], gain[c])?;
        }
        self.delete(y);
        Ok(Undo::Pendant { y, x, choice })
    }

    fn reduce_ii_mut(&mut self, y: Vertex) -> Result<Undo, CspError> {
        self.need_degree(y, |d| d == 2, "2")?;
        let (x, z) = (self.graph.neighbors(y)[0], self.graph.neighbors(y)[1]);
        let r = self.r;
        let mut table = vec![0; r * r];
        let mut choice = vec![0; r * r];
        for c in 0..r {
            for d in 0..r {
                let vals: Vec<Score> = (0..r)
                    .map(|f| add(add(self.pair(x, y, c, f), self.pair(y, z, f, d))?, self.s_v[&y][f]))
                    .collect::<Result<_, _>>()?;
                let k = argmax(&vals);
                choice[c * r + d] = k;
                table[c * r + d] = vals[k];
            }
        }
        self.delete(y);
        self.merge_constraint(x, z, table)?;
        Ok(Undo::Series { y, x, z, choice })
    }

    /// Child of Reduction III for color `c` of `y`.
    fn fix(&self, y: Vertex, c: usize) -> Result<CspInstance, CspError> {
        let mut i = self.clone();
        i.fix_mut(y, c)?;
        Ok(i)
    }

    fn fix_mut(&mut self, y: Vertex, c: usize) -> Result<(), CspError> {
        self.s_nil = add(self.s_nil, self.s_v[&y][c])?;
        for x in self.graph.neighbors(y).to_vec() {
            for d in 0..self.r {
                let p = self.pair(x, y, d, c);
                let sx = self.s_v.get_mut(&x).unwrap();
                sx[d] = add(sx[d], p)?;
            }
        }
        self.delete(y);
        Ok(())
    }

    /// Sub-instance induced on `vs`, with zero niladic score.
    pub fn restrict(&self, vs: &BTreeSet<Vertex>) -> Result<CspInstance, CspError> {
        let graph = self.graph.induced_subgraph(vs)?;
        let s_v = vs.iter().map(|v| (*v, self.s_v[v].clone())).collect();
        let s_e = graph.edges().into_iter().map(|e| (e, self.s_e[&e].clone())).collect();
        Ok(CspInstance { r: self.r, graph, s_nil: 0, s_v, s_e })
    }

    pub fn select_pivot(&self, sep: &Separation) -> PivotAction {
        select_pivot(&self.graph, sep)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "max2csp {} {} {}", self.r, self.num_vertices(), self.graph.num_edges()).unwrap();
        writeln!(s, "nil {}", self.s_nil).unwrap();
        let join = |v: &[Score]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        for (v, sc) in &self.s_v {
            writeln!(s, "v {v} {}", join(sc)).unwrap();
        }
        for ((u, v), t) in &self.s_e {
            writeln!(s, "e {u} {v} {}", join(t)).unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<CspInstance, CspError> {
        let mut lines = content_lines(text);
        let (ln, header) = lines.next().ok_or_else(|| perr(0, "missing header"))?;
        let t: Vec<&str> = header.split_whitespace().collect();
        if t.len() != 4 || t[0] != "max2csp" {
            return Err(perr(ln, "expected `max2csp <r> <n> <m>`"));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| perr(ln, "bad header number"));
        let (r, n, m) = (num(t[1])?, num(t[2])?, num(t[3])?);
        let mut inst = CspInstance::new(r).map_err(|e| perr(ln, e.to_string()))?;
        let (mut nv, mut ne) = (0, 0);
        for (ln, line) in lines {
            let t: Vec<&str> = line.split_whitespace().collect();
            let ints = |xs: &[&str]| -> Result<Vec<Score>, CspError> {
                xs.iter().map(|x| x.parse::<Score>().map_err(|_| perr(ln, format!("bad integer `{x}`")))).collect()
            };
            let id = |x: &str| x.parse::<Vertex>().map_err(|_| perr(ln, format!("bad vertex id `{x}`")));
            match t[0] {
                "nil" if t.len() == 2 => inst.s_nil = ints(&t[1..])?[0],
                "v" if t.len() == 2 + r => {
                    inst.add_variable(id(t[1])?, ints(&t[2..])?).map_err(|e| perr(ln, e.to_string()))?;
                    nv += 1;
                }
                "e" if t.len() == 3 + r * r => {
                    let (u, v) = (id(t[1])?, id(t[2])?);
                    inst.add_constraint(u, v, ints(&t[3..])?).map_err(|e| perr(ln, e.to_string()))?;
                    ne += 1;
                }
                _ => return Err(perr(ln, "unrecognized or malformed line")),
            }
        }
        if nv != n || ne != m {
            return Err(perr(0, format!("header announces {n} vertices and {m} edges, found {nv} and {ne}")));
        }
        Ok(inst)
    }
}

/// Index of the first maximum.
fn argmax(v: &[Score]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = i;
        }
    }
    best
}

/// r = 2, score 1 on every cut edge.
pub fn encode_maxcut(g: &Graph) -> CspInstance {
    let mut i = CspInstance::new(2).unwrap();
    for v in g.vertices() {
        i.add_variable(v, vec![0, 0]).unwrap();
    }
    for (u, v) in g.edges() {
        i.add_constraint(u, v, vec![0, 1, 1, 0]).unwrap();
    }
    i
}

/// Clauses over variables `1..=n` (DIMACS literals); color 1 means true.
pub fn encode_max2sat(num_vars: usize, clauses: &[Vec<i64>]) -> Result<CspInstance, CspError> {
    let mut inst = CspInstance::with_vertices(2, num_vars)?;
    for (ci, clause) in clauses.iter().enumerate() {
        let lits: BTreeSet<i64> = clause.iter().copied().collect();
        if lits.len() > 2 {
            return Err(CspError::ClauseTooWide(ci + 1, lits.len()));
        }
        for &l in &lits {
            if l == 0 || l.unsigned_abs() as usize > num_vars {
                return Err(perr(0, format!("literal {l} out of range in clause {}", ci + 1)));
            }
        }
        let lits: Vec<i64> = lits.into_iter().collect();
        let var = |l: i64| (l.unsigned_abs() - 1) as Vertex;
        let sat = |l: i64, c: usize| (l > 0) == (c == 1);
        match lits.as_slice() {
            [] => {}
            [a] => {
                let s = inst.s_v.get_mut(&var(*a)).unwrap();
                s[usize::from(*a > 0)] = add(s[usize::from(*a > 0)], 1)?;
            }
            [a, b] if var(*a) == var(*b) => inst.s_nil = add(inst.s_nil, 1)?,
            [a, b] => {
                let (u, v) = (var(*a), var(*b));
                let mut t = vec![0; 4];
                for cu in 0..2 {
                    for cv in 0..2 {
                        t[cu * 2 + cv] = Score::from(sat(*a, cu) || sat(*b, cv));
                    }
                }
                inst.merge_constraint(u, v, t)?;
            }
            _ => unreachable!(),
        }
    }
    Ok(inst)
}

/// DIMACS CNF: `p cnf <vars> <clauses>` then zero-terminated clauses.
pub fn parse_dimacs(text: &str) -> Result<(usize, Vec<Vec<i64>>), CspError> {
    let mut num_vars = None;
    let mut declared = 0;
    let mut clauses = Vec::new();
    let mut cur = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 4 || t[1] != "cnf" {
                return Err(perr(i + 1, "expected `p cnf <vars> <clauses>`"));
            }
            num_vars = Some(t[2].parse().map_err(|_| perr(i + 1, "bad variable count"))?);
            declared = t[3].parse().map_err(|_| perr(i + 1, "bad clause count"))?;
            continue;
        }
        if num_vars.is_none() {
            return Err(perr(i + 1, "clause before problem line"));
        }
        for tok in line.split_whitespace() {
            let l: i64 = tok.parse().map_err(|_| perr(i + 1, format!("bad literal `{tok}`")))?;
            if l == 0 {
                clauses.push(std::mem::take(&mut cur));
            } else {
                cur.push(l);
            }
        }
    }
    if !cur.is_empty() {
        clauses.push(cur);
    }
    let n = num_vars.ok_or_else(|| perr(0, "missing problem line"))?;
    if clauses.len() != declared {
        return Err(perr(0, format!("problem line announces {declared} clauses, found {}", clauses.len())));
    }
    Ok((n, clauses))
}

// ---------------------------------------------------------------- solver

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Policy {
    /// Pivot on separator vertices, split components, brute-force small ones.
    #[default]
    Separator,
    /// Branch on the smallest-id vertex of maximum degree; no splitting.
    Local,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub policy: Policy,
    pub audit: bool,
    /// Record μ at every audited step.
    pub trace_measure: bool,
    /// Worker threads for the top levels of branching (≤ 1: sequential).
    pub threads: usize,
    pub weights: CspWeights,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            policy: Policy::Separator,
            audit: false,
            trace_measure: false,
            threads: 1,
            weights: CspWeights::published(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CspSolution {
    pub score: Score,
    pub assignment: Assignment,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveStats {
    pub branchings: u64,
    pub leaves: u64,
    pub max_depth: usize,
    pub separator_recomputes: u64,
    /// Recomputed separations discarded because they raised μ.
    pub separator_rejections: u64,
    pub measure_trace: Option<Vec<f64>>,
    pub audit: AuditLog,
}

impl SolveStats {
    fn merge(&mut self, o: SolveStats) {
        self.branchings += o.branchings;
        self.leaves += o.leaves;
        self.max_depth = self.max_depth.max(o.max_depth);
        self.separator_recomputes += o.separator_recomputes;
        self.separator_rejections += o.separator_rejections;
        if let (Some(t), Some(o)) = (self.measure_trace.as_mut(), o.measure_trace) {
            t.extend(o);
        }
        self.audit.merge(o.audit);
    }
}

/// Largest size solved by enumeration: n ≤ 8 and r^n ≤ 6561.
pub fn base_case_limit(r: usize) -> usize {
    (0..=8).rev().find(|&k| (r as f64).powi(k as i32) <= 6561.0).unwrap_or(0)
}

#[derive(Clone, Copy, Debug)]
struct Wf {
    s: f64,
    s2: f64,
    r: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl Wf {
    fn new(w: &CspWeights) -> Self {
        Wf {
            s: to_f64(&w.w_s),
            s2: to_f64(&w.w2_s),
            r: to_f64(&w.w_r),
            b: to_f64(&w.w_b),
            c: to_f64(&w.w_c),
            d: to_f64(&w.w_d()),
        }
    }
}

/// μ(L, S, R) with the larger degree-3 side taken as R.
pub fn csp_measure(w: &CspWeights, g: &Graph, sep: &Separation) -> f64 {
    mu(&Wf::new(w), g, sep)
}

fn mu(w: &Wf, g: &Graph, sep: &Separation) -> f64 {
    let l3 = count3(g, sep, Side::Left);
    let r3 = count3(g, sep, Side::Right);
    let (l3, r3) = (l3.min(r3), l3.max(r3));
    let s3 = count3(g, sep, Side::Sep);
    let s2 = sep.sep.iter().filter(|&&v| g.degree(v) == 2).count();
    let ind = |b: bool| if b { 1.0 } else { 0.0 };
    let log = ((r3 + s3).max(1) as f64).ln() / 1.5f64.ln();
    w.s * s3 as f64 + w.s2 * s2 as f64 + w.r * r3 as f64 + w.b * ind(r3 == l3) + w.c * ind(r3 == l3 + 1) + w.d * log
}

/// 3|S| + 2|R| + |L| + 2|E|.
fn eta(g: &Graph, sep: &Separation) -> f64 {
    (3 * sep.sep.len() + 2 * sep.right.len() + sep.left.len() + 2 * g.num_edges()) as f64
}

fn orient(g: &Graph, sep: &mut Separation) {
    if count3(g, sep, Side::Left) > count3(g, sep, Side::Right) {
        sep.swap_sides();
    }
}

pub fn solve(i: &CspInstance) -> Result<(CspSolution, SolveStats), CspError> {
    solve_with(i, &SolveOptions::default())
}

pub fn solve_general(i: &CspInstance) -> Result<(CspSolution, SolveStats), CspError> {
    solve_with(i, &SolveOptions::default())
}

pub fn solve_with(i: &CspInstance, opts: &SolveOptions) -> Result<(CspSolution, SolveStats), CspError> {
    let engine = Engine { opts, w: Wf::new(&opts.weights), base: base_case_limit(i.r) };
    let mut stats = SolveStats { measure_trace: opts.trace_measure.then(Vec::new), ..Default::default() };
    let sep = Separation::trivial(i.graph.vertices());
    let run = || engine.run(i.clone(), sep, false, 0, &mut stats);
    let (score, assignment) = if opts.threads > 1 && !opts.audit {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.threads).build().expect("thread pool");
        pool.install(run)?
    } else {
        run()?
    };
    Ok((CspSolution { score, assignment }, stats))
}

type Solved = (Score, Assignment);

struct Engine<'a> {
    opts: &'a SolveOptions,
    w: Wf,
    base: usize,
}

const PAR_DEPTH: usize = 3;

impl Engine<'_> {
    fn audit_on(&self) -> bool {
        self.opts.audit && self.opts.policy == Policy::Separator
    }

    fn trace(&self, stats: &mut SolveStats, m: f64) {
        if let Some(t) = stats.measure_trace.as_mut() {
            t.push(m);
        }
    }

    /// μ of a child that will be solved directly as a leaf is 0.
    fn child_mu(&self, g: &Graph, sep: &Separation) -> Option<f64> {
        (g.num_vertices() > self.base).then(|| mu(&self.w, g, sep))
    }

    /// Audit bookkeeping for one step with `k` identical children (k = 1 for
    /// reductions and drags, k = r for branching).
    fn check_step(
        &self,
        stats: &mut SolveStats,
        step: &'static str,
        before: (&Graph, &Separation),
        after: (&Graph, &Separation),
        k: usize,
        r: usize,
    ) {
        if !self.audit_on() {
            return;
        }
        let mp = mu(&self.w, before.0, before.1);
        self.trace(stats, mp);
        let mc = self.child_mu(after.0, after.1);
        stats.audit.check_measure(step, r as f64, mp, &vec![mc; k]);
        stats.audit.check_progress(step, eta(before.0, before.1), &[eta(after.0, after.1)]);
        if !verify_separation(after.0, after.1) {
            stats.audit.violate(crate::audit::AuditKind::Separation, step, format!("{:?}", after.1));
        }
    }

    /// Simplifies, then either solves a leaf, splits, or branches.
    fn run(
        &self,
        mut inst: CspInstance,
        mut sep: Separation,
        mut attempted: bool,
        depth: usize,
        stats: &mut SolveStats,
    ) -> Result<(Score, Assignment), CspError> {
        stats.max_depth = stats.max_depth.max(depth);
        let mut undo: Vec<Undo> = Vec::new();
        let local = self.opts.policy == Policy::Local;
        let result = loop {
            self.simplify(&mut inst, &mut sep, &mut undo, stats)?;
            if inst.graph.is_empty() {
                stats.leaves += 1;
                break (inst.s_nil, Assignment::new());
            }
            let n = inst.num_vertices();
            if local {
                let y = max_degree_vertex(&inst.graph);
                break self.branch(&inst, &sep, y, depth, stats)?;
            }
            if n <= self.base && inst.graph.is_connected() {
                stats.leaves += 1;
                break brute(&inst)?;
            }
            if inst.graph.max_degree() >= 4 {
                if !inst.graph.is_connected() {
                    break self.split(&inst, &sep, false, depth, stats)?;
                }
                let y = max_degree_vertex(&inst.graph);
                let trivial = Separation::trivial(inst.graph.vertices());
                break self.branch(&inst, &trivial, y, depth, stats)?;
            }
            orient(&inst.graph, &mut sep);
            if sep.sep.is_empty() {
                if !inst.graph.is_connected() {
                    break self.split(&inst, &sep, true, depth, stats)?;
                }
                if !attempted {
                    attempted = true;
                    if let Some(new) = self.reseparate(&inst.graph, &sep, stats) {
                        sep = new;
                        continue;
                    }
                }
                let y =
                    *inst.graph.vertices().collect::<Vec<_>>().iter().find(|&&v| inst.graph.degree(v) == 3).unwrap();
                break self.branch(&inst, &sep, y, depth, stats)?;
            }
            let action = select_pivot(&inst.graph, &sep);
            match action {
                PivotAction::ReduceInS { s, moved } => {
                    let before = (inst.graph.clone(), sep.clone());
                    undo.push(match inst.graph.degree(s) {
                        0 => inst.reduce0_mut(s)?,
                        1 => inst.reduce_i_mut(s)?,
                        _ => inst.reduce_ii_mut(s)?,
                    });
                    sep.remove(s);
                    if let Some(m) = moved {
                        sep.move_to(m, Side::Sep);
                    }
                    self.check_step(stats, "reduce-II-in-S", (&before.0, &before.1), (&inst.graph, &sep), 1, 1);
                }
                PivotAction::DragRight(_) | PivotAction::DragLeft { .. } | PivotAction::Rotate { .. } => {
                    let before = sep.clone();
                    apply_drag(&mut sep, action);
                    self.check_step(stats, "drag", (&inst.graph, &before), (&inst.graph, &sep), 1, 1);
                }
                PivotAction::Branch(s) => break self.branch(&inst, &sep, s, depth, stats)?,
                PivotAction::Separate => unreachable!("S is nonempty"),
            }
        };
        let (score, mut phi) = result;
        for u in undo.iter().rev() {
            u.apply(inst.r, &mut phi);
        }
        Ok((score, phi))
    }

    /// Reductions 0/I anywhere, Reduction II outside S, smallest (degree, id) first.
    fn simplify(
        &self,
        inst: &mut CspInstance,
        sep: &mut Separation,
        undo: &mut Vec<Undo>,
        stats: &mut SolveStats,
    ) -> Result<(), CspError> {
        loop {
            let pick = inst
                .graph
                .vertices()
                .filter(|&v| {
                    let d = inst.graph.degree(v);
                    d <= 1 || (d == 2 && !sep.sep.contains(&v))
                })
                .min_by_key(|&v| (inst.graph.degree(v), v));
            let Some(y) = pick else { return Ok(()) };
            let before = self.audit_on().then(|| (inst.graph.clone(), sep.clone()));
            undo.push(match inst.graph.degree(y) {
                0 => inst.reduce0_mut(y)?,
                1 => inst.reduce_i_mut(y)?,
                _ => inst.reduce_ii_mut(y)?,
            });
            sep.remove(y);
            if let Some((g0, s0)) = before {
                self.check_step(stats, "simplify", (&g0, &s0), (&inst.graph, sep), 1, 1);
            }
        }
    }

    /// A fresh separation of a connected cubic graph, kept only if it does
    /// not raise μ.
    fn reseparate(&self, g: &Graph, cur: &Separation, stats: &mut SolveStats) -> Option<Separation> {
        stats.separator_recomputes += 1;
        let mut new = separate_cubic(g);
        orient(g, &mut new);
        if new.sep.is_empty() {
            stats.separator_rejections += 1;
            return None;
        }
        let (m_old, m_new) = (mu(&self.w, g, cur), mu(&self.w, g, &new));
        if m_new > m_old {
            stats.separator_rejections += 1;
            return None;
        }
        if self.audit_on() {
            self.trace(stats, m_old);
            stats.audit.check_measure("separate", self.opts_r(), m_old, &[Some(m_new)]);
            if !verify_separation(g, &new) {
                stats.audit.violate(crate::audit::AuditKind::Separation, "separate", format!("{new:?}"));
            }
        }
        Some(new)
    }

    fn opts_r(&self) -> f64 {
        // only used for the log base of single-child checks, where it is irrelevant
        2.0
    }

    fn split(
        &self,
        inst: &CspInstance,
        sep: &Separation,
        prepare: bool,
        depth: usize,
        stats: &mut SolveStats,
    ) -> Result<(Score, Assignment), CspError> {
        let comps = inst.graph.connected_components();
        let mut parts = Vec::with_capacity(comps.len());
        let mut mus = Vec::new();
        for c in &comps {
            let sub = inst.restrict(c)?;
            let mut csep = Separation::trivial(c.iter().copied());
            let mut attempted = false;
            if prepare && sub.num_vertices() > self.base {
                attempted = true;
                let trivial = csep.clone();
                if let Some(new) = self.reseparate(&sub.graph, &trivial, stats) {
                    csep = new;
                }
            }
            if prepare {
                mus.push(self.child_mu(&sub.graph, &csep));
            }
            parts.push((sub, csep, attempted));
        }
        if prepare && self.audit_on() {
            let mp = mu(&self.w, &inst.graph, sep);
            self.trace(stats, mp);
            stats.audit.check_measure("split", inst.r as f64, mp, &mus);
        }
        let mut total = inst.s_nil;
        let mut phi = Assignment::new();
        for (sub, csep, attempted) in parts {
            let (s, p) = self.run(sub, csep, attempted, depth + 1, stats)?;
            total = add(total, s)?;
            phi.extend(p);
        }
        Ok((total, phi))
    }

    /// Reduction III on `y`; children keep `sep` minus `y`.
    fn branch(
        &self,
        inst: &CspInstance,
        sep: &Separation,
        y: Vertex,
        depth: usize,
        stats: &mut SolveStats,
    ) -> Result<(Score, Assignment), CspError> {
        stats.branchings += 1;
        let mut csep = sep.clone();
        csep.remove(y);
        if self.audit_on() && inst.graph.max_degree() <= 3 {
            let mut g = inst.graph.clone();
            g.delete_vertex(y).unwrap();
            self.check_step(stats, "branch", (&inst.graph, sep), (&g, &csep), inst.r, inst.r);
        }
        let children: Vec<CspInstance> = (0..inst.r).map(|c| inst.fix(y, c)).collect::<Result<_, _>>()?;
        let results: Vec<Result<(Solved, SolveStats), CspError>> =
            if self.opts.threads > 1 && !self.opts.audit && depth < PAR_DEPTH {
                use rayon::prelude::*;
                children
                    .into_par_iter()
                    .map(|child| {
                        let mut st = SolveStats::default();
                        let res = self.run(child, csep.clone(), false, depth + 1, &mut st)?;
                        Ok((res, st))
                    })
                    .collect()
            } else {
                let mut out = Vec::new();
                for child in children {
                    let mut st = SolveStats {
                        measure_trace: stats.measure_trace.as_ref().map(|_| Vec::new()),
                        ..Default::default()
                    };
                    out.push(self.run(child, csep.clone(), false, depth + 1, &mut st).map(|res| (res, st)));
                }
                out
            };
        let mut best: Option<(Score, usize, Assignment)> = None;
        for (c, res) in results.into_iter().enumerate() {
            let ((score, phi), st) = res?;
            stats.merge(st);
            if best.as_ref().map_or(true, |(b, _, _)| score > *b) {
                best = Some((score, c, phi));
            }
        }
        let (score, c, mut phi) = best.unwrap();
        phi.insert(y, c);
        Ok((score, phi))
    }
}

fn max_degree_vertex(g: &Graph) -> Vertex {
    let d = g.max_degree();
    g.vertices().find(|&v| g.degree(v) == d).unwrap()
}

/// Exhaustive search for tiny instances; first optimum in lexicographic order.
fn brute(inst: &CspInstance) -> Result<(Score, Assignment), CspError> {
    let vs: Vec<Vertex> = inst.graph.vertices().collect();
    let n = vs.len();
    let r = inst.r;
    let idx: BTreeMap<Vertex, usize> = vs.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let unary: Vec<&Vec<Score>> = vs.iter().map(|v| &inst.s_v[v]).collect();
    let edges: Vec<(usize, usize, &Vec<Score>)> = inst.s_e.iter().map(|(&(u, v), t)| (idx[&u], idx[&v], t)).collect();
    let mut colors = vec![0usize; n];
    let mut best: Option<(Score, Vec<usize>)> = None;
    loop {
        let mut s = inst.s_nil;
        for i in 0..n {
            s = add(s, unary[i][colors[i]])?;
        }
        for &(a, b, t) in &edges {
            s = add(s, t[colors[a] * r + colors[b]])?;
        }
        if best.as_ref().map_or(true, |(b, _)| s > *b) {
            best = Some((s, colors.clone()));
        }
        // odometer with the last vertex fastest keeps lexicographic order
        let mut k = n;
        loop {
            if k == 0 {
                let (score, cs) = best.unwrap();
                return Ok((score, vs.iter().copied().zip(cs).collect()));
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

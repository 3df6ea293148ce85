//! Simple undirected graphs with stable vertex ids, and the multigraph that
//! holds the cubic structure of a subcubic graph.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("vertex {0} has degree {1}, expected at most 3")]
    DegreeTooLarge(Vertex, usize),
    #[error("vertex {0} present in both graphs")]
    IdClash(Vertex),
    #[error("vertex ids are not exactly 0..n")]
    NonContiguous,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn perr(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Parse { line, msg: msg.into() }
}

/// Simple graph. Neighbor lists are kept sorted, so structural equality is
/// plain `==`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: BTreeMap<Vertex, Vec<Vertex>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Edgeless graph on `0..n`.
    pub fn with_vertices(n: usize) -> Self {
        Graph { adj: (0..n).map(|v| (v, Vec::new())).collect() }
    }

    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut g = Self::with_vertices(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: Vertex) {
        self.adj.entry(v).or_default();
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for x in [u, v] {
            if !self.adj.contains_key(&x) {
                return Err(GraphError::UnknownVertex(x));
            }
        }
        let nu = self.adj.get_mut(&u).unwrap();
        match nu.binary_search(&v) {
            Ok(_) => return Err(GraphError::DuplicateEdge(u.min(v), u.max(v))),
            Err(pos) => nu.insert(pos, v),
        }
        let nv = self.adj.get_mut(&v).unwrap();
        let pos = nv.binary_search(&u).unwrap_err();
        nv.insert(pos, u);
        Ok(())
    }

    /// Returns whether the edge existed.
    pub fn remove_edge(&mut self, u: Vertex, v: Vertex) -> bool {
        let Some(nu) = self.adj.get_mut(&u) else { return false };
        let Ok(pos) = nu.binary_search(&v) else { return false };
        nu.remove(pos);
        let nv = self.adj.get_mut(&v).unwrap();
        let pos = nv.binary_search(&u).unwrap();
        nv.remove(pos);
        true
    }

    pub fn has_vertex(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj.get(&u).is_some_and(|n| n.binary_search(&v).is_ok())
    }

    /// Sorted neighbor list; empty for unknown vertices.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        self.adj.get(&v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.neighbors(v).len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        self.adj.keys().copied().collect()
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.values().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for (&u, nb) in &self.adj {
            out.extend(nb.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn max_degree(&self) -> usize {
        self.adj.values().map(Vec::len).max().unwrap_or(0)
    }

    pub fn induced_subgraph(&self, s: &BTreeSet<Vertex>) -> Result<Graph, GraphError> {
        if let Some(&v) = s.iter().find(|v| !self.adj.contains_key(v)) {
            return Err(GraphError::UnknownVertex(v));
        }
        let adj = s.iter().map(|&v| (v, self.adj[&v].iter().copied().filter(|w| s.contains(w)).collect())).collect();
        Ok(Graph { adj })
    }

    pub fn remove_vertex(&self, v: Vertex) -> Result<Graph, GraphError> {
        let mut g = self.clone();
        g.delete_vertex(v)?;
        Ok(g)
    }

    /// In-place variant of [`Graph::remove_vertex`].
    pub fn delete_vertex(&mut self, v: Vertex) -> Result<(), GraphError> {
        let nb = self.adj.remove(&v).ok_or(GraphError::UnknownVertex(v))?;
        for w in nb {
            let nw = self.adj.get_mut(&w).unwrap();
            let pos = nw.binary_search(&v).unwrap();
            nw.remove(pos);
        }
        Ok(())
    }

    /// Components ordered by their smallest vertex.
    pub fn connected_components(&self) -> Vec<BTreeSet<Vertex>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.adj.keys() {
            if seen.contains(&start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            seen.insert(start);
            while let Some(v) = queue.pop_front() {
                comp.insert(v);
                for &w in &self.adj[&v] {
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Γ(G): delete degree-0/1 vertices and suppress degree-2 vertices until
    /// every remaining vertex has degree 3.
    pub fn cubic_structure(&self) -> Result<MultiGraph, GraphError> {
        if let Some((&v, nb)) = self.adj.iter().find(|(_, nb)| nb.len() > 3) {
            return Err(GraphError::DegreeTooLarge(v, nb.len()));
        }
        let mut mg = MultiGraph::from_graph(self);
        mg.reduce_to_cubic();
        Ok(mg)
    }

    /// Same graph with every id shifted by `offset`.
    pub fn shifted(&self, offset: Vertex) -> Graph {
        let adj = self.adj.iter().map(|(&v, nb)| (v + offset, nb.iter().map(|&w| w + offset).collect())).collect();
        Graph { adj }
    }

    /// Vertex-disjoint union; errors if the id sets overlap.
    pub fn disjoint_union(&self, other: &Graph) -> Result<Graph, GraphError> {
        let mut adj = self.adj.clone();
        for (&v, nb) in &other.adj {
            if adj.insert(v, nb.clone()).is_some() {
                return Err(GraphError::IdClash(v));
            }
        }
        Ok(Graph { adj })
    }

    /// Requires ids `0..n`.
    pub fn to_text(&self) -> Result<String, GraphError> {
        let n = self.num_vertices();
        if self.adj.keys().enumerate().any(|(i, &v)| i != v) {
            return Err(GraphError::NonContiguous);
        }
        let mut s = String::new();
        writeln!(s, "graph {} {}", n, self.num_edges()).unwrap();
        for (u, v) in self.edges() {
            writeln!(s, "{u} {v}").unwrap();
        }
        Ok(s)
    }

    pub fn from_text(text: &str) -> Result<Graph, GraphError> {
        let mut lines = content_lines(text);
        let (ln, header) = lines.next().ok_or_else(|| perr(0, "missing header"))?;
        let t: Vec<&str> = header.split_whitespace().collect();
        if t.len() != 3 || t[0] != "graph" {
            return Err(perr(ln, "expected `graph <n> <m>`"));
        }
        let n: usize = t[1].parse().map_err(|_| perr(ln, "bad vertex count"))?;
        let m: usize = t[2].parse().map_err(|_| perr(ln, "bad edge count"))?;
        let mut g = Graph::with_vertices(n);
        let mut seen = 0;
        for (ln, line) in lines {
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 2 {
                return Err(perr(ln, "expected `<u> <v>`"));
            }
            let u: Vertex = t[0].parse().map_err(|_| perr(ln, "bad vertex id"))?;
            let v: Vertex = t[1].parse().map_err(|_| perr(ln, "bad vertex id"))?;
            g.add_edge(u, v).map_err(|e| perr(ln, e.to_string()))?;
            seen += 1;
        }
        if seen != m {
            return Err(perr(0, format!("header announces {m} edges, found {seen}")));
        }
        Ok(g)
    }
}

/// Non-empty lines with `#` comments stripped, paired with 1-based line numbers.
pub fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap().trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// Undirected multigraph with loops. `adj[v][w]` is the multiplicity of the
/// edge `vw`; a loop at `v` is stored once under `adj[v][v]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MultiGraph {
    adj: BTreeMap<Vertex, BTreeMap<Vertex, usize>>,
}

impl MultiGraph {
    pub fn from_graph(g: &Graph) -> Self {
        let adj = g.adj.iter().map(|(&v, nb)| (v, nb.iter().map(|&w| (w, 1)).collect())).collect();
        MultiGraph { adj }
    }

    pub fn add_vertex(&mut self, v: Vertex) {
        self.adj.entry(v).or_default();
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex) {
        *self.adj.entry(u).or_default().entry(v).or_default() += 1;
        if u != v {
            *self.adj.entry(v).or_default().entry(u).or_default() += 1;
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_set(&self) -> BTreeSet<Vertex> {
        self.adj.keys().copied().collect()
    }

    pub fn has_vertex(&self, v: Vertex) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn multiplicity(&self, u: Vertex, v: Vertex) -> usize {
        self.adj.get(&u).and_then(|m| m.get(&v)).copied().unwrap_or(0)
    }

    /// Loops count twice.
    pub fn degree(&self, v: Vertex) -> usize {
        self.adj.get(&v).map_or(0, |m| m.iter().map(|(&w, &k)| if w == v { 2 * k } else { k }).sum())
    }

    /// Edge endpoints seen from `v`, with multiplicity; a loop contributes `v` twice.
    pub fn neighbor_multiset(&self, v: Vertex) -> Vec<Vertex> {
        let mut out = Vec::new();
        if let Some(m) = self.adj.get(&v) {
            for (&w, &k) in m {
                let reps = if w == v { 2 * k } else { k };
                out.extend(std::iter::repeat(w).take(reps));
            }
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        let mut twice = 0;
        for (&v, m) in &self.adj {
            for (&w, &k) in m {
                twice += if w == v { 2 * k } else { k };
            }
        }
        twice / 2
    }

    /// Underlying simple graph: loops dropped, parallel edges collapsed.
    pub fn to_simple(&self) -> Graph {
        let adj = self.adj.iter().map(|(&v, m)| (v, m.keys().copied().filter(|&w| w != v).collect())).collect();
        Graph { adj }
    }

    pub fn is_cubic(&self) -> bool {
        self.adj.keys().all(|&v| self.degree(v) == 3)
    }

    fn remove_vertex(&mut self, v: Vertex) {
        if let Some(m) = self.adj.remove(&v) {
            for w in m.keys() {
                if *w != v {
                    self.adj.get_mut(w).unwrap().remove(&v);
                }
            }
        }
    }

    fn reduce_to_cubic(&mut self) {
        let mut queue: BTreeSet<Vertex> = self.adj.keys().copied().filter(|&v| self.degree(v) <= 2).collect();
        while let Some(v) = queue.pop_first() {
            if !self.adj.contains_key(&v) {
                continue;
            }
            match self.degree(v) {
                0 | 1 => {
                    let nb: Vec<Vertex> = self.adj[&v].keys().copied().filter(|&w| w != v).collect();
                    self.remove_vertex(v);
                    queue.extend(nb);
                }
                2 => {
                    let ends = self.neighbor_multiset(v);
                    self.remove_vertex(v);
                    if ends[0] != v {
                        self.add_edge(ends[0], ends[1]);
                    }
                }
                _ => {}
            }
        }
    }
}

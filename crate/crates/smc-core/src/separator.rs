//! Separations (L, S, R), heuristic bisection, nice path decompositions and
//! the measure-balanced bag sweep.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Sep,
    Right,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Separation {
    pub left: BTreeSet<Vertex>,
    pub sep: BTreeSet<Vertex>,
    pub right: BTreeSet<Vertex>,
}

impl Separation {
    /// (∅, ∅, V).
    pub fn trivial<I: IntoIterator<Item = Vertex>>(vertices: I) -> Self {
        Separation { right: vertices.into_iter().collect(), ..Default::default() }
    }

    pub fn new(left: BTreeSet<Vertex>, sep: BTreeSet<Vertex>, right: BTreeSet<Vertex>) -> Self {
        Separation { left, sep, right }
    }

    pub fn side(&self, v: Vertex) -> Option<Side> {
        if self.left.contains(&v) {
            Some(Side::Left)
        } else if self.sep.contains(&v) {
            Some(Side::Sep)
        } else if self.right.contains(&v) {
            Some(Side::Right)
        } else {
            None
        }
    }

    pub fn part(&self, side: Side) -> &BTreeSet<Vertex> {
        match side {
            Side::Left => &self.left,
            Side::Sep => &self.sep,
            Side::Right => &self.right,
        }
    }

    fn part_mut(&mut self, side: Side) -> &mut BTreeSet<Vertex> {
        match side {
            Side::Left => &mut self.left,
            Side::Sep => &mut self.sep,
            Side::Right => &mut self.right,
        }
    }

    /// Moves (or inserts) `v` into `side`.
    pub fn move_to(&mut self, v: Vertex, side: Side) {
        self.remove(v);
        self.part_mut(side).insert(v);
    }

    pub fn remove(&mut self, v: Vertex) -> Option<Side> {
        let side = self.side(v)?;
        self.part_mut(side).remove(&v);
        Some(side)
    }

    pub fn swap_sides(&mut self) {
        std::mem::swap(&mut self.left, &mut self.right);
    }

    pub fn len(&self) -> usize {
        self.left.len() + self.sep.len() + self.right.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn vertices(&self) -> BTreeSet<Vertex> {
        self.left.iter().chain(&self.sep).chain(&self.right).copied().collect()
    }

    pub fn restrict(&self, keep: &BTreeSet<Vertex>) -> Separation {
        let f = |s: &BTreeSet<Vertex>| s.intersection(keep).copied().collect();
        Separation { left: f(&self.left), sep: f(&self.sep), right: f(&self.right) }
    }

    pub fn is_partition_of(&self, vs: &BTreeSet<Vertex>) -> bool {
        self.left.is_disjoint(&self.sep)
            && self.left.is_disjoint(&self.right)
            && self.sep.is_disjoint(&self.right)
            && self.len() == vs.len()
            && self.vertices() == *vs
    }
}

/// Partition of V(g) with no edge between left and right.
pub fn verify_separation(g: &Graph, s: &Separation) -> bool {
    s.is_partition_of(&g.vertex_set()) && s.left.iter().all(|&v| g.neighbors(v).iter().all(|w| !s.right.contains(w)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bisection {
    pub a: BTreeSet<Vertex>,
    pub b: BTreeSet<Vertex>,
    pub cut: usize,
}

const KL_STARTS: u64 = 8;
const KL_MAX_PASSES: usize = 32;

/// Kernighan–Lin swap search from several seeded random starts; |a| = ⌊n/2⌋.
/// The best result by (cut, start index) is returned.
pub fn bisect_heuristic(g: &Graph, seed: u64) -> Bisection {
    let verts: Vec<Vertex> = g.vertices().collect();
    let n = verts.len();
    let index: BTreeMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let adj: Vec<Vec<usize>> = verts.iter().map(|&v| g.neighbors(v).iter().map(|w| index[w]).collect()).collect();
    let mut best: Option<(usize, Vec<bool>)> = None;
    for start in 0..KL_STARTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9).wrapping_add(start));
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let mut in_b = vec![false; n];
        for &i in &perm[n / 2..] {
            in_b[i] = true;
        }
        kl_refine(&adj, &mut in_b);
        let cut = cut_size(&adj, &in_b);
        if best.as_ref().map_or(true, |(c, _)| cut < *c) {
            best = Some((cut, in_b));
        }
        if n < 2 {
            break;
        }
    }
    let (cut, in_b) = best.unwrap_or((0, Vec::new()));
    let mut a = BTreeSet::new();
    let mut b = BTreeSet::new();
    for (i, &v) in verts.iter().enumerate() {
        if in_b[i] {
            b.insert(v);
        } else {
            a.insert(v);
        }
    }
    Bisection { a, b, cut }
}

fn cut_size(adj: &[Vec<usize>], in_b: &[bool]) -> usize {
    adj.iter().enumerate().map(|(i, nb)| nb.iter().filter(|&&j| j > i && in_b[i] != in_b[j]).count()).sum()
}

fn kl_refine(adj: &[Vec<usize>], in_b: &mut [bool]) {
    let n = adj.len();
    for _ in 0..KL_MAX_PASSES {
        // d[v] = external - internal
        let mut d: Vec<i64> =
            (0..n).map(|v| adj[v].iter().map(|&w| if in_b[w] != in_b[v] { 1 } else { -1 }).sum()).collect();
        let mut locked = vec![false; n];
        let mut swaps = Vec::new();
        let mut gains = Vec::new();
        loop {
            let mut pick: Option<(i64, usize, usize)> = None;
            for a in (0..n).filter(|&a| !locked[a] && !in_b[a]) {
                for b in (0..n).filter(|&b| !locked[b] && in_b[b]) {
                    let w = if adj[a].contains(&b) { 2 } else { 0 };
                    let gain = d[a] + d[b] - w;
                    if pick.map_or(true, |(g, _, _)| gain > g) {
                        pick = Some((gain, a, b));
                    }
                }
            }
            let Some((gain, a, b)) = pick else { break };
            locked[a] = true;
            locked[b] = true;
            in_b[a] = true;
            in_b[b] = false;
            for x in [a, b] {
                for &w in &adj[x] {
                    d[w] = adj[w].iter().map(|&u| if in_b[u] != in_b[w] { 1 } else { -1 }).sum();
                }
            }
            swaps.push((a, b));
            gains.push(gain);
        }
        let mut best_k = 0;
        let mut best_sum = 0;
        let mut sum = 0;
        for (k, g) in gains.iter().enumerate() {
            sum += g;
            if sum > best_sum {
                best_sum = sum;
                best_k = k + 1;
            }
        }
        for &(a, b) in swaps[best_k..].iter().rev() {
            in_b[a] = false;
            in_b[b] = true;
        }
        if best_sum <= 0 {
            break;
        }
    }
}

/// Minimum vertex cover of a bipartite edge set (König).
fn bipartite_cover(edges: &[(Vertex, Vertex)]) -> BTreeSet<Vertex> {
    let mut nb: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for &(a, b) in edges {
        nb.entry(a).or_default().push(b);
    }
    let mut mate_b: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    let mut mate_a: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    fn augment(
        a: Vertex,
        nb: &BTreeMap<Vertex, Vec<Vertex>>,
        seen: &mut BTreeSet<Vertex>,
        mate_a: &mut BTreeMap<Vertex, Vertex>,
        mate_b: &mut BTreeMap<Vertex, Vertex>,
    ) -> bool {
        for &b in &nb[&a] {
            if seen.insert(b) {
                let free = match mate_b.get(&b).copied() {
                    None => true,
                    Some(a2) => augment(a2, nb, seen, mate_a, mate_b),
                };
                if free {
                    mate_b.insert(b, a);
                    mate_a.insert(a, b);
                    return true;
                }
            }
        }
        false
    }
    for &a in nb.keys() {
        augment(a, &nb, &mut BTreeSet::new(), &mut mate_a, &mut mate_b);
    }
    // alternating reachability from unmatched A-vertices
    let mut za = BTreeSet::new();
    let mut zb = BTreeSet::new();
    let mut queue: VecDeque<Vertex> = nb.keys().copied().filter(|a| !mate_a.contains_key(a)).collect();
    za.extend(queue.iter().copied());
    while let Some(a) = queue.pop_front() {
        for &b in &nb[&a] {
            if mate_a.get(&a) != Some(&b) && zb.insert(b) {
                if let Some(&a2) = mate_b.get(&b) {
                    if za.insert(a2) {
                        queue.push_back(a2);
                    }
                }
            }
        }
    }
    nb.keys().copied().filter(|a| !za.contains(a)).chain(zb).collect()
}

pub fn separate_cubic(g: &Graph) -> Separation {
    separate_cubic_seeded(g, 0)
}

/// Bisection, then a minimum vertex cover of the cut edges as S, then
/// size-preserving drags that pull max(|L|,|R|) down towards ⌈(n−|S|)/2⌉.
pub fn separate_cubic_seeded(g: &Graph, seed: u64) -> Separation {
    if g.is_empty() {
        return Separation::default();
    }
    let bis = bisect_heuristic(g, seed);
    let cut: Vec<(Vertex, Vertex)> = g
        .edges()
        .into_iter()
        .filter_map(|(u, v)| match (bis.a.contains(&u), bis.a.contains(&v)) {
            (true, false) => Some((u, v)),
            (false, true) => Some((v, u)),
            _ => None,
        })
        .collect();
    let sep = bipartite_cover(&cut);
    let left: BTreeSet<Vertex> = bis.a.difference(&sep).copied().collect();
    let right: BTreeSet<Vertex> = bis.b.difference(&sep).copied().collect();
    let mut s = Separation { left, sep, right };
    rebalance(g, &mut s);
    debug_assert!(verify_separation(g, &s));
    s
}

fn rebalance(g: &Graph, s: &mut Separation) {
    let n = g.num_vertices();
    for _ in 0..4 * n + 4 {
        let cap = (n - s.sep.len() + 1) / 2;
        let (big, small) =
            if s.left.len() >= s.right.len() { (Side::Left, Side::Right) } else { (Side::Right, Side::Left) };
        if s.part(big).len() <= cap {
            return;
        }
        let count_in = |v: Vertex, side: Side| g.neighbors(v).iter().filter(|w| s.part(side).contains(w)).count();
        if let Some(&v) = s.sep.iter().find(|&&v| count_in(v, big) == 0) {
            s.move_to(v, small);
            continue;
        }
        let one = s.sep.iter().copied().find(|&v| count_in(v, big) == 1);
        match one {
            Some(v) => {
                let l = *g.neighbors(v).iter().find(|w| s.part(big).contains(w)).unwrap();
                s.move_to(l, Side::Sep);
                s.move_to(v, small);
            }
            None => return,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PathDecomposition {
    pub bags: Vec<BTreeSet<Vertex>>,
}

impl PathDecomposition {
    pub fn width(&self) -> usize {
        self.bags.iter().map(BTreeSet::len).max().unwrap_or(0).saturating_sub(1)
    }

    pub fn is_valid_for(&self, g: &Graph) -> bool {
        let mut first: BTreeMap<Vertex, usize> = BTreeMap::new();
        let mut last: BTreeMap<Vertex, usize> = BTreeMap::new();
        let mut count: BTreeMap<Vertex, usize> = BTreeMap::new();
        for (i, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if !g.has_vertex(v) {
                    return false;
                }
                first.entry(v).or_insert(i);
                last.insert(v, i);
                *count.entry(v).or_default() += 1;
            }
        }
        let contiguous = g.vertices().all(|v| match (first.get(&v), last.get(&v)) {
            (Some(f), Some(l)) => count[&v] == l - f + 1,
            _ => false,
        });
        contiguous && g.edges().iter().all(|&(u, v)| self.bags.iter().any(|b| b.contains(&u) && b.contains(&v)))
    }

    /// Consecutive bags differ by exactly one vertex.
    pub fn is_nice(&self) -> bool {
        self.bags.windows(2).all(|w| w[0].symmetric_difference(&w[1]).count() == 1)
    }
}

/// Greedy vertex order minimizing the boundary of the placed prefix; every
/// start vertex is tried for small graphs.
pub fn greedy_order(g: &Graph) -> Vec<Vertex> {
    let verts: Vec<Vertex> = g.vertices().collect();
    let starts: Vec<Vertex> = if verts.len() <= 64 {
        verts.clone()
    } else {
        let mut by_deg = verts.clone();
        by_deg.sort_by_key(|&v| (g.degree(v), v));
        by_deg.truncate(8);
        by_deg
    };
    let mut best: Option<(usize, Vec<Vertex>)> = None;
    for start in starts {
        let (w, order) = greedy_from(g, start);
        if best.as_ref().map_or(true, |(bw, _)| w < *bw) {
            best = Some((w, order));
        }
    }
    best.map(|(_, o)| o).unwrap_or_default()
}

fn greedy_from(g: &Graph, start: Vertex) -> (usize, Vec<Vertex>) {
    let mut placed = BTreeSet::new();
    // for placed vertices: number of unplaced neighbors
    let mut outside: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut boundary = 0usize;
    let mut width = 0usize;
    let mut order = Vec::new();
    let mut next = Some(start);
    while let Some(v) = next {
        // bag at introduction = boundary ∪ {v}
        width = width.max(boundary);
        let out_v = g.neighbors(v).iter().filter(|w| !placed.contains(*w)).count();
        for &w in g.neighbors(v) {
            if let Some(c) = outside.get_mut(&w) {
                *c -= 1;
                if *c == 0 {
                    boundary -= 1;
                }
            }
        }
        if out_v > 0 {
            boundary += 1;
        }
        outside.insert(v, out_v);
        placed.insert(v);
        order.push(v);
        next = None;
        let mut key: Option<(isize, isize, Vertex)> = None;
        for u in g.vertices().filter(|u| !placed.contains(u)) {
            let out_u = g.neighbors(u).iter().filter(|w| !placed.contains(*w)).count();
            let leaving = g.neighbors(u).iter().filter(|w| outside.get(*w) == Some(&1)).count();
            let after = boundary as isize + isize::from(out_u > 0) - leaving as isize;
            let inside = g.neighbors(u).iter().filter(|w| placed.contains(*w)).count() as isize;
            let k = (after, -inside, u);
            if key.map_or(true, |best| k < best) {
                key = Some(k);
            }
        }
        if let Some((_, _, u)) = key {
            next = Some(u);
        }
    }
    (width, order)
}

/// Introduce vertices in greedy order, forgetting each vertex as soon as all
/// its neighbors have been introduced.
pub fn nice_path_decomposition(g: &Graph) -> PathDecomposition {
    let order = greedy_order(g);
    let mut introduced = BTreeSet::new();
    let mut bag: BTreeSet<Vertex> = BTreeSet::new();
    let mut bags = Vec::new();
    for v in order {
        introduced.insert(v);
        bag.insert(v);
        bags.push(bag.clone());
        let done: Vec<Vertex> =
            bag.iter().copied().filter(|&u| g.neighbors(u).iter().all(|w| introduced.contains(w))).collect();
        for u in done {
            bag.remove(&u);
            bags.push(bag.clone());
        }
    }
    if bags.last().is_some_and(BTreeSet::is_empty) {
        bags.pop();
    }
    PathDecomposition { bags }
}

/// Sweep the bags of a nice path decomposition: bag i yields
/// L = (bags before i) \ B_i, S = B_i, R = the rest. The first bag with
/// |μ(L) − μ(R)| ≤ cap wins; otherwise the bag with least imbalance.
/// L/R are returned as swept, the caller orients them.
pub fn separate_balanced_by_measure(
    g: &Graph,
    weight: &dyn Fn(Vertex) -> BigRational,
    cap: &BigRational,
) -> Separation {
    if g.is_empty() {
        return Separation::default();
    }
    let pd = nice_path_decomposition(g);
    let w: BTreeMap<Vertex, BigRational> = g.vertices().map(|v| (v, weight(v))).collect();
    let mut seen: BTreeSet<Vertex> = BTreeSet::new();
    let mut mu_l = BigRational::zero();
    let mut mu_r: BigRational = w.values().sum();
    let mut fallback: Option<(BigRational, usize)> = None;
    let mut left_of: Vec<BTreeSet<Vertex>> = Vec::new();
    let mut prev: BTreeSet<Vertex> = BTreeSet::new();
    for (i, bag) in pd.bags.iter().enumerate() {
        for v in bag.difference(&prev) {
            if seen.insert(*v) {
                mu_r -= &w[v];
            }
        }
        for v in prev.difference(bag) {
            mu_l += &w[v];
        }
        let left: BTreeSet<Vertex> = seen.difference(bag).copied().collect();
        let diff = (&mu_l - &mu_r).abs();
        if diff <= *cap {
            let right = g.vertices().filter(|v| !seen.contains(v)).collect();
            return Separation { left, sep: bag.clone(), right };
        }
        if fallback.as_ref().map_or(true, |(d, _)| diff < *d) {
            fallback = Some((diff, i));
        }
        left_of.push(left);
        prev = bag.clone();
    }
    let (_, i) = fallback.unwrap();
    let sep = pd.bags[i].clone();
    let left = left_of[i].clone();
    let right = g.vertices().filter(|v| !left.contains(v) && !sep.contains(v)).collect();
    Separation { left, sep, right }
}

//! Pivot selection on a separated cubic graph, shared by the Max 2-CSP
//! solver and the dominating-set counter.

use crate::graph::{Graph, MultiGraph, Vertex};
use crate::separator::{Separation, Side};

/// Read-only degree/neighbor access; neighbors are a multiset so that the
/// cubic structure (loops, parallel edges) can be inspected directly.
pub trait CubicView {
    fn neighbor_list(&self, v: Vertex) -> Vec<Vertex>;
    fn vertex_degree(&self, v: Vertex) -> usize;
}

impl CubicView for Graph {
    fn neighbor_list(&self, v: Vertex) -> Vec<Vertex> {
        self.neighbors(v).to_vec()
    }
    fn vertex_degree(&self, v: Vertex) -> usize {
        self.degree(v)
    }
}

impl CubicView for MultiGraph {
    fn neighbor_list(&self, v: Vertex) -> Vec<Vertex> {
        self.neighbor_multiset(v)
    }
    fn vertex_degree(&self, v: Vertex) -> usize {
        self.degree(v)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotAction {
    /// S is empty; the caller must compute a new separation.
    Separate,
    /// Reduction II on a separator vertex of degree ≤ 2; `moved` is the
    /// right neighbor pulled into S when the two neighbors lie in L and R.
    ReduceInS {
        s: Vertex,
        moved: Option<Vertex>,
    },
    DragRight(Vertex),
    /// With `swap`, L and R are exchanged after the move (|L₃| = |R₃| case).
    DragLeft {
        s: Vertex,
        swap: bool,
    },
    /// s → L, r → S.
    Rotate {
        s: Vertex,
        r: Vertex,
    },
    Branch(Vertex),
}

/// Number of degree-3 vertices on `side`.
pub fn count3<G: CubicView>(g: &G, sep: &Separation, side: Side) -> usize {
    sep.part(side).iter().filter(|&&v| g.vertex_degree(v) == 3).count()
}

/// Neighbor counts (L, S, R) of `v`, with multiplicity.
pub fn side_counts<G: CubicView>(g: &G, sep: &Separation, v: Vertex) -> [usize; 3] {
    let mut c = [0; 3];
    for w in g.neighbor_list(v) {
        match sep.side(w) {
            Some(Side::Left) => c[0] += 1,
            Some(Side::Sep) => c[1] += 1,
            Some(Side::Right) => c[2] += 1,
            None => {}
        }
    }
    c
}

/// First applicable case, smallest separator vertex within a case. Assumes
/// |L₃| ≤ |R₃|.
pub fn select_pivot<G: CubicView>(g: &G, sep: &Separation) -> PivotAction {
    if sep.sep.is_empty() {
        return PivotAction::Separate;
    }
    let counts: Vec<(Vertex, [usize; 3])> = sep.sep.iter().map(|&s| (s, side_counts(g, sep, s))).collect();
    if let Some(&s) = sep.sep.iter().find(|&&s| g.vertex_degree(s) <= 2) {
        let nb = g.neighbor_list(s);
        let sides: Vec<Option<Side>> = nb.iter().map(|&w| sep.side(w)).collect();
        let moved = if sides.contains(&Some(Side::Left)) {
            nb.iter().copied().find(|&w| sep.side(w) == Some(Side::Right))
        } else {
            None
        };
        return PivotAction::ReduceInS { s, moved };
    }
    if let Some(&(s, _)) = counts.iter().find(|(_, c)| c[0] == 0) {
        return PivotAction::DragRight(s);
    }
    if let Some(&(s, _)) = counts.iter().find(|(_, c)| c[2] == 0) {
        let swap = count3(g, sep, Side::Left) == count3(g, sep, Side::Right);
        return PivotAction::DragLeft { s, swap };
    }
    if let Some(&(s, _)) = counts.iter().find(|(_, c)| *c == [1, 1, 1]) {
        return PivotAction::Branch(s);
    }
    if let Some(&(s, _)) = counts.iter().find(|(_, c)| *c == [2, 0, 1]) {
        let l3 = count3(g, sep, Side::Left);
        let r3 = count3(g, sep, Side::Right);
        if r3 >= l3 + 2 {
            let r = g.neighbor_list(s).into_iter().find(|&w| sep.side(w) == Some(Side::Right)).unwrap();
            return PivotAction::Rotate { s, r };
        }
        return PivotAction::Branch(s);
    }
    let (s, _) = counts[0];
    PivotAction::Branch(s)
}

/// Applies a separator-only action (drag / rotate) to `sep`.
pub fn apply_drag(sep: &mut Separation, action: PivotAction) {
    match action {
        PivotAction::DragRight(s) => sep.move_to(s, Side::Right),
        PivotAction::DragLeft { s, swap } => {
            sep.move_to(s, Side::Left);
            if swap {
                sep.swap_sides();
            }
        }
        PivotAction::Rotate { s, r } => {
            sep.move_to(s, Side::Left);
            sep.move_to(r, Side::Sep);
        }
        _ => {}
    }
}

//! Transformations of graphs, signed graphs and grafts.
//!
//! Vertex naming: a Whitney-flip keeps every vertex id and swaps the two
//! boundary ids on the edges of the flipped side only, so a flip is an
//! involution under exact equality. Splitting a vertex `v` keeps `v` for the
//! side outside `α` and creates a fresh id for the `α` side.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::edgeset::EdgeSet;
use crate::error::{pre, Error, Result};
use crate::graph::{components_and_blocks, Edge, Graft, Graph, SignedGraph, Vertex, VertexSet};

/// An ordered sequence of Whitney-flips.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct WSequence {
    pub steps: Vec<EdgeSet>,
}

impl WSequence {
    pub fn new(steps: Vec<EdgeSet>) -> Self {
        WSequence { steps }
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn then(mut self, other: &WSequence) -> Self {
        self.steps.extend(other.steps.iter().cloned());
        self
    }

    pub fn reversed(&self) -> Self {
        WSequence { steps: self.steps.iter().rev().cloned().collect() }
    }
}

fn two_boundary(g: &Graph, x: &EdgeSet) -> Result<(Vertex, Vertex)> {
    let b = g.boundary(x)?;
    if b.len() != 2 {
        return Err(Error::BoundarySize { expected: 2, found: b.len() });
    }
    let mut it = b.into_iter();
    Ok((it.next().unwrap(), it.next().unwrap()))
}

/// Re-glues `G[X]` with its two boundary vertices exchanged.
pub fn whitney_flip(g: &Graph, x: &EdgeSet) -> Result<Graph> {
    let (u1, u2) = two_boundary(g, x)?;
    let swap = |v: Vertex| {
        if v == u1 {
            u2
        } else if v == u2 {
            u1
        } else {
            v
        }
    };
    let mut out = g.clone();
    for e in x.iter() {
        let (a, b) = g.ends(e).unwrap();
        out.set_ends(e, swap(a), swap(b));
    }
    Ok(out)
}

/// Identifies `v2` into `v1`; they must lie in different components.
pub fn whitney_glue(g: &Graph, v1: Vertex, v2: Vertex) -> Result<Graph> {
    g.check_vertices([&v1, &v2])?;
    let comps = g.vertex_components();
    if comps.iter().any(|c| c.contains(&v1) && c.contains(&v2)) {
        return Err(Error::Precondition(format!("{v1} and {v2} lie in the same component")));
    }
    g.identify(v1, v2)
}

/// Separates the graph into its blocks: at every vertex shared by several
/// blocks (loops included), the first block keeps the id and every other
/// block receives a fresh copy of the vertex.
pub fn whitney_split_blocks(g: &Graph) -> Graph {
    let mut out = g.clone();
    let mut next = g.fresh_vertex();
    for comp in components_and_blocks(g) {
        let mut seen: BTreeSet<Vertex> = BTreeSet::new();
        for block in &comp.blocks {
            let mut rename: BTreeMap<Vertex, Vertex> = BTreeMap::new();
            for v in g.vertices_of(block) {
                if !seen.insert(v) {
                    rename.insert(v, next);
                    next += 1;
                }
            }
            if rename.is_empty() {
                continue;
            }
            for e in block.iter() {
                let (a, b) = g.ends(e).unwrap();
                let f = |v: Vertex| *rename.get(&v).unwrap_or(&v);
                out.set_ends(e, f(a), f(b));
            }
        }
    }
    out
}

/// Performs the flips in order, validating each boundary when reached.
pub fn apply_wsequence(g: &Graph, s: &WSequence) -> Result<Graph> {
    let mut h = g.clone();
    for (index, x) in s.steps.iter().enumerate() {
        h = whitney_flip(&h, x).map_err(|e| Error::InvalidStep { index, reason: e.to_string() })?;
    }
    Ok(h)
}

/// Whether `x` and `y` cross inside the ground set `universe`.
pub fn crosses(x: &EdgeSet, y: &EdgeSet, universe: &EdgeSet) -> bool {
    let xc = universe.difference(x);
    let yc = universe.difference(y);
    !x.intersection(y).is_empty()
        && !x.difference(y).is_empty()
        && !y.difference(x).is_empty()
        && !xc.intersection(&yc).is_empty()
}

pub fn is_non_crossing(sets: &[EdgeSet], universe: &EdgeSet) -> bool {
    sets.iter().enumerate().all(|(i, x)| sets[i + 1..].iter().all(|y| !crosses(x, y, universe)))
}

/// `Σ Δ δ(U)`.
pub fn resign(sg: &SignedGraph, u: &VertexSet) -> Result<SignedGraph> {
    let cut = sg.graph.cut(u)?;
    Ok(SignedGraph { graph: sg.graph.clone(), signature: sg.signature.sym_diff(&cut) })
}

/// A vertex set `U ⊆ V(X)` with `(Σ Δ δ(U)) ∩ X = ∅`, if `(G[X], Σ ∩ X)`
/// is bipartite. Each component's smallest vertex stays outside `U`.
pub fn balancing_set(g: &Graph, x: &EdgeSet, sigma: &EdgeSet) -> Option<VertexSet> {
    let mut adj: BTreeMap<Vertex, Vec<(Vertex, bool)>> = BTreeMap::new();
    for e in x.iter() {
        let (a, b) = g.ends(e)?;
        let odd = sigma.contains(e);
        if a == b {
            if odd {
                return None;
            }
            continue;
        }
        adj.entry(a).or_default().push((b, odd));
        adj.entry(b).or_default().push((a, odd));
    }
    let mut side: BTreeMap<Vertex, bool> = BTreeMap::new();
    for &r in adj.keys() {
        if side.contains_key(&r) {
            continue;
        }
        side.insert(r, false);
        let mut queue = VecDeque::from([r]);
        while let Some(v) = queue.pop_front() {
            let sv = side[&v];
            for &(w, odd) in &adj[&v] {
                match side.get(&w) {
                    Some(&sw) if sw != sv ^ odd => return None,
                    Some(_) => {}
                    None => {
                        side.insert(w, sv ^ odd);
                        queue.push_back(w);
                    }
                }
            }
        }
    }
    Some(side.into_iter().filter(|&(_, s)| s).map(|(v, _)| v).collect())
}

/// Lovász-flip at a blocking pair `v1, v2` (odd edges in signature position).
pub fn lovasz_flip(sg: &SignedGraph, v1: Vertex, v2: Vertex) -> Result<SignedGraph> {
    let g = &sg.graph;
    g.check_vertices([&v1, &v2])?;
    pre(v1 != v2, "Lovász-flip needs two distinct vertices")?;
    let allowed = g.star(v1).union(&g.star(v2)).union(&g.loops());
    pre(sg.signature.is_subset(&allowed), "signature not contained in δ(v1) ∪ δ(v2) ∪ loops")?;
    let mut out = g.clone();
    for e in sg.signature.iter() {
        let (a, b) = g.ends(e).unwrap();
        let (na, nb) = if a == b {
            (v1, v2)
        } else if (a, b) == (v1.min(v2), v1.max(v2)) {
            (v1, v1)
        } else if a == v1 || b == v1 {
            let y = if a == v1 { b } else { a };
            (v2, y)
        } else {
            let y = if a == v2 { b } else { a };
            (v1, y)
        };
        out.set_ends(e, na, nb);
    }
    Ok(SignedGraph { graph: out, signature: sg.signature.clone() })
}

/// Result of splitting a vertex: `v1` carries `α`, `v2` keeps the old id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub graph: Graph,
    pub v1: Vertex,
    pub v2: Vertex,
}

pub fn split_vertex(g: &Graph, v: Vertex, alpha: &EdgeSet) -> Result<Split> {
    g.check_vertex(v)?;
    g.check_edges(alpha)?;
    let star = g.star(v);
    pre(alpha.is_subset(&star.union(&g.loops())), format!("α is not within δ({v}) ∪ loops"))?;
    let v1 = g.fresh_vertex();
    let mut out = g.clone();
    out.add_vertex(v1);
    for e in alpha.iter() {
        let (a, b) = g.ends(e).unwrap();
        if a == b {
            out.set_ends(e, v1, v);
        } else {
            let y = if a == v { b } else { a };
            out.set_ends(e, v1, y);
        }
    }
    Ok(Split { graph: out, v1, v2: v })
}

/// The default `(α, β)` for unfolding `(H, Γ)` at `s, t`: Γ-edges at `s`
/// (including `(s,t)` edges and Γ-loops) form `α`, the rest of Γ forms `β`.
pub fn default_unfold_sets(sg: &SignedGraph, s: Vertex) -> (EdgeSet, EdgeSet) {
    let at_s = sg.graph.star(s).union(&sg.graph.loops());
    let alpha = sg.signature.intersection(&at_s);
    let beta = sg.signature.difference(&alpha);
    (alpha, beta)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unfolded {
    pub graft: Graft,
    pub s1: Vertex,
    pub s2: Vertex,
    pub t1: Vertex,
    pub t2: Vertex,
}

pub fn unfold(sg: &SignedGraph, s: Vertex, t: Vertex, alpha: &EdgeSet, beta: &EdgeSet) -> Result<Unfolded> {
    let h = &sg.graph;
    h.check_vertices([&s, &t])?;
    h.check_edges(alpha)?;
    h.check_edges(beta)?;
    pre(s != t, "unfolding needs distinct s and t")?;
    pre(alpha.sym_diff(beta) == sg.signature, "α Δ β must equal Γ")?;
    let loops = h.loops();
    pre(alpha.is_subset(&h.star(s).union(&loops)), "α not within δ(s) ∪ loops")?;
    pre(beta.is_subset(&h.star(t).union(&loops)), "β not within δ(t) ∪ loops")?;
    pre(alpha.intersection(beta).is_disjoint(&loops), "α ∩ β ∩ loops must be empty")?;
    let a = split_vertex(h, s, alpha)?;
    let b = split_vertex(&a.graph, t, beta)?;
    let terminals: VertexSet = [a.v1, a.v2, b.v1, b.v2].into();
    Ok(Unfolded { graft: Graft::new(b.graph, terminals)?, s1: a.v1, s2: a.v2, t1: b.v1, t2: b.v2 })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Folded {
    pub signed: SignedGraph,
    /// Vertex that `s1, s2` became.
    pub s: Vertex,
    /// Vertex that `t1, t2` became.
    pub t: Vertex,
    /// `δ(s1)` and `δ(t1)` in the graft, before identification.
    pub alpha: EdgeSet,
    pub beta: EdgeSet,
}

/// Identifies `s1` into `s2` and `t1` into `t2`; `Γ = δ(s1) Δ δ(t1)`.
pub fn fold(gr: &Graft, pairing: ((Vertex, Vertex), (Vertex, Vertex))) -> Result<Folded> {
    let ((s1, s2), (t1, t2)) = pairing;
    let pair: VertexSet = [s1, s2, t1, t2].into();
    pre(pair.len() == 4 && pair == gr.terminals, "pairing must partition the four terminals")?;
    let g = &gr.graph;
    let alpha = g.star(s1);
    let beta = g.star(t1);
    let sigma = alpha.sym_diff(&beta);
    let h = g.identify(s2, s1)?.identify(t2, t1)?;
    Ok(Folded { signed: SignedGraph { graph: h, signature: sigma }, s: s2, t: t2, alpha, beta })
}

/// Result of `a ⊕ b`; `b`'s non-terminal vertices are renamed to fresh ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraftSum {
    pub graft: Graft,
    pub b_vertex_map: BTreeMap<Vertex, Vertex>,
}

/// Identifies the smaller terminal of `a` with the smaller terminal of `b`
/// and the larger with the larger; `flipped` pairs them the other way.
pub fn graft_sum(a: &Graft, b: &Graft, flipped: bool) -> Result<GraftSum> {
    for gr in [a, b] {
        if gr.terminals.len() != 2 {
            return Err(Error::Precondition(format!("graft sum needs two terminals, found {}", gr.terminals.len())));
        }
    }
    if let Some(e) = a.graph.edge_set().intersection(&b.graph.edge_set()).first() {
        return Err(Error::DuplicateEdge(e));
    }
    let ta: Vec<Vertex> = a.terminals.iter().copied().collect();
    let tb: Vec<Vertex> = b.terminals.iter().copied().collect();
    let mut map = BTreeMap::new();
    map.insert(tb[0], if flipped { ta[1] } else { ta[0] });
    map.insert(tb[1], if flipped { ta[0] } else { ta[1] });
    let mut next = a.graph.fresh_vertex();
    for &v in b.graph.vertices() {
        map.entry(v).or_insert_with(|| {
            next += 1;
            next - 1
        });
    }
    let mut g = a.graph.clone();
    for &v in map.values() {
        g.add_vertex(v);
    }
    for (e, x, y) in b.graph.edges() {
        g.add_edge(e, map[&x], map[&y])?;
    }
    Ok(GraftSum { graft: Graft::new(g, a.terminals.clone())?, b_vertex_map: map })
}

/// The three triangle vertices: `v12` meets `e1,e2`, `v13` meets `e1,e3`,
/// `v23` meets `e2,e3`.
pub fn triangle_vertices(g: &Graph, tri: [Edge; 3]) -> Result<[Vertex; 3]> {
    let ends: Vec<(Vertex, Vertex)> =
        tri.iter().map(|&e| g.ends(e).ok_or(Error::UnknownEdge(e))).collect::<Result<_>>()?;
    let common = |i: usize, j: usize| -> Option<Vertex> {
        let (a, b) = ends[i];
        let (c, d) = ends[j];
        if a == b || c == d {
            return None;
        }
        [a, b].into_iter().find(|&x| x == c || x == d)
    };
    match (common(0, 1), common(0, 2), common(1, 2)) {
        (Some(x), Some(y), Some(z)) if x != y && y != z && x != z => Ok([x, y, z]),
        _ => Err(Error::Precondition(format!("{tri:?} is not a triangle"))),
    }
}

/// Resigns so that the triangle avoids the signature (it must be even).
fn clear_triangle(sg: &SignedGraph, tri: [Edge; 3], vs: [Vertex; 3]) -> Result<SignedGraph> {
    let odd: Vec<usize> = (0..3).filter(|&i| sg.signature.contains(tri[i])).collect();
    match odd.as_slice() {
        [] => Ok(sg.clone()),
        [i, j] => {
            // Shared vertex of e_i and e_j.
            let v = match (i, j) {
                (0, 1) => vs[0],
                (0, 2) => vs[1],
                _ => vs[2],
            };
            resign(sg, &[v].into())
        }
        _ => Err(Error::Precondition("triangle is not even".into())),
    }
}

/// Replaces a common even triangle `{e1,e2,e3}` of both signed graphs by `h`,
/// attaching `attach[0]`, `attach[1]`, `attach[2]` of `h` at `v12, v13, v23`.
/// Edges of `h` are even; its other vertices get fresh ids.
pub fn delta_substitute(
    pair: (&SignedGraph, &SignedGraph),
    triangle: [Edge; 3],
    h: &Graph,
    attach: [Vertex; 3],
) -> Result<(SignedGraph, SignedGraph)> {
    h.check_vertices(&attach)?;
    pre(attach[0] != attach[1] && attach[1] != attach[2] && attach[0] != attach[2], "attach map must be injective")?;
    let tri: EdgeSet = triangle.iter().collect();
    let mut out = Vec::new();
    for sg in [pair.0, pair.1] {
        let vs = triangle_vertices(&sg.graph, triangle)?;
        let cleared = clear_triangle(sg, triangle, vs)?;
        let mut g = cleared.graph.delete_edges(&tri);
        let mut map: BTreeMap<Vertex, Vertex> = attach.iter().copied().zip(vs).collect();
        let mut next = g.fresh_vertex();
        for &v in h.vertices() {
            map.entry(v).or_insert_with(|| {
                next += 1;
                next - 1
            });
        }
        for &v in map.values() {
            g.add_vertex(v);
        }
        for (e, a, b) in h.edges() {
            g.add_edge(e, map[&a], map[&b])?;
        }
        let signature = cleared.signature.difference(&tri);
        out.push(SignedGraph { graph: g, signature });
    }
    let b = out.pop().unwrap();
    let a = out.pop().unwrap();
    Ok((a, b))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaReduction {
    pub first: SignedGraph,
    pub second: SignedGraph,
    /// Boundary of `Y` in the first graph, sorted, and its image in the second.
    pub boundary: ([Vertex; 3], [Vertex; 3]),
    /// New edge ids for the pairs (b0,b1), (b0,b2), (b1,b2); `None` when the
    /// edge was omitted to avoid a same-parity parallel pair.
    pub triangle: [Option<Edge>; 3],
}

/// Replaces a common bipartite piece `Y` with a three-vertex boundary by a
/// triangle on its boundary.
pub fn delta_reduce(pair: (&SignedGraph, &SignedGraph), y: &EdgeSet) -> Result<DeltaReduction> {
    let (s1, s2) = pair;
    s1.graph.check_edges(y)?;
    s2.graph.check_edges(y)?;
    let (g1y, g2y) = (s1.graph.subgraph(y), s2.graph.subgraph(y));
    let corr =
        g1y.vertex_correspondence(&g2y, false).ok_or_else(|| Error::Precondition("G1[Y] and G2[Y] differ".into()))?;
    let b1 = s1.graph.boundary(y)?;
    let b2 = s2.graph.boundary(y)?;
    pre(b1.len() == 3 && b2.len() == 3, "Y must have a three-vertex boundary in both graphs")?;
    let b1v: Vec<Vertex> = b1.iter().copied().collect();
    let b2v: Vec<Vertex> = b1v.iter().map(|v| corr[v]).collect();
    pre(b2v.iter().all(|v| b2.contains(v)), "boundaries of Y do not correspond")?;
    let mut cleared = Vec::new();
    for sg in [s1, s2] {
        let u = balancing_set(&sg.graph, y, &sg.signature)
            .ok_or_else(|| Error::Precondition("Y is not bipartite".into()))?;
        cleared.push(resign(sg, &u)?);
    }
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut next = s1.graph.fresh_edge().max(s2.graph.fresh_edge());
    let mut triangle = [None; 3];
    for (k, &(i, j)) in pairs.iter().enumerate() {
        let clash = [(&cleared[0], &b1v), (&cleared[1], &b2v)].iter().any(|(sg, bv)| {
            sg.graph.edges().any(|(e, a, b)| {
                !y.contains(e) && !sg.signature.contains(e) && (a, b) == (bv[i].min(bv[j]), bv[i].max(bv[j]))
            })
        });
        if !clash {
            triangle[k] = Some(next);
            next += 1;
        }
    }
    let mut out = Vec::new();
    for (sg, bv) in [(&cleared[0], &b1v), (&cleared[1], &b2v)] {
        let interior: VertexSet = sg.graph.interior(y)?;
        let mut g = sg.graph.delete_edges(y);
        for v in interior {
            g.remove_vertex(v);
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if let Some(e) = triangle[k] {
                g.add_edge(e, bv[i], bv[j])?;
            }
        }
        out.push(SignedGraph { graph: g, signature: sg.signature.difference(y) });
    }
    let second = out.pop().unwrap();
    let first = out.pop().unwrap();
    Ok(DeltaReduction { first, second, boundary: ([b1v[0], b1v[1], b1v[2]], [b2v[0], b2v[1], b2v[2]]), triangle })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eset;
    use crate::gf2::{cycle_space, even_cut_space, even_cycle_space};
    use rand::{Rng, SeedableRng};

    fn g(edges: &[(u32, u32, u32)]) -> Graph {
        Graph::from_edges(edges).unwrap()
    }

    fn c(n: u32) -> Graph {
        g(&(0..n).map(|i| (i, i, (i + 1) % n)).collect::<Vec<_>>())
    }

    fn same_cycles(a: &Graph, b: &Graph) -> bool {
        cycle_space(a).equals(&cycle_space(b)).unwrap()
    }

    fn same_even(a: &SignedGraph, b: &SignedGraph) -> bool {
        even_cycle_space(a).equals(&even_cycle_space(b)).unwrap()
    }

    #[test]
    fn flip_examples() {
        let c4 = c(4);
        let f = whitney_flip(&c4, &eset![0, 1]).unwrap();
        assert_ne!(f, c4);
        assert!(same_cycles(&c4, &f));
        assert_eq!(whitney_flip(&f, &eset![0, 1]).unwrap(), c4);
        let theta = g(&[(0, 1, 2), (1, 1, 2), (2, 1, 2)]);
        let f = whitney_flip(&theta, &eset![0]).unwrap();
        assert!(f.same_up_to_renaming(&theta) && same_cycles(&f, &theta));
        let k4e = g(&[(0, 1, 2), (1, 1, 3), (2, 2, 3), (3, 2, 4), (4, 3, 4)]);
        let f = whitney_flip(&k4e, &eset![3, 4]).unwrap();
        assert!(same_cycles(&f, &k4e));
        assert!(whitney_flip(&k4e, &eset![0]).is_ok());
        assert!(matches!(whitney_flip(&k4e, &eset![0, 3]), Err(Error::BoundarySize { found: 3, .. })));
    }

    #[test]
    fn glue_and_split() {
        let two = g(&[(0, 0, 1), (1, 1, 2), (2, 2, 0), (3, 5, 6), (4, 6, 7), (5, 7, 5)]);
        let glued = whitney_glue(&two, 0, 5).unwrap();
        assert!(same_cycles(&glued, &two));
        assert_eq!(cycle_space(&glued).dim(), 2);
        assert!(whitney_glue(&glued, 0, 6).is_err());
        let split = whitney_split_blocks(&glued);
        assert_eq!(split.vertex_components().len(), 2);
        assert!(same_cycles(&split, &glued));
        assert!(same_cycles(&whitney_split_blocks(&split), &split));
    }

    #[test]
    fn sequences() {
        let c6 = c(6);
        assert_eq!(apply_wsequence(&c6, &WSequence::default()).unwrap(), c6);
        let x = eset![0, 1];
        let back = apply_wsequence(&c6, &WSequence::new(vec![x.clone(), x])).unwrap();
        assert_eq!(back, c6);
        let arcs = vec![eset![0, 1], eset![3, 4], eset![2]];
        assert!(is_non_crossing(&arcs, &c6.edge_set()));
        let a = apply_wsequence(&c6, &WSequence::new(arcs.clone())).unwrap();
        let rev: Vec<EdgeSet> = arcs.iter().rev().cloned().collect();
        let b = apply_wsequence(&c6, &WSequence::new(rev)).unwrap();
        assert_eq!(a, b);
        let bad = WSequence::new(vec![eset![0], eset![0, 2]]);
        assert!(matches!(apply_wsequence(&c6, &bad), Err(Error::InvalidStep { index: 1, .. })));
    }

    #[test]
    fn resign_examples() {
        let tri = g(&[(1, 1, 2), (2, 2, 3), (3, 3, 1)]);
        let sg = SignedGraph::new(tri, eset![1]).unwrap();
        assert_eq!(resign(&sg, &VertexSet::new()).unwrap(), sg);
        let r = resign(&sg, &[2].into()).unwrap();
        assert_eq!(r.signature, eset![2]);
        assert!(same_even(&r, &sg));
        assert_eq!(resign(&r, &[2].into()).unwrap(), sg);
    }

    #[test]
    fn lovasz_examples() {
        let e = g(&[(0, 1, 2), (1, 2, 3), (2, 1, 3)]);
        let sg = SignedGraph::new(e.clone(), eset![0]).unwrap();
        let f = lovasz_flip(&sg, 1, 2).unwrap();
        assert_eq!(f.graph.ends(0), Some((1, 1)));
        let mut l = e.clone();
        l.add_edge(5, 3, 3).unwrap();
        let sg = SignedGraph::new(l, eset![5]).unwrap();
        let f = lovasz_flip(&sg, 1, 2).unwrap();
        assert_eq!(f.graph.ends(5), Some((1, 2)));
        let sg = SignedGraph::new(e, eset![0, 2]).unwrap();
        let f = lovasz_flip(&sg, 1, 2).unwrap();
        assert!(same_even(&f, &sg));
        let bad = SignedGraph::new(c(4), eset![2]).unwrap();
        assert!(lovasz_flip(&bad, 0, 1).is_err());
    }

    #[test]
    fn split_examples() {
        let star = g(&[(0, 0, 1), (1, 0, 2), (2, 0, 3)]);
        let s = split_vertex(&star, 0, &EdgeSet::new()).unwrap();
        assert_eq!(s.graph.star(s.v1), EdgeSet::new());
        assert_eq!(s.graph.star(s.v2), eset![0, 1, 2]);
        let s = split_vertex(&star, 0, &eset![1]).unwrap();
        assert_eq!(s.graph.star(s.v1), eset![1]);
        assert_eq!(s.graph.vertex_components().len(), 2);
        assert!(split_vertex(&star, 1, &eset![2]).is_err());
        // blocking vertex: split by Γ gives a graph whose cycles are the even cycles
        let h = g(&[(0, 0, 1), (1, 1, 2), (2, 2, 0), (3, 0, 3), (4, 3, 1), (5, 0, 0)]);
        let sg = SignedGraph::new(h.clone(), eset![0, 3, 5]).unwrap();
        let s = split_vertex(&h, 0, &sg.signature).unwrap();
        assert!(cycle_space(&s.graph).equals(&even_cycle_space(&sg)).unwrap());
    }

    #[test]
    fn unfold_parallel_pair() {
        let h = g(&[(1, 0, 1), (2, 0, 1)]);
        let sg = SignedGraph::new(h, eset![1]).unwrap();
        let u = unfold(&sg, 0, 1, &eset![1], &EdgeSet::new()).unwrap();
        assert_eq!(u.graft.graph.star(u.t1), EdgeSet::new());
        let ec = even_cycle_space(&sg);
        let ecut = even_cut_space(&u.graft).unwrap();
        assert!(ec.equals(&ecut.orthogonal_complement()).unwrap());
        let f = fold(&u.graft, ((u.s1, u.s2), (u.t1, u.t2))).unwrap();
        assert!(same_even(&f.signed, &sg));
    }

    #[test]
    fn fold_unfold_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(2..5);
            let mut h = Graph::new();
            for e in 0..rng.gen_range(1..8) {
                h.add_edge(e, rng.gen_range(0..n), rng.gen_range(0..n)).unwrap();
            }
            let vs: Vec<Vertex> = h.vertices().iter().copied().collect();
            if vs.len() < 2 {
                continue;
            }
            let (s, t) = (vs[0], vs[1]);
            let allowed = h.star(s).union(&h.star(t)).union(&h.loops());
            let sigma: EdgeSet = allowed.iter().filter(|_| rng.gen_bool(0.5)).collect();
            let sg = SignedGraph::new(h, sigma).unwrap();
            let (a, b) = default_unfold_sets(&sg, s);
            let u = unfold(&sg, s, t, &a, &b).unwrap();
            let ecut = even_cut_space(&u.graft).unwrap();
            assert!(even_cycle_space(&sg).equals(&ecut.orthogonal_complement()).unwrap());
            let f = fold(&u.graft, ((u.s1, u.s2), (u.t1, u.t2))).unwrap();
            assert!(same_even(&f.signed, &sg));
            assert_eq!(f.signed.signature, sg.signature);
        }
    }

    #[test]
    fn graft_sum_paths() {
        let a = Graft::new(g(&[(0, 0, 1), (1, 1, 2)]), [0, 2].into()).unwrap();
        let b = Graft::new(g(&[(5, 0, 1), (6, 1, 2)]), [0, 2].into()).unwrap();
        let s = graft_sum(&a, &b, false).unwrap();
        assert!(s.graft.graph.is_cycle(&eset![0, 1, 5, 6]).unwrap());
        assert_eq!(cycle_space(&s.graft.graph).dim(), 1);
        let f = graft_sum(&a, &b, true).unwrap();
        assert!(same_cycles(&f.graft.graph, &s.graft.graph));
        assert!(graft_sum(&a, &a, false).is_err());
        // decomposing on the common boundary gives the parts back
        let x = eset![0, 1];
        assert_eq!(s.graft.graph.boundary(&x).unwrap(), s.graft.terminals);
        assert!(s.graft.graph.subgraph(&x).same_up_to_renaming(&a.graph));
        assert!(s.graft.graph.subgraph(&eset![5, 6]).same_up_to_renaming(&b.graph));
    }

    #[test]
    fn delta_examples() {
        // K4 pair with a common even triangle; replacing it by itself.
        let k4 = g(&[(0, 1, 2), (1, 1, 3), (2, 1, 4), (3, 2, 3), (4, 2, 4), (5, 3, 4)]);
        let sg = SignedGraph::new(k4.clone(), eset![2, 4, 5]).unwrap();
        let tri = g(&[(10, 0, 1), (11, 0, 2), (12, 1, 2)]);
        // triangle {0,1,3}: v12 = 1 (e0,e1), v13 = 2 (e0,e3), v23 = 3 (e1,e3)
        let (a, b) = delta_substitute((&sg, &sg), [0, 1, 3], &tri, [0, 1, 2]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.graph.num_edges(), 6);
        // Y = an even 2-path common to both sides reduces to one triangle edge
        let y = eset![10, 11];
        let sub =
            delta_substitute((&sg, &sg), [0, 1, 3], &g(&[(10, 0, 7), (11, 7, 1), (12, 0, 2), (13, 1, 2)]), [0, 1, 2])
                .unwrap();
        assert!(same_even(&sub.0, &sub.1));
        let ybig = eset![10, 11, 12, 13];
        let r = delta_reduce((&sub.0, &sub.1), &ybig).unwrap();
        assert!(same_even(&r.first, &r.second));
        assert_eq!(r.first.graph.num_edges(), 6);
        assert!(delta_reduce((&sub.0, &sub.1), &y).is_err());
    }
}

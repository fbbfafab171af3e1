//! Sibling constructions: split and quad templates, handcuffs and the nova
//! conditions, reductions, the named twins, Shih outcomes and the
//! triangle-triad pair.

use std::collections::{BTreeMap, VecDeque};

use crate::analysis::{graphs_equivalent, same_even_cycles, shortest_odd_circuit};
use crate::edgeset::EdgeSet;
use crate::error::{pre, Error, Result};
use crate::flowers::WStar;
use crate::gf2::{cut_space, cycle_space, even_cut_space, even_cycle_space};
use crate::graph::{Edge, Graft, Graph, SignedGraph, Vertex, VertexSet};
use crate::ops::{fold, graft_sum, split_vertex, unfold, whitney_flip, WSequence};

/// Two grafts (equivalently signed graphs) on the same edges that represent
/// the same even cycle matroid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiblingPair {
    pub g1: Graph,
    pub t1: VertexSet,
    pub sigma1: EdgeSet,
    pub g2: Graph,
    pub t2: VertexSet,
    pub sigma2: EdgeSet,
}

impl SiblingPair {
    /// Pair from two grafts, signatures from the terminals.
    pub fn from_grafts(a: Graft, b: Graft) -> SiblingPair {
        let (sigma1, sigma2) = signatures_from_terminals(&a.graph, &a.terminals, &b.graph, &b.terminals);
        SiblingPair { g1: a.graph, t1: a.terminals, sigma1, g2: b.graph, t2: b.terminals, sigma2 }
    }

    pub fn signed(&self) -> (SignedGraph, SignedGraph) {
        (
            SignedGraph { graph: self.g1.clone(), signature: self.sigma1.clone() },
            SignedGraph { graph: self.g2.clone(), signature: self.sigma2.clone() },
        )
    }

    pub fn grafts(&self) -> Result<(Graft, Graft)> {
        Ok((Graft::new(self.g1.clone(), self.t1.clone())?, Graft::new(self.g2.clone(), self.t2.clone())?))
    }

    pub fn swapped(&self) -> SiblingPair {
        SiblingPair {
            g1: self.g2.clone(),
            t1: self.t2.clone(),
            sigma1: self.sigma2.clone(),
            g2: self.g1.clone(),
            t2: self.t1.clone(),
            sigma2: self.sigma1.clone(),
        }
    }

    /// Equal even-cut spaces for the terminals and equal even-cycle spaces
    /// for the signatures.
    pub fn check_spaces(&self) -> Result<()> {
        pre(self.g1.edge_set() == self.g2.edge_set(), "the graphs must share their edges")?;
        let (a, b) = self.grafts()?;
        if !even_cut_space(&a)?.equals(&even_cut_space(&b)?)? {
            return Err(Error::CheckFailed("even-cut spaces differ".into()));
        }
        let (s1, s2) = self.signed();
        if !same_even_cycles(&s1, &s2)? {
            return Err(Error::CheckFailed("even-cycle spaces differ".into()));
        }
        Ok(())
    }

    pub fn inequivalent(&self) -> Result<bool> {
        Ok(!graphs_equivalent(&self.g1, &self.g2)?)
    }

    /// Spaces agree and the graphs are inequivalent.
    pub fn check(&self) -> Result<()> {
        self.check_spaces()?;
        if !self.inequivalent()? {
            return Err(Error::NotSiblings);
        }
        Ok(())
    }
}

/// `Σ_{3-i} = δ_{G_i}(t_i)` for the smallest `t_i ∈ T_i`, or empty.
pub(crate) fn signatures_from_terminals(g1: &Graph, t1: &VertexSet, g2: &Graph, t2: &VertexSet) -> (EdgeSet, EdgeSet) {
    let sig = |g: &Graph, t: &VertexSet| t.first().map(|&v| g.star(v)).unwrap_or_default();
    (sig(g2, t2), sig(g1, t1))
}

fn check_star_subset(h: &Graph, v: Vertex, alpha: &EdgeSet, name: &str) -> Result<()> {
    h.check_vertex(v)?;
    h.check_edges(alpha)?;
    pre(alpha.is_subset(&h.star(v).union(&h.loops())), format!("{name} is not within δ({v}) ∪ loops"))
}

fn core(h: &Graph) -> Graph {
    h.delete_edges(&h.loops())
}

/// Applies the flips to the loop-free part, where loops cannot interfere
/// with boundaries.
pub fn apply_on_core(h: &Graph, s: &WSequence) -> Result<Graph> {
    let mut g = core(h);
    let loops = h.loops();
    for (index, x) in s.steps.iter().enumerate() {
        g = whitney_flip(&g, &x.difference(&loops)).map_err(|e| Error::InvalidStep { index, reason: e.to_string() })?;
    }
    Ok(g)
}

fn check_sequence(h1: &Graph, h2: &Graph, s: &WSequence) -> Result<()> {
    pre(apply_on_core(h1, s)?.same_up_to_renaming(&core(h2)), "the w-sequence does not take H1 to H2")
}

/// `(H1, v1, α1, H2, v2, α2)` with an optional w-sequence from `H1` to `H2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitTemplate {
    pub h1: Graph,
    pub v1: Vertex,
    pub alpha1: EdgeSet,
    pub h2: Graph,
    pub v2: Vertex,
    pub alpha2: EdgeSet,
    pub s: Option<WSequence>,
}

impl SplitTemplate {
    /// Every invariant except inequivalence of the arising graphs.
    pub fn validate(&self) -> Result<()> {
        pre(self.h1.edge_set() == self.h2.edge_set(), "H1 and H2 must share their edges")?;
        check_star_subset(&self.h1, self.v1, &self.alpha1, "α1")?;
        check_star_subset(&self.h2, self.v2, &self.alpha2, "α2")?;
        pre(graphs_equivalent(&self.h1, &self.h2)?, "H1 and H2 are not equivalent")?;
        if let Some(s) = &self.s {
            check_sequence(&self.h1, &self.h2, s)?;
        }
        Ok(())
    }

    /// `α1 Δ α2`, a signature of both arising signed graphs.
    pub fn signature(&self) -> EdgeSet {
        self.alpha1.sym_diff(&self.alpha2)
    }
}

/// Splits `v_i` by `α_i`; both signatures are `α1 Δ α2`.
pub fn build_split_siblings(t: &SplitTemplate) -> Result<SiblingPair> {
    t.validate()?;
    let a = split_vertex(&t.h1, t.v1, &t.alpha1)?;
    let b = split_vertex(&t.h2, t.v2, &t.alpha2)?;
    let sigma = t.signature();
    let pair = SiblingPair {
        g1: a.graph,
        t1: [a.v1, a.v2].into(),
        sigma1: sigma.clone(),
        g2: b.graph,
        t2: [b.v1, b.v2].into(),
        sigma2: sigma,
    };
    pair.check()?;
    Ok(pair)
}

pub fn split_templates_compatible(t: &SplitTemplate, u: &SplitTemplate) -> Result<bool> {
    if !graphs_equivalent(&t.h1, &u.h1)? || !graphs_equivalent(&t.h2, &u.h2)? {
        return Ok(false);
    }
    let cuts = cut_space(&t.h1);
    Ok(cuts.contains(&t.alpha1.sym_diff(&u.alpha1)) && cuts.contains(&t.alpha2.sym_diff(&u.alpha2)))
}

/// `{s1,s2}`-handcuffs: odd circuits `c1` through `s1` and `c2` through `s2`,
/// joined by the path `p` or meeting in a path (then `p` is empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Handcuffs {
    pub c1: EdgeSet,
    pub c2: EdgeSet,
    pub p: EdgeSet,
}

fn is_odd(sg: &SignedGraph, c: &EdgeSet) -> bool {
    c.intersection(&sg.signature).len() % 2 == 1
}

fn odd_circuits_through(sg: &SignedGraph, within: &EdgeSet, s: Vertex, avoid: Vertex) -> Vec<EdgeSet> {
    let g = &sg.graph;
    let usable: EdgeSet = within.iter().filter(|&e| g.ends(e).is_some_and(|(a, b)| a != avoid && b != avoid)).collect();
    g.circuits(&usable, usize::MAX).into_iter().filter(|c| g.vertices_of(c).contains(&s) && is_odd(sg, c)).collect()
}

/// Shortest path from `V(c1) − s1` to `V(c2) − s2` inside `within` whose
/// inner vertices avoid both circuits.
fn connecting_path(g: &Graph, within: &EdgeSet, c1: &EdgeSet, s1: Vertex, c2: &EdgeSet, s2: Vertex) -> Option<EdgeSet> {
    let (v1, v2) = (g.vertices_of(c1), g.vertices_of(c2));
    let mut adj: BTreeMap<Vertex, Vec<(Edge, Vertex)>> = BTreeMap::new();
    for e in within.difference(&c1.union(c2)).iter() {
        let (a, b) = g.ends(e)?;
        if a != b {
            adj.entry(a).or_default().push((e, b));
            adj.entry(b).or_default().push((e, a));
        }
    }
    let mut prev: BTreeMap<Vertex, (Vertex, Edge)> = BTreeMap::new();
    let mut seen: VertexSet = v1.iter().copied().filter(|&v| v != s1).collect();
    let mut queue: VecDeque<Vertex> = seen.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        for &(e, w) in adj.get(&v).map(|x| x.as_slice()).unwrap_or(&[]) {
            if seen.contains(&w) {
                continue;
            }
            if v2.contains(&w) {
                if w == s2 {
                    continue;
                }
                let mut p: EdgeSet = [e].into_iter().collect();
                let mut at = v;
                while let Some(&(u, f)) = prev.get(&at) {
                    p.insert(f);
                    at = u;
                }
                return Some(p);
            }
            if v1.contains(&w) || w == s1 || w == s2 {
                continue;
            }
            seen.insert(w);
            prev.insert(w, (v, e));
            queue.push_back(w);
        }
    }
    None
}

fn is_path(g: &Graph, p: &EdgeSet) -> bool {
    let vs = g.vertices_of(p);
    !p.is_empty() && vs.len() == p.len() + 1 && g.is_connected_edges(p) && vs.iter().all(|&v| g.degree_in(v, p) <= 2)
}

fn meet_in_path(g: &Graph, c1: &EdgeSet, c2: &EdgeSet) -> bool {
    let common: VertexSet = g.vertices_of(c1).intersection(&g.vertices_of(c2)).copied().collect();
    let shared = c1.intersection(c2);
    if shared.is_empty() {
        return common.len() == 1;
    }
    is_path(g, &shared) && g.vertices_of(&shared) == common
}

fn is_circuit(g: &Graph, c: &EdgeSet) -> bool {
    !c.is_empty() && g.is_connected_edges(c) && g.vertices_of(c).iter().all(|&v| g.degree_in(v, c) == 2)
}

/// Checks the handcuff conditions for a given triple.
pub fn is_handcuffs(sg: &SignedGraph, s1: Vertex, s2: Vertex, within: &EdgeSet, h: &Handcuffs) -> bool {
    let g = &sg.graph;
    let all = h.c1.union(&h.c2).union(&h.p);
    if !all.is_subset(within) || g.check_edges(&all).is_err() {
        return false;
    }
    for (c, s, avoid) in [(&h.c1, s1, s2), (&h.c2, s2, s1)] {
        let vs = g.vertices_of(c);
        if !is_circuit(g, c) || !is_odd(sg, c) || !vs.contains(&s) || vs.contains(&avoid) {
            return false;
        }
    }
    let (v1, v2) = (g.vertices_of(&h.c1), g.vertices_of(&h.c2));
    if h.p.is_empty() {
        return meet_in_path(g, &h.c1, &h.c2);
    }
    if !v1.is_disjoint(&v2) || !is_path(g, &h.p) {
        return false;
    }
    let ends: Vec<Vertex> = g.vertices_of(&h.p).into_iter().filter(|&v| g.degree_in(v, &h.p) == 1).collect();
    let on: VertexSet = g.vertices_of(&h.p).into_iter().filter(|v| v1.contains(v) || v2.contains(v)).collect();
    let ok_end = |u: Vertex, vs: &VertexSet, s: Vertex| vs.contains(&u) && u != s;
    on == ends.iter().copied().collect()
        && ((ok_end(ends[0], &v1, s1) && ok_end(ends[1], &v2, s2))
            || (ok_end(ends[1], &v1, s1) && ok_end(ends[0], &v2, s2)))
}

pub fn find_handcuffs(sg: &SignedGraph, s1: Vertex, s2: Vertex, within: &EdgeSet) -> Result<Option<Handcuffs>> {
    pre(s1 != s2, "handcuffs need distinct vertices")?;
    sg.graph.check_edges(within)?;
    let g = &sg.graph;
    let first = odd_circuits_through(sg, within, s1, s2);
    if first.is_empty() {
        return Ok(None);
    }
    let second = odd_circuits_through(sg, within, s2, s1);
    for c1 in &first {
        for c2 in &second {
            let disjoint = g.vertices_of(c1).is_disjoint(&g.vertices_of(c2));
            let found = if disjoint {
                connecting_path(g, within, c1, s1, c2, s2)
            } else if meet_in_path(g, c1, c2) {
                Some(EdgeSet::new())
            } else {
                None
            };
            if let Some(p) = found {
                return Ok(Some(Handcuffs { c1: c1.clone(), c2: c2.clone(), p }));
            }
        }
    }
    Ok(None)
}

/// A 2-separation containing handcuffs for its two boundary vertices.
pub fn is_handcuff_separation(sg: &SignedGraph, x: &EdgeSet) -> Result<bool> {
    let g = &sg.graph;
    if !g.is_k_separation(x, 2) {
        return Ok(false);
    }
    let b: Vec<Vertex> = g.boundary(x)?.into_iter().collect();
    Ok(find_handcuffs(sg, b[0], b[1], x)?.is_some())
}

/// Default bound on `|X|` for enumerating the subsets in the second nova
/// condition.
pub const NOVA_SUBSET_LIMIT: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum N2Status {
    Holds,
    /// A sub-separation without handcuffs.
    Fails(EdgeSet),
    /// A set above the enumeration bound.
    Unverified(EdgeSet),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NovaReport {
    /// The sequence is a w-star centered at `v_i` in `H_i`.
    pub n1: [bool; 2],
    /// Every sub-separation with the same boundary is a handcuff-separation.
    pub n2: [N2Status; 2],
}

impl NovaReport {
    pub fn is_nova(&self) -> bool {
        self.n1.iter().all(|&b| b) && self.n2.iter().all(|s| *s == N2Status::Holds)
    }
}

fn n2_status(h: &Graph, sigma: &EdgeSet, sets: &[EdgeSet], limit: usize) -> Result<N2Status> {
    let sg = SignedGraph { graph: h.clone(), signature: sigma.intersection(&h.edge_set()) };
    let mut unverified = None;
    for x in sets {
        let x = x.intersection(&h.edge_set());
        let b = h.boundary(&x)?;
        if b.len() != 2 {
            continue;
        }
        if x.len() > limit {
            unverified.get_or_insert(x);
            continue;
        }
        let edges = x.to_vec();
        for mask in 1u64..(1u64 << edges.len()) {
            let xp: EdgeSet = (0..edges.len()).filter(|i| mask >> i & 1 == 1).map(|i| edges[i]).collect();
            if h.boundary(&xp)? != b || !h.is_k_separation(&xp, 2) {
                continue;
            }
            if !is_handcuff_separation(&sg, &xp)? {
                return Ok(N2Status::Fails(xp));
            }
        }
    }
    Ok(unverified.map_or(N2Status::Holds, N2Status::Unverified))
}

/// Checks both nova conditions on both sides; the sequence must be given.
pub fn validate_nova(t: &SplitTemplate, limit: usize) -> Result<NovaReport> {
    t.validate()?;
    let s = t.s.as_ref().ok_or_else(|| Error::Precondition("nova check needs a w-sequence".into()))?;
    let sigma = t.signature();
    let mut n1 = [false; 2];
    let mut n2 = [N2Status::Holds, N2Status::Holds];
    for (i, (h, v)) in [(&t.h1, t.v1), (&t.h2, t.v2)].into_iter().enumerate() {
        let h = core(h);
        let sets: Vec<EdgeSet> = s.steps.iter().map(|x| x.intersection(&h.edge_set())).collect();
        n1[i] = !sets.is_empty() && WStar::new(&h, sets.clone(), v).is_ok();
        n2[i] = n2_status(&h, &sigma, &sets, limit)?;
    }
    Ok(NovaReport { n1, n2 })
}

/// The two halves of a reduced pair of split siblings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitReduction {
    pub inner: SiblingPair,
    pub outer: SiblingPair,
}

/// Splits split siblings along `X` with `B_{G1}(X) = T1`.
pub fn split_reduce(pair: &SiblingPair, x: &EdgeSet) -> Result<SplitReduction> {
    pre(pair.t1.len() == 2 && pair.t2.len() == 2, "reduction needs two terminals on each side")?;
    pair.g1.check_edges(x)?;
    let xc = pair.g1.complement(x);
    pre(!x.is_empty() && !xc.is_empty(), "X must be a nontrivial split")?;
    pre(pair.g1.boundary(x)? == pair.t1, "B_G1(X) must equal T1")?;
    if pair.g2.boundary(x)? != pair.t2 {
        return Err(Error::CheckFailed("B_G2(X) differs from T2".into()));
    }
    let piece = |g: &Graph, t: &VertexSet, y: &EdgeSet| -> Result<Graft> {
        let mut s = g.subgraph(y);
        for &v in t {
            s.add_vertex(v);
        }
        Graft::new(s, t.clone())
    };
    let half = |y: &EdgeSet| -> Result<SiblingPair> {
        let p = SiblingPair::from_grafts(piece(&pair.g1, &pair.t1, y)?, piece(&pair.g2, &pair.t2, y)?);
        p.check_spaces()?;
        Ok(p)
    };
    let out = SplitReduction { inner: half(x)?, outer: half(&xc)? };
    let sides = [
        (&out.inner.g1, &out.inner.t1, &out.outer.g1, &out.outer.t1, &pair.g1),
        (&out.inner.g2, &out.inner.t2, &out.outer.g2, &out.outer.t2, &pair.g2),
    ];
    for (ga, ta, gb, tb, whole) in sides {
        let (a, b) = (Graft::new(ga.clone(), ta.clone())?, Graft::new(gb.clone(), tb.clone())?);
        let mut restored = false;
        for flipped in [false, true] {
            let sum = graft_sum(&a, &b, flipped)?;
            restored |= graphs_equivalent(&sum.graft.graph, whole)?;
        }
        if !restored {
            return Err(Error::CheckFailed("recomposition does not restore the graph".into()));
        }
    }
    Ok(out)
}

/// `(H1, v1, w1, α1, β1, H2, v2, w2, α2, β2)` with an optional w-sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadTemplate {
    pub h1: Graph,
    pub v1: Vertex,
    pub w1: Vertex,
    pub alpha1: EdgeSet,
    pub beta1: EdgeSet,
    pub h2: Graph,
    pub v2: Vertex,
    pub w2: Vertex,
    pub alpha2: EdgeSet,
    pub beta2: EdgeSet,
    pub s: Option<WSequence>,
}

impl QuadTemplate {
    pub fn gammas(&self) -> (EdgeSet, EdgeSet) {
        (self.alpha1.sym_diff(&self.beta1), self.alpha2.sym_diff(&self.beta2))
    }

    pub fn validate(&self) -> Result<()> {
        pre(self.h1.edge_set() == self.h2.edge_set(), "H1 and H2 must share their edges")?;
        let sides = [
            (&self.h1, self.v1, self.w1, &self.alpha1, &self.beta1),
            (&self.h2, self.v2, self.w2, &self.alpha2, &self.beta2),
        ];
        for (h, v, w, alpha, beta) in sides {
            pre(v != w, "v and w must differ")?;
            check_star_subset(h, v, alpha, "α")?;
            check_star_subset(h, w, beta, "β")?;
            pre(alpha.intersection(beta).is_disjoint(&h.loops()), "α ∩ β ∩ loops must be empty")?;
        }
        let (g1, g2) = self.gammas();
        let a = SignedGraph { graph: self.h1.clone(), signature: g1 };
        let b = SignedGraph { graph: self.h2.clone(), signature: g2 };
        pre(same_even_cycles(&a, &b)?, "(H1,Γ1) and (H2,Γ2) have different even cycles")?;
        if let Some(s) = &self.s {
            check_sequence(&self.h1, &self.h2, s)?;
        }
        Ok(())
    }
}

/// Unfolds both sides; `Σ1 = α2` and `Σ2 = α1`.
pub fn build_quad_siblings(t: &QuadTemplate) -> Result<SiblingPair> {
    t.validate()?;
    let (g1, g2) = t.gammas();
    let u1 = unfold(&SignedGraph { graph: t.h1.clone(), signature: g1 }, t.v1, t.w1, &t.alpha1, &t.beta1)?;
    let u2 = unfold(&SignedGraph { graph: t.h2.clone(), signature: g2 }, t.v2, t.w2, &t.alpha2, &t.beta2)?;
    let pair = SiblingPair {
        g1: u1.graft.graph,
        t1: u1.graft.terminals,
        sigma1: t.alpha2.clone(),
        g2: u2.graft.graph,
        t2: u2.graft.terminals,
        sigma2: t.alpha1.clone(),
    };
    pair.check()?;
    for (g, sigma, beta) in [(&pair.g1, &pair.sigma1, &t.beta2), (&pair.g2, &pair.sigma2, &t.beta1)] {
        if !cut_space(g).contains(&sigma.sym_diff(beta)) {
            return Err(Error::CheckFailed("β is not a signature of the opposite side".into()));
        }
    }
    Ok(pair)
}

pub fn quad_templates_compatible(t: &QuadTemplate, u: &QuadTemplate) -> Result<bool> {
    if !graphs_equivalent(&t.h1, &u.h1)? || !graphs_equivalent(&t.h2, &u.h2)? {
        return Ok(false);
    }
    let cuts = cut_space(&t.h1);
    Ok([
        t.alpha1.sym_diff(&u.alpha1),
        t.alpha2.sym_diff(&u.alpha2),
        t.beta1.sym_diff(&u.beta1),
        t.beta2.sym_diff(&u.beta2),
    ]
    .iter()
    .all(|x| cuts.contains(x)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwapAt {
    V1,
    W1,
    V2,
    W2,
}

/// Replaces `α` or `β` at the chosen vertex by its difference with the star.
pub fn swap_template(t: &QuadTemplate, at: SwapAt) -> Result<QuadTemplate> {
    t.validate()?;
    let mut u = t.clone();
    match at {
        SwapAt::V1 => u.alpha1 = t.alpha1.sym_diff(&t.h1.star(t.v1)),
        SwapAt::W1 => u.beta1 = t.beta1.sym_diff(&t.h1.star(t.w1)),
        SwapAt::V2 => u.alpha2 = t.alpha2.sym_diff(&t.h2.star(t.v2)),
        SwapAt::W2 => u.beta2 = t.beta2.sym_diff(&t.h2.star(t.w2)),
    }
    Ok(u)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadType {
    I,
    II,
    Other,
}

/// `H[X] − B(X)` is nonempty and connected.
fn interior_connected(h: &Graph, x: &EdgeSet) -> Result<bool> {
    let inner = h.interior(x)?;
    if inner.is_empty() {
        return Ok(false);
    }
    let inside: EdgeSet =
        x.iter().filter(|&e| h.ends(e).is_some_and(|(a, b)| inner.contains(&a) && inner.contains(&b))).collect();
    let reached = h.edge_components(&inside).first().map(|c| h.vertices_of(c)).unwrap_or_default();
    if reached.is_empty() {
        return Ok(inner.len() == 1);
    }
    Ok(reached == inner)
}

fn pairwise_disjoint(xs: &[EdgeSet]) -> bool {
    (0..xs.len()).all(|i| (i + 1..xs.len()).all(|j| xs[i].is_disjoint(&xs[j])))
}

/// Type I or type II, read off the w-sequence (loops ignored).
pub fn quad_template_type(t: &QuadTemplate) -> Result<QuadType> {
    let s = t.s.as_ref().ok_or_else(|| Error::Precondition("type needs a w-sequence".into()))?;
    let (h1, h2) = (core(&t.h1), core(&t.h2));
    let xs: Vec<EdgeSet> = s.steps.iter().map(|x| x.intersection(&h1.edge_set())).collect();
    if xs.iter().any(|x| x.is_empty()) {
        return Ok(QuadType::Other);
    }
    let sides = [(&h1, t.v1, t.w1), (&h2, t.v2, t.w2)];
    let mut one = pairwise_disjoint(&xs);
    for &(h, v, w) in &sides {
        for x in &xs {
            if !one {
                break;
            }
            one = interior_connected(h, x)? && h.boundary(x)? == [v, w].into();
        }
    }
    if one {
        return Ok(QuadType::I);
    }
    let k = xs.len();
    let mut two = (k == 1 || k == 2) && pairwise_disjoint(&xs);
    for &(h, v, _) in &sides {
        for x in &xs {
            two = two && h.boundary(x)?.contains(&v);
        }
    }
    if two {
        two = h1.interior(&xs[0])?.contains(&t.w1);
        two = two
            && if k == 1 {
                h2.interior(&h2.complement(&xs[0]))?.contains(&t.w2)
            } else {
                h2.interior(&xs[1])?.contains(&t.w2)
            };
    }
    Ok(if two { QuadType::II } else { QuadType::Other })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TwinKind {
    Shuffle,
    Tilt,
    Twist,
    Widget,
    Gadget,
}

impl TwinKind {
    pub const ALL: [TwinKind; 5] =
        [TwinKind::Shuffle, TwinKind::Tilt, TwinKind::Twist, TwinKind::Widget, TwinKind::Gadget];

    pub fn name(self) -> &'static str {
        match self {
            TwinKind::Shuffle => "shuffle",
            TwinKind::Tilt => "tilt",
            TwinKind::Twist => "twist",
            TwinKind::Widget => "widget",
            TwinKind::Gadget => "gadget",
        }
    }
}

/// `E(G) = X1 ∪ … ∪ X4` with every boundary inside `{a,b,c,d}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShufflePieces {
    pub graph: Graph,
    pub abcd: [Vertex; 4],
    pub parts: [EdgeSet; 4],
}

/// `e, f` join `a1, a2`; `g, h` join `b1, b2`; any of them may be absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TiltPieces {
    pub graph: Graph,
    pub a: [Vertex; 2],
    pub b: [Vertex; 2],
    pub c: Vertex,
    pub d: Vertex,
    pub efgh: [Option<Edge>; 4],
    pub x1: EdgeSet,
    pub x2: EdgeSet,
}

/// `e, f` join `a1, a2`; `g, h` join `b, c`; any of them may be absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistPieces {
    pub graph: Graph,
    pub a: [Vertex; 2],
    pub b: Vertex,
    pub c: Vertex,
    pub d: Vertex,
    pub efgh: [Option<Edge>; 4],
    pub x1: EdgeSet,
    pub x2: EdgeSet,
}

/// `H1` with `a, b` on `v1 w2`, `c, d` on `z1 w2`, `e, f` on `v1 w1`, four
/// loops, and `γ ⊆ δ(v1) ∩ X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WidgetPieces {
    pub h1: Graph,
    pub v1: Vertex,
    pub z1: Vertex,
    pub w1: Vertex,
    pub w2: Vertex,
    pub abcdef: [Edge; 6],
    pub loops: [Edge; 4],
    pub gamma: EdgeSet,
}

/// `H1` with `a_i, b_i` on `v1 w_i`, `c1, d1` on `z1 w1`, `c2, d2` on
/// `u1 w2`, four loops, and `γ ⊆ δ(v1) ∩ X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GadgetPieces {
    pub h1: Graph,
    pub v1: Vertex,
    pub z1: Vertex,
    pub u1: Vertex,
    pub w: [Vertex; 2],
    pub a: [Edge; 2],
    pub b: [Edge; 2],
    pub c: [Edge; 2],
    pub d: [Edge; 2],
    pub loops: [Edge; 4],
    pub gamma: EdgeSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwinPieces {
    Shuffle(ShufflePieces),
    Tilt(TiltPieces),
    Twist(TwistPieces),
    Widget(WidgetPieces),
    Gadget(GadgetPieces),
}

impl TwinPieces {
    pub fn kind(&self) -> TwinKind {
        match self {
            TwinPieces::Shuffle(_) => TwinKind::Shuffle,
            TwinPieces::Tilt(_) => TwinKind::Tilt,
            TwinPieces::Twist(_) => TwinKind::Twist,
            TwinPieces::Widget(_) => TwinKind::Widget,
            TwinPieces::Gadget(_) => TwinKind::Gadget,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedTwins {
    pub kind: TwinKind,
    pub pair: SiblingPair,
    pub template: QuadTemplate,
}

/// The second graph of a shuffle, tilt or twist, built without any checks
/// on the pair; `None` for widgets and gadgets.
pub(crate) fn second_twin_graph(pieces: &TwinPieces) -> Option<Graph> {
    match pieces {
        TwinPieces::Shuffle(p) => shuffle_graph(p).ok(),
        TwinPieces::Tilt(p) => tilt_graph(p).ok().map(|r| r.0),
        TwinPieces::Twist(p) => twist_graph(p).ok().map(|r| r.0),
        TwinPieces::Widget(_) | TwinPieces::Gadget(_) => None,
    }
}

pub fn build_named_twins(pieces: &TwinPieces) -> Result<NamedTwins> {
    let (pair, template) = match pieces {
        TwinPieces::Shuffle(p) => shuffle(p)?,
        TwinPieces::Tilt(p) => tilt(p)?,
        TwinPieces::Twist(p) => twist(p)?,
        TwinPieces::Widget(p) => widget(p)?,
        TwinPieces::Gadget(p) => gadget(p)?,
    };
    template.validate()?;
    Ok(NamedTwins { kind: pieces.kind(), pair, template })
}

fn distinct(vs: &[Vertex]) -> bool {
    vs.iter().copied().collect::<VertexSet>().len() == vs.len()
}

fn check_partition(g: &Graph, parts: &[&EdgeSet]) -> Result<()> {
    let mut seen = EdgeSet::new();
    for p in parts {
        g.check_edges(p)?;
        if let Some(e) = seen.intersection(p).first() {
            return Err(Error::Precondition(format!("edge {e} lies in two parts")));
        }
        seen.union_with(p);
    }
    pre(seen == g.edge_set(), "the parts do not cover every edge")
}

fn ends_are(g: &Graph, e: Edge, u: Vertex, v: Vertex) -> Result<()> {
    let ends = g.ends(e).ok_or(Error::UnknownEdge(e))?;
    pre(ends == (u.min(v), u.max(v)), format!("edge {e} must join {u} and {v}"))
}

/// Copies the edges of `x` from `g` into `out` with endpoints renamed.
fn place(out: &mut Graph, g: &Graph, x: &EdgeSet, map: impl Fn(Vertex) -> Vertex) -> Result<()> {
    for e in x.iter() {
        let (a, b) = g.ends(e).unwrap();
        out.add_edge(e, map(a), map(b))?;
    }
    Ok(())
}

fn graft(g: Graph, t: &[Vertex]) -> Result<Graft> {
    Graft::new(g, t.iter().copied().collect())
}

/// Folds both grafts and records the template; `s` is kept only when it
/// really is a w-sequence between the folded graphs.
#[allow(clippy::too_many_arguments)]
fn folded_template(
    a: &Graft,
    pa: ((Vertex, Vertex), (Vertex, Vertex)),
    b: &Graft,
    pb: ((Vertex, Vertex), (Vertex, Vertex)),
    s: Vec<EdgeSet>,
) -> Result<QuadTemplate> {
    let fa = fold(a, pa)?;
    let fb = fold(b, pb)?;
    let mut t = QuadTemplate {
        h1: fa.signed.graph,
        v1: fa.s,
        w1: fa.t,
        alpha1: fa.alpha,
        beta1: fa.beta,
        h2: fb.signed.graph,
        v2: fb.s,
        w2: fb.t,
        alpha2: fb.alpha,
        beta2: fb.beta,
        s: None,
    };
    let seq = WSequence::new(s);
    if check_sequence(&t.h1, &t.h2, &seq).is_ok() {
        t.s = Some(seq);
    }
    Ok(t)
}

fn shuffle(p: &ShufflePieces) -> Result<(SiblingPair, QuadTemplate)> {
    let g = &p.graph;
    let [a, b, c, d] = p.abcd;
    let out = shuffle_graph(p)?;
    let (ga, gb) = (graft(g.clone(), &p.abcd)?, graft(out, &p.abcd)?);
    let pair = SiblingPair::from_grafts(ga.clone(), gb.clone());
    pair.check()?;
    let s: Vec<EdgeSet> = p.parts[2..].iter().filter(|x| !x.is_empty()).cloned().collect();
    let template = folded_template(&ga, ((a, b), (c, d)), &gb, ((a, b), (c, d)), s)?;
    Ok((pair, template))
}

fn shuffle_graph(p: &ShufflePieces) -> Result<Graph> {
    let g = &p.graph;
    g.check_vertices(&p.abcd)?;
    pre(distinct(&p.abcd), "a, b, c, d must be distinct")?;
    check_partition(g, &p.parts.iter().collect::<Vec<_>>())?;
    let t: VertexSet = p.abcd.into_iter().collect();
    for x in &p.parts {
        pre(g.boundary(x)?.is_subset(&t), "every part must attach only at a, b, c, d")?;
    }
    // Part i sends the k-th terminal to the PERM[i][k]-th.
    const PERM: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];
    let mut out = Graph::new();
    for v in p.abcd {
        out.add_vertex(v);
    }
    for (i, x) in p.parts.iter().enumerate() {
        let map = |v: Vertex| p.abcd.iter().position(|&u| u == v).map_or(v, |k| p.abcd[PERM[i][k]]);
        place(&mut out, g, x, map)?;
    }
    Ok(out)
}

fn present(efgh: &[Option<Edge>; 4]) -> EdgeSet {
    efgh.iter().flatten().copied().collect()
}

fn check_two_sides(g: &Graph, x1: &EdgeSet, x2: &EdgeSet, shared: &[Vertex]) -> Result<()> {
    let common: VertexSet = g.vertices_of(x1).intersection(&g.vertices_of(x2)).copied().collect();
    pre(common == shared.iter().copied().collect(), format!("V(X1) ∩ V(X2) must be {shared:?}"))
}

fn tilt(p: &TiltPieces) -> Result<(SiblingPair, QuadTemplate)> {
    let g = &p.graph;
    let ([a1, a2], [b1, b2], c, d) = (p.a, p.b, p.c, p.d);
    let (out, c2, d2) = tilt_graph(p)?;
    let (ga, gb) = (graft(g.clone(), &[a1, a2, b1, b2])?, graft(out, &[c, c2, d, d2])?);
    let pair = SiblingPair::from_grafts(ga.clone(), gb.clone());
    pair.check()?;
    let template = folded_template(&ga, ((a1, a2), (b1, b2)), &gb, ((c, c2), (d, d2)), vec![])?;
    Ok((pair, template))
}

fn tilt_graph(p: &TiltPieces) -> Result<(Graph, Vertex, Vertex)> {
    let g = &p.graph;
    let ([a1, a2], [b1, b2], c, d) = (p.a, p.b, p.c, p.d);
    g.check_vertices(&[a1, a2, b1, b2, c, d])?;
    pre(distinct(&[a1, a2, b1, b2, c, d]), "a1, a2, b1, b2, c, d must be distinct")?;
    let [e, f, gg, h] = p.efgh;
    for (x, u, v) in [(e, a1, a2), (f, a1, a2), (gg, b1, b2), (h, b1, b2)] {
        if let Some(x) = x {
            ends_are(g, x, u, v)?;
        }
    }
    let extra = present(&p.efgh);
    pre(extra.len() == p.efgh.iter().flatten().count(), "e, f, g, h must be distinct")?;
    check_partition(g, &[&p.x1, &p.x2, &extra])?;
    check_two_sides(g, &p.x1, &p.x2, &[c, d])?;
    let (v1, v2) = (g.vertices_of(&p.x1), g.vertices_of(&p.x2));
    pre(v1.contains(&a1) && v1.contains(&b1), "a1 and b1 must lie on X1")?;
    pre(v2.contains(&a2) && v2.contains(&b2), "a2 and b2 must lie on X2")?;
    let c2 = g.fresh_vertex();
    let d2 = c2 + 1;
    let mut out = Graph::new();
    for v in [a1, b1, c, d, c2, d2] {
        out.add_vertex(v);
    }
    place(&mut out, g, &p.x1, |v| v)?;
    place(&mut out, g, &p.x2, |v| match v {
        _ if v == a2 => a1,
        _ if v == b2 => b1,
        _ if v == c => c2,
        _ if v == d => d2,
        _ => v,
    })?;
    for (x, u, v) in [(e, c, c2), (gg, c, c2), (f, d, d2), (h, d, d2)] {
        if let Some(x) = x {
            out.add_edge(x, u, v)?;
        }
    }
    Ok((out, c2, d2))
}

fn twist(p: &TwistPieces) -> Result<(SiblingPair, QuadTemplate)> {
    let g = &p.graph;
    let ([a1, a2], b, c, d) = (p.a, p.b, p.c, p.d);
    let (out, d2) = twist_graph(p)?;
    let (ga, gb) = (graft(g.clone(), &[a1, a2, b, c])?, graft(out, &[b, c, d, d2])?);
    let pair = SiblingPair::from_grafts(ga.clone(), gb.clone());
    pair.check()?;
    let template = folded_template(&ga, ((a1, a2), (b, c)), &gb, ((b, c), (d, d2)), vec![])?;
    Ok((pair, template))
}

fn twist_graph(p: &TwistPieces) -> Result<(Graph, Vertex)> {
    let g = &p.graph;
    let ([a1, a2], b, c, d) = (p.a, p.b, p.c, p.d);
    g.check_vertices(&[a1, a2, b, c, d])?;
    pre(distinct(&[a1, a2, b, c, d]), "a1, a2, b, c, d must be distinct")?;
    let [e, f, gg, h] = p.efgh;
    for (x, u, v) in [(e, a1, a2), (f, a1, a2), (gg, b, c), (h, b, c)] {
        if let Some(x) = x {
            ends_are(g, x, u, v)?;
        }
    }
    let extra = present(&p.efgh);
    pre(extra.len() == p.efgh.iter().flatten().count(), "e, f, g, h must be distinct")?;
    check_partition(g, &[&p.x1, &p.x2, &extra])?;
    check_two_sides(g, &p.x1, &p.x2, &[b, c, d])?;
    pre(g.vertices_of(&p.x1).contains(&a1), "a1 must lie on X1")?;
    pre(g.vertices_of(&p.x2).contains(&a2), "a2 must lie on X2")?;
    // b̃ keeps the id of b, c̃ the id of c.
    let d2 = g.fresh_vertex();
    let mut out = Graph::new();
    for v in [a1, b, c, d, d2] {
        out.add_vertex(v);
    }
    place(&mut out, g, &p.x1, |v| v)?;
    place(&mut out, g, &p.x2, |v| match v {
        _ if v == a2 => a1,
        _ if v == b => c,
        _ if v == c => b,
        _ if v == d => d2,
        _ => v,
    })?;
    for (x, u, v) in [(e, b, c), (gg, b, c), (f, d, d2), (h, d, d2)] {
        if let Some(x) = x {
            out.add_edge(x, u, v)?;
        }
    }
    Ok((out, d2))
}

fn check_loops(h: &Graph, loops: &[Edge; 4]) -> Result<EdgeSet> {
    let set: EdgeSet = loops.iter().copied().collect();
    pre(set.len() == 4 && set == h.loops(), "the four named loops must be exactly the loops")?;
    Ok(set)
}

/// Flips `x` in the loop-free part, keeping loops where they are.
fn flip_keeping_loops(h: &Graph, x: &EdgeSet) -> Result<Graph> {
    let loops = h.loops();
    let mut out = whitney_flip(&core(h), &x.difference(&loops))?;
    for e in loops.iter() {
        let (v, _) = h.ends(e).unwrap();
        out.add_edge(e, v, v)?;
    }
    Ok(out)
}

fn other_end(h: &Graph, e: Edge, v: Vertex) -> Result<Vertex> {
    h.other_end(e, v).ok_or_else(|| Error::Precondition(format!("edge {e} does not meet {v}")))
}

fn widget(p: &WidgetPieces) -> Result<(SiblingPair, QuadTemplate)> {
    let h1 = &p.h1;
    let (v1, z1, w1, w2) = (p.v1, p.z1, p.w1, p.w2);
    h1.check_vertices(&[v1, z1, w1, w2])?;
    pre(distinct(&[v1, z1, w1, w2]), "v1, z1, w1, w2 must be distinct")?;
    let [a, b, c, d, e, f] = p.abcdef;
    for (x, u, v) in [(a, v1, w2), (b, v1, w2), (c, z1, w2), (d, z1, w2), (e, v1, w1), (f, v1, w1)] {
        ends_are(h1, x, u, v)?;
    }
    let named: EdgeSet = p.abcdef.iter().copied().collect();
    pre(named.len() == 6, "a, …, f must be distinct")?;
    let loops = check_loops(h1, &p.loops)?;
    let quad: EdgeSet = [a, b, c, d].into_iter().collect();
    pre(h1.star(w2) == quad, "δ(w2) must be {a, b, c, d}")?;
    let x = h1.edge_set().difference(&named).difference(&loops);
    pre(h1.boundary(&x)? == [v1, z1, w1].into(), "B(X) must be {v1, z1, w1}")?;
    pre(p.gamma.is_subset(&h1.star(v1).intersection(&x)), "γ must lie in δ(v1) ∩ X")?;
    // Flipping the side away from w2 keeps type II.
    let y = x.union(&[e, f].into_iter().collect());
    let h2 = flip_keeping_loops(h1, &y)?;
    let v2 = other_end(&h2, c, w2)?;
    let [l1, l2, l3, l4] = p.loops;
    let set = |xs: &[Edge]| p.gamma.union(&xs.iter().copied().collect());
    let t = QuadTemplate {
        h1: h1.clone(),
        v1,
        w1,
        alpha1: set(&[a, e, l1, l2]),
        beta1: [e, f, l3, l4].into_iter().collect(),
        h2,
        v2,
        w2,
        alpha2: set(&[f, c, l1, l3]),
        beta2: [a, c, l2, l4].into_iter().collect(),
        s: Some(WSequence::new(vec![y])),
    };
    Ok((build_quad_siblings(&t)?, t))
}

fn gadget(p: &GadgetPieces) -> Result<(SiblingPair, QuadTemplate)> {
    let h1 = &p.h1;
    let (v1, z1, u1, [w1, w2]) = (p.v1, p.z1, p.u1, p.w);
    h1.check_vertices(&[v1, z1, u1, w1, w2])?;
    pre(distinct(&[v1, z1, u1, w1, w2]), "v1, z1, u1, w1, w2 must be distinct")?;
    let far = [z1, u1];
    let mut named = EdgeSet::new();
    let mut halves = Vec::new();
    for (i, &z) in far.iter().enumerate() {
        for (x, u, v) in [(p.a[i], v1, p.w[i]), (p.b[i], v1, p.w[i]), (p.c[i], z, p.w[i]), (p.d[i], z, p.w[i])] {
            ends_are(h1, x, u, v)?;
        }
        let half: EdgeSet = [p.a[i], p.b[i], p.c[i], p.d[i]].into_iter().collect();
        pre(h1.star(p.w[i]) == half, format!("δ(w{}) must be {{a, b, c, d}}", i + 1))?;
        named.union_with(&half);
        halves.push(half);
    }
    pre(named.len() == 8, "the eight named edges must be distinct")?;
    let loops = check_loops(h1, &p.loops)?;
    let x = h1.edge_set().difference(&named).difference(&loops);
    pre(h1.boundary(&x)? == [v1, z1, u1].into(), "B(X) must be {v1, z1, u1}")?;
    pre(p.gamma.is_subset(&h1.star(v1).intersection(&x)), "γ must lie in δ(v1) ∩ X")?;
    let h2 = flip_keeping_loops(&flip_keeping_loops(h1, &halves[0])?, &halves[1])?;
    let v2 = other_end(&h2, p.c[0], w1)?;
    let [l1, l2, l3, l4] = p.loops;
    let set = |xs: &[Edge]| p.gamma.union(&xs.iter().copied().collect());
    let t = QuadTemplate {
        h1: h1.clone(),
        v1,
        w1,
        alpha1: set(&[p.a[0], p.a[1], l1, l2]),
        beta1: [p.a[0], p.c[0], l3, l4].into_iter().collect(),
        h2,
        v2,
        w2,
        alpha2: set(&[p.c[0], p.c[1], l1, l3]),
        beta2: [p.a[1], p.c[1], l2, l4].into_iter().collect(),
        s: Some(WSequence::new(halves)),
    };
    Ok((build_quad_siblings(&t)?, t))
}

/// A piece of a Shih outcome with its three named vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShihPart {
    pub graph: Graph,
    pub x: Vertex,
    pub y: Vertex,
    pub z: Vertex,
}

/// `cycle(G) = ecycle(H, Σ)` and `ecut(G, T) = cut(H)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShihOutcome {
    pub g: Graph,
    pub h: Graph,
    pub sigma: EdgeSet,
    pub terminals: VertexSet,
}

impl ShihOutcome {
    /// The pair `(G, ∅)`, `(H, Σ)` with terminals `T` and `∅`.
    pub fn pair(&self) -> SiblingPair {
        SiblingPair {
            g1: self.g.clone(),
            t1: self.terminals.clone(),
            sigma1: EdgeSet::new(),
            g2: self.h.clone(),
            t2: VertexSet::new(),
            sigma2: self.sigma.clone(),
        }
    }
}

pub fn build_shih_outcome(which: u8, parts: &[ShihPart]) -> Result<ShihOutcome> {
    match which {
        2 => pre(parts.len() == 4, format!("outcome 2 needs four parts, got {}", parts.len()))?,
        3 => pre(parts.len() >= 3, format!("outcome 3 needs at least three parts, got {}", parts.len()))?,
        _ => return Err(Error::Precondition(format!("no Shih outcome {which}"))),
    }
    let mut seen_v = VertexSet::new();
    let mut seen_e = EdgeSet::new();
    for (i, p) in parts.iter().enumerate() {
        pre(distinct(&[p.x, p.y, p.z]), format!("part {i}: x, y, z must be distinct"))?;
        let mut vs = p.graph.vertices().clone();
        vs.extend([p.x, p.y, p.z]);
        if let Some(v) = vs.intersection(&seen_v).next() {
            return Err(Error::Precondition(format!("vertex {v} appears in two parts")));
        }
        if let Some(e) = p.graph.edge_set().intersection(&seen_e).first() {
            return Err(Error::DuplicateEdge(e));
        }
        seen_v.extend(vs);
        seen_e.union_with(&p.graph.edge_set());
    }
    let k = parts.len();
    let m = |i: isize| &parts[i.rem_euclid(k as isize) as usize];
    // Representatives: a vertex maps to the id of its class.
    let mut gmap: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    let mut hmap: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    for j in 0..k as isize {
        if which == 2 {
            let w = m(j).x;
            gmap.insert(m(1 - j).y, w);
            gmap.insert(m(j + 2).z, w);
            hmap.insert(m(j).x, parts[0].x);
            hmap.insert(m(j).y, parts[0].y);
            hmap.insert(m(j).z, parts[0].z);
        } else {
            gmap.insert(m(j).z, parts[0].z);
            gmap.insert(m(j - 1).y, m(j).x);
            let w = m(j).z;
            hmap.insert(m(j - 1).y, w);
            hmap.insert(m(j + 1).x, w);
        }
    }
    let build = |map: &BTreeMap<Vertex, Vertex>| -> Result<Graph> {
        let f = |v: Vertex| *map.get(&v).unwrap_or(&v);
        let mut out = Graph::new();
        for p in parts {
            for v in p.graph.vertices().iter().chain([&p.x, &p.y, &p.z]) {
                out.add_vertex(f(*v));
            }
            place(&mut out, &p.graph, &p.graph.edge_set(), f)?;
        }
        Ok(out)
    };
    let (g, h) = (build(&gmap)?, build(&hmap)?);
    let w1 = parts[0].x;
    let sigma = g.star(w1);
    let (cg, ch) = (cycle_space(&g), cycle_space(&h));
    if !cg.is_subspace_of(&ch)? || cg.dim() + 1 != ch.dim() {
        return Err(Error::CheckFailed("cycle(G) is not a hyperplane of cycle(H)".into()));
    }
    let sh = SignedGraph { graph: h.clone(), signature: sigma.clone() };
    if !even_cycle_space(&sh).equals(&cg)? {
        return Err(Error::CheckFailed("ecycle(H, Σ) differs from cycle(G)".into()));
    }
    let c = shortest_odd_circuit(&sh).ok_or_else(|| Error::CheckFailed("(H, Σ) has no odd circuit".into()))?;
    let terminals = g.odd_vertices(&c);
    if !even_cut_space(&Graft::new(g.clone(), terminals.clone())?)?.equals(&cut_space(&h))? {
        return Err(Error::CheckFailed("ecut(G, T) differs from cut(H)".into()));
    }
    Ok(ShihOutcome { g, h, sigma, terminals })
}

/// `G'` and `H'` with their terminal sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriangleTriad {
    pub g: Graph,
    pub t_g: VertexSet,
    pub h: Graph,
    pub t_h: VertexSet,
    /// `ē, f̄, ḡ`.
    pub new_edges: [Edge; 3],
    /// The triad vertex of `H'`.
    pub v: Vertex,
}

impl TriangleTriad {
    pub fn pair(&self) -> SiblingPair {
        SiblingPair::from_grafts(
            Graft { graph: self.g.clone(), terminals: self.t_g.clone() },
            Graft { graph: self.h.clone(), terminals: self.t_h.clone() },
        )
    }
}

pub fn build_triangle_triad_pair(g: &Graph, h: &SignedGraph, tri: [Edge; 3]) -> Result<TriangleTriad> {
    pre(g.edge_set() == h.graph.edge_set(), "G and H must share their edges")?;
    pre(even_cycle_space(h).equals(&cycle_space(g))?, "cycle(G) must equal ecycle(H, Γ)")?;
    let [e, f, gg] = tri;
    let [v_ef, v_eg, v_fg] = crate::ops::triangle_vertices(&h.graph, tri)?;
    let t: EdgeSet = tri.into_iter().collect();
    pre(is_odd(h, &t), "the triangle must be odd")?;
    let fresh = g.fresh_edge().max(h.graph.fresh_edge());
    let (eb, fb, gb) = (fresh, fresh + 1, fresh + 2);
    let v = h.graph.fresh_vertex();
    let mut hh = h.graph.clone();
    hh.add_edge(eb, v, v_fg)?;
    hh.add_edge(fb, v, v_eg)?;
    hh.add_edge(gb, v, v_ef)?;
    let mut gg2 = g.clone();
    for (new, old) in [(eb, e), (fb, f), (gb, gg)] {
        let (a, b) = g.ends(old).unwrap();
        gg2.add_edge(new, a, b)?;
    }
    let t_g = g.odd_vertices(&t);
    let t_h: VertexSet = [v, v_ef, v_eg, v_fg].into();
    let out = TriangleTriad { g: gg2, t_g, h: hh, t_h, new_edges: [eb, fb, gb], v };
    let (a, b) = out.pair().grafts()?;
    if !even_cut_space(&a)?.equals(&even_cut_space(&b)?)? {
        return Err(Error::CheckFailed("ecut(H', T_H) differs from ecut(G', T')".into()));
    }
    Ok(out)
}

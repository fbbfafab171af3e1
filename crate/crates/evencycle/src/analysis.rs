//! Rank, connectivity and structural tests on signed graphs and grafts.

use std::collections::{BTreeMap, VecDeque};

use crate::discovery::equivalence_class;
use crate::edgeset::EdgeSet;
use crate::error::{pre, Error, Result};
use crate::gf2::{cut_space, cycle_space, even_cycle_space, forest_path};
use crate::graph::{separations_dense, Dense, Graft, Graph, SignedGraph, Vertex, VertexSet, EXHAUSTIVE_EDGE_LIMIT};
use crate::ops::balancing_set;

/// Whitney-equivalent: same edges and the same cycle space.
pub fn graphs_equivalent(a: &Graph, b: &Graph) -> Result<bool> {
    if a.edge_set() != b.edge_set() {
        return Ok(false);
    }
    cycle_space(a).equals(&cycle_space(b))
}

/// Equivalent graphs whose signatures differ by a cut.
pub fn signed_equivalent(a: &SignedGraph, b: &SignedGraph) -> Result<bool> {
    Ok(graphs_equivalent(&a.graph, &b.graph)? && cut_space(&a.graph).contains(&a.signature.sym_diff(&b.signature)))
}

/// Same even cycles.
pub fn same_even_cycles(a: &SignedGraph, b: &SignedGraph) -> Result<bool> {
    if a.graph.edge_set() != b.graph.edge_set() {
        return Ok(false);
    }
    even_cycle_space(a).equals(&even_cycle_space(b))
}

/// A shortest odd circuit, ties broken by the sorted edge ids.
pub fn shortest_odd_circuit(sg: &SignedGraph) -> Option<EdgeSet> {
    let g = &sg.graph;
    let mut adj: BTreeMap<Vertex, Vec<(Vertex, bool)>> = BTreeMap::new();
    let mut best = usize::MAX;
    for (e, a, b) in g.edges() {
        let odd = sg.signature.contains(e);
        if a == b {
            if odd {
                best = 1;
            }
            continue;
        }
        adj.entry(a).or_default().push((b, odd));
        adj.entry(b).or_default().push((a, odd));
    }
    // The shortest odd closed walk is a circuit; find its length in the
    // parity double cover.
    if best > 1 {
        for &s in g.vertices() {
            let mut dist: BTreeMap<(Vertex, bool), usize> = BTreeMap::from([((s, false), 0)]);
            let mut queue = VecDeque::from([(s, false)]);
            while let Some((v, p)) = queue.pop_front() {
                let d = dist[&(v, p)];
                if d + 1 >= best {
                    break;
                }
                for &(w, odd) in adj.get(&v).map(|x| x.as_slice()).unwrap_or(&[]) {
                    let next = (w, p ^ odd);
                    if let std::collections::btree_map::Entry::Vacant(slot) = dist.entry(next) {
                        slot.insert(d + 1);
                        queue.push_back(next);
                    }
                }
            }
            if let Some(&d) = dist.get(&(s, true)) {
                best = best.min(d);
            }
        }
    }
    if best == usize::MAX {
        return None;
    }
    g.circuits(&g.edge_set(), best)
        .into_iter()
        .filter(|c| c.len() == best && c.intersection(&sg.signature).len() % 2 == 1)
        .min_by_key(|c| c.to_vec())
}

/// Even-cycle matroid rank from a union-find pass with parities.
fn rank_dense(d: &Dense, mask: u64, sig: u64) -> usize {
    let n = d.verts.len();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut parity = vec![false; n];
    fn find(p: &mut [usize], par: &mut [bool], mut x: usize) -> (usize, bool) {
        let mut acc = false;
        while p[x] != x {
            acc ^= par[x];
            x = p[x];
        }
        (x, acc)
    }
    let mut rank = 0;
    let mut odd_found = false;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        let (a, b) = d.ends[i];
        let odd = sig >> i & 1 == 1;
        let (ra, pa) = find(&mut parent, &mut parity, a);
        let (rb, pb) = find(&mut parent, &mut parity, b);
        if ra != rb {
            parent[ra] = rb;
            parity[ra] = pa ^ pb ^ odd;
            rank += 1;
        } else if pa ^ pb != odd {
            odd_found = true;
        }
    }
    rank + odd_found as usize
}

/// `|V(X)| − comp(G[X])`, plus one when `(G[X], Σ ∩ X)` is not bipartite.
pub fn rank_even_cycle(sg: &SignedGraph, x: &EdgeSet) -> Result<usize> {
    sg.graph.check_edges(x)?;
    let d = Dense::over(&sg.graph, x)?;
    let full = d.full;
    Ok(rank_dense(&d, full, d.to_mask(&sg.signature)))
}

pub fn is_bipartite_on(sg: &SignedGraph, x: &EdgeSet) -> bool {
    balancing_set(&sg.graph, x, &sg.signature).is_some()
}

pub fn is_bipartite(sg: &SignedGraph) -> bool {
    is_bipartite_on(sg, &sg.graph.edge_set())
}

/// `r(X) + r(X̄) − r(E) + 1` in the even cycle matroid.
pub fn lambda(sg: &SignedGraph, x: &EdgeSet) -> Result<usize> {
    sg.graph.check_edges(x)?;
    let e = sg.graph.edge_set();
    let xc = e.difference(x);
    if x.is_empty() || xc.is_empty() {
        return Err(Error::Precondition("λ needs a nonempty proper subset".into()));
    }
    Ok(rank_even_cycle(sg, x)? + rank_even_cycle(sg, &xc)? + 1 - rank_even_cycle(sg, &e)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationReport {
    pub x: EdgeSet,
    pub k: usize,
    /// Non-bipartiteness of the `X` side and of the complement.
    pub i: bool,
    pub j: bool,
    pub lambda: usize,
}

impl SeparationReport {
    pub fn formula(&self) -> usize {
        self.k + self.i as usize + self.j as usize - 1
    }
}

/// Classifies a graph `k`-separation `X` as a `k-(i,j)`-separation.
pub fn separation_report(sg: &SignedGraph, x: &EdgeSet) -> Result<SeparationReport> {
    let g = &sg.graph;
    let k = g.boundary(x)?.len();
    let xc = g.complement(x);
    let ok = x.len().min(xc.len()) >= k.max(1) && g.is_connected_edges(x) && g.is_connected_edges(&xc);
    if !ok {
        return Err(Error::Precondition(format!("{x:?} is not a {k}-separation")));
    }
    Ok(SeparationReport {
        x: x.clone(),
        k,
        i: !is_bipartite_on(sg, x),
        j: !is_bipartite_on(sg, &xc),
        lambda: lambda(sg, x)?,
    })
}

/// Every graph `k`-separation for `k ≤ kmax`, classified.
pub fn separation_reports(sg: &SignedGraph, kmax: usize) -> Result<Vec<SeparationReport>> {
    let d = dense_for_scan(&sg.graph)?;
    let mut out = Vec::new();
    for k in 1..=kmax {
        for m in separations_dense(&d, k) {
            out.push(separation_report(sg, &d.to_set(m))?);
        }
    }
    Ok(out)
}

fn dense_for_scan(g: &Graph) -> Result<Dense> {
    let m = g.num_edges();
    if m > EXHAUSTIVE_EDGE_LIMIT {
        return Err(Error::TooLarge { what: "edges for exhaustive scan", size: m, limit: EXHAUSTIVE_EDGE_LIMIT });
    }
    Dense::new(g)
}

/// Matroid `r`-separations for `r < k`, by exhaustive λ scan. Each is
/// reported by the side holding the smallest edge id.
pub fn matroid_separations(sg: &SignedGraph, k: usize) -> Result<Vec<(EdgeSet, usize)>> {
    let d = dense_for_scan(&sg.graph)?;
    let m = d.m();
    let sig = d.to_mask(&sg.signature);
    let mut out = Vec::new();
    if m < 2 {
        return Ok(out);
    }
    let total = rank_dense(&d, d.full, sig);
    for rest in 0..(1u64 << (m - 1)) {
        let x = rest << 1 | 1;
        if x == d.full {
            continue;
        }
        let xc = d.full & !x;
        let small = x.count_ones().min(xc.count_ones()) as usize;
        let lam = rank_dense(&d, x, sig) + rank_dense(&d, xc, sig) + 1 - total;
        if lam < k && small >= lam {
            out.push((d.to_set(x), lam));
        }
    }
    Ok(out)
}

pub fn is_3connected_even_cycle(sg: &SignedGraph) -> Result<bool> {
    Ok(matroid_separations(sg, 3)?.is_empty())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct N3cReport {
    /// At most one loop, and every loop is odd.
    pub loops: bool,
    /// The graph without loops is 2-connected.
    pub two_connected: bool,
    /// Both sides of every 2-separation are non-bipartite.
    pub two_separations_odd: bool,
}

impl N3cReport {
    pub fn all(&self) -> bool {
        self.loops && self.two_connected && self.two_separations_odd
    }
}

pub fn check_n3c_conditions(sg: &SignedGraph) -> Result<N3cReport> {
    if !is_3connected_even_cycle(sg)? {
        return Err(Error::Precondition("even cycle matroid is not 3-connected".into()));
    }
    let g = &sg.graph;
    let loops = g.loops();
    let loops_ok = loops.len() <= 1 && loops.is_subset(&sg.signature);
    let d = Dense::new(&g.delete_edges(&loops))?;
    let two_connected = (d.m() == 0 || d.connected(d.full)) && separations_dense(&d, 1).is_empty();
    let full = dense_for_scan(g)?;
    let two_separations_odd = separations_dense(&full, 2).into_iter().all(|m| {
        let x = full.to_set(m);
        !is_bipartite_on(sg, &x) && !is_bipartite_on(sg, &g.complement(&x))
    });
    Ok(N3cReport { loops: loops_ok, two_connected, two_separations_odd })
}

/// Non-loop edges avoiding every vertex of `avoid`.
fn edges_avoiding(g: &Graph, avoid: &[Vertex]) -> EdgeSet {
    g.edges().filter(|&(_, a, b)| a != b && !avoid.contains(&a) && !avoid.contains(&b)).map(|(e, _, _)| e).collect()
}

/// A resigning `Σ'` with `Σ' ⊆ δ(v_1) ∪ … ∪ loops`, if one exists.
pub fn blocking_signature(sg: &SignedGraph, vs: &[Vertex]) -> Option<EdgeSet> {
    let rest = edges_avoiding(&sg.graph, vs);
    let u = balancing_set(&sg.graph, &rest, &sg.signature)?;
    Some(sg.signature.sym_diff(&sg.graph.cut(&u).ok()?))
}

/// Smallest blocking vertex with a witnessing signature.
pub fn blocking_vertex_witness(sg: &SignedGraph) -> Option<(Vertex, EdgeSet)> {
    sg.graph.vertices().iter().find_map(|&v| blocking_signature(sg, &[v]).map(|s| (v, s)))
}

pub fn blocking_vertex(sg: &SignedGraph) -> Option<Vertex> {
    let g = &sg.graph;
    let Ok(d) = Dense::new(g) else {
        return blocking_vertex_witness(sg).map(|(v, _)| v);
    };
    let sig = d.to_mask(&sg.signature);
    let loops = d.to_mask(&g.loops());
    g.vertices().iter().copied().find(|&v| {
        let vm = d.verts.binary_search(&v).map(|i| 1u64 << i).unwrap_or(0);
        let mask = (0..d.m()).filter(|&i| d.vmask[i] & vm == 0).fold(0u64, |m, i| m | 1 << i) & !loops;
        d.balanced(mask, sig)
    })
}

/// Lexicographically smallest blocking pair.
pub fn blocking_pair(sg: &SignedGraph) -> Option<(Vertex, Vertex)> {
    let g = &sg.graph;
    let vs: Vec<Vertex> = g.vertices().iter().copied().collect();
    let Ok(d) = Dense::new(g) else {
        return vs.iter().enumerate().find_map(|(i, &s)| {
            vs[i + 1..].iter().find(|&&t| blocking_signature(sg, &[s, t]).is_some()).map(|&t| (s, t))
        });
    };
    let sig = d.to_mask(&sg.signature);
    let loops = d.to_mask(&g.loops());
    let bit = |v: Vertex| d.verts.binary_search(&v).map(|i| 1u64 << i).unwrap_or(0);
    for (i, &s) in vs.iter().enumerate() {
        for &t in &vs[i + 1..] {
            let avoid = bit(s) | bit(t);
            let mask = (0..d.m()).filter(|&k| d.vmask[k] & avoid == 0).fold(0u64, |m, k| m | 1 << k) & !loops;
            if d.balanced(mask, sig) {
                return Some((s, t));
            }
        }
    }
    None
}

/// A `T`-join: per component, terminals are paired in id order and joined
/// along a spanning forest.
pub fn find_t_join(gr: &Graft) -> Result<EdgeSet> {
    let g = &gr.graph;
    g.check_vertices(&gr.terminals)?;
    let mut j = EdgeSet::new();
    for comp in g.vertex_components() {
        let ts: Vec<Vertex> = comp.intersection(&gr.terminals).copied().collect();
        if ts.len() % 2 == 1 {
            return Err(Error::OddTerminals(ts.len()));
        }
        for pair in ts.chunks(2) {
            j.sym_diff_with(&forest_path(g, pair[0], pair[1]));
        }
    }
    Ok(j)
}

/// Even cycle matroid 3-connected and no Whitney-equivalent graph carries a
/// blocking vertex. Loops never matter for blocking, so the flip class of
/// the loopless part is scanned.
pub fn is_ec_standard(sg: &SignedGraph, budget: usize) -> Result<bool> {
    if !is_3connected_even_cycle(sg)? {
        return Ok(false);
    }
    let g = &sg.graph;
    let loops = g.loops();
    let core = g.delete_edges(&loops).without_isolated();
    for member in equivalence_class(&core, budget)? {
        let mut h = member;
        for e in loops.iter() {
            let v = *h.vertices().iter().next().unwrap_or(&0);
            h.add_edge(e, v, v)?;
        }
        if blocking_vertex(&SignedGraph { graph: h, signature: sg.signature.clone() }).is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A vertex set `U ∌ s1` with `δ(U) = c`.
fn cut_shore(h: &Graph, c: &EdgeSet, s1: Vertex) -> Option<VertexSet> {
    let u = balancing_set(h, &h.non_loops(), c)?;
    let in_u = |v: &Vertex| u.contains(v);
    if h.cut(&u).ok()? != *c {
        return None;
    }
    if in_u(&s1) {
        let comp = h.vertex_components().into_iter().find(|k| k.contains(&s1)).unwrap();
        Some(u.symmetric_difference(&comp).copied().collect())
    } else {
        Some(u)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfiningSet {
    pub y: EdgeSet,
    /// `φ̂_2, φ̂_3` (only the first is set for two special vertices).
    pub phi_hat: Vec<EdgeSet>,
}

fn confining(h: &Graph, s: &[Vertex], phi: &[EdgeSet]) -> Result<ConfiningSet> {
    h.check_vertices(s)?;
    let distinct: VertexSet = s.iter().copied().collect();
    pre(distinct.len() == s.len(), "special vertices must be distinct")?;
    for (i, p) in phi.iter().enumerate() {
        pre(p.is_subset(&h.star(s[i])), format!("φ{} is not within δ(s{})", i + 1, i + 1))?;
    }
    let c = phi.iter().fold(EdgeSet::new(), |acc, p| acc.sym_diff(p));
    pre(!c.is_empty(), "symmetric difference of the φ's is empty")?;
    let mut u = cut_shore(h, &c, s[0])
        .ok_or_else(|| Error::Precondition("symmetric difference of the φ's is not a cut".into()))?;
    let mut phi_hat = Vec::new();
    for i in 1..s.len() {
        if u.remove(&s[i]) {
            phi_hat.push(phi[i].sym_diff(&h.star(s[i])));
        } else {
            phi_hat.push(phi[i].clone());
        }
    }
    pre(!u.is_empty(), "the φ's sum to a cut at the other special vertices")?;
    let y: EdgeSet = h.edges().filter(|&(_, a, b)| u.contains(&a) || u.contains(&b)).map(|(e, _, _)| e).collect();
    Ok(ConfiningSet { y, phi_hat })
}

/// `Y` with `B(Y) ⊆ {s1,s2}`, nonempty interior, `δ(s1) ∩ Y = φ1 − φ2` and
/// `δ(s2) ∩ Y = φ̂2 − φ1`.
pub fn find_confining_set_2(h: &Graph, s1: Vertex, s2: Vertex, phi1: &EdgeSet, phi2: &EdgeSet) -> Result<ConfiningSet> {
    pre(phi1.sym_diff(phi2) != h.star(s2), "φ1 Δ φ2 equals δ(s2)")?;
    confining(h, &[s1, s2], &[phi1.clone(), phi2.clone()])
}

pub fn find_confining_set_3(h: &Graph, s: [Vertex; 3], phi: [&EdgeSet; 3]) -> Result<ConfiningSet> {
    let c = phi[0].sym_diff(phi[1]).sym_diff(phi[2]);
    let (d2, d3) = (h.star(s[1]), h.star(s[2]));
    pre(c != d2 && c != d3 && c != d2.sym_diff(&d3), "φ1 Δ φ2 Δ φ3 equals δ(s2), δ(s3) or δ({s2,s3})")?;
    confining(h, &s, &[phi[0].clone(), phi[1].clone(), phi[2].clone()])
}

/// The clauses a confining set must satisfy; returns the first one failing.
///
/// The star clauses are checked as `δ(s_i) ∩ Y = φ̂_i − ⋃_{k≠i} φ̂_k` with
/// `φ̂_1 = φ_1`. This is what the construction guarantees; it agrees with
/// `φ_1 − ⋃ φ_k` unless some edge joining two special vertices lies in a
/// flipped `φ̂_k` but not in `φ_k`, where no `Y` meets the unhatted form.
pub fn check_confining_set(h: &Graph, s: &[Vertex], phi: &[EdgeSet], out: &ConfiningSet) -> Result<()> {
    let fail = |n: usize| Err(Error::CheckFailed(format!("confining set clause ({n})")));
    let sv: VertexSet = s.iter().copied().collect();
    if !h.boundary(&out.y)?.is_subset(&sv) {
        return fail(1);
    }
    if h.interior(&out.y)?.is_empty() {
        return fail(2);
    }
    let mut hats = vec![phi[0].clone()];
    for i in 1..s.len() {
        let hat = &out.phi_hat[i - 1];
        if *hat != phi[i] && *hat != phi[i].sym_diff(&h.star(s[i])) {
            return fail(3 + i);
        }
        hats.push(hat.clone());
    }
    for i in 0..s.len() {
        let others = hats.iter().enumerate().filter(|&(k, _)| k != i).fold(EdgeSet::new(), |acc, (_, p)| acc.union(p));
        if h.star(s[i]).intersection(&out.y) != hats[i].difference(&others) {
            return fail(3 + i);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eset;
    use crate::gf2::{cycle_space, even_cycle_space, tests::k4};
    use crate::ops::{resign, split_vertex};
    use rand::{Rng, SeedableRng};

    fn g(edges: &[(u32, u32, u32)]) -> Graph {
        Graph::from_edges(edges).unwrap()
    }

    fn k5() -> Graph {
        let mut k5 = Graph::new();
        let mut e = 0;
        for a in 0..5 {
            for b in a + 1..5 {
                k5.add_edge(e, a, b).unwrap();
                e += 1;
            }
        }
        k5
    }

    fn random_signed(rng: &mut impl Rng, n: u32, m: u32) -> SignedGraph {
        let mut h = Graph::new();
        for e in 0..m {
            h.add_edge(e, rng.gen_range(0..n), rng.gen_range(0..n)).unwrap();
        }
        let sig = h.edge_set().iter().filter(|_| rng.gen_bool(0.4)).collect();
        SignedGraph::new(h, sig).unwrap()
    }

    #[test]
    fn rank_examples() {
        let sg = SignedGraph::new(k4(), eset![0, 1, 3]).unwrap();
        assert_eq!(rank_even_cycle(&sg, &k4().edge_set()).unwrap(), 4);
        let bip = SignedGraph::new(k4(), EdgeSet::new()).unwrap();
        assert_eq!(rank_even_cycle(&bip, &k4().edge_set()).unwrap(), 3);
        assert_eq!(rank_even_cycle(&bip, &EdgeSet::new()).unwrap(), 0);
    }

    #[test]
    fn rank_matches_space_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let sg = random_signed(&mut rng, 5, 7);
            // The even cycle space is the cocycle space of the matroid; the
            // rank of X is |X| minus the dimension of its cycles inside X.
            let space = even_cycle_space(&sg);
            let e = sg.graph.edge_set();
            let x: EdgeSet = e.iter().filter(|_| rng.gen_bool(0.5)).collect();
            let inside = space.elements().into_iter().filter(|c| c.is_subset(&x)).count();
            let oracle = x.len() - inside.trailing_zeros() as usize;
            assert_eq!(rank_even_cycle(&sg, &x).unwrap(), oracle);
            assert_eq!(space.matroid_rank(&x), oracle);
        }
    }

    #[test]
    fn lambda_examples() {
        // two odd triangles sharing two vertices via a parallel structure
        let h = g(&[(0, 1, 2), (1, 2, 3), (2, 3, 1), (3, 1, 4), (4, 4, 3), (5, 3, 1)]);
        let sg = SignedGraph::new(h, eset![0, 3]).unwrap();
        let x = eset![0, 1, 2];
        let r = separation_report(&sg, &x).unwrap();
        assert_eq!((r.k, r.i, r.j), (2, true, true));
        assert_eq!(r.lambda, 3);
        assert_eq!(r.formula(), 3);
        // a cut vertex between two odd triangles
        let h = g(&[(0, 1, 2), (1, 2, 3), (2, 3, 1), (3, 3, 4), (4, 4, 5), (5, 5, 3)]);
        let sg = SignedGraph::new(h, eset![0, 3]).unwrap();
        assert_eq!(lambda(&sg, &eset![0, 1, 2]).unwrap(), 2);
        assert!(lambda(&sg, &EdgeSet::new()).is_err());
    }

    #[test]
    fn lambda_formula_on_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let mut checked = 0;
        for _ in 0..400 {
            let sg = random_signed(&mut rng, 5, 8);
            if is_bipartite(&sg) || !sg.graph.is_connected_edges(&sg.graph.edge_set()) {
                continue;
            }
            for r in separation_reports(&sg, 3).unwrap() {
                assert_eq!(r.lambda, r.formula(), "{sg:?} {r:?}");
                checked += 1;
            }
        }
        assert!(checked > 100);
    }

    #[test]
    fn three_connectivity() {
        let par = g(&[(0, 1, 2), (1, 1, 2), (2, 2, 3), (3, 3, 1), (4, 1, 3)]);
        assert!(!is_3connected_even_cycle(&SignedGraph::new(par, eset![2]).unwrap()).unwrap());
        let mut k4l = k4();
        k4l.add_edge(9, 1, 1).unwrap();
        let sg = SignedGraph::new(k4l.clone(), EdgeSet::new()).unwrap();
        assert!(!is_3connected_even_cycle(&sg).unwrap());
        assert!(check_n3c_conditions(&sg).is_err());
        // an odd loop that is the only odd cycle is a coloop
        let sg = SignedGraph::new(k4l, eset![9]).unwrap();
        assert!(!is_3connected_even_cycle(&sg).unwrap());
        let r10 = SignedGraph::new(k5(), k5().edge_set()).unwrap();
        assert!(check_n3c_conditions(&r10).unwrap().all());
    }

    #[test]
    fn n3c_on_random_instances() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let mut found = 0;
        for _ in 0..3000 {
            let n = rng.gen_range(3..6);
            let m = rng.gen_range(5..10);
            let sg = random_signed(&mut rng, n, m);
            if is_3connected_even_cycle(&sg).unwrap() && sg.graph.num_edges() > 3 {
                assert!(check_n3c_conditions(&sg).unwrap().all(), "{sg:?}");
                found += 1;
            }
        }
        assert!(found > 5, "{found}");
    }

    #[test]
    fn blocking_examples() {
        let tri = g(&[(0, 1, 2), (1, 2, 3), (2, 3, 1)]);
        let sg = SignedGraph::new(tri.clone(), EdgeSet::new()).unwrap();
        assert_eq!(blocking_vertex(&sg), Some(1));
        let odd = SignedGraph::new(tri, eset![0]).unwrap();
        assert_eq!(blocking_vertex(&odd), Some(1));
        assert_eq!(blocking_pair(&odd), Some((1, 2)));
        // K4 with all triangles odd: no blocking vertex; pairs cover it
        let sg = SignedGraph::new(k4(), eset![0, 5]).unwrap();
        assert_eq!(blocking_vertex(&sg), None);
        assert_eq!(blocking_pair(&sg), Some((1, 2)));
    }

    #[test]
    fn blocking_matches_exhaustive_resigning() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(14);
        for _ in 0..300 {
            let sg = random_signed(&mut rng, 5, 7);
            let vs: Vec<Vertex> = sg.graph.vertices().iter().copied().collect();
            let subsets: Vec<VertexSet> = (0u32..1 << vs.len())
                .map(|b| vs.iter().enumerate().filter(|(i, _)| b >> i & 1 == 1).map(|(_, &v)| v).collect())
                .collect();
            let fits = |allowed: &EdgeSet| subsets.iter().any(|u| resign(&sg, u).unwrap().signature.is_subset(allowed));
            let loops = sg.graph.loops();
            let oracle_v = vs.iter().copied().find(|&v| fits(&sg.graph.star(v).union(&loops)));
            assert_eq!(blocking_vertex(&sg), oracle_v);
            if let Some((v, s)) = blocking_vertex_witness(&sg) {
                assert_eq!(Some(v), oracle_v);
                assert!(s.is_subset(&sg.graph.star(v).union(&loops)));
                let split = split_vertex(&sg.graph, v, &s).unwrap();
                assert!(cycle_space(&split.graph).equals(&even_cycle_space(&sg)).unwrap());
            }
            let mut oracle_p = None;
            'outer: for (i, &s) in vs.iter().enumerate() {
                for &t in &vs[i + 1..] {
                    if fits(&sg.graph.star(s).union(&sg.graph.star(t)).union(&loops)) {
                        oracle_p = Some((s, t));
                        break 'outer;
                    }
                }
            }
            assert_eq!(blocking_pair(&sg), oracle_p);
        }
    }

    #[test]
    fn t_joins() {
        let c4 = g(&[(0, 0, 1), (1, 1, 2), (2, 2, 3), (3, 3, 0)]);
        let gr = Graft::new(c4.clone(), VertexSet::new()).unwrap();
        assert_eq!(find_t_join(&gr).unwrap(), EdgeSet::new());
        let gr = Graft::new(c4.clone(), [0, 2].into()).unwrap();
        let j = find_t_join(&gr).unwrap();
        assert_eq!(j.len(), 2);
        assert_eq!(c4.odd_vertices(&j), gr.terminals);
        let two = g(&[(0, 0, 1), (1, 2, 3)]);
        let gr = Graft::new(two, [0, 2].into()).unwrap();
        assert!(matches!(find_t_join(&gr), Err(Error::OddTerminals(1))));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(15);
        for _ in 0..300 {
            let sg = random_signed(&mut rng, 6, 8);
            let h = &sg.graph;
            let t: VertexSet = h.odd_vertices(&sg.signature);
            let gr = Graft::new(h.clone(), t.clone()).unwrap();
            let j = find_t_join(&gr).unwrap();
            assert_eq!(h.odd_vertices(&j), t);
        }
    }

    fn k5_star_complement(rest: &EdgeSet) -> EdgeSet {
        // signature inside δ(0): the complement of the edges avoiding 0
        let all: EdgeSet = (0..10).collect();
        all.difference(rest)
    }

    #[test]
    fn ec_standard_examples() {
        // odd K4 has a series pair
        let sg = SignedGraph::new(k4(), eset![0, 5]).unwrap();
        assert!(!is_ec_standard(&sg, 1000).unwrap());
        // K5 with every edge odd represents R10
        let k5 = k5();
        let r10 = SignedGraph::new(k5.clone(), k5.edge_set()).unwrap();
        assert!(is_3connected_even_cycle(&r10).unwrap());
        assert!(is_ec_standard(&r10, 1000).unwrap());
        let mut tip = k5.edge_set();
        for f in k5.star(0).iter() {
            tip.remove(f);
        }
        let blocked = SignedGraph::new(k5, k5_star_complement(&tip)).unwrap();
        assert!(!is_ec_standard(&blocked, 1000).unwrap());
        let bip = SignedGraph::new(k4(), EdgeSet::new()).unwrap();
        assert!(!is_ec_standard(&bip, 1000).unwrap());
    }

    #[test]
    fn confining_sets() {
        // path s1 - v - s2 plus a direct edge
        let h = g(&[(0, 1, 3), (1, 3, 2), (2, 1, 2), (3, 3, 4), (4, 4, 3)]);
        let (phi1, phi2) = (eset![0], eset![1]);
        let out = find_confining_set_2(&h, 1, 2, &phi1, &phi2).unwrap();
        assert_eq!(out.y, eset![0, 1, 3, 4]);
        check_confining_set(&h, &[1, 2], &[phi1, phi2], &out).unwrap();
        let par = g(&[(0, 1, 2), (1, 1, 2)]);
        assert!(find_confining_set_2(&par, 1, 2, &eset![0], &eset![0]).is_err());
        assert!(find_confining_set_2(&par, 1, 2, &eset![0, 1], &EdgeSet::new()).is_err());
        // an edge s1-s2 in φ1 − φ2 ends up in φ̂2, so δ(s1) ∩ Y = φ1 − φ̂2
        let h = g(&[(0, 1, 2), (1, 2, 5)]);
        let out = find_confining_set_2(&h, 1, 2, &eset![0], &EdgeSet::new()).unwrap();
        assert_eq!(out.y, eset![1]);
        assert_eq!(out.phi_hat, vec![eset![0, 1]]);
        check_confining_set(&h, &[1, 2], &[eset![0], EdgeSet::new()], &out).unwrap();
    }

    #[test]
    fn confining_sets_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(16);
        let (mut two, mut three) = (0, 0);
        for _ in 0..2000 {
            let sg = random_signed(&mut rng, 6, 9);
            let h = &sg.graph;
            let vs: Vec<Vertex> = h.vertices().iter().copied().collect();
            if vs.len() < 3 {
                continue;
            }
            let pick = |rng: &mut rand_chacha::ChaCha8Rng, v: Vertex| -> EdgeSet {
                h.star(v).iter().filter(|_| rng.gen_bool(0.5)).collect()
            };
            let s = [vs[0], vs[1], vs[2]];
            let phi = [pick(&mut rng, s[0]), pick(&mut rng, s[1]), pick(&mut rng, s[2])];
            if let Ok(out) = find_confining_set_2(h, s[0], s[1], &phi[0], &phi[1]) {
                check_confining_set(h, &s[..2], &phi[..2], &out).unwrap();
                two += 1;
            }
            if let Ok(out) = find_confining_set_3(h, s, [&phi[0], &phi[1], &phi[2]]) {
                check_confining_set(h, &s, &phi, &out).unwrap();
                three += 1;
            }
        }
        assert!(two > 20 && three > 20, "{two} {three}");
    }
}

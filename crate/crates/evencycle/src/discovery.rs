//! Desk-scale search: equivalence classes, sibling discovery, matching
//! pairs and classification of sibling pairs.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::analysis::{blocking_signature, graphs_equivalent, is_bipartite_on, same_even_cycles, shortest_odd_circuit};
use crate::edgeset::EdgeSet;
use crate::error::{Error, Result};
use crate::flowers::factor_two_stars;
use crate::gf2::{cut_space, cycle_space, even_cut_space, GF2Space};
use crate::graph::{separations_dense, CanonKey, Dense, Edge, Graft, Graph, SignedGraph, Vertex, VertexSet};
use crate::ops::{delta_reduce, fold, triangle_vertices, whitney_flip, whitney_split_blocks, WSequence};
use crate::planted::PlantedKind;
use crate::templates::{
    build_named_twins, build_shih_outcome, build_split_siblings, second_twin_graph, signatures_from_terminals,
    split_reduce, validate_nova, GadgetPieces, ShihPart, ShufflePieces, SiblingPair, SplitTemplate, TiltPieces,
    TwinPieces, TwistPieces, WidgetPieces, NOVA_SUBSET_LIMIT,
};

/// The blocks of `g` as separate graphs (after splitting at cut vertices).
pub fn blocks_of(g: &Graph) -> Vec<Graph> {
    let split = whitney_split_blocks(g);
    let mut out: Vec<Graph> =
        split.edge_components(&split.edge_set()).into_iter().map(|x| split.subgraph(&x)).collect();
    out.sort_by_key(|b| b.edge_set());
    out
}

/// A visited graph with the state and flip it was reached from.
type State = (Graph, Option<(usize, EdgeSet)>);

/// BFS over flips of 2-separations, recording how each state was reached.
fn flip_bfs(g: &Graph, budget: usize, mut stop: impl FnMut(&Graph) -> bool) -> Result<(Vec<State>, Option<usize>)> {
    let mut states: Vec<State> = vec![(g.clone(), None)];
    let mut seen: HashMap<CanonKey, usize> = HashMap::from([(g.canonical_key(), 0)]);
    if stop(g) {
        return Ok((states, Some(0)));
    }
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let cur = states[i].0.clone();
        let d = Dense::new(&cur)?;
        for m in separations_dense(&d, 2) {
            let x = d.to_set(m);
            let next = whitney_flip(&cur, &x)?;
            let key = next.canonical_key();
            if seen.contains_key(&key) {
                continue;
            }
            if states.len() >= budget {
                return Err(Error::BudgetExceeded(budget));
            }
            seen.insert(key, states.len());
            let hit = stop(&next);
            states.push((next, Some((i, x))));
            if hit {
                return Ok((states.clone(), Some(states.len() - 1)));
            }
            queue.push_back(states.len() - 1);
        }
    }
    Ok((states, None))
}

/// Graphs reachable by flipping 2-separations, one per vertex renaming.
pub fn flip_class(g: &Graph, budget: usize) -> Result<Vec<Graph>> {
    Ok(flip_bfs(g, budget, |_| false)?.0.into_iter().map(|(h, _)| h).collect())
}

/// The Whitney class of `g` in block-split form: every combination of the
/// flip classes of its blocks, each member a disjoint union of blocks.
/// Gluing blocks back at any vertices gives the connected members.
pub fn equivalence_class(g: &Graph, budget: usize) -> Result<Vec<Graph>> {
    let mut members = vec![Graph::new()];
    for b in blocks_of(g) {
        let class = flip_class(&b, budget)?;
        if members.len().saturating_mul(class.len()) > budget {
            return Err(Error::BudgetExceeded(budget));
        }
        let mut next = Vec::with_capacity(members.len() * class.len());
        for m in &members {
            for c in &class {
                let mut u = m.clone();
                for &v in c.vertices() {
                    u.add_vertex(v);
                }
                for (e, a, b) in c.edges() {
                    u.add_edge(e, a, b)?;
                }
                next.push(u);
            }
        }
        members = next;
    }
    Ok(members)
}

/// A sequence of 2-separation flips taking `g1` to `g2` up to vertex
/// renaming, found by breadth-first search.
pub fn find_wsequence(g1: &Graph, g2: &Graph, budget: usize) -> Result<Option<WSequence>> {
    if g1.edge_set() != g2.edge_set() {
        return Ok(None);
    }
    let target = g2.canonical_key();
    let (states, hit) = flip_bfs(g1, budget, |h| h.canonical_key() == target)?;
    Ok(hit.map(|mut i| {
        let mut steps = Vec::new();
        while let Some((p, x)) = &states[i].1 {
            steps.push(x.clone());
            i = *p;
        }
        steps.reverse();
        WSequence::new(steps)
    }))
}

/// Whether two graphs on the same edges are related by Whitney-flips,
/// decided by search: blocks must agree as edge sets and each block pair
/// must be joined by 2-separation flips.
pub fn whitney_equivalent(g1: &Graph, g2: &Graph, budget: usize) -> Result<bool> {
    if g1.edge_set() != g2.edge_set() {
        return Ok(false);
    }
    let (b1, b2) = (blocks_of(g1), blocks_of(g2));
    if b1.len() != b2.len() || b1.iter().zip(&b2).any(|(x, y)| x.edge_set() != y.edge_set()) {
        return Ok(false);
    }
    for (x, y) in b1.iter().zip(&b2) {
        if find_wsequence(x, y, budget)?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Block-split canonical keys of every class member, for grouping.
pub fn class_keys(g: &Graph, budget: usize) -> Result<Vec<CanonKey>> {
    let mut keys: Vec<CanonKey> = equivalence_class(g, budget)?.iter().map(|h| h.canonical_key()).collect();
    keys.sort();
    keys.dedup();
    Ok(keys)
}

/// Bound on catalog graphs: vertex count, edge count and whether loops occur.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CatalogSpec {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub loops: bool,
}

/// A catalog graph as endpoint pairs; edge `i` is `ends[i]`.
pub type Ends = Vec<(u8, u8)>;

pub fn ends_graph(ends: &[(u8, u8)]) -> Graph {
    let mut g = Graph::new();
    for (e, &(a, b)) in ends.iter().enumerate() {
        g.add_edge(e as Edge, a as Vertex, b as Vertex).unwrap();
    }
    g
}

fn vertex_count(ends: &[(u8, u8)]) -> usize {
    ends.iter().map(|&(a, b)| a.max(b) as usize + 1).max().unwrap_or(0)
}

fn star_masks(ends: &[(u8, u8)], n: usize, with_loops: bool) -> Vec<u64> {
    let mut stars = vec![0u64; n];
    for (e, &(a, b)) in ends.iter().enumerate() {
        if a != b || with_loops {
            stars[a as usize] |= 1 << e;
            stars[b as usize] |= 1 << e;
        }
    }
    stars
}

fn small_key(ends: &[(u8, u8)]) -> Vec<u64> {
    let mut k = star_masks(ends, vertex_count(ends), true);
    k.sort_unstable();
    k
}

fn small_connected(ends: &[(u8, u8)]) -> bool {
    let n = vertex_count(ends);
    let mut reach = 1u64;
    loop {
        let before = reach;
        for &(a, b) in ends {
            if reach >> a & 1 == 1 || reach >> b & 1 == 1 {
                reach |= 1 << a | 1 << b;
            }
        }
        if reach == before {
            return reach.count_ones() as usize == n;
        }
    }
}

fn vertex_permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for v in (0..n as u8).filter(|v| !p.contains(v)) {
                next.push([p.as_slice(), &[v]].concat());
            }
        }
        out = next;
    }
    out
}

/// The edge list of `ends` up to renaming vertices and edges.
pub fn shape_key(ends: &[(u8, u8)]) -> Ends {
    shape_key_with(ends, &vertex_permutations(vertex_count(ends)))
}

fn shape_key_with(ends: &[(u8, u8)], perms: &[Vec<u8>]) -> Ends {
    let mut best: Option<Ends> = None;
    for p in perms {
        let mut k: Ends = ends
            .iter()
            .map(|&(a, b)| {
                let (a, b) = (p[a as usize], p[b as usize]);
                (a.min(b), a.max(b))
            })
            .collect();
        k.sort_unstable();
        if best.as_ref().is_none_or(|b| k < *b) {
            best = Some(k);
        }
    }
    best.unwrap_or_default()
}

/// Reduced row echelon form over GF(2); equal spans give equal output.
pub fn rref(vectors: impl IntoIterator<Item = u64>) -> Vec<u64> {
    let mut basis: Vec<u64> = Vec::new();
    for mut v in vectors {
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            for b in basis.iter_mut() {
                *b = (*b).min(*b ^ v);
            }
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis
}

/// Key of the cut space, hence of the cycle space.
pub fn cut_key(ends: &[(u8, u8)]) -> Vec<u64> {
    rref(star_masks(ends, vertex_count(ends), false))
}

/// Key of the orthogonal complement of the even-cycle space: cuts plus `Σ`.
pub fn signed_key(ends: &[(u8, u8)], sigma: u64) -> Vec<u64> {
    let mut vs = star_masks(ends, vertex_count(ends), false);
    vs.push(sigma);
    rref(vs)
}

/// Connected graphs with edges `0..m` for every `1 ≤ m ≤ max_edges`, one per
/// vertex renaming; the outer index is `m - 1`.
pub fn catalog(spec: CatalogSpec) -> Vec<Vec<Ends>> {
    let mut layer: Vec<Ends> = vec![Vec::new()];
    let mut out = Vec::new();
    for _ in 0..spec.max_edges {
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let mut next = Vec::new();
        for g in &layer {
            let n = vertex_count(g) as u8;
            let mut options = Vec::new();
            for u in 0..n {
                for v in u..n {
                    if u != v || spec.loops {
                        options.push((u, v));
                    }
                }
            }
            if (n as usize) < spec.max_vertices {
                options.extend((0..n).map(|u| (u, n)));
                if spec.loops {
                    options.push((n, n));
                }
            }
            if (n as usize) + 2 <= spec.max_vertices {
                options.push((n, n + 1));
            }
            for o in options {
                let mut h = g.clone();
                h.push(o);
                if seen.insert(small_key(&h)) {
                    next.push(h);
                }
            }
        }
        out.push(next.iter().filter(|g| small_connected(g)).cloned().collect());
        layer = next;
    }
    out
}

/// One connected graph per shape for every `1 ≤ m ≤ max_edges`, as the
/// canonical edge list of [`shape_key`]; the outer index is `m - 1`.
/// Each layer grows the previous one by an edge, which reaches every
/// connected graph since one always has a non-bridge or pendant edge.
pub fn shape_catalog(spec: CatalogSpec) -> Vec<Vec<Ends>> {
    let perms: Vec<Vec<Vec<u8>>> = (0..=spec.max_vertices.max(1)).map(vertex_permutations).collect();
    let mut layer: Vec<Ends> = vec![Vec::new()];
    let mut out = Vec::new();
    for _ in 0..spec.max_edges {
        let mut seen: HashSet<Ends> = HashSet::new();
        for g in &layer {
            let n = vertex_count(g).max(1) as u8;
            let mut options = Vec::new();
            for u in 0..n {
                options.extend((u..n).filter(|&v| u != v || spec.loops).map(|v| (u, v)));
                if (n as usize) < spec.max_vertices {
                    options.push((u, n));
                }
            }
            for o in options {
                let mut h = g.clone();
                h.push(o);
                seen.insert(shape_key_with(&h, &perms[vertex_count(&h)]));
            }
        }
        layer = seen.into_iter().collect();
        layer.sort_unstable();
        out.push(layer.clone());
    }
    out
}

/// Outcome of checking that cycle-space classes and flip classes agree.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WhitneyReport {
    pub graphs: usize,
    pub classes: usize,
    /// Graphs whose cycle space matches a class they cannot be flipped into,
    /// or class members with a different cycle space.
    pub mismatches: Vec<Graph>,
}

/// Groups the catalog by cycle space and checks each group against the
/// flip class of its first member.
pub fn whitney_check(spec: CatalogSpec, budget: usize) -> Result<WhitneyReport> {
    let mut report = WhitneyReport::default();
    for layer in catalog(spec) {
        let mut groups: HashMap<Vec<u64>, Vec<usize>> = HashMap::new();
        for (i, g) in layer.iter().enumerate() {
            groups.entry(cut_key(g)).or_default().push(i);
        }
        report.graphs += layer.len();
        report.classes += groups.len();
        for members in groups.values() {
            let rep = ends_graph(&layer[members[0]]);
            let class = equivalence_class(&rep, budget)?;
            let target = cycle_space(&rep);
            for h in &class {
                if !cycle_space(h).equals(&target)? {
                    report.mismatches.push(h.clone());
                }
            }
            let keys: HashSet<CanonKey> = class.iter().map(|h| h.canonical_key()).collect();
            for &i in &members[1..] {
                let g = ends_graph(&layer[i]);
                if !keys.contains(&whitney_split_blocks(&g).canonical_key()) {
                    report.mismatches.push(g);
                }
            }
        }
    }
    Ok(report)
}

fn odd_circuit_or_empty(sg: &SignedGraph) -> EdgeSet {
    shortest_odd_circuit(sg).unwrap_or_default()
}

/// `T_i = V_odd(G_i[C_{3-i}])` for shortest odd circuits `C_j`, checked for
/// equal even-cut spaces.
pub fn matching_terminals_from_signatures(a: &SignedGraph, b: &SignedGraph) -> Result<(VertexSet, VertexSet)> {
    if !same_even_cycles(a, b)? {
        return Err(Error::SpacesDiffer);
    }
    let (c1, c2) = (odd_circuit_or_empty(a), odd_circuit_or_empty(b));
    let t1 = a.graph.odd_vertices(&c2);
    let t2 = b.graph.odd_vertices(&c1);
    let g1 = Graft::new(a.graph.clone(), t1.clone())?;
    let g2 = Graft::new(b.graph.clone(), t2.clone())?;
    if !even_cut_space(&g1)?.equals(&even_cut_space(&g2)?)? {
        return Err(Error::CheckFailed("matching terminals give different even-cut spaces".into()));
    }
    Ok((t1, t2))
}

/// Whether every odd circuit (up to `limit` of each side) yields the same
/// terminals.
pub fn terminal_choices_agree(a: &SignedGraph, b: &SignedGraph, limit: usize) -> Result<bool> {
    let (t1, t2) = matching_terminals_from_signatures(a, b)?;
    for (from, onto, t) in [(b, &a.graph, &t1), (a, &b.graph, &t2)] {
        let odd = from
            .graph
            .circuits(&from.graph.edge_set(), usize::MAX)
            .into_iter()
            .filter(|c| c.intersection(&from.signature).len() % 2 == 1)
            .take(limit);
        for c in odd {
            if onto.odd_vertices(&c) != *t {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `Σ_{3-i} = δ_{G_i}(t_i)` for the smallest `t_i`, checked for equal
/// even-cycle spaces.
pub fn matching_signatures_from_terminals(a: &Graft, b: &Graft) -> Result<(EdgeSet, EdgeSet)> {
    if !even_cut_space(a)?.equals(&even_cut_space(b)?)? {
        return Err(Error::SpacesDiffer);
    }
    let (s1, s2) = signatures_from_terminals(&a.graph, &a.terminals, &b.graph, &b.terminals);
    let x = SignedGraph { graph: a.graph.clone(), signature: s1.clone() };
    let y = SignedGraph { graph: b.graph.clone(), signature: s2.clone() };
    if !same_even_cycles(&x, &y)? {
        return Err(Error::CheckFailed("matching signatures give different even-cycle spaces".into()));
    }
    Ok((s1, s2))
}

/// Whether every choice of `t_i` gives signatures differing by a cut.
pub fn signature_choices_agree(a: &Graft, b: &Graft) -> Result<bool> {
    let (s1, s2) = matching_signatures_from_terminals(a, b)?;
    let agree = |from: &Graft, onto: &Graph, s: &EdgeSet| {
        let cuts = cut_space(onto);
        from.terminals.iter().all(|&t| cuts.contains(&from.graph.star(t).sym_diff(s)))
    };
    Ok(agree(b, &a.graph, &s1) && agree(a, &b.graph, &s2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    DeltaReducible,
    Simple,
    Nova,
    Reducible,
    Shuffle,
    Tilt,
    Twist,
    Widget,
    Gadget,
    Shih2,
    Shih3,
    Unclassified,
}

impl Tag {
    pub const ALL: [Tag; 12] = [
        Tag::DeltaReducible,
        Tag::Simple,
        Tag::Nova,
        Tag::Reducible,
        Tag::Shuffle,
        Tag::Tilt,
        Tag::Twist,
        Tag::Widget,
        Tag::Gadget,
        Tag::Shih2,
        Tag::Shih3,
        Tag::Unclassified,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Tag::DeltaReducible => "delta-reducible",
            Tag::Simple => "simple",
            Tag::Nova => "nova",
            Tag::Reducible => "reducible",
            Tag::Shuffle => "shuffle",
            Tag::Tilt => "tilt",
            Tag::Twist => "twist",
            Tag::Widget => "widget",
            Tag::Gadget => "gadget",
            Tag::Shih2 => "shih-2",
            Tag::Shih3 => "shih-3",
            Tag::Unclassified => "unclassified",
        }
    }

    pub fn from_name(s: &str) -> Option<Tag> {
        Tag::ALL.into_iter().find(|t| t.name() == s)
    }

    /// The tag a planted construction must receive.
    pub fn of_planted(kind: PlantedKind) -> Option<Tag> {
        Some(match kind {
            PlantedKind::Simple => Tag::Simple,
            PlantedKind::Nova => Tag::Nova,
            PlantedKind::Shuffle => Tag::Shuffle,
            PlantedKind::Tilt => Tag::Tilt,
            PlantedKind::Twist => Tag::Twist,
            PlantedKind::Widget => Tag::Widget,
            PlantedKind::Gadget => Tag::Gadget,
            PlantedKind::Shih2 => Tag::Shih2,
            PlantedKind::Shih3 => Tag::Shih3,
            PlantedKind::TriangleTriad => return None,
        })
    }
}

/// Two signed graphs on the same edges with equal even-cycle spaces and
/// inequivalent graphs, with their matching terminals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SiblingRecord {
    pub g1: Graph,
    pub sigma1: EdgeSet,
    pub t1: VertexSet,
    pub g2: Graph,
    pub sigma2: EdgeSet,
    pub t2: VertexSet,
    pub tags: Vec<Tag>,
}

impl SiblingRecord {
    /// Record from signed graphs; terminals are recomputed.
    pub fn new(a: SignedGraph, b: SignedGraph) -> Result<SiblingRecord> {
        let (t1, t2) = matching_terminals_from_signatures(&a, &b)?;
        Ok(SiblingRecord {
            g1: a.graph,
            sigma1: a.signature,
            t1,
            g2: b.graph,
            sigma2: b.signature,
            t2,
            tags: Vec::new(),
        })
    }

    pub fn from_pair(p: &SiblingPair) -> SiblingRecord {
        SiblingRecord {
            g1: p.g1.clone(),
            sigma1: p.sigma1.clone(),
            t1: p.t1.clone(),
            g2: p.g2.clone(),
            sigma2: p.sigma2.clone(),
            t2: p.t2.clone(),
            tags: Vec::new(),
        }
    }

    pub fn pair(&self) -> SiblingPair {
        SiblingPair {
            g1: self.g1.clone(),
            t1: self.t1.clone(),
            sigma1: self.sigma1.clone(),
            g2: self.g2.clone(),
            t2: self.t2.clone(),
            sigma2: self.sigma2.clone(),
        }
    }

    /// Even-cycle equality, inequivalence and the matching terminals.
    pub fn verify(&self) -> Result<()> {
        let p = self.pair();
        let (a, b) = p.signed();
        if !same_even_cycles(&a, &b)? {
            return Err(Error::SpacesDiffer);
        }
        if !p.inequivalent()? {
            return Err(Error::NotSiblings);
        }
        let (g1, g2) = p.grafts()?;
        if !even_cut_space(&g1)?.equals(&even_cut_space(&g2)?)? {
            return Err(Error::CheckFailed("terminals do not match the signatures".into()));
        }
        Ok(())
    }
}

/// Sibling pairs among connected graphs within the bounds: one graph per
/// cycle space, every signature up to resigning.
pub fn search_siblings(spec: CatalogSpec, budget: usize) -> Result<Vec<SiblingRecord>> {
    let perms: Vec<Vec<Vec<u8>>> = (0..=spec.max_vertices).map(vertex_permutations).collect();
    let mut out = Vec::new();
    for layer in catalog(spec) {
        // G1 runs over one labeled copy of each shape; G2 over one graph per
        // cycle space, preferring those copies.
        let mut shapes: HashSet<Ends> = HashSet::new();
        let mut first = vec![false; layer.len()];
        for (i, g) in layer.iter().enumerate() {
            first[i] = shapes.insert(shape_key_with(g, &perms[vertex_count(g)]));
        }
        let mut reps: HashMap<Vec<u64>, usize> = HashMap::new();
        for (i, g) in layer.iter().enumerate() {
            let r = reps.entry(cut_key(g)).or_insert(i);
            if first[i] && !first[*r] {
                *r = i;
            }
        }
        let mut reps: Vec<usize> = reps.into_values().collect();
        reps.sort_unstable();
        let mut groups: HashMap<Vec<u64>, Vec<(usize, u64)>> = HashMap::new();
        let mut entries = 0usize;
        for &i in &reps {
            let g = &layer[i];
            for sigma in signature_classes(g) {
                entries += 1;
                if entries > budget.saturating_mul(64) {
                    return Err(Error::BudgetExceeded(budget));
                }
                groups.entry(signed_key(g, sigma)).or_default().push((i, sigma));
            }
        }
        let mut found = Vec::new();
        for members in groups.values() {
            for &(i, si) in members.iter().filter(|(i, _)| first[*i]) {
                for &(j, sj) in members {
                    if i != j && !(first[j] && j < i) {
                        found.push(((i, si), (j, sj)));
                    }
                }
            }
        }
        found.sort_unstable();
        for ((i, si), (j, sj)) in found {
            let a = SignedGraph { graph: ends_graph(&layer[i]), signature: mask_set(si) };
            let b = SignedGraph { graph: ends_graph(&layer[j]), signature: mask_set(sj) };
            out.push(SiblingRecord::new(a, b)?);
        }
    }
    Ok(out)
}

fn mask_set(m: u64) -> EdgeSet {
    (0..64).filter(|i| m >> i & 1 == 1).collect()
}

/// One signature per resigning class: subsets of the edges outside a
/// spanning forest.
fn signature_classes(ends: &[(u8, u8)]) -> Vec<u64> {
    let n = vertex_count(ends);
    let mut uf: Vec<usize> = (0..n).collect();
    fn find(uf: &mut [usize], mut x: usize) -> usize {
        while uf[x] != x {
            uf[x] = uf[uf[x]];
            x = uf[x];
        }
        x
    }
    let mut free = Vec::new();
    for (e, &(a, b)) in ends.iter().enumerate() {
        let (ra, rb) = (find(&mut uf, a as usize), find(&mut uf, b as usize));
        if ra == rb {
            free.push(e);
        } else {
            uf[ra] = rb;
        }
    }
    (0u64..1 << free.len())
        .map(|bits| free.iter().enumerate().filter(|(k, _)| bits >> k & 1 == 1).fold(0u64, |m, (_, &e)| m | 1 << e))
        .collect()
}

/// Default search budget for classification and class enumeration.
pub const DEFAULT_BUDGET: usize = 20_000;

/// Largest edge count for the exhaustive scan of common bipartite pieces.
pub const DELTA_SCAN_LIMIT: usize = 16;

/// Structures found by [`classify_pair`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A triangle of both graphs, even on both sides.
    DeltaTriangle([Edge; 3]),
    /// A common bipartite piece with three boundary vertices in both graphs.
    DeltaPiece(EdgeSet),
    /// Both sides split a common equivalent graph `h`, at `x` and at `y`.
    Simple {
        h: Graph,
        x: Vertex,
        y: Vertex,
    },
    Nova {
        star: Vec<EdgeSet>,
    },
    Reducible {
        x: EdgeSet,
    },
    Quad {
        tag: Tag,
        pieces: Box<TwinPieces>,
        swapped: bool,
    },
    Shih {
        which: u8,
        parts: Vec<EdgeSet>,
        swapped: bool,
    },
}

impl Witness {
    pub fn tag(&self) -> Tag {
        match self {
            Witness::DeltaTriangle(_) | Witness::DeltaPiece(_) => Tag::DeltaReducible,
            Witness::Simple { .. } => Tag::Simple,
            Witness::Nova { .. } => Tag::Nova,
            Witness::Reducible { .. } => Tag::Reducible,
            Witness::Quad { tag, .. } => *tag,
            Witness::Shih { which: 2, .. } => Tag::Shih2,
            Witness::Shih { .. } => Tag::Shih3,
        }
    }

    /// One line naming the witnessing structure.
    pub fn describe(&self) -> String {
        let sets = |xs: &[EdgeSet]| xs.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        match self {
            Witness::DeltaTriangle(t) => format!("common even triangle {t:?}"),
            Witness::DeltaPiece(y) => format!("common bipartite piece {y:?}"),
            Witness::Simple { x, y, .. } => format!("common split graph at vertices {x} and {y}"),
            Witness::Nova { star } => format!("w-star {}", sets(star)),
            Witness::Reducible { x } => format!("reduction along {x:?}"),
            Witness::Quad { tag, pieces, swapped } => {
                let detail = match pieces.as_ref() {
                    TwinPieces::Shuffle(p) => format!("terminals {:?} parts {}", p.abcd, sets(&p.parts)),
                    TwinPieces::Tilt(p) => format!("c={} d={} X1={:?} X2={:?}", p.c, p.d, p.x1, p.x2),
                    TwinPieces::Twist(p) => format!("b={} c={} d={} X1={:?} X2={:?}", p.b, p.c, p.d, p.x1, p.x2),
                    TwinPieces::Widget(p) => format!("v1={} z1={} w1={} w2={} γ={:?}", p.v1, p.z1, p.w1, p.w2, p.gamma),
                    TwinPieces::Gadget(p) => format!("v1={} z1={} u1={} w={:?} γ={:?}", p.v1, p.z1, p.u1, p.w, p.gamma),
                };
                format!("{} pieces {detail}{}", tag.name(), if *swapped { " (second graph as base)" } else { "" })
            }
            Witness::Shih { which, parts, swapped } => {
                format!("outcome {which} parts {}{}", sets(parts), if *swapped { " (second graph as G')" } else { "" })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub tags: BTreeSet<Tag>,
    pub witnesses: Vec<Witness>,
    /// Why nothing was found, when the tag set is `{unclassified}`.
    pub reason: Option<String>,
}

/// Searches for every witnessing structure: Δ-reduction first, then split
/// witnesses, then quad witnesses, then Shih outcomes.
pub fn classify_pair(rec: &SiblingRecord, budget: usize) -> Classification {
    let pair = rec.pair();
    let mut witnesses = Vec::new();
    let mut notes = Vec::new();
    let mut run = |name: &str, r: Result<Vec<Witness>>| match r {
        Ok(w) => witnesses.extend(w),
        Err(e) => notes.push(format!("{name}: {e}")),
    };
    run("delta", delta_witnesses(&pair));
    if pair.t1.len() == 2 && pair.t2.len() == 2 {
        run("split", split_witnesses(&pair, budget));
    }
    if pair.t1.len() == 4 && pair.t2.len() == 4 {
        run("quad", quad_witnesses(&pair, budget));
    }
    if pair.t1.is_empty() || pair.t2.is_empty() {
        run("shih", shih_witnesses(&pair, budget));
    }
    let mut tags: BTreeSet<Tag> = witnesses.iter().map(Witness::tag).collect();
    let reason = if tags.is_empty() {
        tags.insert(Tag::Unclassified);
        let mut r = format!("no witness found for |T1| = {}, |T2| = {}", pair.t1.len(), pair.t2.len());
        for n in notes {
            r.push_str("; ");
            r.push_str(&n);
        }
        Some(r)
    } else {
        None
    };
    Classification { tags, witnesses, reason }
}

fn parity(sigma: &EdgeSet, x: &EdgeSet) -> bool {
    x.intersection(sigma).len() % 2 == 1
}

fn delta_witnesses(p: &SiblingPair) -> Result<Vec<Witness>> {
    let mut out = Vec::new();
    let g1 = &p.g1;
    for c in g1.circuits(&g1.edge_set(), 3) {
        if c.len() != 3 {
            continue;
        }
        let tri: [Edge; 3] = c.to_vec().try_into().unwrap();
        if triangle_vertices(&p.g2, tri).is_ok() && !parity(&p.sigma1, &c) && !parity(&p.sigma2, &c) {
            out.push(Witness::DeltaTriangle(tri));
        }
    }
    if !out.is_empty() || g1.num_edges() > DELTA_SCAN_LIMIT {
        return Ok(out);
    }
    let (a, b) = p.signed();
    let d = Dense::new(g1)?;
    for m in separations_dense(&d, 3) {
        let y = d.to_set(m);
        let small = y.len() <= 3 && g1.circuits(&y, 3).len() == 1;
        if small || !is_bipartite_on(&a, &y) || !is_bipartite_on(&b, &y) {
            continue;
        }
        if delta_reduce((&a, &b), &y).is_ok() {
            out.push(Witness::DeltaPiece(y));
            break;
        }
    }
    Ok(out)
}

/// `G / T` with the identified vertex, and `α = δ(t)` of the dropped one.
fn quotient(g: &Graph, t: &VertexSet) -> Result<(Graph, Vertex, EdgeSet)> {
    let v: Vec<Vertex> = t.iter().copied().collect();
    Ok((g.identify(v[0], v[1])?, v[0], g.star(v[1])))
}

fn split_witnesses(p: &SiblingPair, budget: usize) -> Result<Vec<Witness>> {
    let (h1, v1, a1) = quotient(&p.g1, &p.t1)?;
    let (h2, v2, a2) = quotient(&p.g2, &p.t2)?;
    let mut out = Vec::new();
    let simple = simple_witness(p, &h1, &a1, &a2, budget);
    out.extend(nova_witness(&h1, v1, &a1, &h2, v2, &a2, budget));
    let reducible = reducible_witness(p);
    let mut err = None;
    for r in [simple, reducible] {
        match r {
            Ok(w) => out.extend(w),
            Err(e) => err = Some(e),
        }
    }
    match err {
        Some(e) if out.is_empty() => Err(e),
        _ => Ok(out),
    }
}

fn same_pair(built: &SiblingPair, p: &SiblingPair) -> Result<bool> {
    Ok(graphs_equivalent(&built.g1, &p.g1)? && graphs_equivalent(&built.g2, &p.g2)?)
}

/// A member of the class of `h1` in which single vertices block `α1` and
/// `α2`, and whose splits reproduce the pair.
fn simple_witness(p: &SiblingPair, h1: &Graph, a1: &EdgeSet, a2: &EdgeSet, budget: usize) -> Result<Option<Witness>> {
    let loops = h1.loops();
    let core = h1.delete_edges(&loops);
    let anchor = *h1.vertices().first().unwrap();
    for mut h in flip_class(&core, budget)? {
        for e in loops.iter() {
            h.add_edge(e, anchor, anchor)?;
        }
        let block = |alpha: &EdgeSet, v: Vertex| {
            blocking_signature(&SignedGraph { graph: h.clone(), signature: alpha.clone() }, &[v])
        };
        let vs: Vec<Vertex> = h.vertices().iter().copied().collect();
        for &x in &vs {
            let Some(b1) = block(a1, x) else { continue };
            for &y in &vs {
                let Some(b2) = block(a2, y) else { continue };
                let t = SplitTemplate {
                    h1: h.clone(),
                    v1: x,
                    alpha1: b1.clone(),
                    h2: h.clone(),
                    v2: y,
                    alpha2: b2,
                    s: None,
                };
                if let Ok(built) = build_split_siblings(&t) {
                    if same_pair(&built, p)? {
                        return Ok(Some(Witness::Simple { h, x, y }));
                    }
                }
            }
        }
    }
    Ok(None)
}

fn nova_witness(
    h1: &Graph,
    v1: Vertex,
    a1: &EdgeSet,
    h2: &Graph,
    v2: Vertex,
    a2: &EdgeSet,
    budget: usize,
) -> Option<Witness> {
    let loops = h1.loops();
    let (c1, c2) = (h1.delete_edges(&loops), h2.delete_edges(&loops));
    let is_nova = |g1: &Graph, g2: &Graph, center2: Vertex, sets: &[EdgeSet]| {
        let t = SplitTemplate {
            h1: g1.clone(),
            v1,
            alpha1: a1.difference(&loops),
            h2: g2.clone(),
            v2: center2,
            alpha2: a2.difference(&loops),
            s: Some(WSequence::new(sets.to_vec())),
        };
        validate_nova(&t, NOVA_SUBSET_LIMIT).is_ok_and(|r| r.is_nova())
    };
    if let Ok(two) = factor_two_stars(&c1, &c2, v1, v2, budget) {
        let sets = &two.star.sets;
        let ground = c1.edge_set();
        for flips in 0u32..1 << sets.len().min(4) {
            let chosen: Vec<EdgeSet> = sets
                .iter()
                .enumerate()
                .map(|(i, x)| if flips >> i & 1 == 1 { ground.difference(x) } else { x.clone() })
                .collect();
            if is_nova(&two.h, &two.h2, two.star2.center, &chosen) {
                return Some(Witness::Nova { star: chosen });
            }
        }
    }
    // Stars of one or two sets at the center, read directly off the core.
    let d = Dense::new(&c1).ok()?;
    let at_center: Vec<EdgeSet> = separations_dense(&d, 2)
        .into_iter()
        .map(|m| d.to_set(m))
        .filter(|x| c1.boundary(x).is_ok_and(|b| b.contains(&v1)))
        .collect();
    let mut tries = 0usize;
    for (i, x) in at_center.iter().enumerate() {
        for y in std::iter::once(None).chain(at_center[i + 1..].iter().map(Some)) {
            tries += 1;
            if tries > budget {
                return None;
            }
            let sets: Vec<EdgeSet> = match y {
                None => vec![x.clone()],
                Some(y) if x.is_disjoint(y) => vec![x.clone(), y.clone()],
                Some(_) => continue,
            };
            if is_nova(&c1, &c2, v2, &sets) {
                return Some(Witness::Nova { star: sets });
            }
        }
    }
    None
}

/// Bridges of `G1` at `T1` whose unions give a reduction.
fn reducible_witness(p: &SiblingPair) -> Result<Option<Witness>> {
    let bridges = p.g1.bridges(&p.g1.edge_set(), &p.t1);
    if bridges.len() < 2 || bridges.len() > 12 {
        return Ok(None);
    }
    for mask in 1u32..(1 << (bridges.len() - 1)) {
        let x: EdgeSet = bridges
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .fold(EdgeSet::new(), |acc, (_, b)| acc.union(b));
        if p.g1.boundary(&x)? != p.t1 {
            continue;
        }
        if split_reduce(p, &x).is_ok() {
            return Ok(Some(Witness::Reducible { x }));
        }
    }
    Ok(None)
}

fn quad_witnesses(p: &SiblingPair, budget: usize) -> Result<Vec<Witness>> {
    let mut out = Vec::new();
    let mut exhausted = None;
    for swapped in [false, true] {
        let q = if swapped { p.swapped() } else { p.clone() };
        let cuts2 = cut_space(&q.g2);
        let searches = [
            shuffle_search(&q, &cuts2, budget, &mut 0),
            tilt_search(&q, &cuts2, budget, &mut 0),
            twist_search(&q, &cuts2, budget, &mut 0),
            fold_search(&q, &cuts2),
        ];
        for r in searches {
            let w = match r {
                Ok(Some(w)) => w,
                Ok(None) => continue,
                Err(e) => {
                    exhausted = Some(e);
                    continue;
                }
            };
            let tag = match &w {
                TwinPieces::Shuffle(_) => Tag::Shuffle,
                TwinPieces::Tilt(_) => Tag::Tilt,
                TwinPieces::Twist(_) => Tag::Twist,
                TwinPieces::Widget(_) => Tag::Widget,
                TwinPieces::Gadget(_) => Tag::Gadget,
            };
            if !out.iter().any(|x: &Witness| x.tag() == tag) {
                out.push(Witness::Quad { tag, pieces: Box::new(w), swapped });
            }
        }
    }
    match exhausted {
        Some(e) if out.is_empty() => Err(e),
        _ => Ok(out),
    }
}

/// Builds the twins and compares them with the pair. `cuts2` is the cut
/// space of `G2`, used to reject most candidates before the full build.
fn reproduces(pieces: &TwinPieces, p: &SiblingPair, cuts2: &GF2Space) -> Result<bool> {
    if let Some(g2) = second_twin_graph(pieces) {
        if !cuts_match(&g2, cuts2) {
            return Ok(false);
        }
    }
    match build_named_twins(pieces) {
        Ok(t) => same_pair(&t.pair, p),
        Err(_) => Ok(false),
    }
}

/// `cut(g) = cuts`: every star lies in `cuts` and the ranks agree.
fn cuts_match(g: &Graph, cuts: &GF2Space) -> bool {
    let rank = g.vertices().len() - g.vertex_components().len();
    rank == cuts.dim() && g.vertices().iter().all(|&v| cuts.contains(&g.star(v)))
}

fn spend(tries: &mut usize, budget: usize) -> Result<()> {
    *tries += 1;
    if *tries > budget {
        return Err(Error::BudgetExceeded(budget));
    }
    Ok(())
}

fn permutations(v: &[Vertex]) -> Vec<Vec<Vertex>> {
    if v.len() <= 1 {
        return vec![v.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..v.len() {
        let mut rest = v.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn union_of(bridges: &[EdgeSet], pick: impl Fn(usize) -> bool) -> EdgeSet {
    bridges.iter().enumerate().filter(|(i, _)| pick(*i)).fold(EdgeSet::new(), |acc, (_, b)| acc.union(b))
}

fn shuffle_search(p: &SiblingPair, cuts2: &GF2Space, budget: usize, tries: &mut usize) -> Result<Option<TwinPieces>> {
    let g = &p.g1;
    let bridges = g.bridges(&g.edge_set(), &p.t1);
    let b = bridges.len();
    if b > 8 {
        return Ok(None);
    }
    let t: Vec<Vertex> = p.t1.iter().copied().collect();
    for abcd in permutations(&t) {
        // Part 0 is the identity; fixing the first bridge there removes the
        // relabeling symmetry.
        for code in 0..4usize.pow(b.saturating_sub(1) as u32) {
            spend(tries, budget)?;
            let part_of = |i: usize| if i == 0 { 0 } else { code / 4usize.pow(i as u32 - 1) % 4 };
            let parts: [EdgeSet; 4] = std::array::from_fn(|k| union_of(&bridges, |i| part_of(i) == k));
            let pieces = TwinPieces::Shuffle(ShufflePieces {
                graph: g.clone(),
                abcd: [abcd[0], abcd[1], abcd[2], abcd[3]],
                parts,
            });
            if reproduces(&pieces, p, cuts2)? {
                return Ok(Some(pieces));
            }
        }
    }
    Ok(None)
}

fn edges_joining(g: &Graph, u: Vertex, v: Vertex) -> Vec<Edge> {
    g.star(u).intersection(&g.star(v)).to_vec()
}

/// Subsets of `xs` with at most `k` elements.
fn small_subsets(xs: &[Edge], k: usize) -> Vec<Vec<Edge>> {
    let mut out = vec![Vec::new()];
    for &x in xs {
        let grown: Vec<Vec<Edge>> = out.iter().filter(|s| s.len() < k).map(|s| [s.as_slice(), &[x]].concat()).collect();
        out.extend(grown);
    }
    out
}

/// Ways to place up to two edges in two named slots.
fn slot_orders(xs: &[Edge]) -> Vec<[Option<Edge>; 2]> {
    match xs {
        [] => vec![[None, None]],
        [x] => vec![[Some(*x), None], [None, Some(*x)]],
        [x, y] => vec![[Some(*x), Some(*y)], [Some(*y), Some(*x)]],
        _ => Vec::new(),
    }
}

fn efgh_choices(first: &[Edge], second: &[Edge]) -> Vec<[Option<Edge>; 4]> {
    let mut out = Vec::new();
    for [e, f] in slot_orders(first) {
        for [g, h] in slot_orders(second) {
            out.push([e, f, g, h]);
        }
    }
    out
}

/// Splits `rest` at `attach` into a side holding `one` and a side holding
/// `two`; bridges touching neither go either way.
fn two_sides(g: &Graph, rest: &EdgeSet, attach: &VertexSet, one: &[Vertex], two: &[Vertex]) -> Vec<(EdgeSet, EdgeSet)> {
    let bridges = g.bridges(rest, attach);
    let mut fixed = Vec::new();
    let mut free = Vec::new();
    for (i, x) in bridges.iter().enumerate() {
        let vs = g.vertices_of(x);
        let (a, b) = (one.iter().any(|v| vs.contains(v)), two.iter().any(|v| vs.contains(v)));
        match (a, b) {
            (true, true) => return Vec::new(),
            (true, false) => fixed.push((i, 0)),
            (false, true) => fixed.push((i, 1)),
            _ => free.push(i),
        }
    }
    if free.len() > 10 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for mask in 0u32..1 << free.len() {
        let mut sides = [EdgeSet::new(), EdgeSet::new()];
        for &(i, s) in &fixed {
            sides[s].union_with(&bridges[i]);
        }
        for (k, &i) in free.iter().enumerate() {
            sides[(mask >> k & 1) as usize].union_with(&bridges[i]);
        }
        let [x1, x2] = sides;
        out.push((x1, x2));
    }
    out
}

fn tilt_search(p: &SiblingPair, cuts2: &GF2Space, budget: usize, tries: &mut usize) -> Result<Option<TwinPieces>> {
    let g = &p.g1;
    let t: Vec<Vertex> = p.t1.iter().copied().collect();
    let others: Vec<Vertex> = g.vertices().iter().copied().filter(|v| !p.t1.contains(v)).collect();
    for order in permutations(&t) {
        let (a1, a2, b1, b2) = (order[0], order[1], order[2], order[3]);
        let (ae, be) = (edges_joining(g, a1, a2), edges_joining(g, b1, b2));
        if ae.len() > 2 || be.len() > 2 {
            continue;
        }
        let extra: EdgeSet = ae.iter().chain(&be).copied().collect();
        let rest = g.edge_set().difference(&extra);
        for (i, &c) in others.iter().enumerate() {
            for &d in &others[i + 1..] {
                for (x1, x2) in two_sides(g, &rest, &[c, d].into(), &[a1, b1], &[a2, b2]) {
                    for efgh in efgh_choices(&ae, &be) {
                        spend(tries, budget)?;
                        let pieces = TwinPieces::Tilt(TiltPieces {
                            graph: g.clone(),
                            a: [a1, a2],
                            b: [b1, b2],
                            c,
                            d,
                            efgh,
                            x1: x1.clone(),
                            x2: x2.clone(),
                        });
                        if reproduces(&pieces, p, cuts2)? {
                            return Ok(Some(pieces));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

fn twist_search(p: &SiblingPair, cuts2: &GF2Space, budget: usize, tries: &mut usize) -> Result<Option<TwinPieces>> {
    let g = &p.g1;
    let t: Vec<Vertex> = p.t1.iter().copied().collect();
    let others: Vec<Vertex> = g.vertices().iter().copied().filter(|v| !p.t1.contains(v)).collect();
    for order in permutations(&t) {
        let (a1, a2, b, c) = (order[0], order[1], order[2], order[3]);
        let ae = edges_joining(g, a1, a2);
        if ae.len() > 2 {
            continue;
        }
        // Edges from b to c may also sit inside the parts.
        for be in small_subsets(&edges_joining(g, b, c), 2) {
            let extra: EdgeSet = ae.iter().chain(&be).copied().collect();
            let rest = g.edge_set().difference(&extra);
            for &d in &others {
                for (x1, x2) in two_sides(g, &rest, &[b, c, d].into(), &[a1], &[a2]) {
                    for efgh in efgh_choices(&ae, &be) {
                        spend(tries, budget)?;
                        let pieces = TwinPieces::Twist(TwistPieces {
                            graph: g.clone(),
                            a: [a1, a2],
                            b,
                            c,
                            d,
                            efgh,
                            x1: x1.clone(),
                            x2: x2.clone(),
                        });
                        if reproduces(&pieces, p, cuts2)? {
                            return Ok(Some(pieces));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Folds `G1` at every ordered pairing of its terminals and reads off the
/// widget and gadget patterns.
fn fold_search(p: &SiblingPair, cuts2: &GF2Space) -> Result<Option<TwinPieces>> {
    let gr = Graft::new(p.g1.clone(), p.t1.clone())?;
    let t: Vec<Vertex> = p.t1.iter().copied().collect();
    for o in permutations(&t) {
        let f = fold(&gr, ((o[0], o[1]), (o[2], o[3])))?;
        let h = &f.signed.graph;
        for pieces in widget_patterns(h, f.s, f.t, &f.alpha, &f.beta)
            .into_iter()
            .chain(gadget_patterns(h, f.s, f.t, &f.alpha, &f.beta))
        {
            if reproduces(&pieces, p, cuts2)? {
                return Ok(Some(pieces));
            }
        }
    }
    Ok(None)
}

/// Vertices other than `avoid` whose star is two parallel pairs, one of
/// them to `v`; returns the vertex and the far end of the other pair.
fn double_pairs(h: &Graph, v: Vertex, avoid: &[Vertex]) -> Vec<(Vertex, Vertex)> {
    let mut out = Vec::new();
    for &w in h.vertices() {
        if w == v || avoid.contains(&w) {
            continue;
        }
        let star = h.star(w);
        if star.len() != 4 || !star.is_disjoint(&h.loops()) {
            continue;
        }
        let ends: BTreeMap<Vertex, usize> = star.iter().fold(BTreeMap::new(), |mut m, e| {
            *m.entry(h.other_end(e, w).unwrap()).or_default() += 1;
            m
        });
        if ends.len() == 2 && ends.get(&v) == Some(&2) {
            let z = *ends.keys().find(|&&u| u != v).unwrap();
            out.push((w, z));
        }
    }
    out
}

fn loop_orders(al: &EdgeSet, bl: &EdgeSet) -> Vec<[Edge; 4]> {
    let (a, b) = (al.to_vec(), bl.to_vec());
    if a.len() != 2 || b.len() != 2 {
        return Vec::new();
    }
    vec![[a[0], a[1], b[0], b[1]], [a[1], a[0], b[0], b[1]], [a[0], a[1], b[1], b[0]], [a[1], a[0], b[1], b[0]]]
}

fn widget_patterns(h: &Graph, v1: Vertex, w1: Vertex, alpha: &EdgeSet, beta: &EdgeSet) -> Vec<TwinPieces> {
    let loops = h.loops();
    let mut out = Vec::new();
    if loops.len() != 4 {
        return out;
    }
    let ef = beta.difference(&loops).to_vec();
    if ef.len() != 2 || edges_joining(h, v1, w1).len() < 2 {
        return out;
    }
    let e_in: Vec<Edge> = ef.iter().copied().filter(|&e| alpha.contains(e)).collect();
    if e_in.len() != 1 {
        return out;
    }
    let e = e_in[0];
    let f = *ef.iter().find(|&&x| x != e).unwrap();
    for (w2, z1) in double_pairs(h, v1, &[w1]) {
        let at_v: Vec<Edge> = edges_joining(h, v1, w2);
        let a_in: Vec<Edge> = at_v.iter().copied().filter(|&x| alpha.contains(x)).collect();
        if a_in.len() != 1 {
            continue;
        }
        let a = a_in[0];
        let b = *at_v.iter().find(|&&x| x != a).unwrap();
        let cd = edges_joining(h, z1, w2);
        let gamma = alpha.difference(&loops).difference(&[a, e].into_iter().collect());
        for (c, d) in [(cd[0], cd[1]), (cd[1], cd[0])] {
            for ls in loop_orders(&alpha.intersection(&loops), &beta.intersection(&loops)) {
                out.push(TwinPieces::Widget(WidgetPieces {
                    h1: h.clone(),
                    v1,
                    z1,
                    w1,
                    w2,
                    abcdef: [a, b, c, d, e, f],
                    loops: ls,
                    gamma: gamma.clone(),
                }));
            }
        }
    }
    out
}

fn gadget_patterns(h: &Graph, v1: Vertex, w1: Vertex, alpha: &EdgeSet, beta: &EdgeSet) -> Vec<TwinPieces> {
    let loops = h.loops();
    let mut out = Vec::new();
    if loops.len() != 4 {
        return out;
    }
    let first: Vec<(Vertex, Vertex)> = double_pairs(h, v1, &[]).into_iter().filter(|&(w, _)| w == w1).collect();
    let Some(&(_, z1)) = first.first() else { return out };
    let a1s: Vec<Edge> = edges_joining(h, v1, w1).into_iter().filter(|&x| beta.contains(x)).collect();
    let c1s: Vec<Edge> = edges_joining(h, z1, w1).into_iter().filter(|&x| beta.contains(x)).collect();
    if a1s.len() != 1 || c1s.len() != 1 {
        return out;
    }
    let (a1, c1) = (a1s[0], c1s[0]);
    let b1 = *edges_joining(h, v1, w1).iter().find(|&&x| x != a1).unwrap();
    let d1 = *edges_joining(h, z1, w1).iter().find(|&&x| x != c1).unwrap();
    for (w2, u1) in double_pairs(h, v1, &[w1, z1]) {
        let at_v = edges_joining(h, v1, w2);
        let a2s: Vec<Edge> = at_v.iter().copied().filter(|&x| alpha.contains(x)).collect();
        if a2s.len() != 1 {
            continue;
        }
        let a2 = a2s[0];
        let b2 = *at_v.iter().find(|&&x| x != a2).unwrap();
        let cd = edges_joining(h, u1, w2);
        let gamma = alpha.difference(&loops).difference(&[a1, a2].into_iter().collect());
        for (c2, d2) in [(cd[0], cd[1]), (cd[1], cd[0])] {
            for ls in loop_orders(&alpha.intersection(&loops), &beta.intersection(&loops)) {
                out.push(TwinPieces::Gadget(GadgetPieces {
                    h1: h.clone(),
                    v1,
                    z1,
                    u1,
                    w: [w1, w2],
                    a: [a1, a2],
                    b: [b1, b2],
                    c: [c1, c2],
                    d: [d1, d2],
                    loops: ls,
                    gamma: gamma.clone(),
                }));
            }
        }
    }
    out
}

fn shih_witnesses(p: &SiblingPair, budget: usize) -> Result<Vec<Witness>> {
    let mut out = Vec::new();
    let mut exhausted = None;
    for swapped in [false, true] {
        let q = if swapped { p.swapped() } else { p.clone() };
        // G' carries the terminals and a trivial signature; H' has none.
        if !q.t2.is_empty() || !cut_space(&q.g1).contains(&q.sigma1) {
            continue;
        }
        for which in [2u8, 3] {
            if out.iter().any(|w: &Witness| matches!(w, Witness::Shih { which: k, .. } if *k == which)) {
                continue;
            }
            match shih_search(&q, which, budget, &mut 0) {
                Ok(Some(parts)) => out.push(Witness::Shih { which, parts, swapped }),
                Ok(None) => {}
                Err(e) => exhausted = Some(e),
            }
        }
    }
    match exhausted {
        Some(e) if out.is_empty() => Err(e),
        _ => Ok(out),
    }
}

/// Places the vertices of `W` (and `z` for outcome 3) as the identified
/// vertices of `G'`, assigns bridges to parts and rebuilds both graphs.
fn shih_search(p: &SiblingPair, which: u8, budget: usize, tries: &mut usize) -> Result<Option<Vec<EdgeSet>>> {
    let g = &p.g1;
    let cuts2 = cut_space(&p.g2);
    // z meets every part, so likely centers come first.
    let mut vs: Vec<Vertex> = g.vertices().iter().copied().collect();
    vs.sort_by_key(|&v| std::cmp::Reverse(g.star(v).len()));
    let centers: Vec<Option<Vertex>> = if which == 2 { vec![None] } else { vs.iter().map(|&z| Some(z)).collect() };
    for z in centers {
        let pool: Vec<Vertex> = vs.iter().copied().filter(|&v| Some(v) != z).collect();
        let ks: Vec<usize> = if which == 2 { vec![4] } else { (3..=pool.len().min(6)).collect() };
        for k in ks {
            let mut found = None;
            cyclic_sequences(&pool, k, which == 3, &mut |w: &[Vertex]| {
                if found.is_some() || *tries > budget {
                    return;
                }
                found = shih_try(p, &cuts2, which, z, w, budget, tries);
            });
            if *tries > budget {
                return Err(Error::BudgetExceeded(budget));
            }
            if found.is_some() {
                return Ok(found);
            }
        }
    }
    Ok(None)
}

/// Ordered `k`-sequences from `pool`; with `cyclic`, rotations and
/// reflections are skipped.
fn cyclic_sequences(pool: &[Vertex], k: usize, cyclic: bool, f: &mut dyn FnMut(&[Vertex])) {
    fn rec(pool: &[Vertex], k: usize, cyclic: bool, cur: &mut Vec<Vertex>, f: &mut dyn FnMut(&[Vertex])) {
        if cur.len() == k {
            if !cyclic || cur[1] < cur[k - 1] {
                f(cur);
            }
            return;
        }
        for &v in pool {
            if cur.contains(&v) || (cyclic && !cur.is_empty() && v < cur[0]) {
                continue;
            }
            cur.push(v);
            rec(pool, k, cyclic, cur, f);
            cur.pop();
        }
    }
    rec(pool, k, cyclic, &mut Vec::new(), f);
}

/// Attachment slots `(x, y, z)` of every part in `G'`.
fn shih_slots(which: u8, z: Option<Vertex>, w: &[Vertex]) -> Vec<[Vertex; 3]> {
    let k = w.len();
    if which == 2 {
        // x_i ∈ w_i, y_i ∈ w_{3-i}, z_i ∈ w_{2+i} (indices mod 4, from 1).
        (0..4).map(|j| [w[j], w[(5 - j) % 4], w[(j + 2) % 4]]).collect()
    } else {
        let z = z.unwrap();
        (0..k).map(|j| [w[j], w[(j + 1) % k], z]).collect()
    }
}

#[allow(clippy::too_many_arguments)]
fn shih_try(
    p: &SiblingPair,
    cuts2: &GF2Space,
    which: u8,
    z: Option<Vertex>,
    w: &[Vertex],
    budget: usize,
    tries: &mut usize,
) -> Option<Vec<EdgeSet>> {
    let g = &p.g1;
    let slots = shih_slots(which, z, w);
    let mut attach: VertexSet = w.iter().copied().collect();
    attach.extend(z);
    let bridges = g.bridges(&g.edge_set(), &attach);
    let fits: Vec<Vec<usize>> = bridges
        .iter()
        .map(|x| {
            let at: VertexSet = g.vertices_of(x).intersection(&attach).copied().collect();
            let mut images = HashSet::new();
            // Placements with the same image in H give equivalent graphs; a
            // bridge on two vertices may also be flipped, and one on a single
            // vertex is a block of its own.
            let image = |j: usize| {
                let mut im: Vec<u32> = at.iter().map(|&v| h_target(which, &slots, j, v)).collect();
                match at.len() {
                    0 | 1 => im.clear(),
                    2 => im.sort_unstable(),
                    _ => {}
                }
                im
            };
            (0..slots.len())
                .filter(|&j| at.iter().all(|v| slots[j].contains(v)))
                .filter(|&j| images.insert(image(j)))
                .collect()
        })
        .collect();
    if fits.iter().any(|f| f.is_empty()) {
        return None;
    }
    let total: usize = fits.iter().map(|f| f.len()).product();
    if total > budget {
        return None;
    }
    for mut code in 0..total {
        *tries += 1;
        if *tries > budget {
            return None;
        }
        let mut parts = vec![EdgeSet::new(); slots.len()];
        for (i, f) in fits.iter().enumerate() {
            parts[f[code % f.len()]].union_with(&bridges[i]);
            code /= f.len();
        }
        if h_matches(p, cuts2, which, &attach, &slots, &parts) && shih_rebuilds(p, which, &slots, &parts) {
            return Some(parts);
        }
    }
    None
}

/// Index of the vertex of `H` that slot vertex `v` of part `j` becomes.
fn h_target(which: u8, slots: &[[Vertex; 3]], j: usize, v: Vertex) -> u32 {
    let i = slots[j].iter().position(|&s| s == v).unwrap();
    let k = slots.len();
    let t = if which == 2 { i } else { [(j + k - 1) % k, (j + 1) % k, j][i] };
    t as u32
}

/// Quick test that the `H` glued from `parts` has the cut space of `G2`:
/// every star is a cut of `G2` and the ranks agree.
fn h_matches(
    p: &SiblingPair,
    cuts2: &GF2Space,
    which: u8,
    attach: &VertexSet,
    slots: &[[Vertex; 3]],
    parts: &[EdgeSet],
) -> bool {
    let g = &p.g1;
    let base = g.vertices().iter().max().map_or(0, |v| v + 1);
    let k = slots.len() as u32;
    let mut stars: BTreeMap<Vertex, EdgeSet> = BTreeMap::new();
    for v in g.vertices().iter().filter(|v| !attach.contains(v)) {
        stars.insert(*v, EdgeSet::new());
    }
    let targets = if which == 2 { 3 } else { k };
    for t in 0..targets {
        stars.insert(base + t, EdgeSet::new());
    }
    let mut ends = Vec::new();
    for (j, (slot, x)) in slots.iter().zip(parts).enumerate() {
        let j = j as u32;
        let f = |v: Vertex| if slot.contains(&v) { base + h_target(which, slots, j as usize, v) } else { v };
        for e in x.iter() {
            let (a, b) = g.ends(e).unwrap();
            let (a, b) = (f(a), f(b));
            if a != b {
                stars.get_mut(&a).unwrap().insert(e);
                stars.get_mut(&b).unwrap().insert(e);
            }
            ends.push((a, b));
        }
    }
    if !stars.values().all(|x| cuts2.contains(x)) {
        return false;
    }
    let mut root: BTreeMap<Vertex, Vertex> = stars.keys().map(|&v| (v, v)).collect();
    fn find(root: &mut BTreeMap<Vertex, Vertex>, v: Vertex) -> Vertex {
        let r = root[&v];
        if r == v {
            return v;
        }
        let top = find(root, r);
        root.insert(v, top);
        top
    }
    let mut merged = 0;
    for (a, b) in ends {
        let (ra, rb) = (find(&mut root, a), find(&mut root, b));
        if ra != rb {
            root.insert(ra, rb);
            merged += 1;
        }
    }
    merged == cuts2.dim()
}

/// Renames every part apart, builds the outcome and compares both graphs.
fn shih_rebuilds(p: &SiblingPair, which: u8, slots: &[[Vertex; 3]], parts: &[EdgeSet]) -> bool {
    let g = &p.g1;
    let mut next = 0;
    let mut input = Vec::new();
    for (slot, x) in slots.iter().zip(parts) {
        let mut map: BTreeMap<Vertex, Vertex> = BTreeMap::new();
        let named = slot.map(|v| {
            next += 1;
            map.insert(v, next - 1);
            next - 1
        });
        let mut graph = Graph::new();
        for &v in &named {
            graph.add_vertex(v);
        }
        for e in x.iter() {
            let (a, b) = g.ends(e).unwrap();
            let mut fresh = |v: Vertex| {
                *map.entry(v).or_insert_with(|| {
                    next += 1;
                    next - 1
                })
            };
            let (a, b) = (fresh(a), fresh(b));
            graph.add_edge(e, a, b).unwrap();
        }
        input.push(ShihPart { graph, x: named[0], y: named[1], z: named[2] });
    }
    match build_shih_outcome(which, &input) {
        Ok(out) => {
            graphs_equivalent(&out.g, &p.g1).unwrap_or(false) && graphs_equivalent(&out.h, &p.g2).unwrap_or(false)
        }
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::tests::k4;
    use crate::ops::apply_wsequence;

    fn g(edges: &[(u32, u32, u32)]) -> Graph {
        Graph::from_edges(edges).unwrap()
    }

    #[test]
    fn classes() {
        assert_eq!(flip_class(&k4(), 100).unwrap().len(), 1);
        let c4 = g(&[(0, 0, 1), (1, 1, 2), (2, 2, 3), (3, 3, 0)]);
        // cyclic orders of 4 labeled edges up to reversal
        assert_eq!(flip_class(&c4, 100).unwrap().len(), 3);
        let c5 = g(&[(0, 0, 1), (1, 1, 2), (2, 2, 3), (3, 3, 4), (4, 4, 0)]);
        assert_eq!(flip_class(&c5, 100).unwrap().len(), 12);
        for h in flip_class(&c5, 100).unwrap() {
            assert!(cycle_space(&h).equals(&cycle_space(&c5)).unwrap());
        }
        assert!(matches!(flip_class(&c5, 5), Err(Error::BudgetExceeded(5))));
    }

    #[test]
    fn sequences_found() {
        let c5 = g(&[(0, 0, 1), (1, 1, 2), (2, 2, 3), (3, 3, 4), (4, 4, 0)]);
        let other = g(&[(0, 0, 1), (2, 1, 2), (4, 2, 3), (1, 3, 4), (3, 4, 0)]);
        let s = find_wsequence(&c5, &other, 1000).unwrap().unwrap();
        assert!(apply_wsequence(&c5, &s).unwrap().same_up_to_renaming(&other));
        let path = g(&[(0, 0, 1), (1, 1, 2), (2, 2, 3), (3, 3, 4), (4, 4, 5)]);
        assert!(whitney_equivalent(&path, &g(&[(0, 0, 1), (1, 0, 2), (2, 0, 3), (3, 0, 4), (4, 0, 5)]), 10).unwrap());
        assert!(!whitney_equivalent(&path, &c5, 10).unwrap());
    }
    /// Connected graphs on edges `0..m` up to vertex renaming, by listing
    /// every assignment of ends.
    fn brute_count(n: u8, m: usize, loops: bool) -> usize {
        let pairs: Vec<(u8, u8)> =
            (0..n).flat_map(|u| (u..n).map(move |v| (u, v))).filter(|(u, v)| loops || u != v).collect();
        let mut seen = HashSet::new();
        let mut idx = vec![0usize; m];
        loop {
            let ends: Ends = idx.iter().map(|&i| pairs[i]).collect();
            let used: HashSet<u8> = ends.iter().flat_map(|&(a, b)| [a, b]).collect();
            let g = ends_graph(&ends);
            if g.is_connected() {
                let perms = vertex_permutations(used.len());
                // relabel used vertices to 0..k before keying
                let mut order: Vec<u8> = used.into_iter().collect();
                order.sort_unstable();
                let dense: Ends = ends
                    .iter()
                    .map(|&(a, b)| {
                        (
                            order.iter().position(|&x| x == a).unwrap() as u8,
                            order.iter().position(|&x| x == b).unwrap() as u8,
                        )
                    })
                    .collect();
                let key = perms
                    .iter()
                    .map(|p| {
                        let mut k: Vec<(u8, u8)> = dense
                            .iter()
                            .map(|&(a, b)| (p[a as usize].min(p[b as usize]), p[a as usize].max(p[b as usize])))
                            .collect();
                        k.insert(0, (dense.len() as u8, 0));
                        k
                    })
                    .min()
                    .unwrap();
                seen.insert(key);
            }
            let mut i = 0;
            while i < m {
                idx[i] += 1;
                if idx[i] < pairs.len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == m {
                return seen.len();
            }
        }
    }

    #[test]
    fn catalog_matches_brute_force() {
        for loops in [false, true] {
            let c = catalog(CatalogSpec { max_vertices: 4, max_edges: 4, loops });
            for m in 1..=4 {
                assert_eq!(c[m - 1].len(), brute_count(4, m, loops), "m = {m}, loops = {loops}");
            }
        }
        let c = catalog(CatalogSpec { max_vertices: 5, max_edges: 3, loops: false });
        assert_eq!(c.iter().map(Vec::len).collect::<Vec<_>>(), [1, 2, 9]);
    }

    #[test]
    fn rref_is_canonical() {
        let a = rref([0b1100, 0b0110, 0b0011]);
        let b = rref([0b1010, 0b0011, 0b1111]);
        assert_eq!(a, b);
        assert_eq!(rref([0b101, 0b101]), vec![0b101]);
        assert_eq!(rref([0, 0]), Vec::<u64>::new());
    }

    #[test]
    fn trees_have_one_cycle_space() {
        let c = catalog(CatalogSpec { max_vertices: 6, max_edges: 5, loops: false });
        let trees: Vec<&Ends> = c[4].iter().filter(|g| vertex_count(g) == 6).collect();
        assert!(trees.len() > 1);
        // One cut space for all of them, so no two trees can be siblings.
        let keys: HashSet<Vec<u64>> = trees.iter().map(|g| cut_key(g)).collect();
        assert_eq!(keys.len(), 1);
    }

    #[test]
    fn small_whitney_check() {
        let r = whitney_check(CatalogSpec { max_vertices: 4, max_edges: 5, loops: true }, DEFAULT_BUDGET).unwrap();
        assert!(r.mismatches.is_empty());
        assert!(r.classes < r.graphs);
    }

    #[test]
    fn shapes() {
        assert_eq!(shape_key(&[(0, 1), (1, 2)]), shape_key(&[(2, 0), (0, 1)]));
        assert_ne!(shape_key(&[(0, 1), (1, 2)]), shape_key(&[(0, 1), (0, 1)]));
    }

    #[test]
    fn shape_catalog_matches_labeled_catalog() {
        for loops in [false, true] {
            let spec = CatalogSpec { max_vertices: 4, max_edges: 5, loops };
            let grown = shape_catalog(spec);
            for (m, layer) in catalog(spec).iter().enumerate() {
                let mut shapes: Vec<Ends> = layer.iter().map(|g| shape_key(g)).collect();
                shapes.sort_unstable();
                shapes.dedup();
                assert_eq!(shapes, grown[m], "{m} {loops}");
            }
        }
        // K4 minus an edge, the 4-cycle with a chord, appears once among the 5-edge shapes on 4 vertices.
        let spec = CatalogSpec { max_vertices: 4, max_edges: 5, loops: false };
        let k4e = shape_key(&[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        assert_eq!(shape_catalog(spec)[4].iter().filter(|g| **g == k4e).count(), 1);
    }

    #[test]
    fn search_finds_small_siblings() {
        let recs =
            search_siblings(CatalogSpec { max_vertices: 4, max_edges: 4, loops: false }, DEFAULT_BUDGET).unwrap();
        assert!(!recs.is_empty());
        for r in &recs {
            r.verify().unwrap();
            let (a, b) = (r.pair().signed().0, r.pair().signed().1);
            assert!(same_even_cycles(&a, &b).unwrap());
            assert!(!graphs_equivalent(&a.graph, &b.graph).unwrap());
        }
    }

    #[test]
    fn bipartite_pair_has_no_terminals() {
        let a = SignedGraph { graph: k4(), signature: EdgeSet::new() };
        let b = SignedGraph { graph: k4(), signature: k4().star(1) };
        let (t1, t2) = matching_terminals_from_signatures(&a, &b).unwrap();
        assert!(t1.is_empty() && t2.is_empty());
        assert!(terminal_choices_agree(&a, &b, 100).unwrap());
        let c = SignedGraph { graph: k4(), signature: crate::eset![0] };
        assert!(matches!(matching_terminals_from_signatures(&a, &c), Err(Error::SpacesDiffer)));
    }

    #[test]
    fn planted_pairs_match_both_ways() {
        for kind in [PlantedKind::Simple, PlantedKind::Shuffle, PlantedKind::Shih2] {
            let p = crate::planted::plant(kind, 3).unwrap().pair;
            let (a, b) = p.signed();
            let (t1, t2) = matching_terminals_from_signatures(&a, &b).unwrap();
            let (ga, gb) = (Graft::new(a.graph.clone(), t1).unwrap(), Graft::new(b.graph.clone(), t2).unwrap());
            let (s1, s2) = matching_signatures_from_terminals(&ga, &gb).unwrap();
            assert!(cut_space(&a.graph).contains(&s1.sym_diff(&a.signature)));
            assert!(cut_space(&b.graph).contains(&s2.sym_diff(&b.signature)));
            assert!(terminal_choices_agree(&a, &b, 50).unwrap());
            assert!(signature_choices_agree(&ga, &gb).unwrap());
        }
    }

    #[test]
    fn tags_round_trip() {
        for t in Tag::ALL {
            assert_eq!(Tag::from_name(t.name()), Some(t));
        }
    }

    #[test]
    fn planted_kinds_are_recovered() {
        for kind in PlantedKind::ALL {
            let Some(tag) = Tag::of_planted(kind) else { continue };
            let p = crate::planted::plant(kind, 1).unwrap();
            let c = classify_pair(&SiblingRecord::from_pair(&p.pair), DEFAULT_BUDGET);
            assert!(c.tags.contains(&tag), "{}: {:?} {:?}", kind.name(), c.tags, c.reason);
            assert!(c.witnesses.iter().all(|w| !w.describe().is_empty()));
        }
    }

    #[test]
    fn common_even_triangle_is_delta_witness() {
        let p = crate::planted::plant(PlantedKind::Simple, 0).unwrap();
        let c = classify_pair(&SiblingRecord::from_pair(&p.pair), DEFAULT_BUDGET);
        let tri = c.witnesses.iter().find_map(|w| match w {
            Witness::DeltaTriangle(t) => Some(*t),
            _ => None,
        });
        let tri: EdgeSet = tri.expect("a common triangle").into_iter().collect();
        assert!(c.tags.contains(&Tag::DeltaReducible));
        for (g, s) in [(&p.pair.g1, &p.pair.sigma1), (&p.pair.g2, &p.pair.sigma2)] {
            assert!(g.is_cycle(&tri).unwrap());
            assert_eq!(tri.intersection(s).len() % 2, 0);
        }
    }

    #[test]
    fn mixed_terminal_counts_stay_unclassified() {
        let p = crate::planted::plant(PlantedKind::TriangleTriad, 2).unwrap();
        let c = classify_pair(&SiblingRecord::from_pair(&p.pair), DEFAULT_BUDGET);
        if c.tags.contains(&Tag::Unclassified) {
            assert_eq!(c.tags.len(), 1);
            assert!(c.reason.is_some() && c.witnesses.is_empty());
        }
    }
}

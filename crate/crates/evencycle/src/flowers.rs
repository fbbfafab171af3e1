//! Flowers, leaflets and w-stars, and the normalization of w-sequences.
//!
//! Loops never take part: flower ground sets are the non-loop edges, and
//! flips are applied to loop-free edge sets so loops stay where they are.

use std::collections::{HashMap, VecDeque};

use crate::edgeset::EdgeSet;
use crate::error::{Error, Result};
use crate::gf2::cycle_space;
use crate::graph::{separations_dense, CanonKey, Dense, Graph, Vertex, VertexSet};
use crate::ops::{apply_wsequence, crosses, is_non_crossing, whitney_flip, WSequence};

/// Cyclic partition of the non-loop edges: petal `i` has boundary
/// `{attachments[i], attachments[i+1]}` (indices mod `t`).
///
/// Stored canonically: the petal holding the smallest edge comes first and
/// the orientation puts the smaller of its two neighbours second.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Flower {
    pub petals: Vec<EdgeSet>,
    pub attachments: Vec<Vertex>,
}

/// Parts all sharing one two-vertex boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Leaflet {
    pub parts: Vec<EdgeSet>,
    pub ends: (Vertex, Vertex),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Crossing {
    Flower(Flower),
    Leaflet(Leaflet),
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidFlower(msg.into())
}

fn ground(g: &Graph) -> EdgeSet {
    g.non_loops()
}

fn loopless(g: &Graph) -> Graph {
    g.delete_edges(&g.loops())
}

/// Checks that the parts partition the non-loop edges, are nonempty and
/// connected, and returns their boundaries.
fn part_boundaries(g: &Graph, parts: &[EdgeSet]) -> Result<Vec<VertexSet>> {
    let core = loopless(g);
    let mut seen = EdgeSet::new();
    for p in parts {
        if p.is_empty() || !p.is_disjoint(&seen) {
            return Err(bad("parts must be nonempty and disjoint"));
        }
        seen.union_with(p);
    }
    if seen != ground(g) {
        return Err(bad("parts do not cover the non-loop edges"));
    }
    parts
        .iter()
        .map(|p| {
            if !core.is_connected_edges(p) {
                return Err(bad(format!("part {p:?} is disconnected")));
            }
            core.boundary(p)
        })
        .collect()
}

impl Flower {
    pub fn new(g: &Graph, petals: Vec<EdgeSet>) -> Result<Flower> {
        let t = petals.len();
        if t < 2 {
            return Err(bad("a flower needs at least two petals"));
        }
        let bounds = part_boundaries(g, &petals)?;
        if bounds.iter().any(|b| b.len() != 2) {
            return Err(bad("every petal needs a two-vertex boundary"));
        }
        if t == 2 {
            if bounds[0] != bounds[1] {
                return Err(bad("two petals must share their boundary"));
            }
            let mut f = Flower { petals, attachments: bounds[0].iter().copied().collect() };
            if f.petals[1].first() < f.petals[0].first() {
                f.petals.swap(0, 1);
            }
            return Ok(f);
        }
        // Walk the cycle petal -> shared attachment -> next petal.
        let mut order = vec![0usize];
        let mut used = vec![false; t];
        used[0] = true;
        let start = *bounds[0].iter().next().unwrap();
        let mut at = *bounds[0].iter().nth(1).unwrap();
        let mut attach = vec![start, at];
        for _ in 1..t {
            let cur = *order.last().unwrap();
            let nexts: Vec<usize> = (0..t).filter(|&j| j != cur && bounds[j].contains(&at)).collect();
            if nexts.len() != 1 || used[nexts[0]] {
                return Err(bad("petal boundaries do not form a cycle"));
            }
            let j = nexts[0];
            used[j] = true;
            order.push(j);
            at = *bounds[j].iter().find(|&&v| v != at).unwrap();
            attach.push(at);
        }
        if at != start || attach[..t].iter().copied().collect::<VertexSet>().len() != t {
            return Err(bad("petal boundaries do not close into a cycle"));
        }
        let mut ordered: Vec<EdgeSet> = order.iter().map(|&i| petals[i].clone()).collect();
        let lowest = (0..t).min_by_key(|&i| ordered[i].first()).unwrap();
        ordered.rotate_left(lowest);
        if ordered[t - 1].first() < ordered[1].first() {
            ordered[1..].reverse();
        }
        let attachments = (0..t)
            .map(|i| {
                let prev = g.vertices_of(&ordered[(i + t - 1) % t]);
                let here = g.vertices_of(&ordered[i]);
                *prev.intersection(&here).find(|v| attach.contains(v)).unwrap()
            })
            .collect();
        Ok(Flower { petals: ordered, attachments })
    }

    pub fn len(&self) -> usize {
        self.petals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.petals.is_empty()
    }

    /// Petals sorted by smallest edge: the partition, forgetting the order.
    pub fn partition(&self) -> Vec<EdgeSet> {
        let mut p = self.petals.clone();
        p.sort();
        p
    }

    pub fn same_partition(&self, other: &Flower) -> bool {
        self.partition() == other.partition()
    }

    pub fn position(&self, petal: &EdgeSet) -> Option<usize> {
        self.petals.iter().position(|p| p == petal)
    }

    /// Unions of petals that are 2-separations of `g`.
    pub fn separations(&self, g: &Graph) -> Vec<EdgeSet> {
        let core = loopless(g);
        let t = self.len();
        let mut out = Vec::new();
        // Subsets holding petal 0 stand for their complements too.
        for mask in 1u64..(1 << t) - 1 {
            if mask & 1 == 0 {
                continue;
            }
            let x: EdgeSet =
                (0..t).filter(|i| mask >> i & 1 == 1).fold(EdgeSet::new(), |acc, i| acc.union(&self.petals[i]));
            if core.is_k_separation(&x, 2) {
                out.push(x);
            }
        }
        out
    }

    /// No petal has a cut vertex separating its attachments.
    pub fn is_maximal(&self, g: &Graph) -> bool {
        let t = self.len();
        (0..t).all(|i| {
            let (a, b) = self.ends_of(i);
            split_petal(g, &self.petals[i], a, b).len() == 1
        })
    }

    pub fn ends_of(&self, i: usize) -> (Vertex, Vertex) {
        let t = self.len();
        (self.attachments[i], self.attachments[(i + 1) % t])
    }
}

impl Leaflet {
    pub fn new(g: &Graph, parts: Vec<EdgeSet>) -> Result<Leaflet> {
        if parts.len() < 2 {
            return Err(bad("a leaflet needs at least two parts"));
        }
        let bounds = part_boundaries(g, &parts)?;
        if bounds[0].len() != 2 || bounds.iter().any(|b| *b != bounds[0]) {
            return Err(bad("leaflet parts must share one two-vertex boundary"));
        }
        let mut it = bounds[0].iter();
        let ends = (*it.next().unwrap(), *it.next().unwrap());
        Ok(Leaflet { parts, ends })
    }
}

/// Vertices reachable from `from` in `G[x]` without passing `blocked`.
fn reach(g: &Graph, x: &EdgeSet, from: Vertex, blocked: Vertex) -> VertexSet {
    let mut adj: HashMap<Vertex, Vec<Vertex>> = HashMap::new();
    for e in x.iter() {
        let (a, b) = g.ends(e).unwrap();
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut seen: VertexSet = [from].into();
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for &w in adj.get(&v).map(|v| v.as_slice()).unwrap_or(&[]) {
            if w != blocked && seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Splits a petal at cut vertices separating `a` from `b`, in order from
/// `a` to `b`.
fn split_petal(g: &Graph, petal: &EdgeSet, a: Vertex, b: Vertex) -> Vec<EdgeSet> {
    for c in g.vertices_of(petal) {
        if c == a || c == b {
            continue;
        }
        let r = reach(g, petal, a, c);
        if r.contains(&b) {
            continue;
        }
        let near: EdgeSet = petal
            .iter()
            .filter(|&e| {
                let (x, y) = g.ends(e).unwrap();
                (x != c && r.contains(&x)) || (y != c && r.contains(&y))
            })
            .collect();
        let far = petal.difference(&near);
        let mut out = split_petal(g, &near, a, c);
        out.extend(split_petal(g, &far, c, b));
        return out;
    }
    vec![petal.clone()]
}

/// The maximal flower refining `f`.
pub fn refine_to_maximal(g: &Graph, f: &Flower) -> Result<Flower> {
    let f = Flower::new(g, f.petals.clone())?;
    let mut pieces = Vec::new();
    for i in 0..f.len() {
        let (a, b) = f.ends_of(i);
        pieces.extend(split_petal(g, &f.petals[i], a, b));
    }
    Flower::new(g, pieces)
}

/// Maximal refinement of the flower `{X, X̄}`.
pub fn flower_of_separation(g: &Graph, x: &EdgeSet) -> Result<Flower> {
    let x = x.intersection(&ground(g));
    let xc = ground(g).difference(&x);
    refine_to_maximal(g, &Flower::new(g, vec![x, xc])?)
}

fn check_two_separation(g: &Graph, x: &EdgeSet) -> Result<()> {
    if loopless(g).is_k_separation(&x.intersection(&ground(g)), 2) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{x:?} is not a 2-separation")))
    }
}

/// The four-part partition of two crossing 2-separations.
pub fn classify_crossing(g: &Graph, x: &EdgeSet, y: &EdgeSet) -> Result<Crossing> {
    check_two_separation(g, x)?;
    check_two_separation(g, y)?;
    let e = ground(g);
    let (x, y) = (x.intersection(&e), y.intersection(&e));
    if !crosses(&x, &y, &e) {
        return Err(Error::Precondition("the separations do not cross".into()));
    }
    let parts = vec![x.intersection(&y), x.difference(&y), y.difference(&x), e.difference(&x.union(&y))];
    if let Ok(l) = Leaflet::new(g, parts.clone()) {
        return Ok(Crossing::Leaflet(l));
    }
    Ok(Crossing::Flower(Flower::new(g, parts)?))
}

/// Every distinct maximal flower arising from a 2-separation or from a
/// crossing pair of 2-separations.
pub fn maximal_flowers(g: &Graph) -> Result<Vec<Flower>> {
    let core = loopless(g);
    let d = Dense::new(&core)?;
    let seps: Vec<EdgeSet> = separations_dense(&d, 2).into_iter().map(|m| d.to_set(m)).collect();
    let mut out: Vec<Flower> = Vec::new();
    let mut push = |f: Flower| {
        if !out.iter().any(|h| h.same_partition(&f)) {
            out.push(f);
        }
    };
    for x in &seps {
        push(flower_of_separation(g, x)?);
    }
    let e = ground(g);
    for (i, x) in seps.iter().enumerate() {
        for y in &seps[i + 1..] {
            if crosses(x, y, &e) {
                if let Crossing::Flower(f) = classify_crossing(g, x, y)? {
                    push(refine_to_maximal(g, &f)?);
                }
            }
        }
    }
    Ok(out)
}

/// The four conditions characterizing independence of distinct maximal
/// flowers, each evaluated directly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndependenceConditions {
    /// No petal of one crosses a petal of the other.
    pub petals_non_crossing: bool,
    /// No 2-separation of one crosses a 2-separation of the other.
    pub separations_non_crossing: bool,
    /// Petals `B1`, `B2` with `B̄1 ⊂ B2` and `B̄2 ⊂ B1`.
    pub covering_petals: bool,
    /// No leaflet `{B1,B2,B3,B4}` with the flowers `{B1∪B2, B3∪B4}` and
    /// `{B1∪B3, B2∪B4}`.
    pub no_leaflet: bool,
}

impl IndependenceConditions {
    pub fn agree(&self) -> bool {
        let c = self.petals_non_crossing;
        self.separations_non_crossing == c && self.covering_petals == c && self.no_leaflet == c
    }
}

fn check_maximal_pair(g: &Graph, f1: &Flower, f2: &Flower) -> Result<()> {
    for f in [f1, f2] {
        Flower::new(g, f.petals.clone())?;
        if !f.is_maximal(g) {
            return Err(Error::Precondition("flower is not maximal".into()));
        }
    }
    if f1.same_partition(f2) {
        return Err(Error::Precondition("flowers must be distinct".into()));
    }
    Ok(())
}

fn covering_petals(e: &EdgeSet, f1: &Flower, f2: &Flower) -> Option<(EdgeSet, EdgeSet)> {
    for b1 in &f1.petals {
        for b2 in &f2.petals {
            let (c1, c2) = (e.difference(b1), e.difference(b2));
            let strict = |a: &EdgeSet, b: &EdgeSet| a.is_subset(b) && a != b;
            if strict(&c1, b2) && strict(&c2, b1) {
                return Some((b1.clone(), b2.clone()));
            }
        }
    }
    None
}

fn leaflet_pattern(g: &Graph, f1: &Flower, f2: &Flower) -> Option<[EdgeSet; 4]> {
    if f1.len() != 2 || f2.len() != 2 {
        return None;
    }
    let (p, pc) = (&f1.petals[0], &f1.petals[1]);
    let (q, qc) = (&f2.petals[0], &f2.petals[1]);
    let parts = [p.intersection(q), p.intersection(qc), pc.intersection(q), pc.intersection(qc)];
    Leaflet::new(g, parts.to_vec()).ok().map(|_| parts)
}

pub fn independence_conditions(g: &Graph, f1: &Flower, f2: &Flower) -> Result<IndependenceConditions> {
    check_maximal_pair(g, f1, f2)?;
    let e = ground(g);
    let petals_non_crossing = f1.petals.iter().all(|x| f2.petals.iter().all(|y| !crosses(x, y, &e)));
    let (s1, s2) = (f1.separations(g), f2.separations(g));
    let separations_non_crossing = s1.iter().all(|x| s2.iter().all(|y| !crosses(x, y, &e)));
    Ok(IndependenceConditions {
        petals_non_crossing,
        separations_non_crossing,
        covering_petals: covering_petals(&e, f1, f2).is_some(),
        no_leaflet: leaflet_pattern(g, f1, f2).is_none(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IndependenceCertificate {
    /// `B̄1 ⊂ B2` and `B̄2 ⊂ B1`.
    Petals(EdgeSet, EdgeSet),
    Leaflet([EdgeSet; 4]),
    /// Crossing petals with no leaflet behind them (cannot happen for
    /// maximal flowers; reported rather than hidden).
    Crossing(EdgeSet, EdgeSet),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Independence {
    pub independent: bool,
    pub certificate: IndependenceCertificate,
}

pub fn flowers_independent(g: &Graph, f1: &Flower, f2: &Flower) -> Result<Independence> {
    check_maximal_pair(g, f1, f2)?;
    let e = ground(g);
    for x in &f1.petals {
        for y in &f2.petals {
            if crosses(x, y, &e) {
                let certificate = match leaflet_pattern(g, f1, f2) {
                    Some(l) => IndependenceCertificate::Leaflet(l),
                    None => IndependenceCertificate::Crossing(x.clone(), y.clone()),
                };
                return Ok(Independence { independent: false, certificate });
            }
        }
    }
    let (b1, b2) = covering_petals(&e, f1, f2)
        .ok_or_else(|| Error::CheckFailed("independent flowers without covering petals".into()))?;
    Ok(Independence { independent: true, certificate: IndependenceCertificate::Petals(b1, b2) })
}

fn petals_independent(e: &EdgeSet, a: &[EdgeSet], b: &[EdgeSet]) -> bool {
    a.iter().all(|x| b.iter().all(|y| !crosses(x, y, e)))
}

/// Unions of cyclically consecutive petals in `h`, excluding the interval
/// holding the first petal listed (its complement stands for it).
fn intervals(h: &Graph, petals: &[EdgeSet]) -> Result<Vec<EdgeSet>> {
    let f = Flower::new(h, petals.to_vec())?;
    let t = f.len();
    let mut out = Vec::new();
    for i in 1..t {
        let mut x = EdgeSet::new();
        for j in i..t {
            x.union_with(&f.petals[j]);
            out.push(x.clone());
        }
    }
    Ok(out)
}

fn consecutive(h: &Graph, p: &EdgeSet, q: &EdgeSet) -> bool {
    !h.vertices_of(p).is_disjoint(&h.vertices_of(q))
}

/// Iterative deepening over non-crossing families of interval flips.
fn search_intervals(
    h: &Graph,
    petals: &[EdgeSet],
    chosen: &mut Vec<EdgeSet>,
    depth: usize,
    goal: &mut dyn FnMut(&Graph, &[EdgeSet]) -> bool,
) -> Result<bool> {
    if goal(h, chosen) {
        return Ok(true);
    }
    if depth == 0 {
        return Ok(false);
    }
    let e = ground(h);
    let core = loopless(h);
    for x in intervals(h, petals)? {
        if chosen.contains(&x) || !core.is_k_separation(&x, 2) || chosen.iter().any(|y| crosses(&x, y, &e)) {
            continue;
        }
        let next = whitney_flip(h, &x)?;
        chosen.push(x);
        if search_intervals(&next, petals, chosen, depth - 1, goal)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

/// A non-crossing sequence of flips of `f` after which `b[0], b[1]` and
/// `b[2], b[3]` are consecutive.
pub fn arrange_four_petals(g: &Graph, f: &Flower, b: [&EdgeSet; 4]) -> Result<(WSequence, Graph)> {
    let f = Flower::new(g, f.petals.clone())?;
    for p in b {
        f.position(p).ok_or_else(|| bad(format!("{p:?} is not a petal")))?;
    }
    if (0..4).any(|i| (i + 1..4).any(|j| b[i] == b[j])) {
        return Err(Error::Precondition("petals must be distinct".into()));
    }
    let mut chosen = Vec::new();
    let mut goal = |h: &Graph, _: &[EdgeSet]| consecutive(h, b[0], b[1]) && consecutive(h, b[2], b[3]);
    for depth in 0..=4 {
        if search_intervals(g, &f.petals, &mut chosen, depth, &mut goal)? {
            let s = WSequence::new(chosen);
            let h = apply_wsequence(g, &s)?;
            return Ok((s, h));
        }
    }
    Err(Error::CheckFailed("no arrangement within four flips".into()))
}

struct Part {
    petals: Vec<EdgeSet>,
    seq: Vec<EdgeSet>,
}

fn apply_parts(g: &Graph, parts: &[Part]) -> Result<Graph> {
    let all: Vec<EdgeSet> = parts.iter().flat_map(|p| p.seq.iter().cloned()).collect();
    apply_wsequence(g, &WSequence::new(all))
}

fn insert_flip(g: &Graph, parts: &mut Vec<Part>, x: EdgeSet, fuel: &mut usize) -> Result<()> {
    if *fuel == 0 {
        return Err(Error::CheckFailed("flower decomposition did not settle".into()));
    }
    *fuel -= 1;
    let e = ground(g);
    let cur = apply_parts(g, parts)?;
    let fx = flower_of_separation(&cur, &x)?.partition();
    if let Some(i) = parts.iter().position(|p| p.petals == fx) {
        let mut p = parts.remove(i);
        p.seq.push(x);
        parts.push(p);
        return Ok(());
    }
    match parts.iter().position(|p| !petals_independent(&e, &p.petals, &fx)) {
        None => {
            parts.push(Part { petals: fx, seq: vec![x] });
            Ok(())
        }
        Some(i) => {
            // A dependent pair of maximal flowers is a leaflet split two ways:
            // all flips share one boundary and compose by symmetric difference.
            let p = parts.remove(i);
            if p.petals.len() != 2 || fx.len() != 2 {
                return Err(Error::CheckFailed("dependent flowers are not a leaflet".into()));
            }
            let y = p.seq.iter().fold(x, |acc, s| acc.sym_diff(s));
            if y.is_empty() || y == e {
                return Ok(());
            }
            insert_flip(g, parts, y, fuel)
        }
    }
}

/// Maximal pairwise independent flowers with a w-sequence for each, whose
/// concatenation takes `g` to `Wflip[g, s]`. Each flower is given as it
/// stands in the graph where its sequence starts.
pub fn decompose_into_flowers(g: &Graph, s: &WSequence) -> Result<Vec<(Flower, WSequence)>> {
    let e = ground(g);
    let mut h = g.clone();
    for (index, x) in s.steps.iter().enumerate() {
        let x = x.intersection(&e);
        if !loopless(&h).is_k_separation(&x, 2) {
            return Err(Error::InvalidStep { index, reason: "not a 2-separation".into() });
        }
        h = whitney_flip(&h, &x)?;
    }
    let mut parts = Vec::new();
    let mut fuel = 64 * (s.len() + 1) * (s.len() + 1);
    for x in &s.steps {
        insert_flip(g, &mut parts, x.intersection(&e), &mut fuel)?;
    }
    let mut out = Vec::new();
    let mut cur = g.clone();
    for p in parts {
        let f = Flower::new(&cur, p.petals)?;
        let seq = WSequence::new(p.seq);
        cur = apply_wsequence(&cur, &seq)?;
        out.push((f, seq));
    }
    if cur != h {
        return Err(Error::CheckFailed("flower sequences do not reproduce the flips".into()));
    }
    Ok(out)
}

/// Disjoint sets with boundaries `{center, tips[i]}`, all vertices
/// distinct, and no edge joining `center` and `tips[i]` inside set `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WStar {
    pub sets: Vec<EdgeSet>,
    pub center: Vertex,
    pub tips: Vec<Vertex>,
}

impl WStar {
    pub fn new(g: &Graph, sets: Vec<EdgeSet>, center: Vertex) -> Result<WStar> {
        let fail = |m: &str| Err(Error::Precondition(format!("not a w-star: {m}")));
        let mut seen = EdgeSet::new();
        let mut tips = Vec::new();
        for x in &sets {
            if !x.is_disjoint(&seen) {
                return fail("sets overlap");
            }
            seen.union_with(x);
            let b = g.boundary(x)?;
            if b.len() != 2 || !b.contains(&center) {
                return fail("boundary must be the center plus one tip");
            }
            let tip = *b.iter().find(|&&v| v != center).unwrap();
            let (lo, hi) = (center.min(tip), center.max(tip));
            if x.iter().any(|e| g.ends(e) == Some((lo, hi))) {
                return fail("an edge joins the center and the tip");
            }
            tips.push(tip);
        }
        if tips.iter().copied().collect::<VertexSet>().len() != tips.len() {
            return fail("tips repeat");
        }
        Ok(WStar { sets, center, tips })
    }

    pub fn to_wsequence(&self) -> WSequence {
        WSequence::new(self.sets.clone())
    }
}

/// Rewrites a non-crossing w-sequence whose sets all have `z` (in `h`) and
/// `z2` (in `h' = Wflip[h, s]`) on their boundaries into a w-star with
/// those centers. `Wflip[h, S']` equals `h'` up to renaming vertices.
pub fn make_wstar(h: &Graph, s: &WSequence, z: Vertex, z2: Vertex) -> Result<(WStar, WStar)> {
    let e = ground(h);
    let mut sets: Vec<EdgeSet> = s.steps.iter().map(|x| x.intersection(&e)).collect();
    if !is_non_crossing(&sets, &e) {
        return Err(Error::Precondition("sequence is crossing".into()));
    }
    let h2 = apply_wsequence(h, &WSequence::new(sets.clone()))?;
    for x in &sets {
        if !h.boundary(x)?.contains(&z) || !h2.boundary(x)?.contains(&z2) {
            return Err(Error::Precondition(format!("{x:?} misses a center on its boundary")));
        }
    }
    // Laminar: complement every set holding the smallest edge.
    if let Some(r) = e.first() {
        for x in sets.iter_mut() {
            if x.contains(r) {
                *x = e.difference(x);
            }
        }
    }
    // Sets with equal boundary compose into their symmetric difference.
    'merge: loop {
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if h.boundary(&sets[i])? == h.boundary(&sets[j])? {
                    let y = sets[i].sym_diff(&sets[j]);
                    sets.remove(j);
                    sets.remove(i);
                    if !y.is_empty() && y != e {
                        sets.push(y);
                    }
                    continue 'merge;
                }
            }
        }
        break;
    }
    // Nested pairs: the larger set is replaced by its complement.
    let mut fuel = 4 * sets.len() * sets.len() + 4;
    'nest: loop {
        for i in 0..sets.len() {
            for j in 0..sets.len() {
                if i != j && sets[i].is_subset(&sets[j]) {
                    if fuel == 0 {
                        return Err(Error::CheckFailed("nested sets do not resolve".into()));
                    }
                    fuel -= 1;
                    sets[j] = e.difference(&sets[j]);
                    continue 'nest;
                }
            }
        }
        break;
    }
    // Drop edges joining the two boundary vertices.
    for x in sets.iter_mut() {
        let b: Vec<Vertex> = h.boundary(x)?.into_iter().collect();
        let trimmed: EdgeSet = x.iter().filter(|&f| h.ends(f) != Some((b[0], b[1]))).collect();
        *x = trimmed;
    }
    sets.retain(|x| !x.is_empty());
    sets.sort();
    let star = WStar::new(h, sets.clone(), z)?;
    let star2 = WStar::new(&h2, sets, z2)?;
    if !apply_wsequence(h, &star.to_wsequence())?.same_up_to_renaming(&h2) {
        return Err(Error::CheckFailed("w-star does not reproduce the flips".into()));
    }
    Ok((star, star2))
}

/// How a factorization was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorMethod {
    Flowers,
    Search,
}

/// `H = Wflip[g, s1]` with no set of `s1` having a vertex of `Z` on its
/// boundary when flipped, and `g' ≅ Wflip[H, s2]` with `s2` non-crossing and
/// every set of `s2` meeting `Z` on its boundary in `H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub s1: WSequence,
    pub h: Graph,
    pub s2: WSequence,
    pub method: FactorMethod,
}

fn check_equivalent_pair(g: &Graph, g2: &Graph) -> Result<()> {
    if g.edge_set() != g2.edge_set() || g.loops() != g2.loops() {
        return Err(Error::Inequivalent);
    }
    if !cycle_space(g).equals(&cycle_space(g2))? {
        return Err(Error::Inequivalent);
    }
    let core = loopless(g);
    let d = Dense::new(&core)?;
    if d.m() > 0 && (!d.connected(d.full) || !separations_dense(&d, 1).is_empty()) {
        return Err(Error::Precondition("graphs must be 2-connected up to loops".into()));
    }
    Ok(())
}

fn avoids(g: &Graph, x: &EdgeSet, z: &VertexSet) -> Result<bool> {
    Ok(g.boundary(x)?.is_disjoint(z))
}

/// Checks the factorization clauses; used on every returned result.
pub fn check_factorization(g: &Graph, g2: &Graph, z: &VertexSet, f: &Factorization) -> Result<()> {
    let fail = |m: &str| Err(Error::CheckFailed(format!("factorization: {m}")));
    let mut cur = g.clone();
    for x in &f.s1.steps {
        if !avoids(&cur, x, z)? {
            return fail("a first-stage set meets Z");
        }
        cur = whitney_flip(&cur, x)?;
    }
    if cur != f.h {
        return fail("first stage does not produce H");
    }
    let e = ground(g);
    if !is_non_crossing(&f.s2.steps, &e) {
        return fail("second stage is crossing");
    }
    for x in &f.s2.steps {
        if avoids(&f.h, x, z)? {
            return fail("a second-stage set avoids Z");
        }
    }
    if !apply_wsequence(&f.h, &f.s2)?.same_up_to_renaming(g2) {
        return fail("second stage does not reach the target");
    }
    Ok(())
}

/// Breadth-first search from `g` over allowed flips, keyed up to renaming.
struct Reach {
    states: Vec<(Graph, Option<(usize, EdgeSet)>)>,
    index: HashMap<CanonKey, usize>,
}

impl Reach {
    fn build(g: &Graph, budget: usize, mut moves: impl FnMut(&Graph) -> Result<Vec<EdgeSet>>) -> Result<Reach> {
        let mut r = Reach { states: vec![(g.clone(), None)], index: HashMap::new() };
        r.index.insert(g.canonical_key(), 0);
        let mut i = 0;
        while i < r.states.len() {
            let cur = r.states[i].0.clone();
            for x in moves(&cur)? {
                let next = whitney_flip(&cur, &x)?;
                let key = next.canonical_key();
                if r.index.contains_key(&key) {
                    continue;
                }
                if r.states.len() >= budget {
                    return Err(Error::BudgetExceeded(budget));
                }
                r.index.insert(key, r.states.len());
                r.states.push((next, Some((i, x))));
            }
            i += 1;
        }
        Ok(r)
    }

    fn path(&self, key: &CanonKey) -> Option<Vec<EdgeSet>> {
        let mut i = *self.index.get(key)?;
        let mut steps = Vec::new();
        while let Some((p, x)) = &self.states[i].1 {
            steps.push(x.clone());
            i = *p;
        }
        steps.reverse();
        Some(steps)
    }
}

/// Splits the flips `l` of flower `f` in `g` into `l1` (no boundary meets
/// `Z`) followed by a non-crossing `l2`, reaching `Wflip[g, l]` up to
/// renaming. `l1` flips the flower with the petals at each vertex of `Z`
/// merged; `l2` puts those petals back around `Z`.
pub fn rearrange_flower(
    g: &Graph,
    f: &Flower,
    l: &WSequence,
    z: &VertexSet,
    budget: usize,
) -> Result<(WSequence, WSequence)> {
    let target = apply_wsequence(g, l)?;
    let core = loopless(g);
    let reach = Reach::build(g, budget, |cur| {
        let mut out = Vec::new();
        for x in intervals(cur, &f.petals)? {
            if core.is_k_separation(&x, 2) && avoids(cur, &x, z)? {
                out.push(x);
            }
        }
        Ok(out)
    })?;
    let mut chosen = Vec::new();
    let mut found = None;
    let mut goal = |h: &Graph, fam: &[EdgeSet]| {
        if let Some(p) = reach.path(&h.canonical_key()) {
            found = Some((p, fam.to_vec()));
            true
        } else {
            false
        }
    };
    for depth in 0..=4 {
        if search_intervals(&target, &f.petals, &mut chosen, depth, &mut goal)? {
            break;
        }
    }
    let (l1, mut l2) = found.ok_or_else(|| Error::CheckFailed("flower rearrangement not found".into()))?;
    l2.reverse();
    Ok((WSequence::new(l1), WSequence::new(l2)))
}

fn normalize_second_stage(
    g: &Graph,
    mut s1: Vec<EdgeSet>,
    mut s2: Vec<EdgeSet>,
    z: &VertexSet,
) -> Result<(Vec<EdgeSet>, Graph, Vec<EdgeSet>)> {
    let mut h = apply_wsequence(g, &WSequence::new(s1.clone()))?;
    loop {
        let mut moved = false;
        for i in 0..s2.len() {
            if avoids(&h, &s2[i], z)? {
                let x = s2.remove(i);
                h = whitney_flip(&h, &x)?;
                s1.push(x);
                moved = true;
                break;
            }
        }
        if !moved {
            return Ok((s1, h, s2));
        }
    }
}

fn factor_by_flowers(g: &Graph, g2: &Graph, z: &VertexSet, budget: usize) -> Result<Factorization> {
    let e = ground(g);
    let core_target = loopless(g2);
    let s = crate::discovery::find_wsequence(&loopless(g), &core_target, budget)?.ok_or(Error::Inequivalent)?;
    let mut rest: Vec<EdgeSet> = s.steps.iter().map(|x| x.intersection(&e)).collect();
    let mut cur = g.clone();
    let mut s1: Vec<EdgeSet> = Vec::new();
    let mut s2: Vec<EdgeSet> = Vec::new();
    let mut fuel = rest.len() + 4;
    while !rest.is_empty() {
        if fuel == 0 {
            return Err(Error::CheckFailed("flower factorization did not terminate".into()));
        }
        fuel -= 1;
        let flowers = decompose_into_flowers(&cur, &WSequence::new(rest))?;
        let (f, l) = &flowers[0];
        let (l1, l2) = rearrange_flower(&cur, f, l, z, budget)?;
        cur = apply_wsequence(&cur, &l1)?;
        s1.extend(l1.steps);
        let mut front = l2.steps;
        front.extend(s2);
        s2 = front;
        rest = flowers[1..].iter().flat_map(|(_, q)| q.steps.iter().cloned()).collect();
    }
    let (s1, h, s2) = normalize_second_stage(g, s1, s2, z)?;
    Ok(Factorization { s1: WSequence::new(s1), h, s2: WSequence::new(s2), method: FactorMethod::Flowers })
}

fn factor_by_search(g: &Graph, g2: &Graph, z: &VertexSet, budget: usize) -> Result<Factorization> {
    let reach = Reach::build(g, budget, |cur| {
        let c = loopless(cur);
        let d = Dense::new(&c)?;
        let mut out = Vec::new();
        for m in separations_dense(&d, 2) {
            let x = d.to_set(m);
            if avoids(cur, &x, z)? {
                out.push(x);
            }
        }
        Ok(out)
    })?;
    let d2 = Dense::new(&loopless(g2))?;
    let seps: Vec<EdgeSet> = separations_dense(&d2, 2).into_iter().map(|m| d2.to_set(m)).collect();
    let e = ground(g);
    // Families of 2-separations of the target, smallest first.
    fn grow(
        seps: &[EdgeSet],
        from: usize,
        fam: &mut Vec<EdgeSet>,
        depth: usize,
        e: &EdgeSet,
        hit: &mut dyn FnMut(&[EdgeSet]) -> Result<bool>,
    ) -> Result<bool> {
        if fam.len() == depth {
            return hit(fam);
        }
        for i in from..seps.len() {
            if fam.iter().any(|y| crosses(&seps[i], y, e)) {
                continue;
            }
            fam.push(seps[i].clone());
            if grow(seps, i + 1, fam, depth, e, hit)? {
                return Ok(true);
            }
            fam.pop();
        }
        Ok(false)
    }
    let mut result = None;
    for depth in 0..=seps.len().min(6) {
        let mut fam = Vec::new();
        let mut hit = |fam: &[EdgeSet]| -> Result<bool> {
            let h = apply_wsequence(g2, &WSequence::new(fam.to_vec()))?;
            let Some(path) = reach.path(&h.canonical_key()) else { return Ok(false) };
            let cand = {
                let (s1, h, s2) = normalize_second_stage(g, path, fam.to_vec(), z)?;
                Factorization { s1: WSequence::new(s1), h, s2: WSequence::new(s2), method: FactorMethod::Search }
            };
            if check_factorization(g, g2, z, &cand).is_ok() {
                result = Some(cand);
                return Ok(true);
            }
            Ok(false)
        };
        if grow(&seps, 0, &mut fam, depth, &e, &mut hit)? {
            break;
        }
    }
    result.ok_or_else(|| Error::CheckFailed("no factorization within the search bounds".into()))
}

/// Factors the flips from `g` to `g2` into a stage avoiding `Z` and a
/// non-crossing stage touching `Z`. The flower construction is tried
/// first; a bounded search covers anything it leaves unresolved.
pub fn factor_avoiding(g: &Graph, g2: &Graph, z: &VertexSet, budget: usize) -> Result<Factorization> {
    if z.len() > 2 {
        return Err(Error::Precondition(format!("at most two avoided vertices, got {}", z.len())));
    }
    check_equivalent_pair(g, g2)?;
    if let Ok(f) = factor_by_flowers(g, g2, z, budget) {
        if check_factorization(g, g2, z, &f).is_ok() {
            return Ok(f);
        }
    }
    let f = factor_by_search(g, g2, z, budget)?;
    check_factorization(g, g2, z, &f)?;
    Ok(f)
}

/// `H = Wflip[g, l]` avoiding `z`, `H' = Wflip[g2, l2]` avoiding `z2`, and a
/// family that is a w-star of `H` centered at `z` and of `H'` centered at
/// `z2` with `Wflip[H, star] ≅ H'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoStars {
    pub l: WSequence,
    pub l2: WSequence,
    pub h: Graph,
    pub h2: Graph,
    pub star: WStar,
    pub star2: WStar,
    pub method: FactorMethod,
}

pub fn check_two_stars(g: &Graph, g2: &Graph, z: Vertex, z2: Vertex, t: &TwoStars) -> Result<()> {
    let fail = |m: &str| Err(Error::CheckFailed(format!("two stars: {m}")));
    for (start, seq, center, end) in [(g, &t.l, z, &t.h), (g2, &t.l2, z2, &t.h2)] {
        let mut cur = start.clone();
        for x in &seq.steps {
            if cur.boundary(x)?.contains(&center) {
                return fail("a normalizing flip meets the center");
            }
            cur = whitney_flip(&cur, x)?;
        }
        if cur != *end {
            return fail("normalizing flips do not produce the stated graph");
        }
    }
    let s = WStar::new(&t.h, t.star.sets.clone(), z)?;
    let s2 = WStar::new(&t.h2, t.star2.sets.clone(), z2)?;
    if s.sets != s2.sets {
        return fail("the two stars differ");
    }
    if !apply_wsequence(&t.h, &s.to_wsequence())?.same_up_to_renaming(&t.h2) {
        return fail("the star does not relate the two graphs");
    }
    Ok(())
}

pub fn factor_two_stars(g: &Graph, g2: &Graph, z: Vertex, z2: Vertex, budget: usize) -> Result<TwoStars> {
    g.check_vertex(z)?;
    g2.check_vertex(z2)?;
    let f = factor_avoiding(g, g2, &[z].into(), budget)?;
    // The second stage read backwards from g2: those avoiding z2 normalize g2.
    let s0 = f.s2.steps.clone();
    let zs2: VertexSet = [z2].into();
    let mut l2 = Vec::new();
    let mut s1 = Vec::new();
    for x in s0 {
        if avoids(g2, &x, &zs2)? {
            l2.push(x);
        } else {
            s1.push(x);
        }
    }
    let h2 = apply_wsequence(g2, &WSequence::new(l2.clone()))?;
    for (i, x) in l2.iter().enumerate() {
        let before = apply_wsequence(g2, &WSequence::new(l2[..i].to_vec()))?;
        if !avoids(&before, x, &zs2)? {
            return Err(Error::CheckFailed("normalizing flip of the target meets its center".into()));
        }
    }
    // Center of the star in the realized Wflip[H, s1], matched to h2.
    let realized = apply_wsequence(&f.h, &WSequence::new(s1.clone()))?;
    let map =
        realized.vertex_correspondence(&h2, false).ok_or_else(|| Error::CheckFailed("stages do not meet".into()))?;
    let z_real =
        map.iter().find(|&(_, &w)| w == z2).map(|(&v, _)| v).ok_or_else(|| Error::CheckFailed("center lost".into()))?;
    let (star, _) = make_wstar(&f.h, &WSequence::new(s1), z, z_real)?;
    let star2 = WStar::new(&h2, star.sets.clone(), z2)?;
    let out = TwoStars { l: f.s1, l2: WSequence::new(l2), h: f.h, h2, star, star2, method: f.method };
    check_two_stars(g, g2, z, z2, &out)?;
    Ok(out)
}

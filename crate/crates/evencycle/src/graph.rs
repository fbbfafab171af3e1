//! Multigraphs with loops, signed graphs and grafts.

use std::collections::{BTreeMap, BTreeSet};

use crate::edgeset::EdgeSet;
use crate::error::{Error, Result};

pub type Vertex = u32;
pub type Edge = u32;
pub type VertexSet = BTreeSet<Vertex>;

/// A finite multigraph over stable edge ids. Endpoints are stored with the
/// smaller id first; an edge with equal endpoints is a loop.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Graph {
    vertices: BTreeSet<Vertex>,
    edges: BTreeMap<Edge, (Vertex, Vertex)>,
}

fn ordered(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Sorted multiset of vertex stars; equal keys mean equal graphs up to
/// renaming of vertices (isolated vertices ignored).
pub type CanonKey = Vec<Vec<Edge>>;

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    pub fn from_edges(edges: &[(Edge, Vertex, Vertex)]) -> Result<Self> {
        let mut g = Graph::new();
        for &(e, u, v) in edges {
            g.add_edge(e, u, v)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self, v: Vertex) {
        self.vertices.insert(v);
    }

    pub fn add_edge(&mut self, e: Edge, u: Vertex, v: Vertex) -> Result<()> {
        if self.edges.contains_key(&e) {
            return Err(Error::DuplicateEdge(e));
        }
        self.vertices.insert(u);
        self.vertices.insert(v);
        self.edges.insert(e, ordered(u, v));
        Ok(())
    }

    /// Replaces the endpoints of an existing edge.
    pub(crate) fn set_ends(&mut self, e: Edge, u: Vertex, v: Vertex) {
        self.vertices.insert(u);
        self.vertices.insert(v);
        self.edges.insert(e, ordered(u, v));
    }

    pub fn remove_edge(&mut self, e: Edge) -> Option<(Vertex, Vertex)> {
        self.edges.remove(&e)
    }

    pub fn remove_vertex(&mut self, v: Vertex) {
        self.edges.retain(|_, &mut (a, b)| a != v && b != v);
        self.vertices.remove(&v);
    }

    pub fn vertices(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn has_vertex(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        self.edges.contains_key(&e)
    }

    /// Edges as `(id, u, v)` in id order.
    pub fn edges(&self) -> impl Iterator<Item = (Edge, Vertex, Vertex)> + '_ {
        self.edges.iter().map(|(&e, &(u, v))| (e, u, v))
    }

    pub fn ends(&self, e: Edge) -> Option<(Vertex, Vertex)> {
        self.edges.get(&e).copied()
    }

    pub fn other_end(&self, e: Edge, v: Vertex) -> Option<Vertex> {
        let (a, b) = self.ends(e)?;
        if a == v {
            Some(b)
        } else if b == v {
            Some(a)
        } else {
            None
        }
    }

    pub fn edge_set(&self) -> EdgeSet {
        self.edges.keys().collect()
    }

    pub fn edge_ids(&self) -> Vec<Edge> {
        self.edges.keys().copied().collect()
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_loop(&self, e: Edge) -> bool {
        matches!(self.ends(e), Some((u, v)) if u == v)
    }

    pub fn loops(&self) -> EdgeSet {
        self.edges().filter(|&(_, u, v)| u == v).map(|(e, _, _)| e).collect()
    }

    pub fn non_loops(&self) -> EdgeSet {
        self.edges().filter(|&(_, u, v)| u != v).map(|(e, _, _)| e).collect()
    }

    /// Next unused vertex id (deterministic: one more than the maximum).
    pub fn fresh_vertex(&self) -> Vertex {
        self.vertices.iter().next_back().map_or(0, |v| v + 1)
    }

    pub fn fresh_edge(&self) -> Edge {
        self.edges.keys().next_back().map_or(0, |e| e + 1)
    }

    pub fn check_edges(&self, x: &EdgeSet) -> Result<()> {
        match x.iter().find(|e| !self.edges.contains_key(e)) {
            Some(e) => Err(Error::UnknownEdge(e)),
            None => Ok(()),
        }
    }

    pub fn check_vertices<'a>(&self, u: impl IntoIterator<Item = &'a Vertex>) -> Result<()> {
        for v in u {
            if !self.vertices.contains(v) {
                return Err(Error::UnknownVertex(*v));
            }
        }
        Ok(())
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<()> {
        self.check_vertices([&v])
    }

    /// Complement with respect to `E(G)`.
    pub fn complement(&self, x: &EdgeSet) -> EdgeSet {
        self.edge_set().difference(x)
    }

    /// `V_G(X)`: vertices incident with an edge of `X` (ids outside `E` are ignored).
    pub fn vertices_of(&self, x: &EdgeSet) -> VertexSet {
        let mut out = VertexSet::new();
        for e in x.iter() {
            if let Some((u, v)) = self.ends(e) {
                out.insert(u);
                out.insert(v);
            }
        }
        out
    }

    /// `B_G(X) = V(X) ∩ V(X̄)`.
    pub fn boundary(&self, x: &EdgeSet) -> Result<VertexSet> {
        self.check_edges(x)?;
        let inside = self.vertices_of(x);
        let outside = self.vertices_of(&self.complement(x));
        Ok(inside.intersection(&outside).copied().collect())
    }

    /// `V(X) − B(X)`.
    pub fn interior(&self, x: &EdgeSet) -> Result<VertexSet> {
        let b = self.boundary(x)?;
        Ok(self.vertices_of(x).difference(&b).copied().collect())
    }

    /// `δ(U)`: non-loop edges with exactly one end in `U`.
    pub fn cut(&self, u: &VertexSet) -> Result<EdgeSet> {
        self.check_vertices(u)?;
        Ok(self.cut_unchecked(|v| u.contains(&v)))
    }

    pub(crate) fn cut_unchecked(&self, inside: impl Fn(Vertex) -> bool) -> EdgeSet {
        self.edges().filter(|&(_, a, b)| inside(a) != inside(b)).map(|(e, _, _)| e).collect()
    }

    /// `δ(v)`, the non-loop edges at `v`.
    pub fn star(&self, v: Vertex) -> EdgeSet {
        self.edges().filter(|&(_, a, b)| a != b && (a == v || b == v)).map(|(e, _, _)| e).collect()
    }

    /// `δ(v)` together with the loops at `v`.
    pub fn incident(&self, v: Vertex) -> EdgeSet {
        self.edges().filter(|&(_, a, b)| a == v || b == v).map(|(e, _, _)| e).collect()
    }

    /// Degree of `v` in `G[X]`; a loop counts twice.
    pub fn degree_in(&self, v: Vertex, x: &EdgeSet) -> usize {
        x.iter().filter_map(|e| self.ends(e)).map(|(a, b)| (a == v) as usize + (b == v) as usize).sum()
    }

    /// `V_odd(G[X])`.
    pub fn odd_vertices(&self, x: &EdgeSet) -> VertexSet {
        let mut odd = VertexSet::new();
        for e in x.iter() {
            if let Some((a, b)) = self.ends(e) {
                if a != b {
                    for w in [a, b] {
                        if !odd.remove(&w) {
                            odd.insert(w);
                        }
                    }
                }
            }
        }
        odd
    }

    pub fn is_cycle(&self, x: &EdgeSet) -> Result<bool> {
        self.check_edges(x)?;
        Ok(self.odd_vertices(x).is_empty())
    }

    /// Connected components of `G[X]` as edge sets, ordered by smallest edge.
    pub fn edge_components(&self, x: &EdgeSet) -> Vec<EdgeSet> {
        let mut uf = UnionFind::default();
        for e in x.iter() {
            if let Some((a, b)) = self.ends(e) {
                uf.union(a, b);
            }
        }
        let mut by_root: BTreeMap<Vertex, EdgeSet> = BTreeMap::new();
        for e in x.iter() {
            if let Some((a, _)) = self.ends(e) {
                by_root.entry(uf.find(a)).or_default().insert(e);
            }
        }
        let mut comps: Vec<EdgeSet> = by_root.into_values().collect();
        comps.sort();
        comps
    }

    /// Bridges of `X` relative to `attach`: edges sharing a vertex outside
    /// `attach` are grouped; an edge with both ends in `attach` stands alone.
    pub fn bridges(&self, x: &EdgeSet, attach: &VertexSet) -> Vec<EdgeSet> {
        let mut uf = UnionFind::default();
        let mut owner: BTreeMap<Vertex, Edge> = BTreeMap::new();
        let mut edge_uf: BTreeMap<Edge, Vertex> = BTreeMap::new();
        // Union edges through their non-attachment vertices.
        for e in x.iter() {
            let Some((a, b)) = self.ends(e) else { continue };
            edge_uf.insert(e, e);
            for v in [a, b] {
                if attach.contains(&v) {
                    continue;
                }
                match owner.get(&v) {
                    Some(&f) => {
                        uf.union(e, f);
                    }
                    None => {
                        owner.insert(v, e);
                    }
                }
            }
        }
        let mut groups: BTreeMap<Vertex, EdgeSet> = BTreeMap::new();
        for &e in edge_uf.keys() {
            groups.entry(uf.find(e)).or_default().insert(e);
        }
        let mut out: Vec<EdgeSet> = groups.into_values().collect();
        out.sort();
        out
    }

    /// Circuits of `G[X]` with at most `max_len` edges, each listed once.
    pub fn circuits(&self, x: &EdgeSet, max_len: usize) -> Vec<EdgeSet> {
        let mut adj: BTreeMap<Vertex, Vec<(Edge, Vertex)>> = BTreeMap::new();
        for e in x.iter() {
            if let Some((a, b)) = self.ends(e) {
                if a != b {
                    adj.entry(a).or_default().push((e, b));
                    adj.entry(b).or_default().push((e, a));
                }
            }
        }
        let mut out = Vec::new();
        for e0 in x.iter() {
            let Some((u, v)) = self.ends(e0) else { continue };
            if u == v {
                if max_len >= 1 {
                    out.push(EdgeSet::singleton(e0));
                }
                continue;
            }
            // Paths v -> u through edges above e0 close a circuit whose
            // smallest edge is e0.
            let mut path = vec![e0];
            let mut seen: VertexSet = [v].into();
            circuit_dfs(&adj, e0, u, v, max_len, &mut path, &mut seen, &mut out);
        }
        out
    }

    /// Whether `G[X]` is connected; the empty edge set counts as connected.
    pub fn is_connected_edges(&self, x: &EdgeSet) -> bool {
        self.edge_components(x).len() <= 1
    }

    /// Vertex partition into connected components (isolated vertices included).
    pub fn vertex_components(&self) -> Vec<VertexSet> {
        let mut uf = UnionFind::default();
        for &v in &self.vertices {
            uf.find(v);
        }
        for (_, a, b) in self.edges() {
            uf.union(a, b);
        }
        let mut by_root: BTreeMap<Vertex, VertexSet> = BTreeMap::new();
        for &v in &self.vertices {
            by_root.entry(uf.find(v)).or_default().insert(v);
        }
        let mut comps: Vec<VertexSet> = by_root.into_values().collect();
        comps.sort();
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_components().len() <= 1
    }

    /// `G[X]` with vertex set `V(X)`.
    pub fn subgraph(&self, x: &EdgeSet) -> Graph {
        let mut g = Graph::new();
        for e in x.iter() {
            if let Some((a, b)) = self.ends(e) {
                g.set_ends(e, a, b);
            }
        }
        g
    }

    pub fn delete_edges(&self, x: &EdgeSet) -> Graph {
        let mut g = self.clone();
        g.edges.retain(|e, _| !x.contains(*e));
        g
    }

    pub fn without_isolated(&self) -> Graph {
        let mut g = self.clone();
        g.vertices = self.vertices_of(&self.edge_set());
        g
    }

    /// Identifies `drop` into `keep`; edges between them become loops.
    pub fn identify(&self, keep: Vertex, drop: Vertex) -> Result<Graph> {
        self.check_vertices([&keep, &drop])?;
        if keep == drop {
            return Ok(self.clone());
        }
        Ok(self.relabel(|v| if v == drop { keep } else { v }))
    }

    /// Applies a vertex map to every endpoint and vertex.
    pub fn relabel(&self, f: impl Fn(Vertex) -> Vertex) -> Graph {
        let mut g = Graph::new();
        for &v in &self.vertices {
            g.vertices.insert(f(v));
        }
        for (e, a, b) in self.edges() {
            g.set_ends(e, f(a), f(b));
        }
        g
    }

    fn stars(&self, with_loops: bool) -> BTreeMap<Vertex, Vec<Edge>> {
        let mut stars: BTreeMap<Vertex, Vec<Edge>> = BTreeMap::new();
        for (e, a, b) in self.edges() {
            if a == b && !with_loops {
                continue;
            }
            stars.entry(a).or_default().push(e);
            stars.entry(b).or_default().push(e);
        }
        stars
    }

    pub fn canonical_key(&self) -> CanonKey {
        let mut key: CanonKey = self.stars(true).into_values().collect();
        key.sort();
        key
    }

    /// Key of the loopless part plus the loop set; equal keys mean the
    /// graphs agree up to renaming and the position of loops.
    pub fn canonical_key_modulo_loops(&self) -> (CanonKey, EdgeSet) {
        let mut key: CanonKey = self.stars(false).into_values().collect();
        key.sort();
        (key, self.loops())
    }

    /// `min(|X|,|X̄|) ≥ max(k,1)`, `|B(X)| = k` and both sides connected.
    pub fn is_k_separation(&self, x: &EdgeSet, k: usize) -> bool {
        let xc = self.complement(x);
        x.len().min(xc.len()) >= k.max(1)
            && self.boundary(x).map(|b| b.len() == k).unwrap_or(false)
            && self.is_connected_edges(x)
            && self.is_connected_edges(&xc)
    }

    pub fn same_up_to_renaming(&self, other: &Graph) -> bool {
        self.num_edges() == other.num_edges() && self.canonical_key() == other.canonical_key()
    }

    pub fn same_modulo_loops(&self, other: &Graph) -> bool {
        self.canonical_key_modulo_loops() == other.canonical_key_modulo_loops()
    }

    /// Vertex bijection `V(self) → V(other)` (non-isolated vertices) carrying
    /// every edge to the edge with the same id, if one exists. Loops are
    /// ignored when `ignore_loops` is set.
    pub fn vertex_correspondence(&self, other: &Graph, ignore_loops: bool) -> Option<BTreeMap<Vertex, Vertex>> {
        let a = self.stars(!ignore_loops);
        let b = other.stars(!ignore_loops);
        if a.len() != b.len() {
            return None;
        }
        let mut pool: BTreeMap<Vec<Edge>, Vec<Vertex>> = BTreeMap::new();
        for (v, s) in b {
            pool.entry(s).or_default().push(v);
        }
        let mut map = BTreeMap::new();
        for (v, s) in a {
            let w = pool.get_mut(&s)?.pop()?;
            map.insert(v, w);
        }
        if ignore_loops && self.loops() != other.loops() {
            return None;
        }
        Some(map)
    }
}

#[allow(clippy::too_many_arguments)]
fn circuit_dfs(
    adj: &BTreeMap<Vertex, Vec<(Edge, Vertex)>>,
    e0: Edge,
    target: Vertex,
    at: Vertex,
    max_len: usize,
    path: &mut Vec<Edge>,
    seen: &mut VertexSet,
    out: &mut Vec<EdgeSet>,
) {
    for &(e, w) in adj.get(&at).map(|v| v.as_slice()).unwrap_or(&[]) {
        if e <= e0 || path.len() >= max_len {
            continue;
        }
        if w == target {
            path.push(e);
            out.push(path.iter().copied().collect());
            path.pop();
        } else if seen.insert(w) {
            path.push(e);
            circuit_dfs(adj, e0, target, w, max_len, path, seen, out);
            path.pop();
            seen.remove(&w);
        }
    }
}

/// Union-find over vertex ids.
#[derive(Default, Clone, Debug)]
pub(crate) struct UnionFind {
    parent: BTreeMap<Vertex, Vertex>,
}

impl UnionFind {
    pub fn find(&mut self, v: Vertex) -> Vertex {
        let p = *self.parent.entry(v).or_insert(v);
        if p == v {
            return v;
        }
        let r = self.find(p);
        self.parent.insert(v, r);
        r
    }

    pub fn union(&mut self, a: Vertex, b: Vertex) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent.insert(hi, lo);
        true
    }
}

/// A component with its block decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentBlocks {
    pub vertices: VertexSet,
    /// Maximal 2-connected pieces, bridges and loops, each as an edge set.
    pub blocks: Vec<EdgeSet>,
    /// Vertices lying in two or more non-loop blocks.
    pub cut_vertices: VertexSet,
}

pub fn components_and_blocks(g: &Graph) -> Vec<ComponentBlocks> {
    let mut out = Vec::new();
    for comp in g.vertex_components() {
        let edges: EdgeSet = g.edges().filter(|(_, a, _)| comp.contains(a)).map(|(e, _, _)| e).collect();
        let mut blocks = non_loop_blocks(g, &comp, &edges);
        let mut count: BTreeMap<Vertex, usize> = BTreeMap::new();
        for b in &blocks {
            for v in g.vertices_of(b) {
                *count.entry(v).or_default() += 1;
            }
        }
        let cut_vertices = count.into_iter().filter(|&(_, c)| c > 1).map(|(v, _)| v).collect();
        for e in edges.iter().filter(|&e| g.is_loop(e)) {
            blocks.push(EdgeSet::singleton(e));
        }
        blocks.sort();
        out.push(ComponentBlocks { vertices: comp, blocks, cut_vertices });
    }
    out
}

// Tarjan's biconnected components on the loopless part of one component.
fn non_loop_blocks(g: &Graph, comp: &VertexSet, edges: &EdgeSet) -> Vec<EdgeSet> {
    let mut adj: BTreeMap<Vertex, Vec<(Edge, Vertex)>> = BTreeMap::new();
    for e in edges.iter() {
        let (a, b) = g.ends(e).unwrap();
        if a != b {
            adj.entry(a).or_default().push((e, b));
            adj.entry(b).or_default().push((e, a));
        }
    }
    let Some(&root) = comp.iter().next() else { return Vec::new() };
    let mut disc: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut low: BTreeMap<Vertex, usize> = BTreeMap::new();
    let mut stack: Vec<Edge> = Vec::new();
    let mut blocks = Vec::new();
    let mut time = 0;
    // Frames: (vertex, parent edge, next adjacency index).
    let mut frames: Vec<(Vertex, Option<Edge>, usize)> = vec![(root, None, 0)];
    disc.insert(root, 0);
    low.insert(root, 0);
    while let Some(&mut (v, pe, ref mut idx)) = frames.last_mut() {
        let nbrs = adj.get(&v).map(|x| x.as_slice()).unwrap_or(&[]);
        if *idx < nbrs.len() {
            let (e, w) = nbrs[*idx];
            *idx += 1;
            if Some(e) == pe {
                continue;
            }
            if let Some(&dw) = disc.get(&w) {
                if dw < disc[&v] {
                    stack.push(e);
                    let lv = low[&v].min(dw);
                    low.insert(v, lv);
                }
            } else {
                time += 1;
                disc.insert(w, time);
                low.insert(w, time);
                stack.push(e);
                frames.push((w, Some(e), 0));
            }
        } else {
            frames.pop();
            if let (Some(pe), Some(&(u, _, _))) = (pe, frames.last()) {
                let lv = low[&v];
                if lv < low[&u] {
                    low.insert(u, lv);
                }
                if lv >= disc[&u] {
                    let mut block = EdgeSet::new();
                    while let Some(f) = stack.pop() {
                        block.insert(f);
                        if f == pe {
                            break;
                        }
                    }
                    blocks.push(block);
                }
            }
        }
    }
    blocks
}

/// Dense bit view of a graph for exhaustive subset scans (at most 64 edges
/// and 64 vertices).
#[derive(Clone, Debug)]
pub(crate) struct Dense {
    pub edges: Vec<Edge>,
    pub vmask: Vec<u64>,
    pub ends: Vec<(usize, usize)>,
    pub verts: Vec<Vertex>,
    pub full: u64,
}

impl Dense {
    pub fn new(g: &Graph) -> Result<Dense> {
        Self::over(g, &g.edge_set())
    }

    /// View restricted to the edges in `x`.
    pub fn over(g: &Graph, x: &EdgeSet) -> Result<Dense> {
        let edges: Vec<Edge> = x.iter().collect();
        let verts: Vec<Vertex> = g.vertices_of(x).into_iter().collect();
        if edges.len() > 63 {
            return Err(Error::TooLarge { what: "edges", size: edges.len(), limit: 63 });
        }
        if verts.len() > 64 {
            return Err(Error::TooLarge { what: "vertices", size: verts.len(), limit: 64 });
        }
        let pos = |v: Vertex| verts.binary_search(&v).unwrap();
        let mut vmask = Vec::new();
        let mut ends = Vec::new();
        for &e in &edges {
            let (a, b) = g.ends(e).ok_or(Error::UnknownEdge(e))?;
            let (i, j) = (pos(a), pos(b));
            ends.push((i, j));
            vmask.push(1u64 << i | 1u64 << j);
        }
        let full = if edges.len() == 64 { u64::MAX } else { (1u64 << edges.len()) - 1 };
        Ok(Dense { edges, vmask, ends, verts, full })
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn vset(&self, mask: u64) -> u64 {
        let mut out = 0;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            out |= self.vmask[i];
        }
        out
    }

    pub fn boundary(&self, mask: u64) -> u64 {
        self.vset(mask) & self.vset(self.full & !mask)
    }

    pub fn connected(&self, mask: u64) -> bool {
        if mask == 0 {
            return true;
        }
        let mut reached = self.vmask[mask.trailing_zeros() as usize];
        let mut left = mask;
        loop {
            let mut grew = false;
            let mut m = left;
            while m != 0 {
                let i = m.trailing_zeros() as usize;
                m &= m - 1;
                if self.vmask[i] & reached != 0 {
                    reached |= self.vmask[i];
                    left &= !(1 << i);
                    grew = true;
                }
            }
            if left == 0 {
                return true;
            }
            if !grew {
                return false;
            }
        }
    }

    /// Whether `(G[mask], sig ∩ mask)` is bipartite (every cycle even).
    pub fn balanced(&self, mask: u64, sig: u64) -> bool {
        let n = self.verts.len();
        let mut parent: Vec<usize> = (0..n).collect();
        let mut parity = vec![false; n];
        fn find(p: &mut [usize], par: &mut [bool], x: usize) -> (usize, bool) {
            let mut r = x;
            let mut acc = false;
            while p[r] != r {
                acc ^= par[r];
                r = p[r];
            }
            // compress
            let mut y = x;
            let mut rest = acc;
            while p[y] != r {
                let n = p[y];
                let py = par[y];
                p[y] = r;
                par[y] = rest;
                rest ^= py;
                y = n;
            }
            (r, acc)
        }
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            let odd = sig >> i & 1 == 1;
            let (a, b) = self.ends[i];
            let (ra, pa) = find(&mut parent, &mut parity, a);
            let (rb, pb) = find(&mut parent, &mut parity, b);
            if ra == rb {
                if pa ^ pb != odd {
                    return false;
                }
            } else {
                parent[ra] = rb;
                parity[ra] = pa ^ pb ^ odd;
            }
        }
        true
    }

    pub fn to_set(&self, mask: u64) -> EdgeSet {
        let mut s = EdgeSet::new();
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            s.insert(self.edges[i]);
        }
        s
    }

    pub fn to_mask(&self, x: &EdgeSet) -> u64 {
        let mut mask = 0;
        for (i, &e) in self.edges.iter().enumerate() {
            if x.contains(e) {
                mask |= 1 << i;
            }
        }
        mask
    }
}

pub(crate) const EXHAUSTIVE_EDGE_LIMIT: usize = 24;

/// All `k`-separations of a connected graph: `min(|X|,|X̄|) ≥ k`, `|B(X)| = k`,
/// both sides nonempty and connected. Each is reported once, by the side
/// containing the smallest edge id (the lexicographically smaller side).
pub fn enumerate_k_separations(g: &Graph, k: usize) -> Result<Vec<EdgeSet>> {
    if !g.is_connected_edges(&g.edge_set()) {
        return Err(Error::Disconnected);
    }
    let d = Dense::new(g)?;
    Ok(separations_dense(&d, k).into_iter().map(|m| d.to_set(m)).collect())
}

pub(crate) fn separations_dense(d: &Dense, k: usize) -> Vec<u64> {
    let m = d.m();
    if m < 2 {
        return Vec::new();
    }
    assert!(m <= EXHAUSTIVE_EDGE_LIMIT + 8, "exhaustive scan over {m} edges");
    let min_side = k.max(1) as u32;
    let mut out = Vec::new();
    // Masks containing bit 0: the canonical side.
    for rest in 0..(1u64 << (m - 1)) {
        let x = rest << 1 | 1;
        if x == d.full {
            continue;
        }
        let xc = d.full & !x;
        if x.count_ones() < min_side || xc.count_ones() < min_side {
            continue;
        }
        if d.boundary(x).count_ones() as usize != k {
            continue;
        }
        if d.connected(x) && d.connected(xc) {
            out.push(x);
        }
    }
    out
}

/// Separations of any order below `k`; empty result means the loopless
/// edge structure is `k`-connected.
pub fn is_k_connected(g: &Graph, k: usize) -> Result<bool> {
    let d = Dense::new(g)?;
    if d.m() > 0 && !d.connected(d.full) {
        return Ok(k == 0);
    }
    for r in 1..k {
        if !separations_dense(&d, r).is_empty() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A graph together with a signature `Σ ⊆ E`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedGraph {
    pub graph: Graph,
    pub signature: EdgeSet,
}

impl SignedGraph {
    pub fn new(graph: Graph, signature: EdgeSet) -> Result<Self> {
        graph.check_edges(&signature)?;
        Ok(SignedGraph { graph, signature })
    }

    /// Odd edges that are not loops.
    pub fn odd_non_loops(&self) -> EdgeSet {
        self.signature.intersection(&self.graph.non_loops())
    }
}

/// A graph together with an even set of terminals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graft {
    pub graph: Graph,
    pub terminals: VertexSet,
}

impl Graft {
    pub fn new(graph: Graph, terminals: VertexSet) -> Result<Self> {
        graph.check_vertices(&terminals)?;
        if terminals.len() % 2 == 1 {
            return Err(Error::OddTerminals(terminals.len()));
        }
        Ok(Graft { graph, terminals })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eset;

    pub(crate) fn k4() -> Graph {
        // e12=0, e13=1, e14=2, e23=3, e24=4, e34=5
        Graph::from_edges(&[(0, 1, 2), (1, 1, 3), (2, 1, 4), (3, 2, 3), (4, 2, 4), (5, 3, 4)]).unwrap()
    }

    fn cycle(n: u32) -> Graph {
        Graph::from_edges(&(0..n).map(|i| (i, i, (i + 1) % n)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn boundary_examples() {
        let path = Graph::from_edges(&[(1, 1, 2), (2, 2, 3)]).unwrap();
        assert_eq!(path.boundary(&eset![1]).unwrap(), [2].into());
        assert!(path.boundary(&eset![1, 2]).unwrap().is_empty());
        assert_eq!(path.interior(&eset![1]).unwrap(), [1].into());
        assert_eq!(k4().boundary(&eset![0, 1]).unwrap(), [1, 2, 3].into());
        assert_eq!(path.boundary(&eset![9]), Err(Error::UnknownEdge(9)));
        let c4 = cycle(4);
        assert_eq!(c4.interior(&eset![0, 1]).unwrap(), [1].into());
    }

    #[test]
    fn cuts_and_cycles() {
        let tri = Graph::from_edges(&[(1, 1, 2), (2, 2, 3), (3, 3, 1)]).unwrap();
        assert_eq!(tri.cut(&[1].into()).unwrap(), eset![1, 3]);
        assert!(tri.cut(&VertexSet::new()).unwrap().is_empty());
        assert!(tri.cut(&[1, 2, 3].into()).unwrap().is_empty());
        assert!(tri.is_cycle(&eset![1, 2, 3]).unwrap());
        assert!(tri.is_cycle(&EdgeSet::new()).unwrap());
        let mut l = tri.clone();
        l.add_edge(7, 2, 2).unwrap();
        assert!(!l.cut(&[2].into()).unwrap().contains(7));
        assert!(l.is_cycle(&eset![7]).unwrap());
        assert_eq!(l.degree_in(2, &eset![7]), 2);
    }

    #[test]
    fn blocks_examples() {
        let two = Graph::from_edges(&[(0, 0, 1), (1, 1, 2), (2, 2, 0), (3, 5, 6), (4, 6, 7), (5, 7, 5)]).unwrap();
        let cb = components_and_blocks(&two);
        assert_eq!(cb.len(), 2);
        assert!(cb.iter().all(|c| c.blocks.len() == 1));
        let path = Graph::from_edges(&[(0, 0, 1), (1, 1, 2), (2, 2, 3)]).unwrap();
        let cb = components_and_blocks(&path);
        assert_eq!(cb[0].blocks.len(), 3);
        assert_eq!(cb[0].cut_vertices, [1, 2].into());
        let mut g = k4();
        g.add_edge(6, 4, 9).unwrap();
        let cb = components_and_blocks(&g);
        assert_eq!(cb[0].blocks, vec![eset![0, 1, 2, 3, 4, 5], eset![6]]);
        assert_eq!(cb[0].cut_vertices, [4].into());
    }

    #[test]
    fn separations_examples() {
        // A parallel pair inside a triangle is a 2-separation; a lone
        // pair of parallel edges is too small to be one.
        let par = Graph::from_edges(&[(1, 1, 2), (2, 1, 2), (3, 2, 3), (4, 3, 1)]).unwrap();
        assert!(enumerate_k_separations(&par, 2).unwrap().contains(&eset![1, 2]));
        let lone = Graph::from_edges(&[(1, 1, 2), (2, 1, 2)]).unwrap();
        assert!(enumerate_k_separations(&lone, 2).unwrap().is_empty());
        assert!(enumerate_k_separations(&k4(), 2).unwrap().is_empty());
        let c4 = cycle(4);
        let seps = enumerate_k_separations(&c4, 2).unwrap();
        assert_eq!(seps, vec![eset![0, 1], eset![0, 3]]);
        let dis = Graph::from_edges(&[(1, 1, 2), (2, 3, 4)]).unwrap();
        assert_eq!(enumerate_k_separations(&dis, 1), Err(Error::Disconnected));
    }

    #[test]
    fn canonical_keys() {
        let a = Graph::from_edges(&[(1, 1, 2), (2, 2, 3)]).unwrap();
        let b = Graph::from_edges(&[(1, 7, 5), (2, 5, 9)]).unwrap();
        let c = Graph::from_edges(&[(1, 1, 2), (2, 1, 3)]).unwrap();
        assert!(a.same_up_to_renaming(&b));
        assert!(a.same_up_to_renaming(&c));
        let d = Graph::from_edges(&[(1, 1, 2), (2, 3, 4)]).unwrap();
        assert!(!a.same_up_to_renaming(&d));
        let map = a.vertex_correspondence(&b, false).unwrap();
        assert_eq!(map[&2], 5);
    }

    fn small_graph() -> impl proptest::strategy::Strategy<Value = Graph> {
        use proptest::prelude::*;
        proptest::collection::vec((0u32..5, 0u32..5), 1..8).prop_map(|es| {
            let mut g = Graph::new();
            for (i, (u, v)) in es.into_iter().enumerate() {
                g.add_edge(i as u32, u, v).unwrap();
            }
            g
        })
    }

    proptest::proptest! {
        #[test]
        fn boundary_symmetric(g in small_graph(), bits in 0u64..256) {
            let x: EdgeSet = g.edge_ids().into_iter().filter(|&e| bits >> e & 1 == 1).collect();
            proptest::prop_assert_eq!(g.boundary(&x).unwrap(), g.boundary(&g.complement(&x)).unwrap());
        }

        #[test]
        fn cut_complement(g in small_graph(), bits in 0u64..32) {
            let u: VertexSet = g.vertices().iter().copied().filter(|&v| bits >> v & 1 == 1).collect();
            let uc: VertexSet = g.vertices().difference(&u).copied().collect();
            proptest::prop_assert_eq!(g.cut(&u).unwrap(), g.cut(&uc).unwrap());
        }

        #[test]
        fn separations_recheck(g in small_graph(), k in 1usize..4) {
            if let Ok(seps) = enumerate_k_separations(&g, k) {
                for x in seps {
                    let xc = g.complement(&x);
                    proptest::prop_assert_eq!(g.boundary(&x).unwrap().len(), k);
                    proptest::prop_assert!(g.is_connected_edges(&x) && g.is_connected_edges(&xc));
                    proptest::prop_assert!(x.len().min(xc.len()) >= k && x < xc);
                }
            }
        }
    }

    #[test]
    fn cycles_closed_under_sym_diff_exhaustive() {
        // All graphs on 3 vertices with 4 edges, all pairs of edge subsets.
        let pairs: Vec<(u32, u32)> = (0..3).flat_map(|a| (a..3).map(move |b| (a, b))).collect();
        for code in 0..pairs.len().pow(4) {
            let mut g = Graph::new();
            let mut c = code;
            for e in 0..4 {
                let (u, v) = pairs[c % pairs.len()];
                c /= pairs.len();
                g.add_edge(e, u, v).unwrap();
            }
            let cycles: Vec<EdgeSet> = (0u32..16)
                .map(|b| (0..4).filter(|e| b >> e & 1 == 1).collect::<EdgeSet>())
                .filter(|x| g.is_cycle(x).unwrap())
                .collect();
            for x in &cycles {
                for y in &cycles {
                    assert!(g.is_cycle(&x.sym_diff(y)).unwrap());
                }
            }
        }
    }
}

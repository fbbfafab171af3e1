//! GF(2) subspaces of edge-indexed vectors and the four graph spaces.

use std::collections::BTreeMap;

use crate::edgeset::EdgeSet;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graft, Graph, SignedGraph, Vertex};

/// A subspace of `GF(2)^universe` held as a fully reduced echelon basis:
/// rows are sorted by leading (smallest) edge, and no row contains the
/// leading edge of another row. Equal spaces therefore have equal bases.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GF2Space {
    universe: EdgeSet,
    rows: Vec<EdgeSet>,
}

impl GF2Space {
    pub fn zero(universe: EdgeSet) -> Self {
        GF2Space { universe, rows: Vec::new() }
    }

    pub fn full(universe: EdgeSet) -> Self {
        let rows = universe.iter().map(EdgeSet::singleton).collect();
        GF2Space { universe, rows }
    }

    pub fn span<'a>(universe: &EdgeSet, gens: impl IntoIterator<Item = &'a EdgeSet>) -> Result<Self> {
        let mut s = GF2Space::zero(universe.clone());
        for g in gens {
            s.insert(g)?;
        }
        Ok(s)
    }

    pub fn universe(&self) -> &EdgeSet {
        &self.universe
    }

    pub fn basis(&self) -> &[EdgeSet] {
        &self.rows
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &EdgeSet) -> EdgeSet {
        let mut r = v.clone();
        for row in &self.rows {
            if r.contains(row.first().unwrap()) {
                r.sym_diff_with(row);
            }
        }
        r
    }

    pub fn contains(&self, v: &EdgeSet) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds a vector to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: &EdgeSet) -> Result<bool> {
        if let Some(e) = v.difference(&self.universe).first() {
            return Err(Error::UnknownEdge(e));
        }
        let r = self.reduce(v);
        let Some(lead) = r.first() else { return Ok(false) };
        for row in &mut self.rows {
            if row.contains(lead) {
                row.sym_diff_with(&r);
            }
        }
        let pos = self.rows.partition_point(|row| row.first().unwrap() < lead);
        self.rows.insert(pos, r);
        Ok(true)
    }

    pub fn equals(&self, other: &GF2Space) -> Result<bool> {
        if self.universe != other.universe {
            return Err(Error::UniverseMismatch);
        }
        Ok(self.rows == other.rows)
    }

    pub fn is_subspace_of(&self, other: &GF2Space) -> Result<bool> {
        if self.universe != other.universe {
            return Err(Error::UniverseMismatch);
        }
        Ok(self.rows.iter().all(|r| other.contains(r)))
    }

    /// `{y : y·x = 0 for all x}`.
    pub fn orthogonal_complement(&self) -> GF2Space {
        let pivots: EdgeSet = self.rows.iter().map(|r| r.first().unwrap()).collect();
        let mut out = GF2Space::zero(self.universe.clone());
        for f in self.universe.difference(&pivots).iter() {
            let mut y = EdgeSet::singleton(f);
            for row in &self.rows {
                if row.contains(f) {
                    y.insert(row.first().unwrap());
                }
            }
            out.insert(&y).expect("inside universe");
        }
        out
    }

    pub fn sum(&self, other: &GF2Space) -> Result<GF2Space> {
        if self.universe != other.universe {
            return Err(Error::UniverseMismatch);
        }
        let mut s = self.clone();
        for r in &other.rows {
            s.insert(r)?;
        }
        Ok(s)
    }

    pub fn intersection(&self, other: &GF2Space) -> Result<GF2Space> {
        let c = self.orthogonal_complement().sum(&other.orthogonal_complement())?;
        Ok(c.orthogonal_complement())
    }

    /// Rank of the projection of the space onto the coordinates in `x`.
    pub fn projection_rank(&self, x: &EdgeSet) -> usize {
        let proj: Vec<EdgeSet> = self.rows.iter().map(|r| r.intersection(x)).collect();
        let mut s = GF2Space::zero(self.universe.clone());
        let mut rank = 0;
        for p in &proj {
            if s.insert(p).expect("inside universe") {
                rank += 1;
            }
        }
        rank
    }

    /// Rank of `x` in the binary matroid whose cycle space is `self`:
    /// `|X| − dim{C ∈ self : C ⊆ X}`.
    pub fn matroid_rank(&self, x: &EdgeSet) -> usize {
        let outside = self.universe.difference(x);
        let inside_dim = self.dim() - self.projection_rank(&outside);
        x.intersection(&self.universe).len() - inside_dim
    }

    /// All vectors of the space (for small dimensions).
    pub fn elements(&self) -> Vec<EdgeSet> {
        assert!(self.dim() <= 24, "enumerating a space of dimension {}", self.dim());
        let mut out = vec![EdgeSet::new()];
        for row in &self.rows {
            let n = out.len();
            for i in 0..n {
                let v = out[i].sym_diff(row);
                out.push(v);
            }
        }
        out
    }
}

pub fn space_equals(a: &GF2Space, b: &GF2Space) -> Result<bool> {
    a.equals(b)
}

/// Spanning forest parents: vertex -> (parent vertex, tree edge).
fn spanning_forest(g: &Graph) -> BTreeMap<Vertex, Option<(Vertex, Edge)>> {
    let mut adj: BTreeMap<Vertex, Vec<(Edge, Vertex)>> = BTreeMap::new();
    for (e, a, b) in g.edges() {
        if a != b {
            adj.entry(a).or_default().push((e, b));
            adj.entry(b).or_default().push((e, a));
        }
    }
    let mut parent = BTreeMap::new();
    for &r in g.vertices() {
        if parent.contains_key(&r) {
            continue;
        }
        parent.insert(r, None);
        let mut queue = std::collections::VecDeque::from([r]);
        while let Some(v) = queue.pop_front() {
            for &(e, w) in adj.get(&v).map(|x| x.as_slice()).unwrap_or(&[]) {
                if let std::collections::btree_map::Entry::Vacant(slot) = parent.entry(w) {
                    slot.insert(Some((v, e)));
                    queue.push_back(w);
                }
            }
        }
    }
    parent
}

fn root_path(parent: &BTreeMap<Vertex, Option<(Vertex, Edge)>>, mut v: Vertex) -> EdgeSet {
    let mut p = EdgeSet::new();
    while let Some(Some((u, e))) = parent.get(&v) {
        p.insert(*e);
        v = *u;
    }
    p
}

/// Path between `u` and `v` in a spanning forest, as an edge set.
pub(crate) fn forest_path(g: &Graph, u: Vertex, v: Vertex) -> EdgeSet {
    let parent = spanning_forest(g);
    root_path(&parent, u).sym_diff(&root_path(&parent, v))
}

/// Fundamental cycles of a spanning forest (loops are their own cycles).
pub fn fundamental_cycles(g: &Graph) -> Vec<EdgeSet> {
    let parent = spanning_forest(g);
    let tree: EdgeSet = parent.values().flatten().map(|&(_, e)| e).collect();
    g.edges()
        .filter(|(e, _, _)| !tree.contains(*e))
        .map(|(e, a, b)| {
            let mut c = root_path(&parent, a).sym_diff(&root_path(&parent, b));
            c.insert(e);
            c
        })
        .collect()
}

pub fn cycle_space(g: &Graph) -> GF2Space {
    GF2Space::span(&g.edge_set(), &fundamental_cycles(g)).expect("cycles inside E")
}

pub fn cut_space(g: &Graph) -> GF2Space {
    let stars: Vec<EdgeSet> = g.vertices().iter().map(|&v| g.star(v)).collect();
    GF2Space::span(&g.edge_set(), &stars).expect("stars inside E")
}

/// Even cycles: odd fundamental cycles are corrected by one fixed odd cycle.
pub fn even_cycle_space(sg: &SignedGraph) -> GF2Space {
    let cycles = fundamental_cycles(&sg.graph);
    let odd = |c: &EdgeSet| c.dot(&sg.signature);
    let first_odd = cycles.iter().find(|c| odd(c)).cloned();
    let gens: Vec<EdgeSet> = cycles
        .into_iter()
        .map(|c| match (&first_odd, odd(&c)) {
            (Some(o), true) => c.sym_diff(o),
            _ => c,
        })
        .collect();
    GF2Space::span(&sg.graph.edge_set(), &gens).expect("cycles inside E")
}

/// `{δ(U) : |T ∩ U| even}`, generated by stars of non-terminals and the
/// cuts `δ({t, t0})` for terminals `t`.
pub fn even_cut_space(gr: &Graft) -> Result<GF2Space> {
    if gr.terminals.len() % 2 == 1 {
        return Err(Error::OddTerminals(gr.terminals.len()));
    }
    gr.graph.check_vertices(&gr.terminals)?;
    let g = &gr.graph;
    let mut gens: Vec<EdgeSet> =
        g.vertices().iter().filter(|v| !gr.terminals.contains(v)).map(|&v| g.star(v)).collect();
    if let Some(&t0) = gr.terminals.iter().next() {
        let s0 = g.star(t0);
        for &t in gr.terminals.iter().skip(1) {
            gens.push(g.star(t).sym_diff(&s0));
        }
    }
    GF2Space::span(&g.edge_set(), &gens)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::eset;
    use crate::graph::VertexSet;

    fn g(edges: &[(u32, u32, u32)]) -> Graph {
        Graph::from_edges(edges).unwrap()
    }

    pub(crate) fn k4() -> Graph {
        g(&[(0, 1, 2), (1, 1, 3), (2, 1, 4), (3, 2, 3), (4, 2, 4), (5, 3, 4)])
    }

    /// Brute force: every edge subset that is a cycle.
    pub(crate) fn all_cycles(g: &Graph) -> Vec<EdgeSet> {
        let ids = g.edge_ids();
        (0u64..1 << ids.len())
            .map(|b| ids.iter().enumerate().filter(|(i, _)| b >> i & 1 == 1).map(|(_, &e)| e).collect::<EdgeSet>())
            .filter(|x| g.is_cycle(x).unwrap())
            .collect()
    }

    /// Brute force: every cut `δ(U)` over all vertex subsets, with its T-parity.
    pub(crate) fn all_cuts(g: &Graph, t: &VertexSet) -> Vec<(EdgeSet, bool)> {
        let vs: Vec<Vertex> = g.vertices().iter().copied().collect();
        (0u64..1 << vs.len())
            .map(|b| {
                let u: VertexSet = vs.iter().enumerate().filter(|(i, _)| b >> i & 1 == 1).map(|(_, &v)| v).collect();
                (g.cut(&u).unwrap(), u.intersection(t).count().is_multiple_of(2))
            })
            .collect()
    }

    fn space_of(universe: &EdgeSet, vs: &[EdgeSet]) -> GF2Space {
        GF2Space::span(universe, vs).unwrap()
    }

    #[test]
    fn span_examples() {
        let u = eset![1, 2, 3];
        assert_eq!(space_of(&u, &[eset![1, 2], eset![2, 3]]).dim(), 2);
        assert_eq!(space_of(&u, &[]).dim(), 0);
        assert_eq!(space_of(&u, &[u.clone(), u.clone()]).dim(), 1);
        assert_eq!(GF2Space::span(&u, &[eset![4]]), Err(Error::UnknownEdge(4)));
    }

    #[test]
    fn dimensions() {
        let tree = g(&[(0, 1, 2), (1, 2, 3), (2, 2, 4)]);
        assert_eq!(cycle_space(&tree).dim(), 0);
        assert_eq!(cycle_space(&k4()).dim(), 3);
        assert_eq!(cycle_space(&g(&[(0, 1, 2), (1, 1, 2), (2, 1, 2)])).dim(), 2);
        assert_eq!(cut_space(&g(&[(0, 1, 2)])).dim(), 1);
        assert_eq!(cut_space(&g(&[(0, 1, 1), (1, 1, 1)])).dim(), 0);
        assert_eq!(cut_space(&k4()).dim(), 3);
    }

    #[test]
    fn even_cycle_examples() {
        let tri = g(&[(1, 1, 2), (2, 2, 3), (3, 3, 1)]);
        let sg = SignedGraph::new(tri.clone(), EdgeSet::new()).unwrap();
        assert!(even_cycle_space(&sg).equals(&cycle_space(&tri)).unwrap());
        let sg = SignedGraph::new(tri, eset![1]).unwrap();
        assert_eq!(even_cycle_space(&sg).dim(), 0);
        // K4 with one odd triangle: oracle over all 8 cycles.
        let sg = SignedGraph::new(k4(), eset![0, 1, 3]).unwrap();
        let even: Vec<EdgeSet> = all_cycles(&k4()).into_iter().filter(|c| !c.dot(&sg.signature)).collect();
        let oracle = space_of(&k4().edge_set(), &even);
        assert_eq!(oracle.dim(), 2);
        assert!(even_cycle_space(&sg).equals(&oracle).unwrap());
    }

    #[test]
    fn even_cut_examples() {
        let k2 = g(&[(0, 1, 2)]);
        let gr = Graft::new(k2.clone(), VertexSet::new()).unwrap();
        assert!(even_cut_space(&gr).unwrap().equals(&cut_space(&k2)).unwrap());
        let gr = Graft::new(k2, [1, 2].into()).unwrap();
        assert_eq!(even_cut_space(&gr).unwrap().dim(), 0);
        let c4 = g(&[(0, 0, 1), (1, 1, 2), (2, 2, 3), (3, 3, 0)]);
        let t: VertexSet = [0, 2].into();
        let even: Vec<EdgeSet> = all_cuts(&c4, &t).into_iter().filter(|c| c.1).map(|c| c.0).collect();
        let oracle = space_of(&c4.edge_set(), &even);
        assert_eq!(oracle.dim(), 2);
        let gr = Graft::new(c4, t).unwrap();
        assert!(even_cut_space(&gr).unwrap().equals(&oracle).unwrap());
        assert!(matches!(Graft::new(g(&[(0, 1, 2)]), [1].into()), Err(Error::OddTerminals(1))));
    }

    #[test]
    fn complement_examples() {
        let u = eset![1, 2, 3];
        let full = GF2Space::full(u.clone());
        assert_eq!(full.orthogonal_complement().dim(), 0);
        assert!(cycle_space(&k4()).orthogonal_complement().equals(&cut_space(&k4())).unwrap());
        let sig = eset![0, 1, 3];
        let sg = SignedGraph::new(k4(), sig.clone()).unwrap();
        let mut expect = cut_space(&k4());
        expect.insert(&sig).unwrap();
        assert!(even_cycle_space(&sg).orthogonal_complement().equals(&expect).unwrap());
    }

    #[test]
    fn matroid_rank_of_cycle_space() {
        // Graphic rank of K4 subsets.
        let c = cycle_space(&k4());
        assert_eq!(c.matroid_rank(&k4().edge_set()), 3);
        assert_eq!(c.matroid_rank(&eset![0, 1, 3]), 2);
        assert_eq!(c.matroid_rank(&eset![0, 5]), 2);
    }

    fn random_graph(rng: &mut impl rand::Rng, n: u32, m: u32) -> Graph {
        let mut g = Graph::new();
        for e in 0..m {
            g.add_edge(e, rng.gen_range(0..n), rng.gen_range(0..n)).unwrap();
        }
        g
    }

    #[test]
    fn duality_and_co_cycle_remarks_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.gen_range(1..6);
            let m = rng.gen_range(0..9);
            let gr = random_graph(&mut rng, n, m);
            let e = gr.edge_set();
            let cyc = cycle_space(&gr);
            let cuts = cut_space(&gr);
            assert!(cyc.orthogonal_complement().equals(&cuts).unwrap());
            let comps = gr.vertex_components().len();
            assert_eq!(cyc.dim(), gr.num_edges() + comps - gr.num_vertices());
            // co-cycle remark for even cycles
            let sig: EdgeSet = e.iter().filter(|_| rng.gen_bool(0.5)).collect();
            let sg = SignedGraph::new(gr.clone(), sig.clone()).unwrap();
            let ec = even_cycle_space(&sg);
            let oracle: Vec<EdgeSet> = all_cycles(&gr).into_iter().filter(|c| !c.dot(&sig)).collect();
            assert!(ec.equals(&space_of(&e, &oracle)).unwrap());
            let mut expect = cuts.clone();
            expect.insert(&sig).unwrap();
            assert!(ec.orthogonal_complement().equals(&expect).unwrap());
            // co-cycle remark for even cuts, with a T-join built by brute force
            let vs: Vec<Vertex> = gr.vertices().iter().copied().collect();
            let t: VertexSet = vs.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
            let ids = gr.edge_ids();
            let join = (0u64..1 << ids.len())
                .map(|b| ids.iter().enumerate().filter(|(i, _)| b >> i & 1 == 1).map(|(_, &x)| x).collect::<EdgeSet>())
                .find(|j| gr.odd_vertices(j) == t);
            if t.len() % 2 == 1 {
                continue;
            }
            let graft = Graft::new(gr.clone(), t.clone()).unwrap();
            let ecut = even_cut_space(&graft).unwrap();
            let oracle: Vec<EdgeSet> = all_cuts(&gr, &t).into_iter().filter(|c| c.1).map(|c| c.0).collect();
            assert!(ecut.equals(&space_of(&e, &oracle)).unwrap());
            if let Some(j) = join {
                let mut expect = cyc.clone();
                expect.insert(&j).unwrap();
                assert!(ecut.orthogonal_complement().equals(&expect).unwrap());
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn span_idempotent(rows in proptest::collection::vec(proptest::collection::vec(0u32..12, 0..6), 0..8)) {
            let u: EdgeSet = (0..12).collect();
            let gens: Vec<EdgeSet> = rows.iter().map(|r| r.iter().collect()).collect();
            let s = GF2Space::span(&u, &gens).unwrap();
            let again = GF2Space::span(&u, s.basis()).unwrap();
            proptest::prop_assert_eq!(&s, &again);
            for gv in &gens {
                proptest::prop_assert!(s.contains(gv));
            }
            proptest::prop_assert_eq!(s.dim() + s.orthogonal_complement().dim(), 12);
            let leads: Vec<u32> = s.basis().iter().map(|r| r.first().unwrap()).collect();
            for (i, r) in s.basis().iter().enumerate() {
                for (j, &l) in leads.iter().enumerate() {
                    proptest::prop_assert_eq!(r.contains(l), i == j);
                }
            }
        }
    }
}

//! Seeded random instances of every sibling construction, used by the
//! acceptance suite, the CLI and the classification tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::blocking_pair;
use crate::edgeset::EdgeSet;
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, SignedGraph, Vertex};
use crate::ops::{split_vertex, whitney_flip, WSequence};
use crate::templates::{
    build_named_twins, build_shih_outcome, build_split_siblings, build_triangle_triad_pair, quad_template_type,
    validate_nova, GadgetPieces, QuadTemplate, QuadType, ShihPart, ShufflePieces, SiblingPair, SplitTemplate,
    TiltPieces, TwinPieces, TwistPieces, WidgetPieces, NOVA_SUBSET_LIMIT,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PlantedKind {
    Simple,
    Nova,
    Shuffle,
    Tilt,
    Twist,
    Widget,
    Gadget,
    Shih2,
    Shih3,
    TriangleTriad,
}

impl PlantedKind {
    pub const ALL: [PlantedKind; 10] = [
        PlantedKind::Simple,
        PlantedKind::Nova,
        PlantedKind::Shuffle,
        PlantedKind::Tilt,
        PlantedKind::Twist,
        PlantedKind::Widget,
        PlantedKind::Gadget,
        PlantedKind::Shih2,
        PlantedKind::Shih3,
        PlantedKind::TriangleTriad,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PlantedKind::Simple => "simple",
            PlantedKind::Nova => "nova",
            PlantedKind::Shuffle => "shuffle",
            PlantedKind::Tilt => "tilt",
            PlantedKind::Twist => "twist",
            PlantedKind::Widget => "widget",
            PlantedKind::Gadget => "gadget",
            PlantedKind::Shih2 => "shih-2",
            PlantedKind::Shih3 => "shih-3",
            PlantedKind::TriangleTriad => "triangle-triad",
        }
    }

    pub fn from_name(s: &str) -> Option<PlantedKind> {
        PlantedKind::ALL.into_iter().find(|k| k.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Planted {
    pub kind: PlantedKind,
    pub seed: u64,
    pub pair: SiblingPair,
    pub split: Option<SplitTemplate>,
    pub quad: Option<QuadTemplate>,
    pub pieces: Option<TwinPieces>,
    /// Outcome number and parts of a Shih instance.
    pub shih: Option<(u8, Vec<ShihPart>)>,
}

/// Draws attempted per seed before giving up.
pub const MAX_ATTEMPTS: usize = 500;

/// Hands out fresh vertex and edge ids while a graph is assembled.
struct Builder {
    g: Graph,
    next_v: Vertex,
    next_e: Edge,
}

impl Builder {
    fn new() -> Self {
        Builder { g: Graph::new(), next_v: 0, next_e: 0 }
    }

    fn vertex(&mut self) -> Vertex {
        let v = self.next_v;
        self.next_v += 1;
        self.g.add_vertex(v);
        v
    }

    fn vertices(&mut self, n: usize) -> Vec<Vertex> {
        (0..n).map(|_| self.vertex()).collect()
    }

    fn edge(&mut self, u: Vertex, v: Vertex) -> Edge {
        let e = self.next_e;
        self.next_e += 1;
        self.g.add_edge(e, u, v).unwrap();
        e
    }

    /// A connected piece on `anchors` plus `extras` new vertices: a random
    /// spanning tree and `chords` more edges.
    fn piece(&mut self, rng: &mut impl Rng, anchors: &[Vertex], extras: usize, chords: usize) -> EdgeSet {
        let mut vs = anchors.to_vec();
        vs.extend(self.vertices(extras));
        vs.shuffle(rng);
        let mut x = EdgeSet::new();
        for i in 1..vs.len() {
            let j = rng.gen_range(0..i);
            x.insert(self.edge(vs[i], vs[j]));
        }
        for _ in 0..chords {
            let (i, j) = (rng.gen_range(0..vs.len()), rng.gen_range(0..vs.len()));
            if i != j {
                x.insert(self.edge(vs[i], vs[j]));
            }
        }
        x
    }

    /// A piece whose interior is a connected cluster, joined to each anchor.
    fn hub_piece(&mut self, rng: &mut impl Rng, anchors: &[Vertex]) -> EdgeSet {
        let n = rng.gen_range(1..=2);
        let inner = self.vertices(n);
        let mut x = EdgeSet::new();
        for i in 1..n {
            x.insert(self.edge(inner[i - 1], inner[i]));
        }
        for &a in anchors {
            let h = inner[rng.gen_range(0..n)];
            x.insert(self.edge(h, a));
            if rng.gen_bool(0.25) {
                x.insert(self.edge(h, a));
            }
        }
        x
    }
}

fn random_subset(rng: &mut impl Rng, x: &EdgeSet, p: f64) -> EdgeSet {
    x.iter().filter(|_| rng.gen_bool(p)).collect()
}

/// A cycle on `n` vertices with `chords` random chords; edges `0..`.
pub fn random_two_connected(rng: &mut impl Rng, n: u32, chords: u32) -> Graph {
    let mut b = Builder::new();
    let vs = b.vertices(n as usize);
    for i in 0..n as usize {
        b.edge(vs[i], vs[(i + 1) % n as usize]);
    }
    for _ in 0..chords {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v {
            b.edge(u, v);
        }
    }
    b.g
}

fn draw_simple(rng: &mut impl Rng) -> Result<Planted> {
    let n = rng.gen_range(4..=6);
    let chords = rng.gen_range(1..=3);
    let h = random_two_connected(rng, n, chords);
    let v1 = rng.gen_range(0..n);
    let v2 = rng.gen_range(0..n);
    let alpha1 = random_subset(rng, &h.star(v1), 0.5);
    let alpha2 = random_subset(rng, &h.star(v2), 0.5);
    let t = SplitTemplate { h1: h.clone(), v1, alpha1, h2: h, v2, alpha2, s: Some(WSequence::default()) };
    let pair = build_split_siblings(&t)?;
    Ok(planted(PlantedKind::Simple, pair).with_split(t))
}

fn draw_nova(rng: &mut impl Rng) -> Result<Planted> {
    let k = rng.gen_range(1..=2);
    let mut b = Builder::new();
    let v = b.vertex();
    let mut ring = vec![v];
    let mut steps = Vec::new();
    let (mut alpha1, mut alpha2) = (EdgeSet::new(), EdgeSet::new());
    for _ in 0..k {
        let [u, a, c] = [b.vertex(), b.vertex(), b.vertex()];
        let (va, vc, ac, au, cu) = (b.edge(v, a), b.edge(v, c), b.edge(a, c), b.edge(a, u), b.edge(c, u));
        alpha1.insert(va);
        alpha2.insert(au);
        steps.push([va, vc, ac, au, cu].into_iter().collect::<EdgeSet>());
        ring.push(u);
    }
    let extra = rng.gen_range(0..=2);
    ring.extend(b.vertices(extra));
    ring[1..].shuffle(rng);
    let mut rest = EdgeSet::new();
    for i in 0..ring.len() {
        rest.insert(b.edge(ring[i], ring[(i + 1) % ring.len()]));
    }
    for _ in 0..rng.gen_range(0..=2) {
        let (i, j) = (rng.gen_range(0..ring.len()), rng.gen_range(0..ring.len()));
        if i != j {
            rest.insert(b.edge(ring[i], ring[j]));
        }
    }
    let at_v = b.g.star(v).intersection(&rest);
    alpha1.union_with(&random_subset(rng, &at_v, 0.4));
    alpha2.union_with(&random_subset(rng, &at_v, 0.4));
    let h1 = b.g;
    let mut h2 = h1.clone();
    for x in &steps {
        h2 = whitney_flip(&h2, x)?;
    }
    let t = SplitTemplate { h1, v1: v, alpha1, h2, v2: v, alpha2, s: Some(WSequence::new(steps)) };
    let pair = build_split_siblings(&t)?;
    Ok(planted(PlantedKind::Nova, pair).with_split(t))
}

fn pick_side(rng: &mut impl Rng, x: Vertex, y: Vertex) -> Vec<Vertex> {
    match rng.gen_range(0..3) {
        0 => vec![x],
        1 => vec![y],
        _ => vec![x, y],
    }
}

fn draw_shuffle(rng: &mut impl Rng) -> Result<Planted> {
    let mut b = Builder::new();
    let abcd = [b.vertex(), b.vertex(), b.vertex(), b.vertex()];
    let degenerate = rng.gen_bool(0.15);
    let mut parts: [EdgeSet; 4] = Default::default();
    for (i, part) in parts.iter_mut().enumerate() {
        if degenerate && i >= 2 {
            continue;
        }
        let mut anchors = pick_side(rng, abcd[0], abcd[1]);
        anchors.extend(pick_side(rng, abcd[2], abcd[3]));
        *part = b.hub_piece(rng, &anchors);
    }
    let pieces = TwinPieces::Shuffle(ShufflePieces { graph: b.g, abcd, parts });
    named(PlantedKind::Shuffle, pieces)
}

fn optional_edges(rng: &mut impl Rng, b: &mut Builder, ends: [(Vertex, Vertex); 4]) -> [Option<Edge>; 4] {
    ends.map(|(u, v)| rng.gen_bool(0.6).then(|| b.edge(u, v)))
}

fn draw_tilt(rng: &mut impl Rng) -> Result<Planted> {
    let mut b = Builder::new();
    let [a1, a2, b1, b2, c, d] = [0; 6].map(|_| b.vertex());
    let (e1, c1) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
    let x1 = b.piece(rng, &[a1, b1, c, d], e1, c1);
    let (e2, c2) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
    let x2 = b.piece(rng, &[a2, b2, c, d], e2, c2);
    let efgh = optional_edges(rng, &mut b, [(a1, a2), (a1, a2), (b1, b2), (b1, b2)]);
    let pieces = TwinPieces::Tilt(TiltPieces { graph: b.g, a: [a1, a2], b: [b1, b2], c, d, efgh, x1, x2 });
    named(PlantedKind::Tilt, pieces)
}

fn draw_twist(rng: &mut impl Rng) -> Result<Planted> {
    let mut b = Builder::new();
    let [a1, a2, bb, c, d] = [0; 5].map(|_| b.vertex());
    let (e1, c1) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
    let x1 = b.piece(rng, &[a1, bb, c, d], e1, c1);
    let (e2, c2) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
    let x2 = b.piece(rng, &[a2, bb, c, d], e2, c2);
    let efgh = optional_edges(rng, &mut b, [(a1, a2), (a1, a2), (bb, c), (bb, c)]);
    let pieces = TwinPieces::Twist(TwistPieces { graph: b.g, a: [a1, a2], b: bb, c, d, efgh, x1, x2 });
    named(PlantedKind::Twist, pieces)
}

fn add_loops(rng: &mut impl Rng, b: &mut Builder, at: &[Vertex]) -> [Edge; 4] {
    [0; 4].map(|_| {
        let v = at[rng.gen_range(0..at.len())];
        b.edge(v, v)
    })
}

fn draw_widget(rng: &mut impl Rng) -> Result<Planted> {
    let mut b = Builder::new();
    let [v1, z1, w1, w2] = [0; 4].map(|_| b.vertex());
    let (extras, chords) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
    let x = b.piece(rng, &[v1, z1, w1], extras, chords);
    let abcdef = [(v1, w2), (v1, w2), (z1, w2), (z1, w2), (v1, w1), (v1, w1)].map(|(u, v)| b.edge(u, v));
    let loops = add_loops(rng, &mut b, &[v1, z1, w1, w2]);
    let gamma = random_subset(rng, &b.g.star(v1).intersection(&x), 0.5);
    let pieces = TwinPieces::Widget(WidgetPieces { h1: b.g, v1, z1, w1, w2, abcdef, loops, gamma });
    named(PlantedKind::Widget, pieces)
}

fn draw_gadget(rng: &mut impl Rng) -> Result<Planted> {
    let mut b = Builder::new();
    let [v1, z1, u1, w1, w2] = [0; 5].map(|_| b.vertex());
    let (extras, chords) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
    let x = b.piece(rng, &[v1, z1, u1], extras, chords);
    let far = [z1, u1];
    let w = [w1, w2];
    let mut abcd = [[0; 2]; 4];
    for i in 0..2 {
        abcd[0][i] = b.edge(v1, w[i]);
        abcd[1][i] = b.edge(v1, w[i]);
        abcd[2][i] = b.edge(far[i], w[i]);
        abcd[3][i] = b.edge(far[i], w[i]);
    }
    let loops = add_loops(rng, &mut b, &[v1, z1, u1, w1, w2]);
    let gamma = random_subset(rng, &b.g.star(v1).intersection(&x), 0.5);
    let [a, bb, c, d] = abcd;
    let pieces = TwinPieces::Gadget(GadgetPieces { h1: b.g, v1, z1, u1, w, a, b: bb, c, d, loops, gamma });
    named(PlantedKind::Gadget, pieces)
}

/// Parts with disjoint ids; each is empty, a single edge or a small
/// connected piece on its three named vertices.
pub fn random_shih_parts(rng: &mut impl Rng, k: usize) -> Vec<ShihPart> {
    let mut b = Builder::new();
    let mut specs = Vec::new();
    for _ in 0..k {
        let [x, y, z] = [0; 3].map(|_| b.vertex());
        let before = b.g.edge_set();
        match rng.gen_range(0..4) {
            0 => {}
            1 => {
                let vs = [x, y, z];
                let i = rng.gen_range(0..3);
                b.edge(vs[i], vs[(i + 1) % 3]);
            }
            _ => {
                let (extras, chords) = (rng.gen_range(0..=1), rng.gen_range(0..=2));
                b.piece(rng, &[x, y, z], extras, chords);
            }
        }
        let own = b.g.edge_set().difference(&before);
        specs.push((own, x, y, z));
    }
    specs
        .into_iter()
        .map(|(own, x, y, z)| {
            let mut graph = b.g.subgraph(&own);
            for v in [x, y, z] {
                graph.add_vertex(v);
            }
            ShihPart { graph, x, y, z }
        })
        .collect()
}

fn draw_shih(rng: &mut impl Rng, which: u8) -> Result<Planted> {
    let k = if which == 2 { 4 } else { rng.gen_range(3..=5) };
    let parts = random_shih_parts(rng, k);
    let out = build_shih_outcome(which, &parts)?;
    let pair = out.pair();
    pair.check()?;
    let kind = if which == 2 { PlantedKind::Shih2 } else { PlantedKind::Shih3 };
    Ok(Planted { shih: Some((which, parts)), ..planted(kind, pair) })
}

fn draw_triangle_triad(rng: &mut impl Rng) -> Result<Planted> {
    let n = rng.gen_range(3..=5);
    let chords = rng.gen_range(0..=2);
    // Vertex 0 blocks; the triangle 0-1-2 gets a chord 0-2 added below.
    let mut h = random_two_connected(rng, n, chords);
    let close = h.fresh_edge();
    let tri = if n == 3 {
        [0, 1, 2]
    } else {
        h.add_edge(close, 0, 2)?;
        [0, 1, close]
    };
    let star = h.star(0);
    let mut sigma = random_subset(rng, &star, 0.5);
    sigma.insert(tri[0]);
    sigma.remove(tri[2]);
    let sg = SignedGraph { graph: h.clone(), signature: sigma.clone() };
    let g = split_vertex(&h, 0, &sigma)?.graph;
    let out = build_triangle_triad_pair(&g, &sg, tri)?;
    Ok(planted(PlantedKind::TriangleTriad, out.pair()))
}

fn planted(kind: PlantedKind, pair: SiblingPair) -> Planted {
    Planted { kind, seed: 0, pair, split: None, quad: None, pieces: None, shih: None }
}

impl Planted {
    fn with_split(mut self, t: SplitTemplate) -> Self {
        self.split = Some(t);
        self
    }
}

fn named(kind: PlantedKind, pieces: TwinPieces) -> Result<Planted> {
    let twins = build_named_twins(&pieces)?;
    Ok(Planted {
        kind,
        seed: 0,
        pair: twins.pair,
        split: None,
        quad: Some(twins.template),
        pieces: Some(pieces),
        shih: None,
    })
}

fn draw(kind: PlantedKind, rng: &mut impl Rng) -> Result<Planted> {
    match kind {
        PlantedKind::Simple => draw_simple(rng),
        PlantedKind::Nova => draw_nova(rng),
        PlantedKind::Shuffle => draw_shuffle(rng),
        PlantedKind::Tilt => draw_tilt(rng),
        PlantedKind::Twist => draw_twist(rng),
        PlantedKind::Widget => draw_widget(rng),
        PlantedKind::Gadget => draw_gadget(rng),
        PlantedKind::Shih2 => draw_shih(rng, 2),
        PlantedKind::Shih3 => draw_shih(rng, 3),
        PlantedKind::TriangleTriad => draw_triangle_triad(rng),
    }
}

/// Space equalities plus the structural predicate of the kind.
pub fn check_planted(p: &Planted) -> Result<()> {
    p.pair.check_spaces()?;
    let fail = |what: &str| Err(Error::CheckFailed(format!("{}: {what}", p.kind.name())));
    match p.kind {
        PlantedKind::Simple => {
            let (a, b) = p.pair.signed();
            if blocking_pair(&a).is_none() || blocking_pair(&b).is_none() {
                return fail("no blocking pair");
            }
        }
        PlantedKind::Nova => {
            let t = p.split.as_ref().ok_or_else(|| Error::Precondition("nova without template".into()))?;
            if !validate_nova(t, NOVA_SUBSET_LIMIT)?.is_nova() {
                return fail("template is not nova");
            }
        }
        PlantedKind::Shuffle | PlantedKind::Tilt | PlantedKind::Twist | PlantedKind::Widget | PlantedKind::Gadget => {
            let t = p.quad.as_ref().ok_or_else(|| Error::Precondition("twins without template".into()))?;
            let want = match p.kind {
                PlantedKind::Widget | PlantedKind::Gadget => QuadType::II,
                _ => QuadType::I,
            };
            if quad_template_type(t)? != want {
                return fail("wrong template type");
            }
        }
        PlantedKind::Shih2 | PlantedKind::Shih3 => {
            if !p.pair.inequivalent()? {
                return fail("outcome graphs are equivalent");
            }
        }
        PlantedKind::TriangleTriad => {}
    }
    Ok(())
}

/// The first valid draw from `seed`; invalid draws are skipped.
pub fn plant(kind: PlantedKind, seed: u64) -> Result<Planted> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((kind as u64) << 32));
    for _ in 0..MAX_ATTEMPTS {
        if let Ok(mut p) = draw(kind, &mut rng) {
            if check_planted(&p).is_ok() {
                p.seed = seed;
                return Ok(p);
            }
        }
    }
    Err(Error::CheckFailed(format!("no valid {} instance from seed {seed}", kind.name())))
}

/// `count` instances of every kind, seeds `base..base+count`.
pub fn planted_suite(count: usize, base: u64) -> Result<Vec<Planted>> {
    let mut out = Vec::new();
    for kind in PlantedKind::ALL {
        for i in 0..count as u64 {
            out.push(plant(kind, base + i)?);
        }
    }
    Ok(out)
}

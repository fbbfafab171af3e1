//! Brute-force oracles over explicit subset enumeration. Nothing here goes
//! through the GF(2) code in the library.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use evencycle::{Edge, EdgeSet, Graph, Vertex, VertexSet};
use rand::Rng;

/// A graph with edges and vertices renumbered `0..m`, `0..n`. Edge `i` is
/// the `i`-th smallest id, so two graphs on the same edges share masks.
pub struct Local {
    pub ids: Vec<Edge>,
    pub verts: Vec<Vertex>,
    pub ends: Vec<(usize, usize)>,
    /// Vertex-parity mask of each edge; zero for loops.
    xor: Vec<u64>,
}

impl Local {
    pub fn new(g: &Graph) -> Local {
        let ids = g.edge_ids();
        let verts: Vec<Vertex> = g.vertices().iter().copied().collect();
        assert!(ids.len() <= 128 && verts.len() <= 64, "graph too large for the oracle");
        let pos: HashMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let ends: Vec<(usize, usize)> = ids
            .iter()
            .map(|&e| {
                let (a, b) = g.ends(e).unwrap();
                (pos[&a], pos[&b])
            })
            .collect();
        let xor = ends.iter().map(|&(a, b)| if a == b { 0 } else { 1 << a | 1 << b }).collect();
        Local { ids, verts, ends, xor }
    }

    pub fn m(&self) -> usize {
        self.ids.len()
    }

    pub fn n(&self) -> usize {
        self.verts.len()
    }

    pub fn full(&self) -> u128 {
        if self.m() == 128 {
            u128::MAX
        } else {
            (1u128 << self.m()) - 1
        }
    }

    pub fn mask(&self, x: &EdgeSet) -> u128 {
        x.iter().fold(0, |m, e| m | 1 << self.ids.binary_search(&e).expect("edge of the graph"))
    }

    pub fn set(&self, m: u128) -> EdgeSet {
        (0..self.m()).filter(|i| m >> i & 1 == 1).map(|i| self.ids[i]).collect()
    }

    pub fn vmask(&self, vs: &VertexSet) -> u64 {
        vs.iter().fold(0, |m, v| m | 1 << self.verts.iter().position(|w| w == v).expect("vertex of the graph"))
    }

    pub fn loops(&self) -> u128 {
        (0..self.m()).filter(|&i| self.ends[i].0 == self.ends[i].1).fold(0, |m, i| m | 1 << i)
    }

    /// Vertices of odd degree in `G[X]`.
    pub fn odd(&self, x: u128) -> u64 {
        (0..self.m()).filter(|i| x >> i & 1 == 1).fold(0, |m, i| m ^ self.xor[i])
    }

    pub fn star(&self, v: usize) -> u128 {
        (0..self.m()).filter(|&i| self.xor[i] >> v & 1 == 1).fold(0, |m, i| m | 1 << i)
    }

    /// `δ(U)` for a vertex mask `U`.
    pub fn cut(&self, u: u64) -> u128 {
        (0..self.m()).filter(|&i| (u >> self.ends[i].0 & 1) != (u >> self.ends[i].1 & 1)).fold(0, |m, i| m | 1 << i)
    }

    /// Every cycle, by testing all `2^m` edge subsets.
    pub fn cycles(&self) -> Vec<u128> {
        let m = self.m();
        assert!(m <= 22, "too many edges to enumerate subsets");
        let mut par = vec![0u64; 1 << m];
        let mut out = vec![0u128];
        for s in 1usize..1 << m {
            let low = s.trailing_zeros() as usize;
            par[s] = par[s & (s - 1)] ^ self.xor[low];
            if par[s] == 0 {
                out.push(s as u128);
            }
        }
        out
    }

    pub fn even_cycles(&self, sigma: u128) -> Vec<u128> {
        self.cycles().into_iter().filter(|c| (c & sigma).count_ones().is_multiple_of(2)).collect()
    }

    /// `(U, δ(U))` for every vertex subset, in Gray-code order.
    pub fn cuts_by_subset(&self) -> Vec<(u64, u128)> {
        let n = self.n();
        assert!(n <= 24, "too many vertices to enumerate subsets");
        let stars: Vec<u128> = (0..n).map(|v| self.star(v)).collect();
        let (mut u, mut c) = (0u64, 0u128);
        let mut out = vec![(0, 0)];
        for i in 1u64..1 << n {
            let v = i.trailing_zeros() as usize;
            u ^= 1 << v;
            c ^= stars[v];
            out.push((u, c));
        }
        out
    }

    /// All cuts, sorted and deduplicated.
    pub fn cuts(&self) -> Vec<u128> {
        sorted(self.cuts_by_subset().into_iter().map(|(_, c)| c))
    }

    /// Cuts `δ(U)` with `|U ∩ T|` even.
    pub fn even_cuts(&self, t: u64) -> Vec<u128> {
        sorted(
            self.cuts_by_subset().into_iter().filter(|(u, _)| (u & t).count_ones().is_multiple_of(2)).map(|(_, c)| c),
        )
    }

    /// Cuts and their translates by `Σ`; the orthogonal complement of the
    /// even cycles, as an explicit set.
    pub fn signature_class(&self, sigma: u128) -> Vec<u128> {
        sorted(self.cuts_by_subset().into_iter().flat_map(|(_, c)| [c, c ^ sigma]))
    }

    /// Vertices met by `X`.
    pub fn touched(&self, x: u128) -> u64 {
        (0..self.m()).filter(|i| x >> i & 1 == 1).fold(0, |m, i| m | 1 << self.ends[i].0 | 1 << self.ends[i].1)
    }

    /// Vertices met by both `X` and `Y`.
    pub fn boundary(&self, x: u128, y: u128) -> u64 {
        self.touched(x) & self.touched(y)
    }

    /// Whether `G[X]` is nonempty and connected.
    pub fn connected(&self, x: u128) -> bool {
        if x == 0 {
            return false;
        }
        let first = x.trailing_zeros() as usize;
        let mut reached = 1u64 << self.ends[first].0;
        loop {
            let before = reached;
            for i in (0..self.m()).filter(|i| x >> i & 1 == 1) {
                let (a, b) = self.ends[i];
                if reached >> a & 1 == 1 || reached >> b & 1 == 1 {
                    reached |= 1 << a | 1 << b;
                }
            }
            if reached == before {
                return reached == self.touched(x);
            }
        }
    }

    /// `X` is a `k`-separation of the graph restricted to `universe`.
    pub fn is_separation(&self, x: u128, universe: u128, k: usize) -> bool {
        let y = universe & !x;
        (x.count_ones() as usize).min(y.count_ones() as usize) >= k
            && self.boundary(x, y).count_ones() as usize == k
            && self.connected(x)
            && self.connected(y)
    }
}

pub fn sorted(it: impl IntoIterator<Item = u128>) -> Vec<u128> {
    let mut v: Vec<u128> = it.into_iter().collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Subsets of `x`, including the empty set.
pub fn submasks(x: u128) -> impl Iterator<Item = u128> {
    let mut next = Some(x);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & x) };
        Some(cur)
    })
}

/// Rank function of the binary matroid whose cycles are `cycles`:
/// `r(X) = |X| - log2 #{C ∈ cycles : C ⊆ X}`.
pub struct Rank<'a> {
    pub cycles: &'a [u128],
}

impl Rank<'_> {
    pub fn rank(&self, x: u128) -> usize {
        let inside = self.cycles.iter().filter(|&&c| c & !x == 0).count();
        x.count_ones() as usize - inside.trailing_zeros() as usize
    }

    pub fn lambda(&self, x: u128, full: u128) -> usize {
        self.rank(x) + self.rank(full & !x) + 1 - self.rank(full)
    }
}

/// Whether some cycle inside `X` meets `Σ` oddly.
pub fn has_odd_cycle_in(cycles: &[u128], x: u128, sigma: u128) -> bool {
    cycles.iter().any(|&c| c & !x == 0 && (c & sigma).count_ones() % 2 == 1)
}

/// A connected graph on at most `n` vertices and exactly `m` edges (ids
/// `0..m`), loops with probability `p_loop`.
pub fn random_connected(rng: &mut impl Rng, n: u32, m: u32, p_loop: f64) -> Graph {
    loop {
        let mut g = Graph::new();
        for e in 0..m {
            let a = rng.gen_range(0..n);
            let b = if rng.gen_bool(p_loop) { a } else { rng.gen_range(0..n) };
            g.add_edge(e, a, b).unwrap();
        }
        if g.is_connected() {
            return g;
        }
    }
}

/// Random subset of `x`, each member kept with probability one half.
pub fn random_subset(rng: &mut impl Rng, x: &EdgeSet) -> EdgeSet {
    x.iter().filter(|_| rng.gen_bool(0.5)).collect()
}

pub fn vertex_list(g: &Graph) -> Vec<Vertex> {
    g.vertices().iter().copied().collect()
}

pub fn set_of(vs: impl IntoIterator<Item = Vertex>) -> BTreeSet<Vertex> {
    vs.into_iter().collect()
}

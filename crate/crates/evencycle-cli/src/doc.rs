//! Line-oriented document format.
//!
//! A stream holds one or more documents. Each starts with a header line
//! naming its kind (`graph`, `signed-graph`, `graft`, `template <kind>`,
//! `sibling-record`, `report <title>`); the lines up to the next header are
//! its body. Lines starting with `#` are comments. Body lines:
//!
//! ```text
//! edge <id> <u> <v>        vertex <v>...        signature <edge>...
//! terminals <v>...         role <name> <v>...   edges <name> <edge|->...
//! wsequence                flip <edge>...       which <2|3>
//! tags <tag>...            part <name>          side <1|2>
//! status <word>            field <key> <text>   item <text>
//! ```
//!
//! `part` and `side` open a named section with its own graph and roles.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use evencycle::discovery::{SiblingRecord, Tag};
use evencycle::ops::WSequence;
use evencycle::templates::{
    GadgetPieces, QuadTemplate, ShihPart, ShufflePieces, SplitTemplate, TiltPieces, TwinPieces, TwistPieces,
    WidgetPieces,
};
use evencycle::{Edge, EdgeSet, Graft, Graph, SignedGraph, Vertex, VertexSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Template {
    Split(SplitTemplate),
    Quad(QuadTemplate),
    Twins(TwinPieces),
    Shih { which: u8, parts: Vec<ShihPart> },
}

impl Template {
    pub fn kind(&self) -> &'static str {
        match self {
            Template::Split(_) => "split",
            Template::Quad(_) => "quad",
            Template::Twins(p) => p.kind().name(),
            Template::Shih { .. } => "shih",
        }
    }
}

/// Ordered key/value summary of a command, optionally split into items.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub title: String,
    pub status: String,
    pub fields: Vec<(String, String)>,
    pub items: Vec<Item>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Item {
    pub name: String,
    pub fields: Vec<(String, String)>,
}

impl Report {
    pub fn new(title: &str, status: &str) -> Report {
        Report { title: title.into(), status: status.into(), ..Report::default() }
    }

    pub fn field(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.fields.push((key.into(), value.to_string()));
        self
    }

    pub fn item(&mut self, name: impl fmt::Display) -> &mut Item {
        self.items.push(Item { name: name.to_string(), fields: Vec::new() });
        self.items.last_mut().unwrap()
    }
}

impl Item {
    pub fn field(&mut self, key: &str, value: impl fmt::Display) -> &mut Self {
        self.fields.push((key.into(), value.to_string()));
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Graph(Graph),
    Signed(SignedGraph),
    Graft(Graft),
    Template(Template),
    Record(SiblingRecord),
    Report(Report),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Graph(_) => "graph",
            Document::Signed(_) => "signed-graph",
            Document::Graft(_) => "graft",
            Document::Template(_) => "template",
            Document::Record(_) => "sibling-record",
            Document::Report(_) => "report",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = Result<T, ParseError>;

const KINDS: [&str; 6] = ["graph", "signed-graph", "graft", "template", "sibling-record", "report"];

#[derive(Clone, Copy, Debug)]
struct Tok<'a> {
    text: &'a str,
    line: usize,
    col: usize,
}

impl Tok<'_> {
    fn err(&self, message: impl Into<String>) -> ParseError {
        ParseError { line: self.line, col: self.col, message: message.into() }
    }

    fn num<T: std::str::FromStr>(&self, what: &str) -> PResult<T> {
        self.text.parse().map_err(|_| self.err(format!("expected {what}, found `{}`", self.text)))
    }
}

#[derive(Clone, Debug)]
struct Line<'a> {
    toks: Vec<Tok<'a>>,
    /// Text after the first two tokens, for `field` values.
    tail: &'a str,
}

impl<'a> Line<'a> {
    fn key(&self) -> &'a str {
        self.toks[0].text
    }

    fn head(&self) -> Tok<'a> {
        self.toks[0]
    }

    fn args(&self) -> &[Tok<'a>] {
        &self.toks[1..]
    }

    fn end(&self) -> ParseError {
        let last = self.toks.last().unwrap();
        ParseError { line: last.line, col: last.col + last.text.chars().count(), message: String::new() }
    }

    fn arity(&self, n: usize) -> PResult<()> {
        if self.args().len() == n {
            return Ok(());
        }
        let mut e = match self.args().get(n) {
            Some(t) => t.err(""),
            None => self.end(),
        };
        e.message = format!(
            "`{}` takes {n} argument{}, found {}",
            self.key(),
            if n == 1 { "" } else { "s" },
            self.args().len()
        );
        Err(e)
    }
}

fn lex(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim_start().starts_with('#') {
            continue;
        }
        let mut toks = Vec::new();
        let mut start = None;
        for (pos, c) in raw.char_indices().chain([(raw.len(), ' ')]) {
            match (c.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    toks.push(Tok { text: &raw[s..pos], line: i + 1, col: raw[..s].chars().count() + 1 });
                    start = None;
                }
                _ => {}
            }
        }
        if toks.is_empty() {
            continue;
        }
        let tail = match toks.get(1) {
            Some(t) => {
                let off = t.text.as_ptr() as usize - raw.as_ptr() as usize + t.text.len();
                raw[off..].trim()
            }
            None => "",
        };
        out.push(Line { toks, tail });
    }
    out
}

/// Lines of one document or section.
struct Block<'a> {
    opener: Tok<'a>,
    lines: Vec<Line<'a>>,
}

impl<'a> Block<'a> {
    fn check_keys(&self, allowed: &[&str], kind: &str) -> PResult<()> {
        for l in &self.lines {
            if !allowed.contains(&l.key()) {
                return Err(l.head().err(format!("unexpected `{}` in {kind}", l.key())));
            }
        }
        Ok(())
    }

    fn all(&self, key: &str) -> impl Iterator<Item = &Line<'a>> {
        let key = key.to_string();
        self.lines.iter().filter(move |l| l.key() == key)
    }

    fn one(&self, key: &str) -> PResult<Option<&Line<'a>>> {
        let mut it = self.all(key);
        let first = it.next();
        if let Some(dup) = it.next() {
            return Err(dup.head().err(format!("duplicate `{key}`")));
        }
        Ok(first)
    }

    fn need(&self, key: &str, what: &str) -> PResult<&Line<'a>> {
        self.one(key)?.ok_or_else(|| self.opener.err(format!("missing `{key}` line in {what}")))
    }

    fn graph(&self) -> PResult<Graph> {
        let mut g = Graph::new();
        for l in &self.lines {
            match l.key() {
                "edge" => {
                    l.arity(3)?;
                    let a = l.args();
                    let e: Edge = a[0].num("an edge id")?;
                    let (u, v) = (a[1].num("a vertex")?, a[2].num("a vertex")?);
                    g.add_edge(e, u, v).map_err(|_| a[0].err(format!("duplicate edge id {e}")))?;
                }
                "vertex" => {
                    for t in l.args() {
                        g.add_vertex(t.num("a vertex")?);
                    }
                }
                _ => {}
            }
        }
        Ok(g)
    }

    /// Edge set of a role line; every id must be an edge of `g`.
    fn edge_list(g: &Graph, toks: &[Tok<'_>]) -> PResult<Vec<Option<Edge>>> {
        toks.iter()
            .map(|t| {
                if t.text == "-" {
                    return Ok(None);
                }
                let e: Edge = t.num("an edge id")?;
                if !g.has_edge(e) {
                    return Err(t.err(format!("unknown edge {e}")));
                }
                Ok(Some(e))
            })
            .collect()
    }

    fn vertex_list(g: &Graph, toks: &[Tok<'_>]) -> PResult<Vec<Vertex>> {
        toks.iter()
            .map(|t| {
                let v: Vertex = t.num("a vertex")?;
                if !g.has_vertex(v) {
                    return Err(t.err(format!("unknown vertex {v}")));
                }
                Ok(v)
            })
            .collect()
    }

    fn edge_set_line(&self, g: &Graph, key: &str, what: &str) -> PResult<EdgeSet> {
        let l = self.need(key, what)?;
        let es = Self::edge_list(g, l.args())?;
        if let Some(i) = es.iter().position(|e| e.is_none()) {
            return Err(l.args()[i].err("`-` is only allowed in edge roles"));
        }
        Ok(es.into_iter().flatten().collect())
    }

    fn terminals(&self, g: &Graph, what: &str) -> PResult<VertexSet> {
        let l = self.need("terminals", what)?;
        let t: VertexSet = Self::vertex_list(g, l.args())?.into_iter().collect();
        if t.len() % 2 == 1 {
            return Err(l.head().err(format!("terminal set has odd size {}", t.len())));
        }
        Ok(t)
    }

    fn role_line(&self, key: &str, name: &str) -> PResult<Option<&Line<'a>>> {
        let mut found = None;
        for l in self.all(key) {
            if l.args().first().map(|t| t.text) == Some(name) {
                if found.is_some() {
                    return Err(l.head().err(format!("duplicate {key} `{name}`")));
                }
                found = Some(l);
            }
        }
        Ok(found)
    }

    fn vertices<const N: usize>(&self, g: &Graph, name: &str) -> PResult<[Vertex; N]> {
        let l = self.role_line("role", name)?.ok_or_else(|| self.opener.err(format!("missing `role {name}`")))?;
        let vs = Self::vertex_list(g, &l.args()[1..])?;
        vs.try_into().map_err(|v: Vec<Vertex>| {
            l.head().err(format!("role `{name}` needs {N} vertex{}, found {}", if N == 1 { "" } else { "es" }, v.len()))
        })
    }

    fn vertex(&self, g: &Graph, name: &str) -> PResult<Vertex> {
        Ok(self.vertices::<1>(g, name)?[0])
    }

    fn edge_role(&self, g: &Graph, name: &str) -> PResult<(Vec<Option<Edge>>, Tok<'a>)> {
        let l = self.role_line("edges", name)?.ok_or_else(|| self.opener.err(format!("missing `edges {name}`")))?;
        Ok((Self::edge_list(g, &l.args()[1..])?, l.head()))
    }

    fn edge_set_role(&self, g: &Graph, name: &str) -> PResult<EdgeSet> {
        let (es, at) = self.edge_role(g, name)?;
        if es.iter().any(|e| e.is_none()) {
            return Err(at.err(format!("`-` is not allowed in `edges {name}`")));
        }
        Ok(es.into_iter().flatten().collect())
    }

    fn edge_array<const N: usize>(&self, g: &Graph, name: &str) -> PResult<[Option<Edge>; N]> {
        let (es, at) = self.edge_role(g, name)?;
        es.try_into()
            .map_err(|v: Vec<Option<Edge>>| at.err(format!("`edges {name}` needs {N} entries, found {}", v.len())))
    }

    fn edges_exact<const N: usize>(&self, g: &Graph, name: &str) -> PResult<[Edge; N]> {
        let arr = self.edge_array::<N>(g, name)?;
        if arr.iter().any(|e| e.is_none()) {
            let at = self.role_line("edges", name)?.unwrap().head();
            return Err(at.err(format!("`edges {name}` cannot have absent entries")));
        }
        Ok(arr.map(|e| e.unwrap()))
    }

    fn wsequence(&self, g: &Graph) -> PResult<Option<WSequence>> {
        if self.one("wsequence")?.is_none() {
            if let Some(f) = self.all("flip").next() {
                return Err(f.head().err("`flip` lines need a preceding `wsequence`"));
            }
            return Ok(None);
        }
        let mut steps = Vec::new();
        for l in self.all("flip") {
            let es = Self::edge_list(g, l.args())?;
            if es.iter().any(|e| e.is_none()) {
                return Err(l.head().err("`-` is not allowed in a flip"));
            }
            steps.push(es.into_iter().flatten().collect());
        }
        Ok(Some(WSequence::new(steps)))
    }
}

/// A document body split at `part`/`side` lines.
struct Sections<'a> {
    top: Block<'a>,
    parts: Vec<(Tok<'a>, Block<'a>)>,
}

fn sections<'a>(header: Tok<'a>, lines: Vec<Line<'a>>, opener: &str) -> PResult<Sections<'a>> {
    let mut top = Block { opener: header, lines: Vec::new() };
    let mut parts: Vec<(Tok<'a>, Block<'a>)> = Vec::new();
    for l in lines {
        if l.key() == opener {
            l.arity(1)?;
            let name = l.args()[0];
            if parts.iter().any(|(n, _)| n.text == name.text) {
                return Err(name.err(format!("duplicate {opener} `{}`", name.text)));
            }
            parts.push((name, Block { opener: l.head(), lines: Vec::new() }));
        } else if let Some((_, b)) = parts.last_mut() {
            b.lines.push(l);
        } else {
            top.lines.push(l);
        }
    }
    Ok(Sections { top, parts })
}

impl<'a> Sections<'a> {
    fn part(&self, name: &str, opener: &str) -> PResult<&Block<'a>> {
        self.parts
            .iter()
            .find(|(n, _)| n.text == name)
            .map(|(_, b)| b)
            .ok_or_else(|| self.top.opener.err(format!("missing `{opener} {name}`")))
    }

    fn only(&self, names: &[&str], opener: &str) -> PResult<()> {
        for (n, _) in &self.parts {
            if !names.contains(&n.text) {
                return Err(n.err(format!("unexpected {opener} `{}`", n.text)));
            }
        }
        Ok(())
    }
}

const GRAPH_KEYS: [&str; 2] = ["edge", "vertex"];

fn keys(extra: &[&'static str]) -> Vec<&'static str> {
    GRAPH_KEYS.iter().chain(extra).copied().collect()
}

fn parse_signed(b: &Block<'_>, what: &str) -> PResult<SignedGraph> {
    let graph = b.graph()?;
    let signature = b.edge_set_line(&graph, "signature", what)?;
    Ok(SignedGraph { graph, signature })
}

fn parse_graft(b: &Block<'_>, what: &str) -> PResult<Graft> {
    let graph = b.graph()?;
    let terminals = b.terminals(&graph, what)?;
    Ok(Graft { graph, terminals })
}

fn parse_template<'a>(header: &Line<'a>, lines: Vec<Line<'a>>) -> PResult<Template> {
    header.arity(1)?;
    let kind = header.args()[0];
    let what = format!("{} template", kind.text);
    let s = sections(header.head(), lines, "part")?;
    let top = &s.top;
    let quad_side = |b: &Block<'_>, what: &str| -> PResult<(Graph, Vertex, Vertex, EdgeSet, EdgeSet)> {
        b.check_keys(&keys(&["role", "edges"]), what)?;
        let g = b.graph()?;
        Ok((b.vertex(&g, "v")?, b.vertex(&g, "w")?, b.edge_set_role(&g, "alpha")?, b.edge_set_role(&g, "beta")?))
            .map(|(v, w, a, be)| (g, v, w, a, be))
    };
    match kind.text {
        "split" | "quad" => {
            top.check_keys(&["wsequence", "flip"], &what)?;
            s.only(&["h1", "h2"], "part")?;
            let (b1, b2) = (s.part("h1", "part")?, s.part("h2", "part")?);
            if kind.text == "split" {
                let side = |b: &Block<'_>| -> PResult<(Graph, Vertex, EdgeSet)> {
                    b.check_keys(&keys(&["role", "edges"]), &what)?;
                    let g = b.graph()?;
                    let v = b.vertex(&g, "v")?;
                    let a = b.edge_set_role(&g, "alpha")?;
                    Ok((g, v, a))
                };
                let (h1, v1, alpha1) = side(b1)?;
                let (h2, v2, alpha2) = side(b2)?;
                let s = top.wsequence(&h1)?;
                Ok(Template::Split(SplitTemplate { h1, v1, alpha1, h2, v2, alpha2, s }))
            } else {
                let (h1, v1, w1, alpha1, beta1) = quad_side(b1, &what)?;
                let (h2, v2, w2, alpha2, beta2) = quad_side(b2, &what)?;
                let s = top.wsequence(&h1)?;
                Ok(Template::Quad(QuadTemplate { h1, v1, w1, alpha1, beta1, h2, v2, w2, alpha2, beta2, s }))
            }
        }
        "shih" => {
            top.check_keys(&["which"], &what)?;
            let w = top.need("which", &what)?;
            w.arity(1)?;
            let which: u8 = w.args()[0].num("an outcome number")?;
            let mut parts = Vec::new();
            for (_, b) in &s.parts {
                b.check_keys(&keys(&["role"]), &what)?;
                let graph = b.graph()?;
                let (x, y, z) = (b.vertex(&graph, "x")?, b.vertex(&graph, "y")?, b.vertex(&graph, "z")?);
                parts.push(ShihPart { graph, x, y, z });
            }
            Ok(Template::Shih { which, parts })
        }
        "shuffle" | "tilt" | "twist" | "widget" | "gadget" => {
            s.only(&[], "part")?;
            top.check_keys(&keys(&["role", "edges"]), &what)?;
            let g = top.graph()?;
            let pieces = match kind.text {
                "shuffle" => TwinPieces::Shuffle(ShufflePieces {
                    abcd: top.vertices::<4>(&g, "abcd")?,
                    parts: [
                        top.edge_set_role(&g, "x1")?,
                        top.edge_set_role(&g, "x2")?,
                        top.edge_set_role(&g, "x3")?,
                        top.edge_set_role(&g, "x4")?,
                    ],
                    graph: g,
                }),
                "tilt" => TwinPieces::Tilt(TiltPieces {
                    a: top.vertices::<2>(&g, "a")?,
                    b: top.vertices::<2>(&g, "b")?,
                    c: top.vertex(&g, "c")?,
                    d: top.vertex(&g, "d")?,
                    efgh: top.edge_array::<4>(&g, "efgh")?,
                    x1: top.edge_set_role(&g, "x1")?,
                    x2: top.edge_set_role(&g, "x2")?,
                    graph: g,
                }),
                "twist" => TwinPieces::Twist(TwistPieces {
                    a: top.vertices::<2>(&g, "a")?,
                    b: top.vertex(&g, "b")?,
                    c: top.vertex(&g, "c")?,
                    d: top.vertex(&g, "d")?,
                    efgh: top.edge_array::<4>(&g, "efgh")?,
                    x1: top.edge_set_role(&g, "x1")?,
                    x2: top.edge_set_role(&g, "x2")?,
                    graph: g,
                }),
                "widget" => TwinPieces::Widget(WidgetPieces {
                    v1: top.vertex(&g, "v1")?,
                    z1: top.vertex(&g, "z1")?,
                    w1: top.vertex(&g, "w1")?,
                    w2: top.vertex(&g, "w2")?,
                    abcdef: top.edges_exact::<6>(&g, "abcdef")?,
                    loops: top.edges_exact::<4>(&g, "loops")?,
                    gamma: top.edge_set_role(&g, "gamma")?,
                    h1: g,
                }),
                _ => TwinPieces::Gadget(GadgetPieces {
                    v1: top.vertex(&g, "v1")?,
                    z1: top.vertex(&g, "z1")?,
                    u1: top.vertex(&g, "u1")?,
                    w: top.vertices::<2>(&g, "w")?,
                    a: top.edges_exact::<2>(&g, "a")?,
                    b: top.edges_exact::<2>(&g, "b")?,
                    c: top.edges_exact::<2>(&g, "c")?,
                    d: top.edges_exact::<2>(&g, "d")?,
                    loops: top.edges_exact::<4>(&g, "loops")?,
                    gamma: top.edge_set_role(&g, "gamma")?,
                    h1: g,
                }),
            };
            Ok(Template::Twins(pieces))
        }
        other => Err(kind.err(format!("unknown template kind `{other}`"))),
    }
}

fn parse_record<'a>(header: &Line<'a>, lines: Vec<Line<'a>>) -> PResult<SiblingRecord> {
    header.arity(0)?;
    let s = sections(header.head(), lines, "side")?;
    s.top.check_keys(&["tags"], "sibling-record")?;
    s.only(&["1", "2"], "side")?;
    let mut tags = Vec::new();
    if let Some(l) = s.top.one("tags")? {
        for t in l.args() {
            tags.push(Tag::from_name(t.text).ok_or_else(|| t.err(format!("unknown tag `{}`", t.text)))?);
        }
    }
    let side = |name: &str| -> PResult<(SignedGraph, VertexSet)> {
        let b = s.part(name, "side")?;
        b.check_keys(&keys(&["signature", "terminals"]), "sibling-record side")?;
        let sg = parse_signed(b, "sibling-record side")?;
        let t = b.terminals(&sg.graph, "sibling-record side")?;
        Ok((sg, t))
    };
    let (a, t1) = side("1")?;
    let (b, t2) = side("2")?;
    if a.graph.edge_set() != b.graph.edge_set() {
        return Err(s.part("2", "side")?.opener.err("the two sides must have the same edge ids"));
    }
    Ok(SiblingRecord { g1: a.graph, sigma1: a.signature, t1, g2: b.graph, sigma2: b.signature, t2, tags })
}

fn parse_report<'a>(header: &Line<'a>, lines: Vec<Line<'a>>) -> PResult<Report> {
    let mut r = Report { title: header.tail_all(), ..Report::default() };
    let mut status_seen = false;
    for l in &lines {
        match l.key() {
            "status" => {
                l.arity(1)?;
                if status_seen {
                    return Err(l.head().err("duplicate `status`"));
                }
                status_seen = true;
                r.status = l.args()[0].text.to_string();
            }
            "field" => {
                let key = l.args().first().ok_or_else(|| l.end())?.text.to_string();
                let fields = match r.items.last_mut() {
                    Some(item) => &mut item.fields,
                    None => &mut r.fields,
                };
                fields.push((key, l.tail.to_string()));
            }
            "item" => r.items.push(Item { name: l.tail_all(), fields: Vec::new() }),
            other => return Err(l.head().err(format!("unexpected `{other}` in report"))),
        }
    }
    Ok(r)
}

impl Line<'_> {
    /// Everything after the keyword.
    fn tail_all(&self) -> String {
        self.args().iter().map(|t| t.text).collect::<Vec<_>>().join(" ")
    }
}

fn parse_one<'a>(header: Line<'a>, body: Vec<Line<'a>>) -> PResult<Document> {
    let block = |lines| Block { opener: header.head(), lines };
    Ok(match header.key() {
        "graph" => {
            header.arity(0)?;
            let b = block(body);
            b.check_keys(&GRAPH_KEYS, "graph")?;
            Document::Graph(b.graph()?)
        }
        "signed-graph" => {
            header.arity(0)?;
            let b = block(body);
            b.check_keys(&keys(&["signature"]), "signed-graph")?;
            Document::Signed(parse_signed(&b, "signed-graph")?)
        }
        "graft" => {
            header.arity(0)?;
            let b = block(body);
            b.check_keys(&keys(&["terminals"]), "graft")?;
            Document::Graft(parse_graft(&b, "graft")?)
        }
        "template" => Document::Template(parse_template(&header, body)?),
        "sibling-record" => Document::Record(parse_record(&header, body)?),
        _ => Document::Report(parse_report(&header, body)?),
    })
}

/// Every document in `text`, in order.
pub fn parse_stream(text: &str) -> PResult<Vec<Document>> {
    let lines = lex(text);
    let mut docs = Vec::new();
    let mut it = lines.into_iter().peekable();
    while let Some(header) = it.next() {
        if !KINDS.contains(&header.key()) {
            return Err(header.head().err(format!(
                "expected a document header ({}), found `{}`",
                KINDS.join(", "),
                header.key()
            )));
        }
        let mut body = Vec::new();
        while let Some(l) = it.next_if(|l| !KINDS.contains(&l.key())) {
            body.push(l);
        }
        docs.push(parse_one(header, body)?);
    }
    Ok(docs)
}

/// The single document in `text`.
pub fn parse(text: &str) -> PResult<Document> {
    let mut docs = parse_stream(text)?;
    match docs.len() {
        1 => Ok(docs.pop().unwrap()),
        0 => Err(ParseError { line: 1, col: 1, message: "empty input, expected a document".into() }),
        _ => {
            let second = lex(text).into_iter().filter(|l| KINDS.contains(&l.key())).nth(1).unwrap();
            Err(second.head().err("expected a single document"))
        }
    }
}

fn join<T: fmt::Display>(it: impl IntoIterator<Item = T>) -> String {
    it.into_iter().map(|x| format!(" {x}")).collect()
}

fn write_graph(out: &mut String, g: &Graph) {
    for (e, u, v) in g.edges() {
        writeln!(out, "edge {e} {u} {v}").unwrap();
    }
    let touched: BTreeSet<Vertex> = g.edges().flat_map(|(_, u, v)| [u, v]).collect();
    let isolated: Vec<Vertex> = g.vertices().iter().copied().filter(|v| !touched.contains(v)).collect();
    if !isolated.is_empty() {
        writeln!(out, "vertex{}", join(isolated)).unwrap();
    }
}

fn write_edges(out: &mut String, name: &str, es: impl IntoIterator<Item = Option<Edge>>) {
    let items: Vec<String> = es.into_iter().map(|e| e.map_or("-".to_string(), |e| e.to_string())).collect();
    writeln!(out, "edges {name}{}", join(items)).unwrap();
}

fn write_set(out: &mut String, name: &str, es: &EdgeSet) {
    write_edges(out, name, es.iter().map(Some));
}

fn write_role(out: &mut String, name: &str, vs: &[Vertex]) {
    writeln!(out, "role {name}{}", join(vs)).unwrap();
}

fn write_wsequence(out: &mut String, s: &Option<WSequence>) {
    if let Some(s) = s {
        out.push_str("wsequence\n");
        for x in &s.steps {
            writeln!(out, "flip{}", join(x.iter())).unwrap();
        }
    }
}

fn write_template(out: &mut String, t: &Template) {
    writeln!(out, "template {}", t.kind()).unwrap();
    match t {
        Template::Split(t) => {
            write_wsequence(out, &t.s);
            for (name, h, v, a) in [("h1", &t.h1, t.v1, &t.alpha1), ("h2", &t.h2, t.v2, &t.alpha2)] {
                writeln!(out, "part {name}").unwrap();
                write_graph(out, h);
                write_role(out, "v", &[v]);
                write_set(out, "alpha", a);
            }
        }
        Template::Quad(t) => {
            write_wsequence(out, &t.s);
            for (name, h, v, w, a, b) in
                [("h1", &t.h1, t.v1, t.w1, &t.alpha1, &t.beta1), ("h2", &t.h2, t.v2, t.w2, &t.alpha2, &t.beta2)]
            {
                writeln!(out, "part {name}").unwrap();
                write_graph(out, h);
                write_role(out, "v", &[v]);
                write_role(out, "w", &[w]);
                write_set(out, "alpha", a);
                write_set(out, "beta", b);
            }
        }
        Template::Shih { which, parts } => {
            writeln!(out, "which {which}").unwrap();
            for (i, p) in parts.iter().enumerate() {
                writeln!(out, "part {}", i + 1).unwrap();
                write_graph(out, &p.graph);
                write_role(out, "x", &[p.x]);
                write_role(out, "y", &[p.y]);
                write_role(out, "z", &[p.z]);
            }
        }
        Template::Twins(TwinPieces::Shuffle(p)) => {
            write_graph(out, &p.graph);
            write_role(out, "abcd", &p.abcd);
            for (i, x) in p.parts.iter().enumerate() {
                write_set(out, &format!("x{}", i + 1), x);
            }
        }
        Template::Twins(TwinPieces::Tilt(p)) => {
            write_graph(out, &p.graph);
            write_role(out, "a", &p.a);
            write_role(out, "b", &p.b);
            write_role(out, "c", &[p.c]);
            write_role(out, "d", &[p.d]);
            write_edges(out, "efgh", p.efgh);
            write_set(out, "x1", &p.x1);
            write_set(out, "x2", &p.x2);
        }
        Template::Twins(TwinPieces::Twist(p)) => {
            write_graph(out, &p.graph);
            write_role(out, "a", &p.a);
            write_role(out, "b", &[p.b]);
            write_role(out, "c", &[p.c]);
            write_role(out, "d", &[p.d]);
            write_edges(out, "efgh", p.efgh);
            write_set(out, "x1", &p.x1);
            write_set(out, "x2", &p.x2);
        }
        Template::Twins(TwinPieces::Widget(p)) => {
            write_graph(out, &p.h1);
            write_role(out, "v1", &[p.v1]);
            write_role(out, "z1", &[p.z1]);
            write_role(out, "w1", &[p.w1]);
            write_role(out, "w2", &[p.w2]);
            write_edges(out, "abcdef", p.abcdef.map(Some));
            write_edges(out, "loops", p.loops.map(Some));
            write_set(out, "gamma", &p.gamma);
        }
        Template::Twins(TwinPieces::Gadget(p)) => {
            write_graph(out, &p.h1);
            write_role(out, "v1", &[p.v1]);
            write_role(out, "z1", &[p.z1]);
            write_role(out, "u1", &[p.u1]);
            write_role(out, "w", &p.w);
            for (name, es) in [("a", p.a), ("b", p.b), ("c", p.c), ("d", p.d)] {
                write_edges(out, name, es.map(Some));
            }
            write_edges(out, "loops", p.loops.map(Some));
            write_set(out, "gamma", &p.gamma);
        }
    }
}

fn write_fields(out: &mut String, fields: &[(String, String)]) {
    for (k, v) in fields {
        if v.is_empty() {
            writeln!(out, "field {k}").unwrap();
        } else {
            writeln!(out, "field {k} {v}").unwrap();
        }
    }
}

/// Canonical text of one document.
pub fn serialize(doc: &Document) -> String {
    let mut out = String::new();
    match doc {
        Document::Graph(g) => {
            out.push_str("graph\n");
            write_graph(&mut out, g);
        }
        Document::Signed(sg) => {
            out.push_str("signed-graph\n");
            write_graph(&mut out, &sg.graph);
            writeln!(out, "signature{}", join(sg.signature.iter())).unwrap();
        }
        Document::Graft(gr) => {
            out.push_str("graft\n");
            write_graph(&mut out, &gr.graph);
            writeln!(out, "terminals{}", join(&gr.terminals)).unwrap();
        }
        Document::Template(t) => write_template(&mut out, t),
        Document::Record(r) => {
            out.push_str("sibling-record\n");
            writeln!(out, "tags{}", join(r.tags.iter().map(|t| t.name()))).unwrap();
            for (i, (g, s, t)) in [(&r.g1, &r.sigma1, &r.t1), (&r.g2, &r.sigma2, &r.t2)].into_iter().enumerate() {
                writeln!(out, "side {}", i + 1).unwrap();
                write_graph(&mut out, g);
                writeln!(out, "signature{}", join(s.iter())).unwrap();
                writeln!(out, "terminals{}", join(t)).unwrap();
            }
        }
        Document::Report(r) => {
            writeln!(out, "report {}", r.title).unwrap();
            writeln!(out, "status {}", r.status).unwrap();
            write_fields(&mut out, &r.fields);
            for item in &r.items {
                writeln!(out, "item {}", item.name).unwrap();
                write_fields(&mut out, &item.fields);
            }
        }
    }
    out
}

/// Documents separated by blank lines.
pub fn serialize_stream(docs: &[Document]) -> String {
    docs.iter().map(serialize).collect::<Vec<_>>().join("\n")
}

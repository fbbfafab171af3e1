//! Command implementations. Each returns the documents to print and an exit
//! code, or a failure.

use std::fmt;
use std::io::Read as _;
use std::path::Path;

use evencycle::discovery::{classify_pair, search_siblings, CatalogSpec, SiblingRecord, Tag};
use evencycle::ops::{
    default_unfold_sets, delta_reduce, fold, lovasz_flip, resign, split_vertex, unfold, whitney_flip, whitney_glue,
    whitney_split_blocks,
};
use evencycle::planted::{check_planted, plant, planted_suite, Planted, PlantedKind};
use evencycle::templates::{
    build_named_twins, build_quad_siblings, build_shih_outcome, build_split_siblings, split_reduce, SiblingPair,
};
use evencycle::{
    cycle_space, even_cut_space, even_cycle_space, Edge, EdgeSet, Error, Graph, SignedGraph, Vertex, VertexSet,
};

use crate::doc::{parse_stream, Document, Report, Template};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug)]
pub enum Failure {
    /// Bad input, failed precondition or exhausted budget.
    Usage(String),
    /// A claimed property does not hold.
    Violated(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Violated(_) => EXIT_VIOLATED,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Violated(m) => f.write_str(m),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::SpacesDiffer | Error::NotSiblings | Error::Inequivalent | Error::CheckFailed(_) => {
                Failure::Violated(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

pub type Outcome = Result<Output, Failure>;

#[derive(Debug, Default)]
pub struct Output {
    pub notes: Vec<String>,
    pub docs: Vec<Document>,
    pub exit: u8,
}

impl Output {
    fn docs(docs: Vec<Document>) -> Output {
        Output { docs, ..Output::default() }
    }

    fn note(mut self, n: impl Into<String>) -> Output {
        self.notes.push(n.into());
        self
    }
}

/// Every document in the file, `-` meaning standard input.
pub fn read_docs(path: &Path) -> Result<Vec<Document>, Failure> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
    };
    parse_stream(&text).map_err(|e| Failure::Usage(format!("{}:{}:{}: {}", path.display(), e.line, e.col, e.message)))
}

fn read_one(path: &Path) -> Result<Document, Failure> {
    let mut docs = read_docs(path)?;
    match docs.len() {
        1 => Ok(docs.pop().unwrap()),
        n => Err(Failure::Usage(format!("{}: expected one document, found {n}", path.display()))),
    }
}

fn wrong_kind(path: &Path, want: &str, d: &Document) -> Failure {
    Failure::Usage(format!("{}: expected a {want} document, found {}", path.display(), d.kind()))
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    match read_one(path)? {
        Document::Graph(g) => Ok(g),
        d => Err(wrong_kind(path, "graph", &d)),
    }
}

fn read_signed(path: &Path) -> Result<SignedGraph, Failure> {
    match read_one(path)? {
        Document::Signed(s) => Ok(s),
        d => Err(wrong_kind(path, "signed-graph", &d)),
    }
}

fn read_record(path: &Path) -> Result<SiblingRecord, Failure> {
    match read_one(path)? {
        Document::Record(r) => Ok(r),
        d => Err(wrong_kind(path, "sibling-record", &d)),
    }
}

fn read_records(path: &Path) -> Result<Vec<SiblingRecord>, Failure> {
    read_docs(path)?
        .into_iter()
        .map(|d| match d {
            Document::Record(r) => Ok(r),
            d => Err(wrong_kind(path, "sibling-record", &d)),
        })
        .collect()
}

fn edge_set(ids: &[Edge]) -> EdgeSet {
    ids.iter().copied().collect()
}

fn fmt_set(vs: &VertexSet) -> String {
    format!("{vs:?}")
}

pub fn check_equal(a: &Path, b: &Path) -> Outcome {
    let (da, db) = (read_one(a)?, read_one(b)?);
    let (sa, sb) = match (&da, &db) {
        (Document::Graph(x), Document::Graph(y)) => (cycle_space(x), cycle_space(y)),
        (Document::Signed(x), Document::Signed(y)) => (even_cycle_space(x), even_cycle_space(y)),
        (Document::Graft(x), Document::Graft(y)) => (even_cut_space(x)?, even_cut_space(y)?),
        _ => {
            return Err(Failure::Usage(format!(
                "cannot compare a {} document with a {} document",
                da.kind(),
                db.kind()
            )))
        }
    };
    if sa.universe() != sb.universe() {
        return Err(Failure::Usage("the two documents have different edge ids".into()));
    }
    let equal = sa.equals(&sb)?;
    let space = match da {
        Document::Graph(_) => "cycle",
        Document::Signed(_) => "even-cycle",
        _ => "even-cut",
    };
    let mut r = Report::new("check-equal", if equal { "equal" } else { "differ" });
    r.field("space", space).field("dimension-1", sa.dim()).field("dimension-2", sb.dim());
    Ok(Output { exit: if equal { EXIT_OK } else { EXIT_VIOLATED }, ..Output::docs(vec![Document::Report(r)]) })
}

pub enum FlipOp {
    Edges(Vec<Edge>),
    Glue(Vertex, Vertex),
    SplitBlocks,
}

pub fn flip(path: &Path, op: FlipOp) -> Outcome {
    let g = read_graph(path)?;
    let h = match op {
        FlipOp::Edges(x) => whitney_flip(&g, &edge_set(&x))?,
        FlipOp::Glue(a, b) => whitney_glue(&g, a, b)?,
        FlipOp::SplitBlocks => whitney_split_blocks(&g),
    };
    Ok(Output::docs(vec![Document::Graph(h)]))
}

pub fn resign_cmd(path: &Path, u: &[Vertex]) -> Outcome {
    let sg = read_signed(path)?;
    let r = resign(&sg, &u.iter().copied().collect())?;
    Ok(Output::docs(vec![Document::Signed(r)]))
}

pub fn lovasz(path: &Path, v1: Vertex, v2: Vertex) -> Outcome {
    let sg = read_signed(path)?;
    Ok(Output::docs(vec![Document::Signed(lovasz_flip(&sg, v1, v2)?)]))
}

pub fn split(path: &Path, v: Vertex, alpha: &[Edge]) -> Outcome {
    let g = read_graph(path)?;
    let s = split_vertex(&g, v, &edge_set(alpha))?;
    Ok(Output::docs(vec![Document::Graph(s.graph)]).note(format!("split {v} into {} and {}", s.v1, s.v2)))
}

pub fn unfold_cmd(path: &Path, s: Vertex, t: Vertex, sets: Option<(Vec<Edge>, Vec<Edge>)>) -> Outcome {
    let sg = read_signed(path)?;
    let (alpha, beta) = match sets {
        Some((a, b)) => (edge_set(&a), edge_set(&b)),
        None => default_unfold_sets(&sg, s),
    };
    let u = unfold(&sg, s, t, &alpha, &beta)?;
    Ok(Output::docs(vec![Document::Graft(u.graft)])
        .note(format!("s split into {} {}, t split into {} {}", u.s1, u.s2, u.t1, u.t2)))
}

pub fn fold_cmd(path: &Path, s: (Vertex, Vertex), t: (Vertex, Vertex)) -> Outcome {
    let gr = match read_one(path)? {
        Document::Graft(g) => g,
        d => return Err(wrong_kind(path, "graft", &d)),
    };
    let f = fold(&gr, (s, t))?;
    Ok(Output::docs(vec![Document::Signed(f.signed)]).note(format!("s = {}, t = {}", f.s, f.t)))
}

fn verified(pair: &SiblingPair, tags: Vec<Tag>) -> Result<SiblingRecord, Failure> {
    let mut rec = SiblingRecord::from_pair(pair);
    rec.verify()?;
    rec.tags = tags;
    Ok(rec)
}

pub fn build_twins(path: &Path, with_template: bool) -> Outcome {
    let t = match read_one(path)? {
        Document::Template(t) => t,
        d => return Err(wrong_kind(path, "template", &d)),
    };
    let mut docs = Vec::new();
    let rec = match &t {
        Template::Split(s) => verified(&build_split_siblings(s)?, Vec::new())?,
        Template::Quad(q) => verified(&build_quad_siblings(q)?, Vec::new())?,
        Template::Twins(p) => {
            let named = build_named_twins(p)?;
            if with_template {
                docs.push(Document::Template(Template::Quad(named.template)));
            }
            verified(&named.pair, Tag::from_name(named.kind.name()).into_iter().collect())?
        }
        Template::Shih { .. } => return Err(Failure::Usage("shih templates are built with build-shih".into())),
    };
    docs.insert(0, Document::Record(rec));
    Ok(Output::docs(docs))
}

pub fn build_shih(path: &Path) -> Outcome {
    let (which, parts) = match read_one(path)? {
        Document::Template(Template::Shih { which, parts }) => (which, parts),
        d => return Err(wrong_kind(path, "shih template", &d)),
    };
    let out = build_shih_outcome(which, &parts)?;
    let tag = if which == 2 { Tag::Shih2 } else { Tag::Shih3 };
    Ok(Output::docs(vec![Document::Record(verified(&out.pair(), vec![tag])?)]))
}

pub enum Reduction {
    Split(Vec<Edge>),
    Delta(Vec<Edge>),
}

pub fn reduce(path: &Path, how: Reduction) -> Outcome {
    let rec = read_record(path)?;
    match how {
        Reduction::Split(x) => {
            let r = split_reduce(&rec.pair(), &edge_set(&x))?;
            let docs = [r.inner, r.outer].iter().map(|p| Document::Record(SiblingRecord::from_pair(p))).collect();
            Ok(Output::docs(docs).note("inner pair, then outer pair"))
        }
        Reduction::Delta(y) => {
            let (a, b) = rec.pair().signed();
            let d = delta_reduce((&a, &b), &edge_set(&y))?;
            let tri: Vec<String> = d.triangle.iter().map(|e| e.map_or("-".into(), |e| e.to_string())).collect();
            let note = format!("boundary {:?} and {:?}, triangle edges {}", d.boundary.0, d.boundary.1, tri.join(" "));
            Ok(Output::docs(vec![Document::Record(SiblingRecord::new(d.first, d.second)?)]).note(note))
        }
    }
}

pub fn search(spec: CatalogSpec, budget: usize) -> Outcome {
    let recs = search_siblings(spec, budget)?;
    let mut r = Report::new("search-siblings", "pass");
    r.field("max-vertices", spec.max_vertices)
        .field("max-edges", spec.max_edges)
        .field("loops", spec.loops)
        .field("records", recs.len());
    let mut docs = vec![Document::Report(r)];
    docs.extend(recs.into_iter().map(Document::Record));
    Ok(Output::docs(docs))
}

pub fn classify(path: &Path, budget: usize) -> Outcome {
    let recs = read_records(path)?;
    let mut r = Report::new("classify", "pass");
    r.field("records", recs.len());
    for (i, rec) in recs.iter().enumerate() {
        let c = classify_pair(rec, budget);
        let item = r.item(format!("record {}", i + 1));
        item.field("tags", c.tags.iter().map(|t| t.name()).collect::<Vec<_>>().join(" "));
        for w in &c.witnesses {
            item.field("witness", format!("{}: {}", w.tag().name(), w.describe()));
        }
        if let Some(reason) = &c.reason {
            item.field("reason", reason);
        }
    }
    Ok(Output::docs(vec![Document::Report(r)]))
}

fn check_instance(p: &Planted) -> Result<(), Error> {
    check_planted(p)?;
    // Triangle-triad outputs may be equivalent graphs.
    if p.kind != PlantedKind::TriangleTriad {
        SiblingRecord::from_pair(&p.pair).verify()?;
    }
    Ok(())
}

pub fn verify_suite(file: Option<&Path>, count: usize, seed: u64) -> Outcome {
    let mut r = Report::new("verify-suite", "pass");
    let results: Vec<(String, Result<(), Error>)> = match file {
        Some(path) => {
            read_records(path)?.iter().enumerate().map(|(i, rec)| (format!("record {}", i + 1), rec.verify())).collect()
        }
        None => {
            r.field("count", count).field("seed", seed);
            planted_suite(count, seed)?
                .iter()
                .map(|p| (format!("{} seed {}", p.kind.name(), p.seed), check_instance(p)))
                .collect()
        }
    };
    let failed = results.iter().filter(|(_, res)| res.is_err()).count();
    r.field("instances", results.len()).field("failed", failed);
    for (name, res) in results {
        let item = r.item(name);
        match res {
            Ok(()) => item.field("status", "pass"),
            Err(e) => item.field("status", "fail").field("error", e),
        };
    }
    if failed > 0 {
        r.status = "fail".into();
    }
    Ok(Output { exit: if failed > 0 { EXIT_VIOLATED } else { EXIT_OK }, ..Output::docs(vec![Document::Report(r)]) })
}

pub fn plant_cmd(kind: &str, seed: u64, with_template: bool) -> Outcome {
    let kind = PlantedKind::from_name(kind).ok_or_else(|| {
        let names: Vec<&str> = PlantedKind::ALL.iter().map(|k| k.name()).collect();
        Failure::Usage(format!("unknown kind `{kind}`, expected one of {}", names.join(", ")))
    })?;
    let p = plant(kind, seed)?;
    let mut rec = SiblingRecord::from_pair(&p.pair);
    rec.tags = Tag::of_planted(kind).into_iter().collect();
    let mut docs = vec![Document::Record(rec)];
    if with_template {
        docs.extend(p.split.map(|t| Document::Template(Template::Split(t))));
        docs.extend(p.quad.map(|t| Document::Template(Template::Quad(t))));
        docs.extend(p.pieces.map(|t| Document::Template(Template::Twins(t))));
        docs.extend(p.shih.map(|(which, parts)| Document::Template(Template::Shih { which, parts })));
    }
    let note = format!("{} seed {}, terminals {} and {}", kind.name(), seed, fmt_set(&p.pair.t1), fmt_set(&p.pair.t2));
    Ok(Output::docs(docs).note(note))
}

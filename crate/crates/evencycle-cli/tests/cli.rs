//! Exit codes and outputs of the binary on a scripted set of invocations.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use evencycle::discovery::{classify_pair, search_siblings, CatalogSpec, SiblingRecord, Witness, DEFAULT_BUDGET};
use evencycle::planted::{plant, PlantedKind};
use evencycle_cli::doc::{parse_stream, serialize, Document};
use tempfile::TempDir;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run_env(args: &[&str], env: &[(&str, &str)]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_evencycle"));
    cmd.args(args).env_remove("EVENCYCLE_BUDGET");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let Output { status, stdout, stderr } = cmd.output().unwrap();
    Run {
        code: status.code().unwrap(),
        stdout: String::from_utf8(stdout).unwrap(),
        stderr: String::from_utf8(stderr).unwrap(),
    }
}

fn run(args: &[&str]) -> Run {
    run_env(args, &[])
}

struct Dir(TempDir);

impl Dir {
    fn new() -> Dir {
        Dir(tempfile::tempdir().unwrap())
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const TRIANGLE: &str = "edge 1 0 1\nedge 2 1 2\nedge 3 2 0\n";

fn triangle(sig: &str) -> String {
    format!("signed-graph\n{TRIANGLE}signature {sig}\n")
}

#[test]
fn check_equal_on_identical_files() {
    let d = Dir::new();
    let a = d.file("a", &triangle("1"));
    let r = run(&["check-equal", s(&a), s(&a)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.contains("status equal"));
}

#[test]
fn check_equal_up_to_resigning() {
    let d = Dir::new();
    let (a, b) = (d.file("a", &triangle("1")), d.file("b", &triangle("2")));
    assert_eq!(run(&["check-equal", s(&a), s(&b)]).code, 0);
    let c = d.file("c", &triangle(""));
    let r = run(&["check-equal", s(&a), s(&c)]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("status differ"));
}

#[test]
fn graphs_and_grafts_compare_their_own_spaces() {
    let d = Dir::new();
    let g = d.file("g", &format!("graph\n{TRIANGLE}"));
    let h = d.file("h", "graph\nedge 1 0 1\nedge 2 1 2\nedge 3 2 3\n");
    assert_eq!(run(&["check-equal", s(&g), s(&h)]).code, 1);
    let t1 = d.file("t1", &format!("graft\n{TRIANGLE}terminals 0 1\n"));
    let t2 = d.file("t2", &format!("graft\n{TRIANGLE}terminals 1 2\n"));
    assert_eq!(run(&["check-equal", s(&t1), s(&t2)]).code, 1);
    assert_eq!(run(&["check-equal", s(&t1), s(&t1)]).code, 0);
    let r = run(&["check-equal", s(&g), s(&t1)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("cannot compare"));
}

#[test]
fn malformed_input_reports_position() {
    let d = Dir::new();
    let bad = d.file("bad", "graph\nedge 0 0 one\n");
    let r = run(&["check-equal", s(&bad), s(&bad)]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains(":2:10:"), "{}", r.stderr);
    let bad = d.file("bad2", &format!("signed-graph\n{TRIANGLE}signature 1 9\n"));
    let r = run(&["resign", s(&bad), "--vertices", "0"]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains(":5:13: unknown edge 9"), "{}", r.stderr);
}

#[test]
fn usage_errors_exit_two() {
    let d = Dir::new();
    let a = d.file("a", &triangle("1"));
    for args in [
        vec!["frobnicate"],
        vec![],
        vec!["check-equal", s(&a)],
        vec!["check-equal", s(&a), "/nonexistent/file"],
        vec!["flip", s(&a), "--edges", "1"],
        vec!["plant", "--kind", "nope"],
        vec!["lovasz", s(&a), "0", "x"],
        vec!["flip", s(&a), "--edges", "1", "--split-blocks"],
    ] {
        let r = run(&args);
        assert_eq!(r.code, 2, "{args:?}: {}", r.stderr);
        assert!(!r.stderr.is_empty());
    }
    let r = run_env(&["classify", s(&a)], &[("EVENCYCLE_BUDGET", "lots")]);
    assert_eq!(r.code, 2);
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn failed_preconditions_exit_two() {
    let d = Dir::new();
    let g = d.file("g", "graph\nedge 0 0 1\nedge 1 1 2\nedge 2 2 0\nedge 3 0 3\nedge 4 3 2\n");
    let r = run(&["flip", s(&g), "--edges", "0,3"]);
    assert_eq!(r.code, 2, "{}", r.stderr);
    assert_eq!(run(&["flip", s(&g), "--edges", "3,4"]).code, 0);
}

#[test]
fn transforms_keep_their_spaces() {
    let d = Dir::new();
    let a = d.file("a", &triangle("1 3"));
    let resigned = run(&["resign", s(&a), "--vertices", "1,2"]);
    assert_eq!(resigned.code, 0);
    let b = d.file("b", &resigned.stdout);
    assert_eq!(run(&["check-equal", s(&a), s(&b)]).code, 0);

    let k4 = "edge 0 0 1\nedge 1 0 2\nedge 2 0 3\nedge 3 1 2\nedge 4 1 3\nedge 5 2 3\n";
    let sg = d.file("k4", &format!("signed-graph\n{k4}signature 0 1\n"));
    let u = run(&["unfold", s(&sg), "--s", "0", "--t", "3"]);
    assert_eq!(u.code, 0, "{}", u.stderr);
    // The leading comment names the new vertices: s split into s1 s2, t into t1 t2.
    let nums: Vec<&str> =
        u.stdout.lines().next().unwrap().split(&[' ', ','][..]).filter(|w| w.parse::<u32>().is_ok()).collect();
    let graft = d.file("graft", &u.stdout);
    let f = run(&["fold", s(&graft), "--s", nums[0], nums[1], "--t", nums[2], nums[3]]);
    assert_eq!(f.code, 0, "{}", f.stderr);
    let back = d.file("back", &f.stdout);
    assert_eq!(run(&["check-equal", s(&sg), s(&back)]).code, 0);

    let lv = run(&["lovasz", s(&a), "0", "1"]);
    assert_eq!(lv.code, 0, "{}", lv.stderr);
    let c = d.file("c", &lv.stdout);
    assert_eq!(run(&["check-equal", s(&a), s(&c)]).code, 0);
}

fn templates_of(stdout: &str) -> Vec<Document> {
    parse_stream(stdout).unwrap().into_iter().filter(|d| matches!(d, Document::Template(_))).collect()
}

#[test]
fn planted_templates_build_verified_records() {
    let d = Dir::new();
    for kind in ["nova", "shuffle", "tilt", "twist", "widget", "gadget", "shih-2", "shih-3"] {
        let r = run(&["plant", "--kind", kind, "--seed", "3", "--with-template"]);
        assert_eq!(r.code, 0, "{kind}: {}", r.stderr);
        let t = templates_of(&r.stdout).pop().unwrap();
        let f = d.file(kind, &serialize(&t));
        let cmd = if kind.starts_with("shih") { "build-shih" } else { "build-twins" };
        let b = run(&[cmd, s(&f)]);
        assert_eq!(b.code, 0, "{kind}: {}", b.stderr);
        let rec = d.file(&format!("{kind}.rec"), &b.stdout);
        let v = run(&["verify-suite", s(&rec)]);
        assert_eq!(v.code, 0, "{kind}: {}", v.stdout);
    }
}

#[test]
fn tampered_records_fail_verification() {
    let d = Dir::new();
    let r = run(&["plant", "--kind", "simple", "--seed", "1"]);
    let Document::Record(mut rec) = parse_stream(&r.stdout).unwrap().remove(0) else { panic!() };
    rec.sigma2 = rec.sigma2.sym_diff(&rec.g2.edge_set());
    let f = d.file("rec", &serialize(&Document::Record(rec)));
    let v = run(&["verify-suite", s(&f), "--format", "pretty"]);
    assert_eq!(v.code, 1);
    assert!(v.stdout.starts_with("verify-suite: fail"), "{}", v.stdout);
}

#[test]
fn classify_lists_witnesses_verbatim() {
    let d = Dir::new();
    let p = plant(PlantedKind::Twist, 7).unwrap();
    let rec = SiblingRecord::from_pair(&p.pair);
    let f = d.file("rec", &serialize(&Document::Record(rec.clone())));
    let r = run(&["classify", s(&f)]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let c = classify_pair(&rec, DEFAULT_BUDGET);
    assert!(!c.witnesses.is_empty());
    for w in &c.witnesses {
        let line = format!("field witness {}: {}", w.tag().name(), w.describe());
        assert!(r.stdout.lines().any(|l| l == line), "missing {line}\n{}", r.stdout);
    }
    assert!(r.stdout.contains("field tags ") && r.stdout.contains("twist"));
}

#[test]
fn planted_suite_verifies() {
    let r = run(&["verify-suite", "--count", "1", "--seed", "11"]);
    assert_eq!(r.code, 0, "{}", r.stdout);
    assert!(r.stdout.contains("field instances 10"));
}

#[test]
fn seeds_are_reproducible() {
    let a = run(&["plant", "--kind", "widget", "--seed", "5"]);
    assert_eq!(a.stdout, run(&["plant", "--kind", "widget", "--seed", "5"]).stdout);
    assert_eq!(run(&["plant", "--kind", "widget"]).stdout, run(&["plant", "--kind", "widget", "--seed", "0"]).stdout);
}

#[test]
fn search_output_is_a_report_then_records() {
    let r = run(&["search-siblings", "--max-vertices", "2", "--max-edges", "2"]);
    assert_eq!(r.code, 0);
    let docs = parse_stream(&r.stdout).unwrap();
    assert_eq!(docs.len(), 1);
    let Document::Report(rep) = &docs[0] else { panic!() };
    assert!(rep.items.is_empty());
    assert!(rep.fields.contains(&("records".into(), "0".into())));

    let r = run(&["search-siblings", "--max-vertices", "4", "--max-edges", "5"]);
    let docs = parse_stream(&r.stdout).unwrap();
    assert!(docs.len() > 1);
    assert!(docs[1..].iter().all(|d| matches!(d, Document::Record(_))));
    assert_eq!(r.stdout, run(&["search-siblings", "--max-vertices", "4", "--max-edges", "5"]).stdout);
}

#[test]
fn reduce_splits_a_searched_pair() {
    let d = Dir::new();
    let spec = CatalogSpec { max_vertices: 4, max_edges: 5, loops: false };
    let (rec, x) = search_siblings(spec, DEFAULT_BUDGET)
        .unwrap()
        .into_iter()
        .find_map(|rec| {
            classify_pair(&rec, DEFAULT_BUDGET).witnesses.into_iter().find_map(|w| match w {
                Witness::Reducible { x } => Some((rec.clone(), x)),
                _ => None,
            })
        })
        .unwrap();
    let f = d.file("rec", &serialize(&Document::Record(rec)));
    let ids: Vec<String> = x.iter().map(|e| e.to_string()).collect();
    let r = run(&["reduce", s(&f), "--split", &ids.join(",")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(parse_stream(&r.stdout).unwrap().len(), 2);
    assert_eq!(run(&["reduce", s(&f)]).code, 2);
}

#[test]
fn reduce_removes_a_common_bipartite_piece() {
    let d = Dir::new();
    let spec = CatalogSpec { max_vertices: 5, max_edges: 6, loops: false };
    let found = search_siblings(spec, DEFAULT_BUDGET).unwrap().into_iter().find_map(|rec| {
        classify_pair(&rec, DEFAULT_BUDGET).witnesses.into_iter().find_map(|w| match w {
            Witness::DeltaPiece(y) => Some((rec.clone(), y)),
            _ => None,
        })
    });
    let (rec, y) = found.unwrap();
    let f = d.file("rec", &serialize(&Document::Record(rec)));
    let ids: Vec<String> = y.iter().map(|e| e.to_string()).collect();
    let r = run(&["reduce", s(&f), "--delta", &ids.join(",")]);
    assert_eq!(r.code, 0, "{}", r.stderr);
    let out = d.file("out", &r.stdout);
    assert_eq!(run(&["verify-suite", s(&out)]).code, 0);
}

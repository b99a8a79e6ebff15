mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use common::*;
use ontohub_core::vocab::{owl, rdf};
use ontohub_core::{Graph, GraphPattern, Iri, Quad, QuadPattern, Store, Subject, Term, Triple, WriteOp};
use proptest::prelude::*;

fn graph(triples: &[(&str, &str, &str)]) -> Graph {
    triples
        .iter()
        .map(|(s, p, o)| Triple::new(ex(s), ex(p), ex(o)))
        .collect()
}

fn all_quads(model: &BTreeMap<Option<Iri>, Graph>) -> Vec<Quad> {
    model
        .iter()
        .flat_map(|(g, graph)| {
            graph.iter().map(move |t| Quad {
                triple: t.clone(),
                graph: g.clone(),
            })
        })
        .collect()
}

fn sorted(mut v: Vec<Quad>) -> Vec<Quad> {
    v.sort();
    v
}

#[test]
fn fresh_store_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path().join("db")).unwrap();
    assert!(store.list_graphs().is_empty());
    assert!(store.match_quads(&QuadPattern::any()).is_empty());
}

#[test]
fn put_count_and_replace() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let name = ex("g");
    store
        .put_graph(&name, &graph(&[("a", "p", "b"), ("a", "p", "c"), ("b", "q", "c")]))
        .unwrap();
    assert_eq!(store.count(&QuadPattern::in_graph(&name)), 3);

    store.put_graph(&name, &graph(&[("x", "p", "y")])).unwrap();
    let quads = store.match_quads(&QuadPattern::in_graph(&name));
    assert_eq!(quads.len(), 1);
    assert_eq!(quads[0].triple, Triple::new(ex("x"), ex("p"), ex("y")));
}

#[test]
fn list_and_delete_graphs() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let (a, b) = (ex("A"), ex("B"));
    store.put_graph(&a, &graph(&[("s", "p", "o")])).unwrap();
    store.put_graph(&b, &graph(&[("s", "p", "o")])).unwrap();
    assert_eq!(store.list_graphs(), BTreeSet::from([a.clone(), b.clone()]));

    store.delete_graph(&a).unwrap();
    store.delete_graph(&a).unwrap();
    assert_eq!(store.list_graphs(), BTreeSet::from([b.clone()]));
    assert!(store.match_quads(&QuadPattern::in_graph(&a)).is_empty());
    store.delete_graph(&ex("never-existed")).unwrap();
}

#[test]
fn empty_put_leaves_no_graph() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    store.put_graph(&ex("g"), &Graph::new()).unwrap();
    assert!(store.list_graphs().is_empty());
    assert!(store.graph(&ex("g")).is_none());
}

#[test]
fn reopen_preserves_quads_names_and_prefixes() {
    let dir = tempfile::tempdir().unwrap();
    let g = fixture("schema_12.0.ttl");
    let name = iri("http://ont.library.sh.cn/graph/schema");
    {
        let store = Store::open(dir.path()).unwrap();
        store.put_graph(&name, &g).unwrap();
        store.put_graph(&ex("other"), &graph(&[("s", "p", "o")])).unwrap();
    }
    let store = Store::open(dir.path()).unwrap();
    let back = store.graph(&name).unwrap();
    assert_eq!(back, g);
    assert_eq!(back.prefixes(), g.prefixes());
    assert_eq!(store.list_graphs().len(), 2);
}

#[test]
fn second_writer_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let first = Store::open(dir.path()).unwrap();
    let err = Store::open(dir.path()).unwrap_err();
    assert_eq!(err.code(), "lock-held");
    drop(first);
    Store::open(dir.path()).unwrap();
}

#[test]
fn foreign_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("quads.log"), "osc-quadstore v0\n").unwrap();
    assert_eq!(Store::open(dir.path()).unwrap_err().code(), "incompatible-store");
}

#[test]
fn torn_final_record_is_discarded() {
    let dir = tempfile::tempdir().unwrap();
    {
        let store = Store::open(dir.path()).unwrap();
        store.put_graph(&ex("g"), &graph(&[("s", "p", "o")])).unwrap();
    }
    let log = dir.path().join("quads.log");
    let intact = std::fs::read(&log).unwrap();
    let mut f = std::fs::OpenOptions::new().append(true).open(&log).unwrap();
    f.write_all(br#"{"terms":[[9,{"Iri":"http://ex.org/"#).unwrap();
    drop(f);

    let store = Store::open(dir.path()).unwrap();
    assert_eq!(store.count(&QuadPattern::any()), 1);
    assert_eq!(std::fs::read(&log).unwrap(), intact);
    store.put_graph(&ex("h"), &graph(&[("s", "p", "o")])).unwrap();
    drop(store);
    assert_eq!(Store::open(dir.path()).unwrap().count(&QuadPattern::any()), 2);
}

#[test]
fn corrupt_interior_record_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    drop(Store::open(dir.path()).unwrap());
    let log = dir.path().join("quads.log");
    let mut f = std::fs::OpenOptions::new().append(true).open(&log).unwrap();
    f.write_all(b"not json\n{\"ops\":[]}\n").unwrap();
    drop(f);
    let err = Store::open(dir.path()).unwrap_err();
    assert_eq!(err.code(), "corrupt-store");
}

#[test]
fn class_declarations_match_a_linear_scan() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let name = ex("schema");
    let g = fixture("schema_12.0.ttl");
    store.put_graph(&name, &g).unwrap();
    store.put_graph(&ex("skos"), &fixture("skos.ttl")).unwrap();

    let pattern = QuadPattern::in_graph(&name)
        .predicate(iri(rdf::TYPE))
        .object(iri(owl::CLASS));
    let expected: Vec<Quad> = g
        .iter()
        .filter(|t| t.predicate.as_str() == rdf::TYPE && t.object == Term::Iri(iri(owl::CLASS)))
        .map(|t| Quad {
            triple: t.clone(),
            graph: Some(name.clone()),
        })
        .collect();
    assert!(!expected.is_empty());
    assert_eq!(sorted(store.match_quads(&pattern)), sorted(expected));
}

#[test]
fn fully_bound_pattern_returns_one_quad() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    store
        .put_graph(&ex("g"), &graph(&[("s", "p", "o"), ("s", "p", "o2")]))
        .unwrap();
    let p = QuadPattern::in_graph(&ex("g"))
        .subject(ex("s"))
        .predicate(ex("p"))
        .object(ex("o"));
    assert_eq!(store.match_quads(&p).len(), 1);
}

#[test]
fn batches_commit_together() {
    let dir = tempfile::tempdir().unwrap();
    {
        let store = Store::open(dir.path()).unwrap();
        store.put_graph(&ex("old"), &graph(&[("s", "p", "o")])).unwrap();
        store
            .apply(vec![
                WriteOp::Delete { graph: Some(ex("old")) },
                WriteOp::Put {
                    graph: Some(ex("new")),
                    content: graph(&[("s", "p", "o")]),
                },
                WriteOp::Put {
                    graph: None,
                    content: graph(&[("d", "p", "o")]),
                },
            ])
            .unwrap();
    }
    let store = Store::open(dir.path()).unwrap();
    assert_eq!(store.list_graphs(), BTreeSet::from([ex("new")]));
    let default = QuadPattern {
        graph: GraphPattern::Default,
        ..QuadPattern::any()
    };
    assert_eq!(store.count(&default), 1);
    assert_eq!(store.count(&QuadPattern::any()), 2);
}

#[test]
fn compaction_shrinks_the_log_and_keeps_contents() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path()).unwrap();
    let g = fixture("schema_3.1.ttl");
    for i in 0..200 {
        let mut variant = g.clone();
        variant.insert(Triple::new(
            ex("counter"),
            ex("value"),
            ontohub_core::Literal::string(i.to_string()),
        ));
        store.put_graph(&ex("g"), &variant).unwrap();
    }
    let size = std::fs::metadata(dir.path().join("quads.log")).unwrap().len();
    let one = serde_json_len(&g);
    assert!(size < one * 80, "log not compacted: {size} bytes");
    store.compact().unwrap();
    let expected_last = {
        let mut v = g.clone();
        v.insert(Triple::new(
            ex("counter"),
            ex("value"),
            ontohub_core::Literal::string("199"),
        ));
        v
    };
    assert_eq!(store.graph(&ex("g")).unwrap(), expected_last);
    drop(store);
    let store = Store::open(dir.path()).unwrap();
    assert_eq!(store.graph(&ex("g")).unwrap(), expected_last);
}

fn serde_json_len(g: &Graph) -> u64 {
    ontohub_core::serialize(g, ontohub_core::SyntaxFormat::NTriples)
        .unwrap()
        .len() as u64
}

#[test]
fn readers_see_whole_graph_replacements() {
    let dir = tempfile::tempdir().unwrap();
    let store = std::sync::Arc::new(Store::open(dir.path()).unwrap());
    let small = graph(&[("a", "p", "b")]);
    let large = graph(&[("a", "p", "b"), ("a", "p", "c"), ("a", "p", "d"), ("a", "p", "e")]);
    store.put_graph(&ex("g"), &small).unwrap();

    let writer = {
        let store = store.clone();
        let (small, large) = (small.clone(), large.clone());
        std::thread::spawn(move || {
            for i in 0..100 {
                store
                    .put_graph(&ex("g"), if i % 2 == 0 { &large } else { &small })
                    .unwrap();
            }
        })
    };
    for _ in 0..2000 {
        let n = store.count(&QuadPattern::in_graph(&ex("g")));
        assert!(n == 1 || n == 4, "observed partial write of {n} quads");
    }
    writer.join().unwrap();
}

// Random small stores built from a tiny vocabulary so patterns hit often.

fn vocab_subject() -> impl Strategy<Value = Subject> {
    prop_oneof![
        (0..4usize).prop_map(|i| Subject::from(ex(&format!("s{i}")))),
        (0..2usize).prop_map(|i| Subject::from(blank(&format!("b{i}")))),
    ]
}

fn vocab_object() -> impl Strategy<Value = Term> {
    prop_oneof![
        (0..4usize).prop_map(|i| Term::from(ex(&format!("s{i}")))),
        (0..2usize).prop_map(|i| Term::from(blank(&format!("b{i}")))),
        (0..3usize).prop_map(|i| Term::from(ontohub_core::Literal::string(format!("v{i}")))),
    ]
}

fn vocab_predicate() -> impl Strategy<Value = Iri> {
    (0..3usize).prop_map(|i| ex(&format!("p{i}")))
}

fn vocab_graph() -> impl Strategy<Value = Option<Iri>> {
    prop_oneof![Just(None), (0..3usize).prop_map(|i| Some(ex(&format!("g{i}"))))]
}

fn small_graph() -> impl Strategy<Value = Graph> {
    prop::collection::vec((vocab_subject(), vocab_predicate(), vocab_object()), 0..12)
        .prop_map(|v| v.into_iter().map(|(s, p, o)| Triple::new(s, p, o)).collect())
}

fn write_op() -> impl Strategy<Value = WriteOp> {
    prop_oneof![
        3 => (vocab_graph(), small_graph()).prop_map(|(graph, content)| WriteOp::Put { graph, content }),
        1 => vocab_graph().prop_map(|graph| WriteOp::Delete { graph }),
    ]
}

fn pattern() -> impl Strategy<Value = QuadPattern> {
    let graph = prop_oneof![
        Just(GraphPattern::Any),
        Just(GraphPattern::Default),
        (0..4usize).prop_map(|i| GraphPattern::Named(ex(&format!("g{i}")))),
    ];
    (
        graph,
        prop::option::of(vocab_subject()),
        prop::option::of(vocab_predicate()),
        prop::option::of(vocab_object()),
    )
        .prop_map(|(graph, subject, predicate, object)| QuadPattern {
            graph,
            subject,
            predicate,
            object,
        })
}

fn model_apply(model: &mut BTreeMap<Option<Iri>, Graph>, op: &WriteOp) {
    match op {
        WriteOp::Put { graph, content } if !content.is_empty() => {
            model.insert(graph.clone(), content.clone());
        }
        WriteOp::Put { graph, .. } | WriteOp::Delete { graph } => {
            model.remove(graph);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn match_equals_brute_force_filtering(
        batches in prop::collection::vec(prop::collection::vec(write_op(), 1..4), 1..8),
        patterns in prop::collection::vec(pattern(), 16),
    ) {
        let dir = tempfile::tempdir().unwrap();
        let mut model = BTreeMap::new();
        {
            let store = Store::open(dir.path()).unwrap();
            for batch in &batches {
                for op in batch {
                    model_apply(&mut model, op);
                }
                store.apply(batch.clone()).unwrap();
            }
            let quads = all_quads(&model);
            for p in &patterns {
                let expected: Vec<Quad> = quads.iter().filter(|q| p.matches(q)).cloned().collect();
                prop_assert_eq!(sorted(store.match_quads(p)), sorted(expected), "{:?}", p);
            }
        }
        let store = Store::open(dir.path()).unwrap();
        prop_assert_eq!(sorted(store.match_quads(&QuadPattern::any())), sorted(all_quads(&model)));
        let names: BTreeSet<Iri> = model.keys().flatten().cloned().collect();
        prop_assert_eq!(store.list_graphs(), names);
        store.compact().unwrap();
        prop_assert_eq!(sorted(store.match_quads(&QuadPattern::any())), sorted(all_quads(&model)));
    }

    #[test]
    fn put_then_read_reproduces_the_graph(g in arb_graph()) {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        store.put_graph(&ex("g"), &g).unwrap();
        let back = store.graph(&ex("g")).unwrap_or_default();
        let expected_prefixes = if g.is_empty() { BTreeMap::new() } else { g.prefixes().clone() };
        prop_assert_eq!(back.triples(), g.triples());
        prop_assert_eq!(back.prefixes(), &expected_prefixes);
    }
}

//! Random multi-graph datasets and brute-force usage counts over them.

use std::collections::{BTreeMap, BTreeSet};

use ontohub_core::vocab::{rdf, rdfs};
use ontohub_core::{BlankNode, Graph, Iri, Literal, Store, Subject, Term, Triple};
use proptest::prelude::*;

fn iri(s: &str) -> Iri {
    Iri::parse(s).unwrap()
}

fn ex(local: &str) -> Iri {
    iri(&format!("http://ex.org/{local}"))
}

fn blank(l: &str) -> BlankNode {
    BlankNode::new(l).unwrap()
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub quads: Vec<(usize, Triple)>,
    pub targets: BTreeSet<usize>,
    pub page_size: usize,
}

pub fn data_graph(i: usize) -> Iri {
    ex(&format!("graph/{i}"))
}

pub fn arb_dataset() -> impl Strategy<Value = Dataset> {
    let subject = prop_oneof![
        4 => (0..6usize).prop_map(|i| Subject::Iri(ex(&format!("s{i}")))),
        1 => (0..2usize).prop_map(|i| Subject::Blank(blank(&format!("b{i}")))),
    ];
    let predicate = prop_oneof![
        3 => Just(iri(rdf::TYPE)),
        1 => Just(iri(rdfs::LABEL)),
        2 => (0..3usize).prop_map(|i| ex(&format!("p{i}"))),
    ];
    let object = prop_oneof![
        3 => (0..4usize).prop_map(|i| Term::Iri(ex(&format!("C{i}")))),
        1 => (0..6usize).prop_map(|i| Term::Iri(ex(&format!("s{i}")))),
        1 => (0..3usize).prop_map(|i| Term::Literal(Literal::string(format!("v{i}")))),
        1 => (0..2usize).prop_map(|i| Term::Blank(blank(&format!("b{i}")))),
    ];
    (
        prop::collection::vec((0..4usize, subject, predicate, object), 0..60),
        prop::collection::btree_set(0..5usize, 1..4),
        1..8usize,
    )
        .prop_map(|(raw, targets, page_size)| Dataset {
            quads: raw.into_iter().map(|(g, s, p, o)| (g, Triple::new(s, p, o))).collect(),
            targets,
            page_size,
        })
}

pub fn seed(ds: &Dataset, store: &Store) {
    let mut graphs: BTreeMap<usize, Graph> = BTreeMap::new();
    for (g, t) in &ds.quads {
        graphs.entry(*g).or_default().insert(t.clone());
    }
    for (g, content) in graphs {
        store.put_graph(&data_graph(g), &content).unwrap();
    }
}

pub type Counts = Vec<(String, usize)>;

/// Counts straight from the generated quads, sorted by count then IRI.
pub fn oracle_stats(ds: &Dataset) -> (Counts, Counts) {
    let union: BTreeSet<&Triple> = ds
        .quads
        .iter()
        .filter(|(g, _)| ds.targets.contains(g))
        .map(|(_, t)| t)
        .collect();
    let mut classes: BTreeMap<String, BTreeSet<&Subject>> = BTreeMap::new();
    let mut props: BTreeMap<String, usize> = BTreeMap::new();
    for t in &union {
        *props.entry(t.predicate.as_str().to_owned()).or_default() += 1;
        if t.predicate.as_str() == rdf::TYPE {
            if let Term::Iri(c) = &t.object {
                classes.entry(c.as_str().to_owned()).or_default().insert(&t.subject);
            }
        }
    }
    let sort = |mut v: Vec<(String, usize)>| {
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    };
    (
        sort(classes.into_iter().map(|(c, s)| (c, s.len())).collect()),
        sort(props.into_iter().collect()),
    )
}

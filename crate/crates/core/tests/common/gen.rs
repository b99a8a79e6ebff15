//! Proptest strategies for small graphs over a fixed vocabulary.
#![allow(dead_code)]

use ontohub_core::{BlankNode, Graph, Iri, Literal, Subject, Term, Triple};
use proptest::prelude::*;

fn iri(s: &str) -> Iri {
    Iri::parse(s).unwrap()
}

fn blank(l: &str) -> BlankNode {
    BlankNode::new(l).unwrap()
}

const IRIS: &[&str] = &[
    "http://ex.org/a",
    "http://ex.org/b",
    "http://ex.org/v#p",
    "http://ex.org/v#q",
    "http://ex.org/dotted.name",
    "http://ex.org/odd%20path",
    "urn:isbn:0451450523",
    "http://ex.org/ünïcode",
    "http://ex.org/",
    "http://ex.org/v#123",
];

const PREDICATES: &[&str] = &[
    "http://ex.org/v#p",
    "http://ex.org/v#q",
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#type",
    "http://ex.org/rel",
    "http://purl.org/dc/terms/title",
];

const STRINGS: &[&str] = &[
    "",
    "plain",
    "with \"quotes\"",
    "back\\slash",
    "multi\nline\r\n",
    "tab\there",
    "孔子",
    "ends with quote\"",
    "'single'",
    "\u{1F600} emoji",
    "\u{7}bell",
];

fn arb_iri() -> impl Strategy<Value = Iri> {
    prop::sample::select(IRIS).prop_map(iri)
}

fn arb_blank() -> impl Strategy<Value = BlankNode> {
    (0..4u8).prop_map(|i| blank(&format!("b{i}")))
}

fn arb_literal() -> impl Strategy<Value = Literal> {
    prop_oneof![
        prop::sample::select(STRINGS).prop_map(Literal::string),
        (
            prop::sample::select(STRINGS),
            prop::sample::select(&["en", "zh-Hans", "fr-CA"][..])
        )
            .prop_map(|(s, l)| Literal::lang(s, l).unwrap()),
        (
            prop::sample::select(&["1", "01", "-5", "3.14", "true", "x"][..]),
            prop::sample::select(
                &[
                    "http://www.w3.org/2001/XMLSchema#integer",
                    "http://www.w3.org/2001/XMLSchema#decimal",
                    "http://www.w3.org/2001/XMLSchema#boolean",
                    "http://ex.org/v#custom",
                ][..]
            )
        )
            .prop_map(|(s, dt)| Literal::typed(s, iri(dt)).unwrap()),
    ]
}

fn arb_subject() -> impl Strategy<Value = Subject> {
    prop_oneof![3 => arb_iri().prop_map(Subject::Iri), 1 => arb_blank().prop_map(Subject::Blank)]
}

fn arb_object() -> impl Strategy<Value = Term> {
    prop_oneof![
        2 => arb_iri().prop_map(Term::Iri),
        1 => arb_blank().prop_map(Term::Blank),
        2 => arb_literal().prop_map(Term::Literal),
    ]
}

pub fn arb_triple() -> impl Strategy<Value = Triple> {
    (
        arb_subject(),
        prop::sample::select(PREDICATES).prop_map(iri),
        arb_object(),
    )
        .prop_map(|(s, p, o)| Triple::new(s, p, o))
}

/// Small graphs over a fixed vocabulary, with a random subset of prefixes.
pub fn arb_graph() -> impl Strategy<Value = Graph> {
    (
        prop::collection::vec(arb_triple(), 0..14),
        prop::collection::vec(
            prop::sample::select(
                &[
                    ("ex", "http://ex.org/"),
                    ("v", "http://ex.org/v#"),
                    ("dc", "http://purl.org/dc/terms/"),
                    ("", "http://ex.org/v#"),
                    ("rdf", "http://www.w3.org/1999/02/22-rdf-syntax-ns#"),
                ][..],
            ),
            0..4,
        ),
    )
        .prop_map(|(triples, prefixes)| {
            let mut g: Graph = triples.into_iter().collect();
            for (p, ns) in prefixes {
                g.set_prefix(p, ns);
            }
            g
        })
}

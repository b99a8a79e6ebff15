//! Independent readers for the write-only syntaxes.

use ontohub_core::{BlankNode, Graph, Iri, Literal, Subject, Term, Triple};

fn iri(s: &str) -> Iri {
    Iri::parse(s).unwrap()
}

fn blank(l: &str) -> BlankNode {
    BlankNode::new(l).unwrap()
}

/// Reads the striped RDF/XML shape the serializer emits. Independent of the
/// crate's own readers.
pub fn read_rdfxml(xml: &str) -> Graph {
    const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    let doc = roxmltree::Document::parse(xml).expect("well-formed XML");
    let root = doc.root_element();
    assert_eq!(root.tag_name().namespace(), Some(RDF));
    assert_eq!(root.tag_name().name(), "RDF");
    let mut g = Graph::new();
    for desc in root.children().filter(|n| n.is_element()) {
        assert_eq!(desc.tag_name().name(), "Description");
        let subject = match (desc.attribute((RDF, "about")), desc.attribute((RDF, "nodeID"))) {
            (Some(about), None) => Subject::Iri(iri(about)),
            (None, Some(id)) => Subject::Blank(blank(id)),
            other => panic!("bad description {other:?}"),
        };
        for prop in desc.children().filter(|n| n.is_element()) {
            let predicate = iri(&format!(
                "{}{}",
                prop.tag_name().namespace().unwrap(),
                prop.tag_name().name()
            ));
            let object = if let Some(r) = prop.attribute((RDF, "resource")) {
                Term::Iri(iri(r))
            } else if let Some(id) = prop.attribute((RDF, "nodeID")) {
                Term::Blank(blank(id))
            } else {
                let text = prop.text().unwrap_or("").to_owned();
                if let Some(lang) = prop.attribute(("http://www.w3.org/XML/1998/namespace", "lang")) {
                    Term::Literal(Literal::lang(text, lang).unwrap())
                } else if let Some(dt) = prop.attribute((RDF, "datatype")) {
                    Term::Literal(Literal::typed(text, iri(dt)).unwrap())
                } else {
                    Term::Literal(Literal::string(text))
                }
            };
            g.insert(Triple::new(subject.clone(), predicate, object));
        }
    }
    g
}

pub fn read_rdfjson(bytes: &[u8]) -> Graph {
    let doc: serde_json::Value = serde_json::from_slice(bytes).expect("valid JSON");
    let mut g = Graph::new();
    let node = |v: &str| -> Option<BlankNode> { v.strip_prefix("_:").map(blank) };
    for (s, preds) in doc.as_object().expect("top-level object") {
        let subject = match node(s) {
            Some(b) => Subject::Blank(b),
            None => Subject::Iri(iri(s)),
        };
        for (p, objects) in preds.as_object().expect("predicate map") {
            for o in objects.as_array().expect("object array") {
                let value = o["value"].as_str().unwrap();
                let object = match o["type"].as_str().unwrap() {
                    "uri" => Term::Iri(iri(value)),
                    "bnode" => Term::Blank(node(value).expect("_: prefix")),
                    "literal" => match (o.get("lang"), o.get("datatype")) {
                        (Some(l), None) => Term::Literal(Literal::lang(value, l.as_str().unwrap()).unwrap()),
                        (None, Some(d)) => Term::Literal(Literal::typed(value, iri(d.as_str().unwrap())).unwrap()),
                        (None, None) => Term::Literal(Literal::string(value)),
                        _ => panic!("literal with both lang and datatype"),
                    },
                    other => panic!("unknown type {other}"),
                };
                g.insert(Triple::new(subject.clone(), iri(p), object));
            }
        }
    }
    g
}

//! RDF/JSON: `{ subject: { predicate: [ object, ... ] } }`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::model::{Graph, Subject, Term};
use crate::vocab::xsd;

#[derive(Serialize)]
struct JsonObject<'a> {
    #[serde(rename = "type")]
    kind: &'static str,
    value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    lang: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    datatype: Option<&'a str>,
}

fn subject_key(s: &Subject) -> String {
    match s {
        Subject::Iri(i) => i.as_str().to_owned(),
        Subject::Blank(b) => format!("_:{}", b.label()),
    }
}

fn object(t: &Term) -> JsonObject<'_> {
    match t {
        Term::Iri(i) => JsonObject {
            kind: "uri",
            value: i.as_str().to_owned(),
            lang: None,
            datatype: None,
        },
        Term::Blank(b) => JsonObject {
            kind: "bnode",
            value: format!("_:{}", b.label()),
            lang: None,
            datatype: None,
        },
        Term::Literal(l) => JsonObject {
            kind: "literal",
            value: l.lexical().to_owned(),
            lang: l.language(),
            datatype: (l.language().is_none() && l.datatype().as_str() != xsd::STRING).then(|| l.datatype().as_str()),
        },
    }
}

pub(super) fn write(g: &Graph) -> Vec<u8> {
    let mut doc: BTreeMap<String, BTreeMap<&str, Vec<JsonObject<'_>>>> = BTreeMap::new();
    for t in g.iter() {
        doc.entry(subject_key(&t.subject))
            .or_default()
            .entry(t.predicate.as_str())
            .or_default()
            .push(object(&t.object));
    }
    let mut out = serde_json::to_vec_pretty(&doc).expect("string-keyed maps always serialize");
    out.push(b'\n');
    out
}

//! Class and property extraction from an ontology graph.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::model::{Graph, Iri, Subject, Term};
use crate::vocab::{owl, rdf, rdfs};

pub const CLASS_TYPES: [&str; 2] = [owl::CLASS, rdfs::CLASS];
pub const PROPERTY_TYPES: [&str; 4] = [
    owl::OBJECT_PROPERTY,
    owl::DATATYPE_PROPERTY,
    owl::ANNOTATION_PROPERTY,
    rdf::PROPERTY,
];

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SchemaTerms {
    pub classes: BTreeSet<Iri>,
    pub properties: BTreeSet<Iri>,
}

fn typed_iris(g: &Graph, types: &[&str]) -> BTreeSet<Iri> {
    g.iter()
        .filter(|t| t.predicate.as_str() == rdf::TYPE)
        .filter(|t| t.object.as_iri().is_some_and(|o| types.contains(&o.as_str())))
        .filter_map(|t| t.subject.as_iri().cloned())
        .collect()
}

/// IRI objects of `predicate` whose subject is in `from`.
fn supers(g: &Graph, predicate: &str, from: &BTreeSet<Iri>) -> BTreeSet<Iri> {
    g.iter()
        .filter(|t| t.predicate.as_str() == predicate)
        .filter(|t| matches!(&t.subject, Subject::Iri(s) if from.contains(s)))
        .filter_map(|t| t.object.as_iri().cloned())
        .collect()
}

/// Declared classes and properties plus the direct superclasses and
/// superproperties of declared terms.
pub fn extract_schema_terms(g: &Graph) -> SchemaTerms {
    let mut classes = typed_iris(g, &CLASS_TYPES);
    classes.extend(supers(g, rdfs::SUB_CLASS_OF, &classes.clone()));
    let mut properties = typed_iris(g, &PROPERTY_TYPES);
    properties.extend(supers(g, rdfs::SUB_PROPERTY_OF, &properties.clone()));
    SchemaTerms { classes, properties }
}

/// Display label: an untagged label first, then English, then the smallest
/// (language, text) pair.
pub fn preferred_label(g: &Graph, iri: &Iri) -> Option<String> {
    preferred_literal(g, iri, rdfs::LABEL)
}

pub fn preferred_literal(g: &Graph, iri: &Iri, predicate: &str) -> Option<String> {
    let s = Subject::Iri(iri.clone());
    g.objects(&s, predicate)
        .filter_map(Term::as_literal)
        .min_by_key(|l| {
            let rank = match l.language() {
                None => 0,
                Some(tag) if tag.eq_ignore_ascii_case("en") => 1,
                Some(_) => 2,
            };
            (rank, l.language().map(str::to_ascii_lowercase), l.lexical().to_owned())
        })
        .map(|l| l.lexical().to_owned())
}

/// Sorted IRI objects of `(iri, predicate, ?)`.
pub fn iri_objects(g: &Graph, iri: &Iri, predicate: &str) -> Vec<Iri> {
    let s = Subject::Iri(iri.clone());
    let mut v: Vec<Iri> = g.objects(&s, predicate).filter_map(Term::as_iri).cloned().collect();
    v.sort();
    v.dedup();
    v
}

//! Deterministic CBDB-style instance data spread over 17 named graphs.
//!
//! Usage shape: rdf:type > rdfs:label > shl:temporal > every other property;
//! nine classes, all declared by the cbdb fixture ontology; two properties,
//! shl:relationObject and shl:nameType, that the ontology does not declare.
#![allow(dead_code)]

use ontohub_core::vocab::{rdf, rdfs, xsd};
use ontohub_core::{Graph, Iri, Literal, Store, Term, Triple};

pub const SHL: &str = "http://www.library.sh.cn/ontology/";
pub const DATA: &str = "http://cbdb.example.org/";

pub const GRAPH_NAMES: [&str; 17] = [
    "person",
    "name",
    "temporal",
    "relationship",
    "place",
    "office",
    "event",
    "address",
    "text",
    "kinship",
    "posting",
    "biography",
    "entry",
    "status",
    "association",
    "writing",
    "misc",
];

pub const CLASSES: [&str; 9] = [
    "Person",
    "Name",
    "Temporal",
    "Relationship",
    "Place",
    "Office",
    "Event",
    "Address",
    "Text",
];

/// Entity counts per class, in `CLASSES` order.
const SIZES: [usize; 9] = [40, 40, 30, 20, 10, 10, 20, 15, 15];

pub fn shl(local: &str) -> Iri {
    Iri::parse(&format!("{SHL}{local}")).unwrap()
}

pub fn graph_iri(name: &str) -> Iri {
    Iri::parse(&format!("{DATA}graph/{name}")).unwrap()
}

pub fn graph_iris() -> Vec<Iri> {
    GRAPH_NAMES.iter().map(|n| graph_iri(n)).collect()
}

fn entity(class: usize, n: usize) -> Iri {
    Iri::parse(&format!("{DATA}{}/{n}", CLASSES[class].to_lowercase())).unwrap()
}

fn text(s: String) -> Term {
    Term::Literal(Literal::string(s))
}

/// The seventeen graphs with their triples.
pub fn dataset() -> Vec<(Iri, Graph)> {
    let mut graphs: Vec<Graph> = vec![Graph::new(); GRAPH_NAMES.len()];
    let ty = Iri::parse(rdf::TYPE).unwrap();
    let label = Iri::parse(rdfs::LABEL).unwrap();
    let [person, name, temporal, relationship, place, office, event, address, written] = [0, 1, 2, 3, 4, 5, 6, 7, 8];
    for (k, class) in CLASSES.iter().enumerate() {
        for n in 0..SIZES[k] {
            let s = entity(k, n);
            let g = &mut graphs[(k * 2 + n % 2) % GRAPH_NAMES.len()];
            let mut add = |p: Iri, o: Term| {
                g.insert(Triple::new(s.clone(), p, o));
            };
            add(ty.clone(), Term::Iri(shl(class)));
            if k != temporal {
                add(label.clone(), text(format!("{class} {n}")));
            }
            match k {
                _ if k == person => {
                    add(shl("name"), Term::Iri(entity(name, n)));
                    add(shl("temporal"), Term::Iri(entity(temporal, n % SIZES[temporal])));
                    add(shl("gender"), text(if n % 3 == 0 { "female" } else { "male" }.into()));
                    if n < SIZES[office] {
                        add(shl("office"), Term::Iri(entity(office, n)));
                    }
                    if n < SIZES[event] {
                        add(shl("event"), Term::Iri(entity(event, n)));
                    }
                    if n < SIZES[address] {
                        add(shl("address"), Term::Iri(entity(address, n)));
                    }
                    if n < SIZES[written] {
                        add(shl("text"), Term::Iri(entity(written, n)));
                    }
                    if n < SIZES[relationship] {
                        add(shl("relation"), Term::Iri(entity(relationship, n)));
                    }
                }
                _ if k == name => {
                    add(
                        shl("nameType"),
                        text(if n % 4 == 0 { "courtesy" } else { "given" }.into()),
                    );
                }
                _ if k == temporal => {
                    let year = Literal::typed((960 + n * 7).to_string(), Iri::parse(xsd::INTEGER).unwrap()).unwrap();
                    add(shl("year"), Term::Literal(year));
                }
                _ if k == relationship => {
                    add(shl("relationSubject"), Term::Iri(entity(person, n)));
                    add(
                        shl("relationObject"),
                        Term::Iri(entity(person, (n + 1) % SIZES[person])),
                    );
                    add(shl("temporal"), Term::Iri(entity(temporal, (n + 3) % SIZES[temporal])));
                }
                _ if k == event => {
                    add(shl("place"), Term::Iri(entity(place, n % SIZES[place])));
                    add(shl("temporal"), Term::Iri(entity(temporal, (n + 5) % SIZES[temporal])));
                }
                _ if k == address => {
                    add(shl("place"), Term::Iri(entity(place, n % SIZES[place])));
                }
                _ if k == written => {
                    add(shl("temporal"), Term::Iri(entity(temporal, (n + 7) % SIZES[temporal])));
                }
                _ => {}
            }
        }
    }
    graph_iris().into_iter().zip(graphs).collect()
}

pub fn seed(store: &Store) {
    for (name, g) in dataset() {
        store.put_graph(&name, &g).unwrap();
    }
}

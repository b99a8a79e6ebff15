//! Random subclass graphs over at most 30 classes, cycles allowed, and
//! brute-force answers for the hierarchy queries.

use std::collections::BTreeSet;

use ontohub_core::vocab::{owl, rdf, rdfs};
use ontohub_core::{BlankNode, Graph, Iri, Term, Triple};
use proptest::prelude::*;

fn iri(s: &str) -> Iri {
    Iri::parse(s).unwrap()
}

fn ex(local: &str) -> Iri {
    iri(&format!("http://ex.org/{local}"))
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub graph: Graph,
    pub classes: usize,
}

pub fn class(i: usize) -> Iri {
    ex(&format!("C{i:02}"))
}

pub fn random_fixture() -> impl Strategy<Value = Fixture> {
    (1usize..=30).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec((0..n, 0..n), 0..(n * 3 / 2 + 1)),
            prop::collection::vec((0..6usize, 0..n), 0..10),
            prop::collection::vec(0..n, 0..3),
            Just(n),
        )
            .prop_map(|(declared, edges, domains, blank_supers, n)| {
                let mut g = Graph::new();
                for (i, d) in declared.iter().enumerate() {
                    if *d {
                        let ty = if i % 3 == 0 { rdfs::CLASS } else { owl::CLASS };
                        g.insert(Triple::new(class(i), iri(ty), iri(ty)));
                        g.insert(Triple::new(class(i), iri(rdf::TYPE), iri(ty)));
                    }
                }
                for (a, b) in edges {
                    g.insert(Triple::new(class(a), iri(rdfs::SUB_CLASS_OF), class(b)));
                }
                for (p, c) in domains {
                    g.insert(Triple::new(ex(&format!("p{p}")), iri(rdfs::DOMAIN), class(c)));
                }
                for (k, c) in blank_supers.into_iter().enumerate() {
                    let b = BlankNode::new(&format!("r{k}")).unwrap();
                    g.insert(Triple::new(class(c), iri(rdfs::SUB_CLASS_OF), b.clone()));
                    g.insert(Triple::new(b, iri(rdf::TYPE), iri(owl::CLASS)));
                }
                Fixture { graph: g, classes: n }
            })
    })
}

/// Subclass relation as a plain term adjacency list.
pub fn edges(g: &Graph) -> Vec<(Term, Term)> {
    g.iter()
        .filter(|t| t.predicate.as_str() == rdfs::SUB_CLASS_OF)
        .map(|t| (Term::from(t.subject.clone()), t.object.clone()))
        .collect()
}

pub fn oracle_top_level(g: &Graph) -> Vec<Iri> {
    let class_types = [owl::CLASS, rdfs::CLASS];
    let mut set: BTreeSet<Term> = g
        .iter()
        .filter(|t| t.predicate.as_str() == rdf::TYPE)
        .filter(|t| matches!(&t.object, Term::Iri(o) if class_types.contains(&o.as_str())))
        .map(|t| Term::from(t.subject.clone()))
        .filter(|t| matches!(t, Term::Iri(_)))
        .collect();
    let e = edges(g);
    // fixed point of the superclass closure
    loop {
        let before = set.len();
        for (a, b) in &e {
            if set.contains(a) {
                set.insert(b.clone());
            }
        }
        if set.len() == before {
            break;
        }
    }
    let mut out: Vec<Iri> = set
        .into_iter()
        .filter(|c| !e.iter().any(|(a, _)| a == c))
        .filter_map(|t| t.as_iri().cloned())
        .collect();
    out.sort_by(|a, b| a.as_str().cmp(b.as_str()));
    out
}

pub fn oracle_reachable(g: &Graph, roots: &[Iri]) -> BTreeSet<Iri> {
    let mut set: BTreeSet<Iri> = roots.iter().cloned().collect();
    let e: Vec<(Iri, Iri)> = edges(g)
        .into_iter()
        .filter_map(|(a, b)| Some((a.as_iri()?.clone(), b.as_iri()?.clone())))
        .collect();
    loop {
        let before = set.len();
        for (child, parent) in &e {
            if set.contains(parent) {
                set.insert(child.clone());
            }
        }
        if set.len() == before {
            return set;
        }
    }
}

/// All-pairs shortest subclass distances by Floyd-Warshall over class indices.
pub fn oracle_distances(n: usize, g: &Graph) -> Vec<Vec<Option<usize>>> {
    let mut d = vec![vec![None; n]; n];
    let index = |i: &Iri| -> Option<usize> { i.as_str().strip_prefix("http://ex.org/C")?.parse().ok() };
    for (a, b) in edges(g) {
        if let (Some(a), Some(b)) = (a.as_iri().and_then(index), b.as_iri().and_then(index)) {
            d[a][b] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(x), Some(y)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|cur| x + y < cur) {
                        d[i][j] = Some(x + y);
                    }
                }
            }
        }
    }
    d
}

pub fn has_domain_property(g: &Graph, c: &Iri) -> bool {
    g.iter()
        .any(|t| t.predicate.as_str() == rdfs::DOMAIN && t.object == Term::Iri(c.clone()))
}

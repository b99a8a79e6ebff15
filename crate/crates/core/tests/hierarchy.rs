mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::subclass::*;
use common::*;
use ontohub_core::hierarchy::{
    class_tree, declared_properties, inherited_properties, list_view, subclass_children, top_level_classes, tree_text,
    vowl_export, ClassTreeNode, PropertyKind,
};
use ontohub_core::schema::extract_schema_terms;
use ontohub_core::vocab::{owl, rdf, rdfs};
use ontohub_core::{Graph, Iri, Subject, Term, Triple};
use proptest::prelude::*;

const SHL: &str = "http://www.library.sh.cn/ontology/";

fn shl(l: &str) -> Iri {
    iri(&format!("{SHL}{l}"))
}

fn iris(v: Vec<ontohub_core::hierarchy::LabeledIri>) -> Vec<String> {
    v.into_iter().map(|l| l.iri.as_str().to_owned()).collect()
}

fn flatten(forest: &[ClassTreeNode]) -> Vec<(&ClassTreeNode, usize)> {
    let mut out = Vec::new();
    for root in forest {
        root.walk(&mut |n, d| out.push((n, d)));
    }
    out
}

#[test]
fn fixture_roots() {
    let g = fixture("shlnames.ttl");
    assert_eq!(
        iris(top_level_classes(&g)),
        [
            "http://www.geonames.org/ontology#Feature",
            "http://www.library.sh.cn/ontology/Agent",
            "http://www.w3.org/2000/01/rdf-schema#Resource",
            "http://www.w3.org/2003/01/geo/wgs84_pos#SpatialThing",
            "http://www.w3.org/ns/prov#Activity",
            "http://www.w3.org/ns/prov#Location",
        ]
    );
}

#[test]
fn fixture_children() {
    let g = fixture("shlnames.ttl");
    assert_eq!(
        iris(subclass_children(&g, &iri(rdfs::RESOURCE))),
        [
            "http://www.library.sh.cn/ontology/Resource",
            "http://www.w3.org/2006/time#ProperInterval",
            "http://xmlns.com/foaf/0.1/Agent",
            "http://xmlns.com/foaf/0.1/Document",
            "http://xmlns.com/foaf/0.1/Person",
        ]
    );
    assert!(subclass_children(&g, &shl("Name")).is_empty());
    let agent_children = subclass_children(&g, &shl("Agent"));
    assert_eq!(agent_children[0].label.as_deref(), Some("机构"));
}

#[test]
fn person_sits_under_both_parents() {
    let g = fixture("shlnames.ttl");
    let forest = class_tree(&g);
    let parents: BTreeSet<String> = flatten(&forest)
        .iter()
        .flat_map(|(n, _)| {
            n.children
                .iter()
                .filter(|c| c.iri == shl("Person"))
                .map(|_| n.iri.as_str().to_owned())
        })
        .collect();
    assert_eq!(
        parents,
        BTreeSet::from([format!("{SHL}Agent"), "http://xmlns.com/foaf/0.1/Person".to_owned()])
    );
    assert!(tree_text(&forest).contains("\n  http://www.library.sh.cn/ontology/Person \"Person\"\n"));
}

#[test]
fn person_properties_and_inheritance() {
    let g = fixture("shlnames.ttl");
    let declared = declared_properties(&g, &shl("Person"));
    let names: Vec<&str> = declared.iter().map(|p| p.iri.as_str()).collect();
    assert_eq!(
        names,
        [
            "http://purl.org/vocab/relationship/childOf",
            "http://purl.org/vocab/relationship/friendOf",
            "http://purl.org/vocab/relationship/influenceBy",
        ]
    );
    for p in &declared {
        assert_eq!(p.kind, PropertyKind::ObjectProperty);
        assert_eq!(p.domain, Some(shl("Person")));
        assert_eq!(p.range, Some(shl("Person")));
    }
    assert_eq!(declared[0].label.as_deref(), Some("父母"));

    let levels = inherited_properties(&g, &shl("Person"));
    let summary: Vec<(String, usize, Vec<String>)> = levels
        .iter()
        .map(|l| {
            (
                l.ancestor.as_str().to_owned(),
                l.distance,
                l.properties.iter().map(|p| p.iri.as_str().to_owned()).collect(),
            )
        })
        .collect();
    assert_eq!(
        summary,
        [
            (format!("{SHL}Agent"), 1, vec![format!("{SHL}name")]),
            (rdfs::RESOURCE.to_owned(), 2, vec![format!("{SHL}identifier")]),
        ]
    );
    assert_eq!(levels[0].properties[0].range, Some(shl("Name")));
    assert!(inherited_properties(&g, &shl("Agent")).is_empty());
}

#[test]
fn list_view_of_the_fixture() {
    let g = fixture("shlnames.ttl");
    let lv = list_view(&g);
    let person = lv.classes.iter().find(|p| p.iri == shl("Person")).unwrap();
    assert_eq!(person.parents, [shl("Agent"), iri("http://xmlns.com/foaf/0.1/Person")]);
    assert_eq!(person.properties.len(), 3);
    // rdfs:label enters as the superproperty of shl:nameValue
    assert_eq!(lv.no_domain, [shl("relatedResource"), iri(rdfs::LABEL)]);
    let html = lv.to_html("shlnames");
    assert!(html.contains("Properties with no domain"));
    assert!(html.contains("受...影响"));
    assert_eq!(html, list_view(&g).to_html("shlnames"));

    // every extracted term lands in exactly one index
    let terms = extract_schema_terms(&g);
    let class_index: BTreeSet<Iri> = lv.classes.iter().map(|p| p.iri.clone()).collect();
    let prop_index: BTreeSet<Iri> = lv.properties.iter().map(|p| p.iri.clone()).collect();
    assert!(class_index.is_disjoint(&prop_index));
    let all: BTreeSet<Iri> = terms.classes.union(&terms.properties).cloned().collect();
    assert_eq!(class_index.union(&prop_index).cloned().collect::<BTreeSet<_>>(), all);
}

#[test]
fn vowl_self_loop_and_counts() {
    let g = fixture("shlnames.ttl");
    let doc = vowl_export(&g);
    assert_eq!(doc.class.len(), extract_schema_terms(&g).classes.len());
    let person = doc.class.iter().find(|c| c.iri == shl("Person")).unwrap().id;
    let child_of = doc
        .property
        .iter()
        .find(|p| p.iri.as_str() == "http://purl.org/vocab/relationship/childOf")
        .unwrap();
    assert_eq!((child_of.domain, child_of.range), (Some(person), Some(person)));
    let identifier = doc.property.iter().find(|p| p.iri == shl("identifier")).unwrap();
    assert_eq!(
        doc.datatype[identifier.range.unwrap()].iri.as_str(),
        "http://www.w3.org/2001/XMLSchema#string"
    );
    assert!(doc.property.iter().all(|p| p.iri != shl("relatedResource")));
    assert_eq!(
        serde_json::to_string(&doc).unwrap(),
        serde_json::to_string(&vowl_export(&g)).unwrap()
    );
}

#[test]
fn diamond_ancestor_appears_once_at_distance_two() {
    let mut g = Graph::new();
    let sub = |g: &mut Graph, a: &str, b: &str| {
        g.insert(Triple::new(ex(a), iri(rdfs::SUB_CLASS_OF), ex(b)));
    };
    sub(&mut g, "D", "B");
    sub(&mut g, "D", "C");
    sub(&mut g, "B", "A");
    sub(&mut g, "C", "A");
    g.insert(Triple::new(ex("p"), iri(rdfs::DOMAIN), ex("A")));
    let levels = inherited_properties(&g, &ex("D"));
    assert_eq!(levels.len(), 1);
    assert_eq!((levels[0].ancestor.clone(), levels[0].distance), (ex("A"), 2));
}

#[test]
fn property_with_two_domains_is_listed_under_both() {
    let mut g = Graph::new();
    g.insert(Triple::new(ex("p"), iri(rdfs::DOMAIN), ex("A")));
    g.insert(Triple::new(ex("p"), iri(rdfs::DOMAIN), ex("B")));
    assert_eq!(declared_properties(&g, &ex("A")).len(), 1);
    assert_eq!(declared_properties(&g, &ex("B")).len(), 1);
    assert!(declared_properties(&g, &ex("C")).is_empty());
}

#[test]
fn pure_two_cycle_has_no_roots() {
    let mut g = Graph::new();
    g.insert(Triple::new(ex("A"), iri(rdfs::SUB_CLASS_OF), ex("B")));
    g.insert(Triple::new(ex("B"), iri(rdfs::SUB_CLASS_OF), ex("A")));
    g.insert(Triple::new(ex("A"), iri(rdf::TYPE), iri(owl::CLASS)));
    assert!(top_level_classes(&g).is_empty());
    assert!(class_tree(&g).is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(160))]

    #[test]
    fn top_level_matches_oracle(f in random_fixture()) {
        let got: Vec<Iri> = top_level_classes(&f.graph).into_iter().map(|l| l.iri).collect();
        prop_assert_eq!(&got, &oracle_top_level(&f.graph));
        for c in &got {
            let s = Subject::Iri(c.clone());
            prop_assert!(f.graph.objects(&s, rdfs::SUB_CLASS_OF).next().is_none());
        }
    }

    #[test]
    fn class_tree_matches_reachability(f in random_fixture()) {
        let forest = class_tree(&f.graph);
        let roots: Vec<Iri> = forest.iter().map(|n| n.iri.clone()).collect();
        prop_assert_eq!(&roots, &oracle_top_level(&f.graph));
        let nodes: BTreeSet<Iri> = flatten(&forest).into_iter().map(|(n, _)| n.iri.clone()).collect();
        prop_assert_eq!(nodes, oracle_reachable(&f.graph, &roots));

        // structural invariants: children sorted and complete, backedges close cycles
        fn check(n: &ClassTreeNode, path: &mut Vec<Iri>, g: &Graph) -> Result<(), TestCaseError> {
            if n.cycle_backedge {
                prop_assert!(path.contains(&n.iri));
                prop_assert!(n.children.is_empty());
                return Ok(());
            }
            prop_assert!(!path.contains(&n.iri));
            let expected: Vec<Iri> = subclass_children(g, &n.iri).into_iter().map(|l| l.iri).collect();
            let got: Vec<Iri> = n.children.iter().map(|c| c.iri.clone()).collect();
            prop_assert_eq!(got, expected);
            path.push(n.iri.clone());
            for c in &n.children {
                check(c, path, g)?;
            }
            path.pop();
            Ok(())
        }
        for root in &forest {
            check(root, &mut Vec::new(), &f.graph)?;
        }
    }

    #[test]
    fn inheritance_distances_match_shortest_paths(f in random_fixture()) {
        let d = oracle_distances(f.classes, &f.graph);
        for (c, row) in d.iter().enumerate() {
            let levels = inherited_properties(&f.graph, &class(c));
            let got: BTreeMap<Iri, usize> = levels.iter().map(|l| (l.ancestor.clone(), l.distance)).collect();
            prop_assert_eq!(got.len(), levels.len());
            let expected: BTreeMap<Iri, usize> = (0..f.classes)
                .filter(|&a| a != c)
                .filter_map(|a| row[a].map(|dist| (class(a), dist)))
                .filter(|(a, _)| has_domain_property(&f.graph, a))
                .collect();
            prop_assert_eq!(got, expected);
            let order: Vec<(usize, String)> = levels.iter().map(|l| (l.distance, l.ancestor.as_str().to_owned())).collect();
            let mut sorted = order.clone();
            sorted.sort();
            prop_assert_eq!(order, sorted);
        }
    }

    #[test]
    fn children_and_domains_match_scans(f in random_fixture()) {
        let mut covered = BTreeSet::new();
        for c in 0..f.classes {
            let c = class(c);
            let expected: BTreeSet<Iri> = f.graph.iter()
                .filter(|t| t.predicate.as_str() == rdfs::SUB_CLASS_OF && t.object == Term::Iri(c.clone()))
                .filter_map(|t| t.subject.as_iri().cloned())
                .collect();
            let got: BTreeSet<Iri> = subclass_children(&f.graph, &c).into_iter().map(|l| l.iri).collect();
            prop_assert_eq!(got, expected);

            let props: BTreeSet<Iri> = declared_properties(&f.graph, &c).into_iter().map(|p| p.iri).collect();
            let expected: BTreeSet<Iri> = f.graph.iter()
                .filter(|t| t.predicate.as_str() == rdfs::DOMAIN && t.object == Term::Iri(c.clone()))
                .filter_map(|t| t.subject.as_iri().cloned())
                .collect();
            prop_assert_eq!(&props, &expected);
            covered.extend(props);
        }
        let with_domain: BTreeSet<Iri> = f.graph.iter()
            .filter(|t| t.predicate.as_str() == rdfs::DOMAIN)
            .filter_map(|t| t.subject.as_iri().cloned())
            .collect();
        prop_assert_eq!(covered, with_domain);
    }

    #[test]
    fn views_are_deterministic_and_complete(f in random_fixture()) {
        let a = serde_json::to_vec(&list_view(&f.graph)).unwrap();
        let b = serde_json::to_vec(&list_view(&f.graph.clone())).unwrap();
        prop_assert_eq!(a, b);
        let terms = extract_schema_terms(&f.graph);
        prop_assert_eq!(vowl_export(&f.graph).class.len(), terms.classes.len());
        prop_assert_eq!(list_view(&f.graph).classes.len(), terms.classes.len());
        prop_assert_eq!(tree_text(&class_tree(&f.graph)), tree_text(&class_tree(&f.graph)));
    }
}

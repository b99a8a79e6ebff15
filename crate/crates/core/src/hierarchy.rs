//! Class hierarchy, property inheritance and the view exports built on them.
//!
//! Subclass edges are `rdfs:subClassOf` triples between IRIs; blank-node
//! superclasses such as OWL restrictions count as edges for the top-level test
//! but never become tree nodes.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write;

use serde::Serialize;

use crate::model::{Graph, Iri, Subject, Term};
use crate::schema::{extract_schema_terms, iri_objects, preferred_label, preferred_literal, CLASS_TYPES};
use crate::vocab::{owl, rdf, rdfs};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LabeledIri {
    pub iri: Iri,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

fn labeled(g: &Graph, iri: Iri) -> LabeledIri {
    LabeledIri {
        label: preferred_label(g, &iri),
        iri,
    }
}

fn sort_by_iri_string(v: &mut [LabeledIri]) {
    v.sort_by(|a, b| a.iri.as_str().cmp(b.iri.as_str()));
}

fn declared_classes(g: &Graph) -> BTreeSet<Iri> {
    g.iter()
        .filter(|t| t.predicate.as_str() == rdf::TYPE)
        .filter(|t| t.object.as_iri().is_some_and(|o| CLASS_TYPES.contains(&o.as_str())))
        .filter_map(|t| t.subject.as_iri().cloned())
        .collect()
}

/// Classes with no outgoing `rdfs:subClassOf` edge, drawn from declared
/// classes and every IRI reachable from them by subclass steps.
pub fn top_level_classes(g: &Graph) -> Vec<LabeledIri> {
    let mut edges: BTreeMap<Term, Vec<Term>> = BTreeMap::new();
    for t in g.iter().filter(|t| t.predicate.as_str() == rdfs::SUB_CLASS_OF) {
        edges
            .entry(Term::from(t.subject.clone()))
            .or_default()
            .push(t.object.clone());
    }
    let mut seen: BTreeSet<Term> = declared_classes(g).into_iter().map(Term::Iri).collect();
    let mut queue: VecDeque<Term> = seen.iter().cloned().collect();
    while let Some(node) = queue.pop_front() {
        for next in edges.get(&node).into_iter().flatten() {
            if seen.insert(next.clone()) {
                queue.push_back(next.clone());
            }
        }
    }
    let mut out: Vec<LabeledIri> = seen
        .into_iter()
        .filter(|t| !edges.contains_key(t))
        .filter_map(|t| match t {
            Term::Iri(i) => Some(labeled(g, i)),
            _ => None,
        })
        .collect();
    sort_by_iri_string(&mut out);
    out
}

/// Direct IRI subclasses of `class`.
pub fn subclass_children(g: &Graph, class: &Iri) -> Vec<LabeledIri> {
    let object = Term::Iri(class.clone());
    let mut out: Vec<LabeledIri> = g
        .subjects(rdfs::SUB_CLASS_OF, &object)
        .filter_map(Subject::as_iri)
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|i| labeled(g, i))
        .collect();
    sort_by_iri_string(&mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClassTreeNode {
    pub iri: Iri,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub children: Vec<ClassTreeNode>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub cycle_backedge: bool,
}

impl ClassTreeNode {
    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a ClassTreeNode, usize)) {
        fn go<'a>(n: &'a ClassTreeNode, depth: usize, visit: &mut impl FnMut(&'a ClassTreeNode, usize)) {
            visit(n, depth);
            for c in &n.children {
                go(c, depth + 1, visit);
            }
        }
        go(self, 0, visit);
    }
}

/// The subclass forest. A class with several parents is repeated under each;
/// a class already on its own root path becomes an unexpanded backedge leaf.
pub fn class_tree(g: &Graph) -> Vec<ClassTreeNode> {
    let mut children: BTreeMap<Iri, Vec<LabeledIri>> = BTreeMap::new();
    let mut child_of = |c: &Iri| -> Vec<LabeledIri> {
        children
            .entry(c.clone())
            .or_insert_with(|| subclass_children(g, c))
            .clone()
    };
    fn expand(
        node: LabeledIri,
        path: &mut Vec<Iri>,
        child_of: &mut dyn FnMut(&Iri) -> Vec<LabeledIri>,
    ) -> ClassTreeNode {
        if path.contains(&node.iri) {
            return ClassTreeNode {
                iri: node.iri,
                label: node.label,
                children: Vec::new(),
                cycle_backedge: true,
            };
        }
        path.push(node.iri.clone());
        let kids = child_of(&node.iri)
            .into_iter()
            .map(|c| expand(c, path, child_of))
            .collect();
        path.pop();
        ClassTreeNode {
            iri: node.iri,
            label: node.label,
            children: kids,
            cycle_backedge: false,
        }
    }
    top_level_classes(g)
        .into_iter()
        .map(|root| expand(root, &mut Vec::new(), &mut child_of))
        .collect()
}

/// Indented text rendering, two spaces per level.
pub fn tree_text(forest: &[ClassTreeNode]) -> String {
    let mut out = String::new();
    for root in forest {
        root.walk(&mut |n, depth| {
            let _ = write!(out, "{:indent$}{}", "", n.iri.as_str(), indent = depth * 2);
            if let Some(l) = &n.label {
                let _ = write!(out, " \"{l}\"");
            }
            if n.cycle_backedge {
                out.push_str(" (cycle)");
            }
            out.push('\n');
        });
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PropertyKind {
    ObjectProperty,
    DatatypeProperty,
    AnnotationProperty,
    PlainProperty,
}

impl PropertyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PropertyKind::ObjectProperty => "object-property",
            PropertyKind::DatatypeProperty => "datatype-property",
            PropertyKind::AnnotationProperty => "annotation-property",
            PropertyKind::PlainProperty => "plain-property",
        }
    }
}

/// Strongest declared kind; undeclared properties are plain.
pub fn property_kind(g: &Graph, p: &Iri) -> PropertyKind {
    let types = iri_objects(g, p, rdf::TYPE);
    let has = |t: &str| types.iter().any(|i| i.as_str() == t);
    if has(owl::OBJECT_PROPERTY) {
        PropertyKind::ObjectProperty
    } else if has(owl::DATATYPE_PROPERTY) {
        PropertyKind::DatatypeProperty
    } else if has(owl::ANNOTATION_PROPERTY) {
        PropertyKind::AnnotationProperty
    } else {
        PropertyKind::PlainProperty
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyEntry {
    pub iri: Iri,
    pub kind: PropertyKind,
    pub sub_property_of: Option<Iri>,
    pub label: Option<String>,
    pub domain: Option<Iri>,
    pub range: Option<Iri>,
}

fn property_entry(g: &Graph, p: &Iri, domain: Option<Iri>) -> PropertyEntry {
    PropertyEntry {
        iri: p.clone(),
        kind: property_kind(g, p),
        sub_property_of: iri_objects(g, p, rdfs::SUB_PROPERTY_OF).into_iter().next(),
        label: preferred_label(g, p),
        domain,
        range: iri_objects(g, p, rdfs::RANGE).into_iter().next(),
    }
}

/// Properties with `class` among their `rdfs:domain` values, by IRI. The
/// entry's domain is `class` itself.
pub fn declared_properties(g: &Graph, class: &Iri) -> Vec<PropertyEntry> {
    let object = Term::Iri(class.clone());
    let props: BTreeSet<Iri> = g
        .subjects(rdfs::DOMAIN, &object)
        .filter_map(Subject::as_iri)
        .cloned()
        .collect();
    props
        .iter()
        .map(|p| property_entry(g, p, Some(class.clone())))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InheritanceLevel {
    pub ancestor: Iri,
    pub distance: usize,
    pub properties: Vec<PropertyEntry>,
}

/// Superclasses of `class` at their minimal distance, keeping those with
/// domain-attached properties; ordered by distance then IRI.
pub fn inherited_properties(g: &Graph, class: &Iri) -> Vec<InheritanceLevel> {
    let mut distance: BTreeMap<Iri, usize> = BTreeMap::from([(class.clone(), 0)]);
    let mut queue = VecDeque::from([class.clone()]);
    while let Some(c) = queue.pop_front() {
        let d = distance[&c];
        for parent in iri_objects(g, &c, rdfs::SUB_CLASS_OF) {
            if !distance.contains_key(&parent) {
                distance.insert(parent.clone(), d + 1);
                queue.push_back(parent);
            }
        }
    }
    let mut levels: Vec<InheritanceLevel> = distance
        .into_iter()
        .filter(|(_, d)| *d > 0)
        .filter_map(|(ancestor, d)| {
            let properties = declared_properties(g, &ancestor);
            (!properties.is_empty()).then_some(InheritanceLevel {
                ancestor,
                distance: d,
                properties,
            })
        })
        .collect();
    levels.sort_by(|a, b| {
        a.distance
            .cmp(&b.distance)
            .then_with(|| a.ancestor.as_str().cmp(b.ancestor.as_str()))
    });
    levels
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermPanel {
    pub iri: Iri,
    pub label: Option<String>,
    pub comment: Option<String>,
    pub types: Vec<Iri>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub domain: Vec<Iri>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub range: Vec<Iri>,
    /// `rdfs:subClassOf` for classes, `rdfs:subPropertyOf` for properties.
    pub parents: Vec<Iri>,
    /// Domain-attached properties; classes only.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub properties: Vec<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ListView {
    pub classes: Vec<TermPanel>,
    pub properties: Vec<TermPanel>,
    /// Properties without any `rdfs:domain`.
    pub no_domain: Vec<Iri>,
}

fn panel(g: &Graph, iri: &Iri, is_class: bool) -> TermPanel {
    TermPanel {
        iri: iri.clone(),
        label: preferred_label(g, iri),
        comment: preferred_literal(g, iri, rdfs::COMMENT),
        types: iri_objects(g, iri, rdf::TYPE),
        domain: if is_class {
            Vec::new()
        } else {
            iri_objects(g, iri, rdfs::DOMAIN)
        },
        range: if is_class {
            Vec::new()
        } else {
            iri_objects(g, iri, rdfs::RANGE)
        },
        parents: iri_objects(
            g,
            iri,
            if is_class {
                rdfs::SUB_CLASS_OF
            } else {
                rdfs::SUB_PROPERTY_OF
            },
        ),
        properties: if is_class {
            declared_properties(g, iri).into_iter().map(|p| p.iri).collect()
        } else {
            Vec::new()
        },
    }
}

/// Whole-vocabulary listing. A term that is both a class and a property is
/// listed once, as a class.
pub fn list_view(g: &Graph) -> ListView {
    let terms = extract_schema_terms(g);
    let properties: Vec<&Iri> = terms
        .properties
        .iter()
        .filter(|p| !terms.classes.contains(*p))
        .collect();
    ListView {
        classes: terms.classes.iter().map(|c| panel(g, c, true)).collect(),
        no_domain: properties
            .iter()
            .filter(|p| iri_objects(g, p, rdfs::DOMAIN).is_empty())
            .map(|p| (*p).clone())
            .collect(),
        properties: properties.into_iter().map(|p| panel(g, p, false)).collect(),
    }
}

fn escape_html(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

fn anchor(iri: &Iri) -> String {
    let mut id = String::from("t-");
    for b in iri.as_str().bytes() {
        if b.is_ascii_alphanumeric() {
            id.push(b as char);
        } else {
            let _ = write!(id, "_{b:02x}");
        }
    }
    id
}

impl ListView {
    pub fn to_html(&self, title: &str) -> String {
        let mut h = String::new();
        let title = escape_html(title);
        let _ = write!(
            h,
            "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>{title}</title>\n</head>\n<body>\n<h1>{title}</h1>\n"
        );
        let index = |h: &mut String, heading: &str, items: &mut dyn Iterator<Item = (&Iri, Option<&String>)>| {
            let _ = writeln!(h, "<h2>{heading}</h2>\n<ol>");
            for (iri, label) in items {
                let text = escape_html(label.map(String::as_str).unwrap_or(iri.local_name()));
                let _ = writeln!(h, "<li><a href=\"#{}\">{text}</a></li>", anchor(iri));
            }
            h.push_str("</ol>\n");
        };
        index(
            &mut h,
            "Classes",
            &mut self.classes.iter().map(|p| (&p.iri, p.label.as_ref())),
        );
        index(
            &mut h,
            "Properties",
            &mut self.properties.iter().map(|p| (&p.iri, p.label.as_ref())),
        );
        index(
            &mut h,
            "Properties with no domain",
            &mut self.no_domain.iter().map(|i| (i, None)),
        );

        let list = |h: &mut String, name: &str, v: &[Iri]| {
            if v.is_empty() {
                return;
            }
            let _ = write!(h, "<dt>{name}</dt><dd>");
            for (i, iri) in v.iter().enumerate() {
                if i > 0 {
                    h.push_str(", ");
                }
                let _ = write!(h, "<a href=\"#{}\">{}</a>", anchor(iri), escape_html(iri.as_str()));
            }
            h.push_str("</dd>\n");
        };
        for (heading, panels, parent_name) in [
            ("Class details", &self.classes, "subClassOf"),
            ("Property details", &self.properties, "subPropertyOf"),
        ] {
            let _ = writeln!(h, "<h2>{heading}</h2>");
            for p in panels {
                let _ = writeln!(
                    h,
                    "<section id=\"{}\">\n<h3>{}</h3>\n<p><code>{}</code></p>\n<dl>",
                    anchor(&p.iri),
                    escape_html(p.label.as_deref().unwrap_or(p.iri.local_name())),
                    escape_html(p.iri.as_str())
                );
                if let Some(c) = &p.comment {
                    let _ = writeln!(h, "<dt>comment</dt><dd>{}</dd>", escape_html(c));
                }
                list(&mut h, "type", &p.types);
                list(&mut h, "domain", &p.domain);
                list(&mut h, "range", &p.range);
                list(&mut h, parent_name, &p.parents);
                list(&mut h, "properties", &p.properties);
                h.push_str("</dl>\n</section>\n");
            }
        }
        h.push_str("</body>\n</html>\n");
        h
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VowlClass {
    pub id: usize,
    pub iri: Iri,
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VowlDatatype {
    pub id: usize,
    /// The range datatype, `rdfs:Literal` when none is declared.
    pub iri: Iri,
    pub property: Iri,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VowlProperty {
    pub iri: Iri,
    pub label: Option<String>,
    pub kind: PropertyKind,
    /// Index into `class`.
    pub domain: Option<usize>,
    /// Index into `class` for object properties, into `datatype` otherwise.
    pub range: Option<usize>,
}

/// Node-link document: classes are nodes, object properties are edges between
/// them and datatype properties hang off their domain as datatype leaves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VowlDocument {
    pub class: Vec<VowlClass>,
    pub datatype: Vec<VowlDatatype>,
    pub property: Vec<VowlProperty>,
}

pub fn vowl_export(g: &Graph) -> VowlDocument {
    let terms = extract_schema_terms(g);
    let class: Vec<VowlClass> = terms
        .classes
        .iter()
        .enumerate()
        .map(|(id, iri)| VowlClass {
            id,
            iri: iri.clone(),
            label: preferred_label(g, iri),
        })
        .collect();
    let index: BTreeMap<&Iri, usize> = terms.classes.iter().enumerate().map(|(i, c)| (c, i)).collect();
    let mut datatype = Vec::new();
    let mut property = Vec::new();
    for p in &terms.properties {
        let kind = property_kind(g, p);
        if !matches!(kind, PropertyKind::ObjectProperty | PropertyKind::DatatypeProperty) {
            continue;
        }
        let label = preferred_label(g, p);
        let domains: Vec<Option<usize>> = {
            let v: Vec<Option<usize>> = iri_objects(g, p, rdfs::DOMAIN)
                .iter()
                .map(|d| index.get(d).copied())
                .collect();
            if v.is_empty() {
                vec![None]
            } else {
                v
            }
        };
        let ranges: Vec<Option<usize>> = if kind == PropertyKind::ObjectProperty {
            let v: Vec<Option<usize>> = iri_objects(g, p, rdfs::RANGE)
                .iter()
                .map(|r| index.get(r).copied())
                .collect();
            if v.is_empty() {
                vec![None]
            } else {
                v
            }
        } else {
            let mut targets = iri_objects(g, p, rdfs::RANGE);
            if targets.is_empty() {
                targets.push(Iri::from_trusted(rdfs::LITERAL));
            }
            targets
                .into_iter()
                .map(|iri| {
                    datatype.push(VowlDatatype {
                        id: datatype.len(),
                        iri,
                        property: p.clone(),
                    });
                    Some(datatype.len() - 1)
                })
                .collect()
        };
        for d in &domains {
            for r in &ranges {
                property.push(VowlProperty {
                    iri: p.clone(),
                    label: label.clone(),
                    kind,
                    domain: *d,
                    range: *r,
                });
            }
        }
    }
    VowlDocument {
        class,
        datatype,
        property,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Triple;

    fn iri(s: &str) -> Iri {
        Iri::parse(&format!("http://ex.org/{s}")).unwrap()
    }

    fn sub(g: &mut Graph, a: &str, b: &str) {
        g.insert(Triple::new(iri(a), Iri::from_trusted(rdfs::SUB_CLASS_OF), iri(b)));
    }

    #[test]
    fn single_class_is_its_own_root() {
        let mut g = Graph::new();
        g.insert(Triple::new(
            iri("A"),
            Iri::from_trusted(rdf::TYPE),
            Iri::from_trusted(owl::CLASS),
        ));
        let roots: Vec<Iri> = top_level_classes(&g).into_iter().map(|l| l.iri).collect();
        assert_eq!(roots, [iri("A")]);
        assert!(subclass_children(&g, &iri("A")).is_empty());
        assert!(inherited_properties(&g, &iri("A")).is_empty());
    }

    #[test]
    fn cycle_below_a_root_terminates() {
        let mut g = Graph::new();
        g.insert(Triple::new(
            iri("A"),
            Iri::from_trusted(rdf::TYPE),
            Iri::from_trusted(owl::CLASS),
        ));
        sub(&mut g, "A", "B");
        sub(&mut g, "B", "A");
        sub(&mut g, "B", "R");
        let forest = class_tree(&g);
        assert_eq!(forest.len(), 1);
        let text = tree_text(&forest);
        assert_eq!(
            text,
            "http://ex.org/R\n  http://ex.org/B\n    http://ex.org/A\n      http://ex.org/B (cycle)\n"
        );
    }

    #[test]
    fn empty_graph_views() {
        let g = Graph::new();
        let lv = list_view(&g);
        assert!(lv.classes.is_empty() && lv.properties.is_empty());
        let v = vowl_export(&g);
        assert!(v.class.is_empty() && v.property.is_empty());
        assert!(lv.to_html("x").contains("<ol>\n</ol>"));
    }
}

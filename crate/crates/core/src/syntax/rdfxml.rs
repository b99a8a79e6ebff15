//! Striped RDF/XML writer: one `rdf:Description` per subject.

use std::collections::BTreeMap;
use std::fmt::Write;

use super::SerializeError;
use crate::model::{is_pn_chars, Graph, Literal, Subject, Term};
use crate::vocab::{rdf, xsd};

fn is_name_start(c: char) -> bool {
    c == '_'
        || c.is_ascii_alphabetic()
        || matches!(c,
            '\u{C0}'..='\u{D6}' | '\u{D8}'..='\u{F6}' | '\u{F8}'..='\u{2FF}'
            | '\u{370}'..='\u{37D}' | '\u{37F}'..='\u{1FFF}' | '\u{200C}'..='\u{200D}'
            | '\u{2070}'..='\u{218F}' | '\u{2C00}'..='\u{2FEF}' | '\u{3001}'..='\u{D7FF}'
            | '\u{F900}'..='\u{FDCF}' | '\u{FDF0}'..='\u{FFFD}' | '\u{10000}'..='\u{EFFFF}')
}

fn is_name_char(c: char) -> bool {
    is_name_start(c)
        || c.is_ascii_digit()
        || matches!(c, '-' | '.' | '\u{B7}' | '\u{300}'..='\u{36F}' | '\u{203F}'..='\u{2040}')
}

fn is_ncname(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(is_name_start) && chars.all(is_name_char)
}

/// Splits a predicate IRI into namespace and the longest trailing NCName.
fn split_predicate(iri: &str) -> Option<(&str, &str)> {
    let mut start = iri.len();
    for (i, c) in iri.char_indices().rev() {
        if is_name_char(c) {
            start = i;
        } else {
            break;
        }
    }
    let tail = &iri[start..];
    let offset = tail.char_indices().find(|(_, c)| is_name_start(*c))?.0;
    let split = start + offset;
    if split == 0 {
        return None;
    }
    Some((&iri[..split], &iri[split..]))
}

fn is_xml_char(c: char) -> bool {
    matches!(c, '\t' | '\n' | '\r' | '\u{20}'..='\u{D7FF}' | '\u{E000}'..='\u{FFFD}' | '\u{10000}'..='\u{10FFFF}')
}

fn escape(out: &mut String, s: &str, attribute: bool) -> Result<(), SerializeError> {
    for c in s.chars() {
        if !is_xml_char(c) {
            return Err(SerializeError::RdfXmlUnencodable(format!(
                "character U+{:04X}",
                c as u32
            )));
        }
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' if attribute => out.push_str("&quot;"),
            '\r' => out.push_str("&#13;"),
            '\n' if attribute => out.push_str("&#10;"),
            '\t' if attribute => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    Ok(())
}

/// Blank labels are prefixed so they always start with a name character.
fn node_id(label: &str) -> String {
    let mut id = String::from("b");
    id.extend(label.chars().map(|c| if is_pn_chars(c) || c == '.' { c } else { '_' }));
    id
}

pub(super) fn write(g: &Graph) -> Result<String, SerializeError> {
    // namespace -> prefix
    let mut namespaces: BTreeMap<String, String> = BTreeMap::new();
    namespaces.insert(rdf::NS.to_owned(), "rdf".to_owned());
    let usable = |p: &str| is_ncname(p) && !p.to_ascii_lowercase().starts_with("xml") && p != "rdf";
    let declared: BTreeMap<&str, &str> = g
        .prefixes()
        .iter()
        .filter(|(p, _)| usable(p))
        .map(|(p, ns)| (ns.as_str(), p.as_str()))
        .collect();
    let mut generated = 0usize;
    for t in g.iter() {
        let (ns, _) = split_predicate(t.predicate.as_str())
            .ok_or_else(|| SerializeError::RdfXmlUnencodable(t.predicate.to_string()))?;
        if namespaces.contains_key(ns) {
            continue;
        }
        let prefix = match declared.get(ns) {
            Some(p) if !namespaces.values().any(|v| v == p) => (*p).to_owned(),
            _ => loop {
                let candidate = format!("ns{generated}");
                generated += 1;
                if !namespaces.values().any(|v| *v == candidate) && !declared.values().any(|v| *v == candidate) {
                    break candidate;
                }
            },
        };
        namespaces.insert(ns.to_owned(), prefix);
    }

    let mut out = String::from("<?xml version=\"1.0\" encoding=\"utf-8\"?>\n<rdf:RDF");
    let mut by_prefix: Vec<(&String, &String)> = namespaces.iter().map(|(ns, p)| (p, ns)).collect();
    by_prefix.sort();
    for (p, ns) in by_prefix {
        let _ = write!(out, "\n    xmlns:{p}=\"");
        escape(&mut out, ns, true)?;
        out.push('"');
    }
    out.push_str(">\n");

    let mut current: Option<&Subject> = None;
    for t in g.iter() {
        if current != Some(&t.subject) {
            if current.is_some() {
                out.push_str("  </rdf:Description>\n");
            }
            match &t.subject {
                Subject::Iri(i) => {
                    out.push_str("  <rdf:Description rdf:about=\"");
                    escape(&mut out, i.as_str(), true)?;
                    out.push_str("\">\n");
                }
                Subject::Blank(b) => {
                    let _ = writeln!(out, "  <rdf:Description rdf:nodeID=\"{}\">", node_id(b.label()));
                }
            }
            current = Some(&t.subject);
        }
        let (ns, local) = split_predicate(t.predicate.as_str()).expect("checked above");
        let qname = format!("{}:{}", namespaces[ns], local);
        match &t.object {
            Term::Iri(i) => {
                let _ = write!(out, "    <{qname} rdf:resource=\"");
                escape(&mut out, i.as_str(), true)?;
                out.push_str("\"/>\n");
            }
            Term::Blank(b) => {
                let _ = writeln!(out, "    <{qname} rdf:nodeID=\"{}\"/>", node_id(b.label()));
            }
            Term::Literal(l) => write_literal(&mut out, &qname, l)?,
        }
    }
    if current.is_some() {
        out.push_str("  </rdf:Description>\n");
    }
    out.push_str("</rdf:RDF>\n");
    Ok(out)
}

fn write_literal(out: &mut String, qname: &str, l: &Literal) -> Result<(), SerializeError> {
    let _ = write!(out, "    <{qname}");
    if let Some(lang) = l.language() {
        let _ = write!(out, " xml:lang=\"{lang}\"");
    } else if l.datatype().as_str() != xsd::STRING {
        out.push_str(" rdf:datatype=\"");
        escape(out, l.datatype().as_str(), true)?;
        out.push('"');
    }
    out.push('>');
    escape(out, l.lexical(), false)?;
    let _ = writeln!(out, "</{qname}>");
    Ok(())
}

//! Turtle writer: one block per subject, predicates and objects in term order.

use std::fmt::Write;

use crate::model::{is_pn_chars, is_pn_chars_base, is_pn_chars_u, Graph, Iri, Literal, Subject, Term};
use crate::vocab::{rdf, xsd};

pub(super) fn write(g: &Graph) -> String {
    let prefixes: Vec<(&str, &str)> = g
        .prefixes()
        .iter()
        .filter(|(p, ns)| is_valid_prefix(p) && Iri::parse(ns).is_ok())
        .map(|(p, ns)| (p.as_str(), ns.as_str()))
        .collect();
    let mut out = String::new();
    for (p, ns) in &prefixes {
        let _ = writeln!(out, "@prefix {p}: <{ns}> .");
    }
    if !prefixes.is_empty() && !g.is_empty() {
        out.push('\n');
    }

    let mut current_subject: Option<&Subject> = None;
    let mut current_predicate: Option<&Iri> = None;
    for t in g.iter() {
        if current_subject == Some(&t.subject) {
            if current_predicate == Some(&t.predicate) {
                out.push_str(" ,\n        ");
            } else {
                out.push_str(" ;\n    ");
                write_predicate(&mut out, &t.predicate, &prefixes);
                out.push(' ');
            }
        } else {
            if current_subject.is_some() {
                out.push_str(" .\n\n");
            }
            write_subject(&mut out, &t.subject, &prefixes);
            out.push_str("\n    ");
            write_predicate(&mut out, &t.predicate, &prefixes);
            out.push(' ');
        }
        write_term(&mut out, &t.object, &prefixes);
        current_subject = Some(&t.subject);
        current_predicate = Some(&t.predicate);
    }
    if current_subject.is_some() {
        out.push_str(" .\n");
    }
    out
}

fn is_valid_prefix(p: &str) -> bool {
    if p.is_empty() {
        return true;
    }
    let chars: Vec<char> = p.chars().collect();
    is_pn_chars_base(chars[0])
        && chars.last().is_some_and(|c| *c != '.')
        && chars[1..].iter().all(|&c| is_pn_chars(c) || c == '.')
}

/// Conservative PN_LOCAL check: no escapes, no dots, no percent signs.
fn is_simple_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if is_pn_chars_u(c) || c.is_ascii_digit() => chars.all(is_pn_chars),
        Some(_) => false,
    }
}

fn compact<'a>(iri: &'a str, prefixes: &[(&'a str, &'a str)]) -> Option<(&'a str, &'a str)> {
    prefixes
        .iter()
        .filter(|(_, ns)| iri.starts_with(ns) && is_simple_local(&iri[ns.len()..]))
        .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(a.0)))
        .map(|(p, ns)| (*p, &iri[ns.len()..]))
}

fn write_iri(out: &mut String, iri: &Iri, prefixes: &[(&str, &str)]) {
    match compact(iri.as_str(), prefixes) {
        Some((p, local)) => {
            let _ = write!(out, "{p}:{local}");
        }
        None => {
            let _ = write!(out, "<{}>", iri.as_str());
        }
    }
}

fn write_predicate(out: &mut String, p: &Iri, prefixes: &[(&str, &str)]) {
    if p.as_str() == rdf::TYPE {
        out.push('a');
    } else {
        write_iri(out, p, prefixes);
    }
}

fn write_subject(out: &mut String, s: &Subject, prefixes: &[(&str, &str)]) {
    match s {
        Subject::Iri(i) => write_iri(out, i, prefixes),
        Subject::Blank(b) => {
            let _ = write!(out, "_:{}", b.label());
        }
    }
}

fn write_term(out: &mut String, t: &Term, prefixes: &[(&str, &str)]) {
    match t {
        Term::Iri(i) => write_iri(out, i, prefixes),
        Term::Blank(b) => {
            let _ = write!(out, "_:{}", b.label());
        }
        Term::Literal(l) => write_literal(out, l, prefixes),
    }
}

fn write_literal(out: &mut String, l: &Literal, prefixes: &[(&str, &str)]) {
    out.push('"');
    escape_string(out, l.lexical());
    out.push('"');
    if let Some(lang) = l.language() {
        let _ = write!(out, "@{lang}");
    } else if l.datatype().as_str() != xsd::STRING {
        out.push_str("^^");
        write_iri(out, l.datatype(), prefixes);
    }
}

pub(super) fn escape_string(out: &mut String, s: &str) {
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
}

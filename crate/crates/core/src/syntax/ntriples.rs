use crate::model::{Graph, Literal, Subject, Term, Triple};
use crate::vocab::xsd;

use super::turtle::escape_string;

/// One statement per line, lines sorted lexicographically.
pub(super) fn write(g: &Graph) -> String {
    let mut lines: Vec<String> = g.iter().map(line).collect();
    lines.sort();
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

pub(crate) fn line(t: &Triple) -> String {
    let mut s = String::new();
    match &t.subject {
        Subject::Iri(i) => push_iri(&mut s, i.as_str()),
        Subject::Blank(b) => {
            s.push_str("_:");
            s.push_str(b.label());
        }
    }
    s.push(' ');
    push_iri(&mut s, t.predicate.as_str());
    s.push(' ');
    push_term(&mut s, &t.object);
    s.push_str(" .");
    s
}

fn push_iri(s: &mut String, iri: &str) {
    s.push('<');
    s.push_str(iri);
    s.push('>');
}

pub(crate) fn push_term(s: &mut String, t: &Term) {
    match t {
        Term::Iri(i) => push_iri(s, i.as_str()),
        Term::Blank(b) => {
            s.push_str("_:");
            s.push_str(b.label());
        }
        Term::Literal(l) => push_literal(s, l),
    }
}

fn push_literal(s: &mut String, l: &Literal) {
    s.push('"');
    escape_string(s, l.lexical());
    s.push('"');
    if let Some(lang) = l.language() {
        s.push('@');
        s.push_str(lang);
    } else if l.datatype().as_str() != xsd::STRING {
        s.push_str("^^");
        push_iri(s, l.datatype().as_str());
    }
}

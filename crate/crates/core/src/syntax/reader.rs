//! Recursive-descent reader for Turtle, with an N-Triples mode that only
//! admits the N-Triples subset of the grammar.

use std::collections::BTreeMap;

use super::resolve::resolve_iri;
use super::{ParseDiagnostic, ParseError};
use crate::model::{
    is_forbidden_iri_char, is_pn_chars, is_pn_chars_base, is_pn_chars_u, is_valid_lang_tag, scheme_len, BlankNode,
    Graph, Iri, Literal, Subject, Term, Triple,
};
use crate::vocab::{rdf, xsd};

pub(super) fn parse(doc: &[u8], base: Option<&Iri>, ntriples: bool) -> Result<Graph, ParseError> {
    let text = match std::str::from_utf8(doc) {
        Ok(t) => t,
        Err(e) => {
            let valid = std::str::from_utf8(&doc[..e.valid_up_to()]).unwrap_or_default();
            let chars: Vec<char> = valid.chars().collect();
            let (line, column) = position(&chars, chars.len());
            return Err(ParseError::Syntax(ParseDiagnostic {
                line,
                column,
                message: "invalid UTF-8".into(),
            }));
        }
    };
    let mut p = Reader {
        src: text.chars().collect(),
        pos: 0,
        base: base.map(|b| b.as_str().to_owned()),
        prefixes: BTreeMap::new(),
        triples: Vec::new(),
        blank_prefix: generated_prefix(text),
        generated: 0,
        ntriples,
    };
    p.document()?;
    Ok(p.finish())
}

/// 1-based (line, column) of a char index. Columns count characters.
fn position(src: &[char], index: usize) -> (usize, usize) {
    let mut line = 1;
    let mut column = 1;
    for &c in &src[..index.min(src.len())] {
        if c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    (line, column)
}

/// A label prefix for reader-minted blank nodes that no `_:label` in the
/// document starts with, so minted and written labels never collide.
fn generated_prefix(text: &str) -> String {
    let mut prefix = String::from("genid");
    while text.contains(&format!("_:{prefix}")) {
        prefix.push('x');
    }
    prefix
}

struct Reader {
    src: Vec<char>,
    pos: usize,
    base: Option<String>,
    prefixes: BTreeMap<String, String>,
    triples: Vec<Triple>,
    blank_prefix: String,
    generated: usize,
    ntriples: bool,
}

type PResult<T> = Result<T, ParseError>;

impl Reader {
    fn peek(&self) -> Option<char> {
        self.src.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.src.get(self.pos + offset).copied()
    }

    fn looking_at(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek_at(i) == Some(c))
    }

    fn looking_at_keyword_ci(&self, kw: &str) -> bool {
        let n = kw.chars().count();
        kw.chars()
            .enumerate()
            .all(|(i, c)| self.peek_at(i).is_some_and(|x| x.eq_ignore_ascii_case(&c)))
            && self
                .peek_at(n)
                .is_none_or(|c| c.is_whitespace() || c == '<' || c == '#')
    }

    fn error_at(&self, pos: usize, message: impl Into<String>) -> ParseError {
        let (line, column) = position(&self.src, pos);
        ParseError::Syntax(ParseDiagnostic {
            line,
            column,
            message: message.into(),
        })
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        self.error_at(self.pos, message)
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(c) => self.error(format!("expected {expected}, found {c:?}")),
            None => self.error(format!("expected {expected}, found end of input")),
        }
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.unexpected(&format!("{c:?}")))
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while let Some(c) = self.peek() {
                    if c == '\n' || c == '\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if c.is_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn document(&mut self) -> PResult<()> {
        loop {
            self.skip_ws();
            if self.peek().is_none() {
                return Ok(());
            }
            self.statement()?;
        }
    }

    fn statement(&mut self) -> PResult<()> {
        if !self.ntriples {
            if self.looking_at("@prefix") {
                self.pos += "@prefix".len();
                self.prefix_decl()?;
                self.skip_ws();
                return self.expect('.');
            }
            if self.looking_at("@base") {
                self.pos += "@base".len();
                self.base_decl()?;
                self.skip_ws();
                return self.expect('.');
            }
            if self.looking_at_keyword_ci("PREFIX") {
                self.pos += "PREFIX".len();
                return self.prefix_decl();
            }
            if self.looking_at_keyword_ci("BASE") {
                self.pos += "BASE".len();
                return self.base_decl();
            }
        }
        self.triples_statement()?;
        self.skip_ws();
        self.expect('.')
    }

    fn prefix_decl(&mut self) -> PResult<()> {
        self.skip_ws();
        let start = self.pos;
        let mut name = String::new();
        if let Some(c) = self.peek() {
            if is_pn_chars_base(c) {
                name = self.pn_prefix();
            }
        }
        if self.peek() != Some(':') {
            return Err(self.error_at(start, "expected a prefix name ending in ':'"));
        }
        self.pos += 1;
        self.skip_ws();
        let iri = self.iriref()?;
        self.prefixes.insert(name, iri);
        Ok(())
    }

    fn base_decl(&mut self) -> PResult<()> {
        self.skip_ws();
        let iri = self.iriref()?;
        self.base = Some(iri);
        Ok(())
    }

    fn triples_statement(&mut self) -> PResult<()> {
        if self.ntriples {
            let subject = match self.peek() {
                Some('<') => Subject::Iri(self.iri_term()?),
                Some('_') => Subject::Blank(self.labeled_blank()?),
                _ => return Err(self.unexpected("an IRI or blank node")),
            };
            self.skip_ws();
            if self.peek() != Some('<') {
                return Err(self.unexpected("a predicate IRI"));
            }
            let predicate = self.iri_term()?;
            self.skip_ws();
            let object = match self.peek() {
                Some('<') => Term::Iri(self.iri_term()?),
                Some('_') => Term::Blank(self.labeled_blank()?),
                Some('"') => Term::Literal(self.literal()?),
                _ => return Err(self.unexpected("an IRI, blank node or literal")),
            };
            self.triples.push(Triple::new(subject, predicate, object));
            return Ok(());
        }

        if self.peek() == Some('[') {
            let node = self.blank_node_property_list()?;
            self.skip_ws();
            if self.peek() == Some('.') {
                return Ok(());
            }
            return self.predicate_object_list(&Subject::Blank(node));
        }
        let subject = self.subject()?;
        self.skip_ws();
        self.predicate_object_list(&subject)
    }

    fn subject(&mut self) -> PResult<Subject> {
        match self.peek() {
            Some('_') if self.peek_at(1) == Some(':') => Ok(Subject::Blank(self.labeled_blank()?)),
            Some('(') => match self.collection()? {
                Term::Iri(i) => Ok(Subject::Iri(i)),
                Term::Blank(b) => Ok(Subject::Blank(b)),
                Term::Literal(_) => unreachable!("collections are nodes"),
            },
            Some('[') => {
                // `[]` as a subject
                Ok(Subject::Blank(self.blank_node_property_list()?))
            }
            Some('"') | Some('\'') => Err(self.error("a literal cannot be a subject")),
            _ => Ok(Subject::Iri(self.iri_term()?)),
        }
    }

    fn predicate_object_list(&mut self, subject: &Subject) -> PResult<()> {
        loop {
            let predicate = self.verb()?;
            self.skip_ws();
            self.object_list(subject, &predicate)?;
            self.skip_ws();
            if self.peek() != Some(';') {
                return Ok(());
            }
            while self.peek() == Some(';') {
                self.pos += 1;
                self.skip_ws();
            }
            // a trailing ';' may end the list
            if matches!(self.peek(), Some('.') | Some(']') | None) {
                return Ok(());
            }
        }
    }

    fn verb(&mut self) -> PResult<Iri> {
        if self.peek() == Some('a')
            && self
                .peek_at(1)
                .is_none_or(|c| c.is_whitespace() || matches!(c, '<' | '[' | '(' | '"' | '\'' | '_' | '#'))
        {
            self.pos += 1;
            return Ok(Iri::from_trusted(rdf::TYPE));
        }
        match self.peek() {
            Some('<') => self.iri_term(),
            Some(c) if is_pn_chars_base(c) || c == ':' => self.iri_term(),
            _ => Err(self.unexpected("a predicate")),
        }
    }

    fn object_list(&mut self, subject: &Subject, predicate: &Iri) -> PResult<()> {
        loop {
            let object = self.object()?;
            self.triples
                .push(Triple::new(subject.clone(), predicate.clone(), object));
            self.skip_ws();
            if self.peek() != Some(',') {
                return Ok(());
            }
            self.pos += 1;
            self.skip_ws();
        }
    }

    fn object(&mut self) -> PResult<Term> {
        match self.peek() {
            Some('_') if self.peek_at(1) == Some(':') => Ok(Term::Blank(self.labeled_blank()?)),
            Some('[') => Ok(Term::Blank(self.blank_node_property_list()?)),
            Some('(') => self.collection(),
            Some('"') | Some('\'') => Ok(Term::Literal(self.literal()?)),
            Some(c) if c.is_ascii_digit() || matches!(c, '+' | '-' | '.') => self.numeric(),
            Some('t') if self.keyword_boolean("true") => {
                self.pos += 4;
                Ok(Term::Literal(bool_literal("true")))
            }
            Some('f') if self.keyword_boolean("false") => {
                self.pos += 5;
                Ok(Term::Literal(bool_literal("false")))
            }
            Some(_) => Ok(Term::Iri(self.iri_term()?)),
            None => Err(self.unexpected("an object")),
        }
    }

    fn keyword_boolean(&self, kw: &str) -> bool {
        self.looking_at(kw)
            && self.peek_at(kw.len()).is_none_or(|c| {
                !(is_pn_chars(c) || c == ':' || c == '.' && self.peek_at(kw.len() + 1).is_some_and(is_pn_chars))
            })
    }

    fn fresh_blank(&mut self) -> BlankNode {
        let b = BlankNode::new(&format!("{}{}", self.blank_prefix, self.generated)).expect("valid label");
        self.generated += 1;
        b
    }

    fn blank_node_property_list(&mut self) -> PResult<BlankNode> {
        self.expect('[')?;
        self.skip_ws();
        let node = self.fresh_blank();
        if self.peek() == Some(']') {
            self.pos += 1;
            return Ok(node);
        }
        self.predicate_object_list(&Subject::Blank(node.clone()))?;
        self.skip_ws();
        self.expect(']')?;
        Ok(node)
    }

    fn collection(&mut self) -> PResult<Term> {
        self.expect('(')?;
        let mut items = Vec::new();
        loop {
            self.skip_ws();
            match self.peek() {
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                None => return Err(self.unexpected("')'")),
                _ => items.push(self.object()?),
            }
        }
        let nil = Term::Iri(Iri::from_trusted(rdf::NIL));
        let first = Iri::from_trusted(rdf::FIRST);
        let rest = Iri::from_trusted(rdf::REST);
        let nodes: Vec<BlankNode> = items.iter().map(|_| self.fresh_blank()).collect();
        for (i, item) in items.into_iter().enumerate() {
            let node = Subject::Blank(nodes[i].clone());
            self.triples.push(Triple::new(node.clone(), first.clone(), item));
            let next = nodes.get(i + 1).map_or(nil.clone(), |b| Term::Blank(b.clone()));
            self.triples.push(Triple::new(node, rest.clone(), next));
        }
        Ok(nodes.first().map_or(nil, |b| Term::Blank(b.clone())))
    }

    fn labeled_blank(&mut self) -> PResult<BlankNode> {
        let start = self.pos;
        self.expect('_')?;
        self.expect(':')?;
        let mut label = String::new();
        match self.peek() {
            Some(c) if is_pn_chars_u(c) || c.is_ascii_digit() => {
                label.push(c);
                self.pos += 1;
            }
            _ => return Err(self.error_at(start, "invalid blank node label")),
        }
        while let Some(c) = self.peek() {
            if is_pn_chars(c) {
                label.push(c);
                self.pos += 1;
            } else if c == '.' && self.peek_at(1).is_some_and(|n| is_pn_chars(n) || n == '.') {
                // a '.' inside a label must be followed by more label characters
                let mut k = 1;
                while self.peek_at(k) == Some('.') {
                    k += 1;
                }
                if self.peek_at(k).is_some_and(is_pn_chars) {
                    for _ in 0..k {
                        label.push('.');
                    }
                    self.pos += k;
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        BlankNode::new(&label).map_err(|_| self.error_at(start, "invalid blank node label"))
    }

    fn iri_term(&mut self) -> PResult<Iri> {
        let start = self.pos;
        let text = match self.peek() {
            Some('<') => self.iriref()?,
            _ if self.ntriples => return Err(self.unexpected("'<'")),
            _ => self.prefixed_name()?,
        };
        Iri::parse(&text).map_err(|e| self.error_at(start, e.to_string()))
    }

    /// Reads `<...>` and returns it resolved to an absolute IRI.
    fn iriref(&mut self) -> PResult<String> {
        let start = self.pos;
        self.expect('<')?;
        let mut value = String::new();
        loop {
            match self.peek() {
                None => return Err(self.error_at(start, "unterminated IRI")),
                Some('>') => {
                    self.pos += 1;
                    break;
                }
                Some('\\') => {
                    let at = self.pos;
                    self.pos += 1;
                    let c = match self.peek() {
                        Some('u') => self.uchar(4)?,
                        Some('U') => self.uchar(8)?,
                        _ => return Err(self.error_at(at, "invalid escape in IRI")),
                    };
                    if is_forbidden_iri_char(c) {
                        return Err(self.error_at(at, "escaped character not allowed in IRI"));
                    }
                    value.push(c);
                }
                Some(c) if is_forbidden_iri_char(c) => {
                    return Err(self.error(format!("character {c:?} not allowed in IRI")))
                }
                Some(c) => {
                    value.push(c);
                    self.pos += 1;
                }
            }
        }
        if scheme_len(&value).is_some() {
            return Ok(value);
        }
        match &self.base {
            Some(base) => Ok(resolve_iri(base, &value)),
            None => {
                let (line, column) = position(&self.src, start);
                Err(ParseError::UnresolvedRelativeIri(ParseDiagnostic {
                    line,
                    column,
                    message: format!("relative IRI <{value}> with no base"),
                }))
            }
        }
    }

    /// After the `\` of an escape; `self.pos` points at `u`/`U`.
    fn uchar(&mut self, digits: usize) -> PResult<char> {
        let at = self.pos - 1;
        self.pos += 1;
        let mut v: u32 = 0;
        for _ in 0..digits {
            let d = self
                .peek()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.error_at(at, "invalid unicode escape"))?;
            v = v * 16 + d;
            self.pos += 1;
        }
        char::from_u32(v).ok_or_else(|| self.error_at(at, "escape is not a unicode scalar value"))
    }

    fn pn_prefix(&mut self) -> String {
        let mut s = String::new();
        if let Some(c) = self.peek() {
            if is_pn_chars_base(c) {
                s.push(c);
                self.pos += 1;
            } else {
                return s;
            }
        }
        while let Some(c) = self.peek() {
            if is_pn_chars(c) {
                s.push(c);
                self.pos += 1;
            } else if c == '.' {
                let mut k = 1;
                while self.peek_at(k) == Some('.') {
                    k += 1;
                }
                if self.peek_at(k).is_some_and(is_pn_chars) {
                    for _ in 0..k {
                        s.push('.');
                    }
                    self.pos += k;
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        s
    }

    fn prefixed_name(&mut self) -> PResult<String> {
        let start = self.pos;
        let prefix = match self.peek() {
            Some(c) if is_pn_chars_base(c) => self.pn_prefix(),
            Some(':') => String::new(),
            _ => return Err(self.unexpected("an IRI")),
        };
        if self.peek() != Some(':') {
            return Err(self.error_at(start, format!("expected ':' after prefix {prefix:?}")));
        }
        self.pos += 1;
        let Some(ns) = self.prefixes.get(&prefix).cloned() else {
            return Err(self.error_at(start, format!("undeclared prefix {prefix:?}")));
        };
        let local = self.pn_local()?;
        Ok(format!("{ns}{local}"))
    }

    fn pn_local(&mut self) -> PResult<String> {
        let mut s = String::new();
        let mut first = true;
        while let Some(c) = self.peek() {
            let ok_plain = if first {
                is_pn_chars_u(c) || c == ':' || c.is_ascii_digit()
            } else {
                is_pn_chars(c) || c == ':'
            };
            if ok_plain {
                s.push(c);
                self.pos += 1;
            } else if c == '%' {
                let at = self.pos;
                let h1 = self.peek_at(1).filter(|c| c.is_ascii_hexdigit());
                let h2 = self.peek_at(2).filter(|c| c.is_ascii_hexdigit());
                match (h1, h2) {
                    (Some(a), Some(b)) => {
                        s.push('%');
                        s.push(a);
                        s.push(b);
                        self.pos += 3;
                    }
                    _ => return Err(self.error_at(at, "invalid percent escape")),
                }
            } else if c == '\\' {
                match self.peek_at(1) {
                    Some(e) if "_~.-!$&'()*+,;=/?#@%".contains(e) => {
                        s.push(e);
                        self.pos += 2;
                    }
                    _ => return Err(self.error("invalid escape in local name")),
                }
            } else if c == '.' && !first {
                let mut k = 1;
                while self.peek_at(k) == Some('.') {
                    k += 1;
                }
                let continues = self
                    .peek_at(k)
                    .is_some_and(|n| is_pn_chars(n) || n == ':' || n == '%' || n == '\\');
                if continues {
                    for _ in 0..k {
                        s.push('.');
                    }
                    self.pos += k;
                } else {
                    break;
                }
            } else {
                break;
            }
            first = false;
        }
        Ok(s)
    }

    fn literal(&mut self) -> PResult<Literal> {
        let start = self.pos;
        let lexical = self.string()?;
        if self.peek() == Some('@') {
            self.pos += 1;
            let tag_start = self.pos;
            let mut tag = String::new();
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == '-' {
                    tag.push(c);
                    self.pos += 1;
                } else {
                    break;
                }
            }
            if !is_valid_lang_tag(&tag) {
                return Err(self.error_at(tag_start, format!("invalid language tag {tag:?}")));
            }
            return Literal::lang(lexical, &tag).map_err(|e| self.error_at(start, e.to_string()));
        }
        if self.looking_at("^^") {
            self.pos += 2;
            let dt = self.iri_term()?;
            return Literal::typed(lexical, dt).map_err(|e| self.error_at(start, e.to_string()));
        }
        Ok(Literal::string(lexical))
    }

    fn string(&mut self) -> PResult<String> {
        let start = self.pos;
        let quote = match self.peek() {
            Some(q @ ('"' | '\'')) => q,
            _ => return Err(self.unexpected("a string")),
        };
        if quote == '\'' && self.ntriples {
            return Err(self.unexpected("'\"'"));
        }
        let long = !self.ntriples && self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote);
        self.pos += if long { 3 } else { 1 };
        let mut out = String::new();
        loop {
            let Some(c) = self.peek() else {
                return Err(self.error_at(start, "unterminated string"));
            };
            if c == quote {
                if !long {
                    self.pos += 1;
                    return Ok(out);
                }
                if self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote) {
                    // up to two extra quotes may precede the closing delimiter
                    if self.peek_at(3) != Some(quote) {
                        self.pos += 3;
                        return Ok(out);
                    }
                }
                out.push(c);
                self.pos += 1;
                continue;
            }
            match c {
                '\\' => {
                    let at = self.pos;
                    self.pos += 1;
                    let e = match self.peek() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => {
                            out.push(self.uchar(4)?);
                            continue;
                        }
                        Some('U') => {
                            out.push(self.uchar(8)?);
                            continue;
                        }
                        _ => return Err(self.error_at(at, "invalid escape sequence")),
                    };
                    out.push(e);
                    self.pos += 1;
                }
                '\n' | '\r' if !long => {
                    return Err(self.error_at(start, "unterminated string: line break before closing quote"));
                }
                c => {
                    out.push(c);
                    self.pos += 1;
                }
            }
        }
    }

    fn numeric(&mut self) -> PResult<Term> {
        let start = self.pos;
        let mut s = String::new();
        if let Some(c @ ('+' | '-')) = self.peek() {
            s.push(c);
            self.pos += 1;
        }
        let int_digits = self.digits(&mut s);
        let mut frac_digits = 0;
        let mut has_dot = false;
        if self.peek() == Some('.') {
            let after = self.peek_at(1);
            let exp_follows = matches!(after, Some('e' | 'E')) && int_digits > 0;
            if after.is_some_and(|c| c.is_ascii_digit()) || exp_follows {
                has_dot = true;
                s.push('.');
                self.pos += 1;
                frac_digits = self.digits(&mut s);
            }
        }
        if int_digits == 0 && frac_digits == 0 {
            return Err(self.error_at(start, "invalid number"));
        }
        let mut has_exp = false;
        if let Some(e @ ('e' | 'E')) = self.peek() {
            let mut k = 1;
            if matches!(self.peek_at(1), Some('+' | '-')) {
                k = 2;
            }
            if self.peek_at(k).is_some_and(|c| c.is_ascii_digit()) {
                has_exp = true;
                s.push(e);
                if k == 2 {
                    s.push(self.peek_at(1).unwrap_or('+'));
                }
                self.pos += k;
                self.digits(&mut s);
            } else {
                return Err(self.error("invalid exponent"));
            }
        }
        let datatype = if has_exp {
            xsd::DOUBLE
        } else if has_dot {
            xsd::DECIMAL
        } else {
            xsd::INTEGER
        };
        Ok(Term::Literal(
            Literal::typed(s, Iri::from_trusted(datatype)).expect("numeric datatypes are not langString"),
        ))
    }

    fn digits(&mut self, s: &mut String) -> usize {
        let mut n = 0;
        while let Some(c) = self.peek().filter(|c| c.is_ascii_digit()) {
            s.push(c);
            self.pos += 1;
            n += 1;
        }
        n
    }

    fn finish(self) -> Graph {
        let mut g: Graph = self.triples.into_iter().collect();
        g.set_prefixes(self.prefixes);
        g
    }
}

fn bool_literal(v: &str) -> Literal {
    Literal::typed(v, Iri::from_trusted(xsd::BOOLEAN)).expect("boolean is not langString")
}

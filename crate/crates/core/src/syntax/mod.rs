//! Reading and writing RDF documents.
//!
//! Turtle and N-Triples can be read and written. RDF/XML and RDF/JSON are
//! output-only dump formats.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Graph, Iri};

mod ntriples;
mod rdfjson;
mod rdfxml;
mod reader;
mod resolve;
mod turtle;

pub use resolve::resolve_iri;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyntaxFormat {
    Turtle,
    NTriples,
    RdfXml,
    RdfJson,
}

impl SyntaxFormat {
    pub const ALL: [SyntaxFormat; 4] = [
        SyntaxFormat::Turtle,
        SyntaxFormat::NTriples,
        SyntaxFormat::RdfXml,
        SyntaxFormat::RdfJson,
    ];

    pub fn media_type(self) -> &'static str {
        match self {
            SyntaxFormat::Turtle => "text/turtle",
            SyntaxFormat::NTriples => "application/n-triples",
            SyntaxFormat::RdfXml => "application/rdf+xml",
            SyntaxFormat::RdfJson => "application/rdf+json",
        }
    }

    /// Maps a media type (parameters ignored, case-insensitive) to a format.
    pub fn from_media_type(media_type: &str) -> Option<Self> {
        let essence = media_type.split(';').next()?.trim().to_ascii_lowercase();
        match essence.as_str() {
            "text/turtle" | "application/x-turtle" => Some(SyntaxFormat::Turtle),
            "application/n-triples" => Some(SyntaxFormat::NTriples),
            "application/rdf+xml" => Some(SyntaxFormat::RdfXml),
            "application/rdf+json" => Some(SyntaxFormat::RdfJson),
            _ => None,
        }
    }

    pub fn file_extension(self) -> &'static str {
        match self {
            SyntaxFormat::Turtle => "ttl",
            SyntaxFormat::NTriples => "nt",
            SyntaxFormat::RdfXml => "rdf",
            SyntaxFormat::RdfJson => "rj",
        }
    }

    pub fn is_parseable(self) -> bool {
        matches!(self, SyntaxFormat::Turtle | SyntaxFormat::NTriples)
    }
}

impl fmt::Display for SyntaxFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SyntaxFormat::Turtle => "turtle",
            SyntaxFormat::NTriples => "ntriples",
            SyntaxFormat::RdfXml => "rdfxml",
            SyntaxFormat::RdfJson => "rdfjson",
        })
    }
}

impl FromStr for SyntaxFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "ttl" | "turtle" => Ok(SyntaxFormat::Turtle),
            "nt" | "ntriples" | "n-triples" => Ok(SyntaxFormat::NTriples),
            "rdfxml" | "rdf/xml" | "xml" | "rdf" => Ok(SyntaxFormat::RdfXml),
            "rdfjson" | "rdf/json" | "rj" => Ok(SyntaxFormat::RdfJson),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

/// Position of the first syntax error in a document, 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {0}")]
    Syntax(ParseDiagnostic),
    #[error("relative IRI cannot be resolved without a base at {0}")]
    UnresolvedRelativeIri(ParseDiagnostic),
    #[error("{0} documents cannot be parsed")]
    UnsupportedFormat(SyntaxFormat),
}

impl ParseError {
    pub fn code(&self) -> &'static str {
        match self {
            ParseError::Syntax(_) => "syntax-error",
            ParseError::UnresolvedRelativeIri(_) => "unresolved-relative-iri",
            ParseError::UnsupportedFormat(_) => "unsupported-format",
        }
    }

    pub fn diagnostic(&self) -> Option<&ParseDiagnostic> {
        match self {
            ParseError::Syntax(d) | ParseError::UnresolvedRelativeIri(d) => Some(d),
            ParseError::UnsupportedFormat(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SerializeError {
    #[error("cannot encode {0} in RDF/XML")]
    RdfXmlUnencodable(String),
}

impl SerializeError {
    pub fn code(&self) -> &'static str {
        match self {
            SerializeError::RdfXmlUnencodable(_) => "rdfxml-unencodable",
        }
    }
}

/// Parses a Turtle or N-Triples document. The first error aborts the parse.
pub fn parse(doc: &[u8], format: SyntaxFormat, base: Option<&Iri>) -> Result<Graph, ParseError> {
    match format {
        SyntaxFormat::Turtle => reader::parse(doc, base, false),
        SyntaxFormat::NTriples => reader::parse(doc, base, true),
        other => Err(ParseError::UnsupportedFormat(other)),
    }
}

/// Serializes a graph. Output is deterministic for a given graph.
pub fn serialize(g: &Graph, format: SyntaxFormat) -> Result<Vec<u8>, SerializeError> {
    Ok(match format {
        SyntaxFormat::Turtle => turtle::write(g).into_bytes(),
        SyntaxFormat::NTriples => ntriples::write(g).into_bytes(),
        SyntaxFormat::RdfXml => rdfxml::write(g)?.into_bytes(),
        SyntaxFormat::RdfJson => rdfjson::write(g),
    })
}

//! One error type for the CLI and the service, with stable codes.

use std::path::PathBuf;

use ontohub_core::registry::RegistryError;
use ontohub_core::validator::ValidatorError;
use ontohub_core::{ParseDiagnostic, ParseError, SerializeError, StoreError};
use serde::Serialize;
use thiserror::Error;

use crate::config::ConfigError;

#[derive(Debug, Error)]
pub enum AppError {
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Validator(#[from] ValidatorError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Serialize(#[from] SerializeError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot read {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    BadRequest(String),
    #[error("none of the acceptable media types can be produced; supported: {}", supported.join(", "))]
    NotAcceptable { supported: Vec<&'static str> },
    #[error("unsupported content type {0}")]
    UnsupportedMediaType(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("internal error: {0}")]
    Internal(String),
}

/// Which module an error comes from, for exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Syntax,
    Store,
    Registry,
    Validator,
    Config,
    Interface,
}

impl AppError {
    pub fn code(&self) -> &'static str {
        match self {
            AppError::Registry(e) => e.code(),
            AppError::Validator(e) => e.code(),
            AppError::Store(e) => e.code(),
            AppError::Parse(e) => e.code(),
            AppError::Serialize(e) => e.code(),
            AppError::Config(e) => e.code(),
            AppError::Io { .. } => "io-error",
            AppError::BadRequest(_) => "bad-request",
            AppError::NotAcceptable { .. } => "not-acceptable",
            AppError::UnsupportedMediaType(_) => "unsupported-media-type",
            AppError::NotFound(_) => "not-found",
            AppError::Internal(_) => "internal-error",
        }
    }

    pub fn origin(&self) -> Origin {
        match self {
            AppError::Registry(RegistryError::Parse(_) | RegistryError::Serialize(_))
            | AppError::Parse(_)
            | AppError::Serialize(_) => Origin::Syntax,
            AppError::Registry(RegistryError::Store(_)) | AppError::Store(_) => Origin::Store,
            AppError::Validator(ValidatorError::Registry(RegistryError::Store(_))) => Origin::Store,
            AppError::Registry(_) => Origin::Registry,
            AppError::Validator(_) => Origin::Validator,
            AppError::Config(_) => Origin::Config,
            _ => Origin::Interface,
        }
    }

    /// Distinct per module; 2 is reserved for usage errors.
    pub fn exit_code(&self) -> u8 {
        match self.origin() {
            Origin::Syntax => 3,
            Origin::Store => 4,
            Origin::Registry => 5,
            Origin::Validator => 6,
            Origin::Config => 7,
            Origin::Interface => 8,
        }
    }

    pub fn http_status(&self) -> u16 {
        match self.code() {
            "syntax-error" | "unresolved-relative-iri" => 422,
            "unknown-prefix" | "unknown-version" | "unknown-ontology" | "not-found" => 404,
            "duplicate-version" | "version-already-latest" | "source-graph-conflict" => 409,
            "not-acceptable" => 406,
            "unsupported-media-type" | "unsupported-format" => 415,
            "network-error" | "endpoint-error" | "timeout" | "unsupported-query" => 502,
            "invalid-prefix" | "invalid-version" | "invalid-metadata" | "empty-query" | "empty-ontology"
            | "no-target-graphs" | "invalid-endpoint" | "bad-request" | "invalid-iri" | "invalid-term" => 400,
            _ => 500,
        }
    }

    pub fn diagnostic(&self) -> Option<&ParseDiagnostic> {
        match self {
            AppError::Parse(e) | AppError::Registry(RegistryError::Parse(e)) => e.diagnostic(),
            _ => None,
        }
    }

    pub fn body(&self) -> ErrorBody<'_> {
        ErrorBody {
            code: self.code(),
            message: self.to_string(),
            diagnostic: self.diagnostic(),
            supported: match self {
                AppError::NotAcceptable { supported } => Some(supported.as_slice()),
                _ => None,
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorBody<'a> {
    pub code: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<&'a ParseDiagnostic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub supported: Option<&'a [&'static str]>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statuses_and_exit_codes() {
        let unknown = AppError::from(RegistryError::UnknownPrefix("x".into()));
        assert_eq!(
            (unknown.code(), unknown.http_status(), unknown.exit_code()),
            ("unknown-prefix", 404, 5)
        );
        let syntax = AppError::from(RegistryError::Parse(ParseError::Syntax(ParseDiagnostic {
            line: 2,
            column: 3,
            message: "x".into(),
        })));
        assert_eq!((syntax.http_status(), syntax.exit_code()), (422, 3));
        assert_eq!(syntax.body().diagnostic.unwrap().line, 2);
        let net = AppError::from(ValidatorError::Timeout("u".into()));
        assert_eq!((net.http_status(), net.exit_code()), (502, 6));
        let na = AppError::NotAcceptable {
            supported: vec!["text/turtle"],
        };
        assert_eq!(na.http_status(), 406);
        assert_eq!(serde_json::to_value(na.body()).unwrap()["supported"][0], "text/turtle");
    }
}

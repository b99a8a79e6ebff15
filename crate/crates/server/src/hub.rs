//! Operations shared by the CLI and the HTTP service.

use std::collections::BTreeSet;
use std::path::Path;
use std::time::Duration;

use ontohub_core::hierarchy::{class_tree, list_view, vowl_export, ClassTreeNode, ListView, VowlDocument};
use ontohub_core::registry::{
    parse_issued, RegisterRequest, Registry, RegistryConfig, SearchField, SearchHit, VersionMetadata, VersionRecord,
};
use ontohub_core::validator::{EndpointSession, StatsReport, ValidationReport, Validator};
use ontohub_core::{Iri, Store, SyntaxFormat};
use serde::{Deserialize, Serialize};

use crate::config::ServiceConfig;
use crate::error::AppError;

pub struct Hub {
    pub registry: Registry,
    pub config: ServiceConfig,
}

/// Registration parameters as they arrive from flags or query strings.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct RegisterParams {
    pub prefix: String,
    pub version: Option<String>,
    pub issued: Option<String>,
    pub title: Option<String>,
    pub description: Option<String>,
    pub rights: Option<String>,
    pub license: Option<String>,
    pub contributor: Option<String>,
    /// Comma-separated catalogue entries.
    pub catalogue: Option<String>,
    pub source_graph: Option<String>,
    pub base: Option<String>,
    pub format: Option<String>,
}

fn opt_iri(key: &str, value: &Option<String>) -> Result<Option<Iri>, AppError> {
    value
        .as_deref()
        .map(|v| Iri::parse(v).map_err(|e| AppError::BadRequest(format!("{key}: {e}"))))
        .transpose()
}

pub fn parse_format(text: &str) -> Result<SyntaxFormat, AppError> {
    text.parse().map_err(AppError::BadRequest)
}

impl RegisterParams {
    pub fn metadata(&self) -> Result<VersionMetadata, AppError> {
        Ok(VersionMetadata {
            title: self.title.clone(),
            description: self.description.clone(),
            version_info: self.version.clone(),
            issued: self.issued.as_deref().map(parse_issued).transpose()?,
            rights: self.rights.clone(),
            license: opt_iri("license", &self.license)?,
            contributor: self.contributor.clone(),
            catalogue: self
                .catalogue
                .iter()
                .flat_map(|c| c.split(','))
                .map(str::trim)
                .filter(|c| !c.is_empty())
                .map(str::to_owned)
                .collect(),
        })
    }
}

/// Statistics when no ontology is named, validation otherwise.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum JobReport {
    Stats(StatsReport),
    Validation(ValidationReport),
}

impl JobReport {
    pub fn to_text(&self) -> String {
        match self {
            JobReport::Stats(r) => r.to_text(),
            JobReport::Validation(r) => r.to_text(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct JobRequest {
    pub endpoint: String,
    #[serde(default)]
    pub graphs: Vec<String>,
    #[serde(default)]
    pub ontology: Option<String>,
    #[serde(default)]
    pub timeout_ms: Option<u64>,
    #[serde(default)]
    pub page_size: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassForest {
    pub prefix: String,
    pub version: String,
    pub roots: Vec<ClassTreeNode>,
}

impl Hub {
    pub fn open(config: ServiceConfig) -> Result<Hub, AppError> {
        let store = Store::open(&config.store_root)?;
        let registry = Registry::new(
            store,
            RegistryConfig {
                base_iri: config.base_iri.clone(),
                archive_root: config.archive_root.clone(),
            },
        )?;
        Ok(Hub { registry, config })
    }

    /// `format` falls back to the content type, then to Turtle.
    pub fn register(
        &self,
        document: &[u8],
        params: &RegisterParams,
        content_type: Option<&str>,
    ) -> Result<VersionRecord, AppError> {
        let format = match (&params.format, content_type.and_then(SyntaxFormat::from_media_type)) {
            (Some(f), _) => parse_format(f)?,
            (None, Some(f)) => f,
            (None, None) => SyntaxFormat::Turtle,
        };
        Ok(self.registry.register(RegisterRequest {
            document,
            format,
            prefix: params.prefix.trim(),
            source_graph: opt_iri("source-graph", &params.source_graph)?,
            base: opt_iri("base", &params.base)?,
            metadata: params.metadata()?,
        })?)
    }

    pub fn register_file(&self, path: &Path, params: &RegisterParams) -> Result<VersionRecord, AppError> {
        let document = std::fs::read(path).map_err(|source| AppError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut params = params.clone();
        if params.format.is_none() {
            if let Some(ext) = path.extension().and_then(|e| e.to_str()) {
                if let Ok(f) = ext.parse::<SyntaxFormat>() {
                    params.format = Some(f.to_string());
                }
            }
        }
        self.register(&document, &params, None)
    }

    pub fn tree(&self, prefix: &str) -> Result<ClassForest, AppError> {
        let (record, graph) = self.registry.latest_graph(prefix)?;
        Ok(ClassForest {
            prefix: record.prefix,
            version: record.version_info,
            roots: class_tree(&graph),
        })
    }

    pub fn list_view(&self, prefix: &str) -> Result<(VersionRecord, ListView), AppError> {
        let (record, graph) = self.registry.latest_graph(prefix)?;
        Ok((record, list_view(&graph)))
    }

    pub fn vowl(&self, prefix: &str) -> Result<VowlDocument, AppError> {
        Ok(vowl_export(&self.registry.latest_graph(prefix)?.1))
    }

    pub fn search(&self, query: &str, facets: &[String]) -> Result<Vec<SearchHit>, AppError> {
        let facets: BTreeSet<SearchField> = facets
            .iter()
            .flat_map(|f| f.split(','))
            .map(str::trim)
            .filter(|f| !f.is_empty())
            .map(|f| f.parse().map_err(AppError::BadRequest))
            .collect::<Result<_, _>>()?;
        Ok(self.registry.search(query, &facets)?)
    }

    pub fn session(
        &self,
        endpoint: &str,
        graphs: &[String],
        timeout: Option<Duration>,
        page_size: Option<usize>,
    ) -> Result<EndpointSession, AppError> {
        let graphs = graphs
            .iter()
            .map(|g| Iri::parse(g).map_err(|e| AppError::BadRequest(format!("graph: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EndpointSession::new(endpoint.trim())
            .with_graphs(graphs)
            .with_timeout(timeout.unwrap_or(self.config.default_timeout))
            .with_page_size(page_size.unwrap_or(self.config.page_size)))
    }

    pub fn endpoint_graphs(&self, session: EndpointSession) -> Result<BTreeSet<Iri>, AppError> {
        Ok(Validator::connect(session, Some(self.registry.store()))?.enumerate_graphs()?)
    }

    pub fn run_job(&self, session: EndpointSession, ontology: Option<&str>) -> Result<JobReport, AppError> {
        let v = Validator::connect(session, Some(self.registry.store()))?;
        Ok(match ontology.map(str::trim).filter(|o| !o.is_empty()) {
            Some(o) => JobReport::Validation(v.validate(&self.registry, o)?),
            None => JobReport::Stats(v.stats()?),
        })
    }

    pub fn job(&self, req: &JobRequest) -> Result<JobReport, AppError> {
        let session = self.session(
            &req.endpoint,
            &req.graphs,
            req.timeout_ms.map(Duration::from_millis),
            req.page_size,
        )?;
        self.run_job(session, req.ontology.as_deref())
    }
}

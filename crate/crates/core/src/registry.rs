//! Ontology registration, versioning, archives, dumps and search.
//!
//! Every version has a metadata record in the datasets graph. Exactly one
//! record per prefix carries `dc:source`, naming the graph that holds the
//! latest version; older versions live as Turtle files in the archive
//! directory while their records stay in the datasets graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;

use chrono::{NaiveDate, NaiveDateTime, Utc};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::iso::canonical_blank_labels;
use crate::model::{Graph, Iri, Literal, Subject, Term, Triple};
use crate::store::{Store, StoreError, StoreView, WriteOp};
use crate::syntax::{parse, serialize, ParseError, SerializeError, SyntaxFormat};
use crate::vocab::{cc, dc, dcat, owl, rdf, rdfs, vann, xsd};

pub const DEFAULT_BASE_IRI: &str = "http://ont.library.sh.cn";
pub const ISSUED_FORMAT: &str = "%Y-%m-%d %H:%M:%S";

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Serialize(#[from] SerializeError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("i/o error on {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("version {version} of {prefix} is already registered")]
    DuplicateVersion { prefix: String, version: String },
    #[error("unknown prefix {0}")]
    UnknownPrefix(String),
    #[error("unknown version {version} of {prefix}")]
    UnknownVersion { prefix: String, version: String },
    #[error("version {version} of {prefix} is already the latest")]
    VersionAlreadyLatest { prefix: String, version: String },
    #[error("no registered ontology matches {0}")]
    UnknownOntology(String),
    #[error("search query is empty")]
    EmptyQuery,
    #[error("invalid prefix {0:?}: expected a letter followed by letters, digits, '.', '-' or '_'")]
    InvalidPrefix(String),
    #[error("invalid version {0:?}: expected letters, digits, '.', '-', '_' or '+'")]
    InvalidVersion(String),
    #[error("invalid metadata: {0}")]
    InvalidMetadata(String),
    #[error("the document contains no triples")]
    EmptyOntology,
    #[error("graph {graph} already holds the latest version of {owner}")]
    SourceGraphConflict { graph: Iri, owner: String },
}

impl RegistryError {
    pub fn code(&self) -> &'static str {
        match self {
            RegistryError::Parse(e) => e.code(),
            RegistryError::Serialize(e) => e.code(),
            RegistryError::Store(e) => e.code(),
            RegistryError::Io { .. } => "io-error",
            RegistryError::DuplicateVersion { .. } => "duplicate-version",
            RegistryError::UnknownPrefix(_) => "unknown-prefix",
            RegistryError::UnknownVersion { .. } => "unknown-version",
            RegistryError::VersionAlreadyLatest { .. } => "version-already-latest",
            RegistryError::UnknownOntology(_) => "unknown-ontology",
            RegistryError::EmptyQuery => "empty-query",
            RegistryError::InvalidPrefix(_) => "invalid-prefix",
            RegistryError::InvalidVersion(_) => "invalid-version",
            RegistryError::InvalidMetadata(_) => "invalid-metadata",
            RegistryError::EmptyOntology => "empty-ontology",
            RegistryError::SourceGraphConflict { .. } => "source-graph-conflict",
        }
    }
}

type Result<T, E = RegistryError> = std::result::Result<T, E>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> RegistryError + '_ {
    move |source| RegistryError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn serialize_issued<S: Serializer>(t: &NaiveDateTime, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(&t.format(ISSUED_FORMAT))
}

/// Accepts `YYYY-MM-DD`, `YYYY-MM-DD HH:MM:SS` and `YYYY-MM-DDTHH:MM:SS`.
pub fn parse_issued(text: &str) -> Result<NaiveDateTime> {
    let text = text.trim();
    for fmt in [ISSUED_FORMAT, "%Y-%m-%dT%H:%M:%S"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(text, fmt) {
            return Ok(t);
        }
    }
    NaiveDate::parse_from_str(text, "%Y-%m-%d")
        .map(|d| d.and_hms_opt(0, 0, 0).expect("midnight exists"))
        .map_err(|_| RegistryError::InvalidMetadata(format!("unparseable issued date {text:?}")))
}

/// One version's metadata resource in the datasets graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VersionRecord {
    pub record_iri: Iri,
    pub prefix: String,
    pub title: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub version_info: String,
    #[serde(serialize_with = "serialize_issued")]
    pub issued: NaiveDateTime,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rights: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub license: Option<Iri>,
    pub source_graph: Option<Iri>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contributor: Option<String>,
    #[serde(skip_serializing_if = "BTreeSet::is_empty")]
    pub catalogue: BTreeSet<String>,
}

impl VersionRecord {
    pub fn is_latest(&self) -> bool {
        self.source_graph.is_some()
    }

    fn triples(&self) -> Vec<Triple> {
        let s = Subject::Iri(self.record_iri.clone());
        let lit = |p: &str, v: &str| Triple::new(s.clone(), Iri::from_trusted(p), Literal::string(v));
        let mut out = vec![
            Triple::new(
                s.clone(),
                Iri::from_trusted(rdf::TYPE),
                Iri::from_trusted(owl::ONTOLOGY),
            ),
            lit(vann::PREFERRED_NAMESPACE_PREFIX, &self.prefix),
            lit(dc::TITLE, &self.title),
            lit(owl::VERSION_INFO, &self.version_info),
            lit(dc::ISSUED, &self.issued.format(ISSUED_FORMAT).to_string()),
        ];
        out.extend(self.description.as_deref().map(|v| lit(dc::DESCRIPTION, v)));
        out.extend(self.rights.as_deref().map(|v| lit(dc::RIGHTS, v)));
        out.extend(self.contributor.as_deref().map(|v| lit(dc::CONTRIBUTOR, v)));
        out.extend(self.catalogue.iter().map(|v| lit(dcat::KEYWORD, v)));
        if let Some(l) = &self.license {
            out.push(Triple::new(s.clone(), Iri::from_trusted(cc::LICENSE), l.clone()));
        }
        if let Some(g) = &self.source_graph {
            out.push(Triple::new(s, Iri::from_trusted(dc::SOURCE), g.clone()));
        }
        out
    }

    /// Reads a record back; `None` for resources that are not registry records.
    fn from_graph(g: &Graph, subject: &Iri) -> Option<VersionRecord> {
        let s = Subject::Iri(subject.clone());
        let text = |p: &str| -> Option<String> {
            g.objects(&s, p)
                .filter_map(Term::as_literal)
                .map(|l| l.lexical().to_owned())
                .min()
        };
        let iri = |p: &str| -> Option<Iri> { g.objects(&s, p).filter_map(Term::as_iri).min().cloned() };
        Some(VersionRecord {
            record_iri: subject.clone(),
            prefix: text(vann::PREFERRED_NAMESPACE_PREFIX)?,
            title: text(dc::TITLE).unwrap_or_default(),
            description: text(dc::DESCRIPTION),
            version_info: text(owl::VERSION_INFO)?,
            issued: parse_issued(&text(dc::ISSUED)?).ok()?,
            rights: text(dc::RIGHTS),
            license: iri(cc::LICENSE),
            source_graph: iri(dc::SOURCE),
            contributor: text(dc::CONTRIBUTOR),
            catalogue: g
                .objects(&s, dcat::KEYWORD)
                .filter_map(Term::as_literal)
                .map(|l| l.lexical().to_owned())
                .collect(),
        })
    }
}

/// Caller-supplied metadata for a new version. Unset fields fall back to the
/// document's own `owl:Ontology` description where one exists.
#[derive(Debug, Clone, Default)]
pub struct VersionMetadata {
    pub title: Option<String>,
    pub description: Option<String>,
    pub version_info: Option<String>,
    pub issued: Option<NaiveDateTime>,
    pub rights: Option<String>,
    pub license: Option<Iri>,
    pub contributor: Option<String>,
    pub catalogue: BTreeSet<String>,
}

#[derive(Debug, Clone)]
pub struct RegisterRequest<'a> {
    pub document: &'a [u8],
    pub format: SyntaxFormat,
    pub prefix: &'a str,
    /// Defaults to `{base}/graph/{prefix}`.
    pub source_graph: Option<Iri>,
    /// Base for relative IRIs in the document.
    pub base: Option<Iri>,
    pub metadata: VersionMetadata,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GraphDiff {
    pub added: BTreeSet<Triple>,
    pub removed: BTreeSet<Triple>,
}

impl GraphDiff {
    pub fn is_empty(&self) -> bool {
        self.added.is_empty() && self.removed.is_empty()
    }
}

/// Set difference after canonical blank relabelling of both sides.
pub fn diff_graphs(a: &Graph, b: &Graph) -> GraphDiff {
    let a = canonical_blank_labels(a);
    let b = canonical_blank_labels(b);
    GraphDiff {
        added: b.triples().difference(a.triples()).cloned().collect(),
        removed: a.triples().difference(b.triples()).cloned().collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermKind {
    Class,
    ObjectProperty,
    DatatypeProperty,
    Ontology,
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TermKind::Class => "class",
            TermKind::ObjectProperty => "object-property",
            TermKind::DatatypeProperty => "datatype-property",
            TermKind::Ontology => "ontology",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchField {
    LocalName,
    Label,
    Comment,
    Catalogue,
    Prefix,
    Contributor,
}

impl SearchField {
    pub const ALL: [SearchField; 6] = [
        SearchField::LocalName,
        SearchField::Label,
        SearchField::Comment,
        SearchField::Catalogue,
        SearchField::Prefix,
        SearchField::Contributor,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SearchField::LocalName => "local-name",
            SearchField::Label => "label",
            SearchField::Comment => "comment",
            SearchField::Catalogue => "catalogue",
            SearchField::Prefix => "prefix",
            SearchField::Contributor => "contributor",
        }
    }
}

impl fmt::Display for SearchField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SearchField {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        SearchField::ALL
            .into_iter()
            .find(|f| f.as_str() == s.trim())
            .ok_or_else(|| format!("unknown search facet {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SearchHit {
    pub prefix: String,
    pub term_iri: Iri,
    pub term_kind: TermKind,
    pub matched_field: SearchField,
    pub snippet: String,
}

/// Injected faults for exercising rollback paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailPoint {
    /// Fails a registration right after the prior version's archive file is written.
    AfterArchiveWrite,
}

#[derive(Debug, Clone)]
pub struct RegistryConfig {
    pub base_iri: String,
    pub archive_root: PathBuf,
}

pub struct Registry {
    store: Store,
    base: String,
    archive_root: PathBuf,
    datasets: Iri,
    writes: Mutex<()>,
    fail_point: Mutex<Option<FailPoint>>,
}

impl fmt::Debug for Registry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("base", &self.base)
            .field("archive_root", &self.archive_root)
            .finish_non_exhaustive()
    }
}

fn valid_prefix(p: &str) -> bool {
    let mut chars = p.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_'))
}

fn valid_version(v: &str) -> bool {
    !v.is_empty()
        && v != "."
        && v != ".."
        && v.chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_' | '+'))
}

fn contains_ci(haystack: &str, needle_lower: &str) -> bool {
    haystack.to_lowercase().contains(needle_lower)
}

/// Title/description/version declared on the document's `owl:Ontology` resource.
fn document_metadata(g: &Graph) -> (Option<String>, Option<String>, Option<String>) {
    let ontology = Term::Iri(Iri::from_trusted(owl::ONTOLOGY));
    let mut ontologies: Vec<&Subject> = g.subjects(rdf::TYPE, &ontology).collect();
    ontologies.sort();
    let first = |preds: &[&str]| -> Option<String> {
        ontologies.iter().find_map(|s| {
            preds.iter().find_map(|p| {
                g.objects(s, p)
                    .filter_map(Term::as_literal)
                    .map(|l| l.lexical().to_owned())
                    .min()
            })
        })
    };
    (
        first(&[dc::TITLE, "http://purl.org/dc/elements/1.1/title", rdfs::LABEL]),
        first(&[
            dc::DESCRIPTION,
            "http://purl.org/dc/elements/1.1/description",
            rdfs::COMMENT,
        ]),
        first(&[owl::VERSION_INFO]),
    )
}

fn datasets_prefixes() -> BTreeMap<String, String> {
    [
        ("cc", cc::NS),
        ("dc", dc::NS),
        ("dcat", dcat::NS),
        ("owl", owl::NS),
        ("rdf", rdf::NS),
        ("vann", vann::NS),
        ("xsd", xsd::NS),
    ]
    .into_iter()
    .map(|(p, ns)| (p.to_owned(), ns.to_owned()))
    .collect()
}

/// Undo record for an archive file touched by a mutation in progress.
struct ArchiveWrite {
    path: PathBuf,
    previous: Option<Vec<u8>>,
}

impl ArchiveWrite {
    fn undo(self) {
        let _ = match self.previous {
            Some(bytes) => write_atomically(&self.path, &bytes),
            None => std::fs::remove_file(&self.path),
        };
    }
}

fn write_atomically(path: &Path, bytes: &[u8]) -> io::Result<()> {
    use std::io::Write;
    let tmp = path.with_extension("ttl.tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    if let Some(dir) = path.parent() {
        if let Ok(d) = std::fs::File::open(dir) {
            let _ = d.sync_all();
        }
    }
    Ok(())
}

impl Registry {
    pub fn new(store: Store, config: RegistryConfig) -> Result<Registry> {
        let base = config.base_iri.trim_end_matches('/').to_owned();
        let datasets = Iri::parse(&format!("{base}/graph/__datasets__"))
            .map_err(|e| RegistryError::InvalidMetadata(format!("base IRI: {e}")))?;
        std::fs::create_dir_all(&config.archive_root).map_err(io_err(&config.archive_root))?;
        Ok(Registry {
            store,
            base,
            archive_root: config.archive_root,
            datasets,
            writes: Mutex::new(()),
            fail_point: Mutex::new(None),
        })
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn datasets_graph_iri(&self) -> &Iri {
        &self.datasets
    }

    pub fn archive_root(&self) -> &Path {
        &self.archive_root
    }

    pub fn set_fail_point(&self, point: Option<FailPoint>) {
        *self.fail_point.lock().expect("lock poisoned") = point;
    }

    pub fn record_iri(&self, prefix: &str, version: &str) -> Result<Iri> {
        Iri::parse(&format!("{}/ontology/{prefix}_{version}", self.base))
            .map_err(|e| RegistryError::InvalidVersion(e.to_string()))
    }

    pub fn default_graph_iri(&self, prefix: &str) -> Result<Iri> {
        Iri::parse(&format!("{}/graph/{prefix}", self.base))
            .map_err(|_| RegistryError::InvalidPrefix(prefix.to_owned()))
    }

    pub fn archive_path(&self, prefix: &str, version: &str) -> PathBuf {
        self.archive_root.join(format!("{prefix}_{version}.ttl"))
    }

    /// The datasets graph with its prefix map.
    pub fn datasets_graph(&self) -> Graph {
        self.store.read().graph(&self.datasets).unwrap_or_else(|| {
            let mut g = Graph::new();
            g.set_prefixes(datasets_prefixes());
            g
        })
    }

    fn records_in(view: &StoreView<'_>, datasets: &Iri) -> Vec<VersionRecord> {
        let Some(g) = view.graph(datasets) else {
            return Vec::new();
        };
        let mut subjects: BTreeSet<Iri> = BTreeSet::new();
        for t in g.iter() {
            if t.predicate.as_str() == vann::PREFERRED_NAMESPACE_PREFIX {
                if let Subject::Iri(i) = &t.subject {
                    subjects.insert(i.clone());
                }
            }
        }
        subjects
            .iter()
            .filter_map(|s| VersionRecord::from_graph(&g, s))
            .collect()
    }

    /// Every record of every prefix, ordered by prefix then record IRI.
    pub fn records(&self) -> Vec<VersionRecord> {
        let mut v = Self::records_in(&self.store.read(), &self.datasets);
        v.sort_by(|a, b| (&a.prefix, &a.record_iri).cmp(&(&b.prefix, &b.record_iri)));
        v
    }

    /// The latest record of every registered prefix, ordered by prefix.
    pub fn list(&self) -> Vec<VersionRecord> {
        self.records().into_iter().filter(VersionRecord::is_latest).collect()
    }

    fn prefix_records(records: &[VersionRecord], prefix: &str) -> Result<Vec<VersionRecord>> {
        let mut v: Vec<VersionRecord> = records.iter().filter(|r| r.prefix == prefix).cloned().collect();
        if v.is_empty() {
            return Err(RegistryError::UnknownPrefix(prefix.to_owned()));
        }
        v.sort_by(|a, b| {
            b.issued
                .cmp(&a.issued)
                .then_with(|| b.version_info.cmp(&a.version_info))
        });
        Ok(v)
    }

    fn latest_of(records: &[VersionRecord], prefix: &str) -> Result<VersionRecord> {
        Self::prefix_records(records, prefix)?
            .into_iter()
            .find(VersionRecord::is_latest)
            .ok_or_else(|| RegistryError::UnknownPrefix(prefix.to_owned()))
    }

    pub fn latest(&self, prefix: &str) -> Result<VersionRecord> {
        Self::latest_of(&self.records(), prefix)
    }

    /// Newest first by issued date, then by version string descending.
    pub fn versions(&self, prefix: &str) -> Result<Vec<VersionRecord>> {
        Self::prefix_records(&self.records(), prefix)
    }

    /// The latest graph of a prefix together with its record.
    pub fn latest_graph(&self, prefix: &str) -> Result<(VersionRecord, Graph)> {
        let view = self.store.read();
        let record = Self::latest_of(&Self::records_in(&view, &self.datasets), prefix)?;
        let source = record
            .source_graph
            .clone()
            .expect("latest records carry a source graph");
        let graph = view.graph(&source).unwrap_or_default();
        Ok((record, graph))
    }

    /// The graph of any registered version; archived versions come from their files.
    pub fn version_graph(&self, prefix: &str, version: Option<&str>) -> Result<(VersionRecord, Graph)> {
        let (record, graph) = {
            let view = self.store.read();
            let records = Self::prefix_records(&Self::records_in(&view, &self.datasets), prefix)?;
            let record = match version {
                None => records.into_iter().find(VersionRecord::is_latest),
                Some(v) => records.into_iter().find(|r| r.version_info == v),
            }
            .ok_or_else(|| RegistryError::UnknownVersion {
                prefix: prefix.to_owned(),
                version: version.unwrap_or_default().to_owned(),
            })?;
            let graph = record.source_graph.as_ref().map(|g| view.graph(g).unwrap_or_default());
            (record, graph)
        };
        match graph {
            Some(g) => Ok((record, g)),
            None => {
                let g = self.read_archive(prefix, &record.version_info)?;
                Ok((record, g))
            }
        }
    }

    fn read_archive(&self, prefix: &str, version: &str) -> Result<Graph> {
        let path = self.archive_path(prefix, version);
        let bytes = std::fs::read(&path).map_err(io_err(&path))?;
        Ok(parse(&bytes, SyntaxFormat::Turtle, None)?)
    }

    pub fn dump(&self, prefix: &str, version: Option<&str>, format: SyntaxFormat) -> Result<Vec<u8>> {
        let (_, g) = self.version_graph(prefix, version)?;
        Ok(serialize(&g, format)?)
    }

    pub fn diff(&self, prefix: &str, a: &str, b: &str) -> Result<GraphDiff> {
        let (_, ga) = self.version_graph(prefix, Some(a))?;
        let (_, gb) = self.version_graph(prefix, Some(b))?;
        Ok(diff_graphs(&ga, &gb))
    }

    /// Resolves a prefix, a record IRI, a source graph IRI or a declared
    /// ontology IRI to the latest registered version.
    pub fn resolve_ontology(&self, key: &str) -> Result<(VersionRecord, Graph)> {
        let key = key.trim();
        let latest = self.list();
        if let Some(r) = latest.iter().find(|r| r.prefix == key) {
            return self.latest_graph(&r.prefix);
        }
        if let Ok(iri) = Iri::parse(key) {
            let all = self.records();
            if let Some(r) = all
                .iter()
                .find(|r| r.record_iri == iri || r.source_graph.as_ref() == Some(&iri))
            {
                return self.latest_graph(&r.prefix);
            }
            let declared = Triple::new(iri, Iri::from_trusted(rdf::TYPE), Iri::from_trusted(owl::ONTOLOGY));
            for r in &latest {
                let (record, graph) = self.latest_graph(&r.prefix)?;
                if graph.contains(&declared) {
                    return Ok((record, graph));
                }
            }
        }
        Err(RegistryError::UnknownOntology(key.to_owned()))
    }

    /// Parses and stores a new latest version, archiving the previous one.
    pub fn register(&self, req: RegisterRequest<'_>) -> Result<VersionRecord> {
        if !valid_prefix(req.prefix) {
            return Err(RegistryError::InvalidPrefix(req.prefix.to_owned()));
        }
        let graph = parse(req.document, req.format, req.base.as_ref())?;
        if graph.is_empty() {
            return Err(RegistryError::EmptyOntology);
        }
        let (doc_title, doc_description, doc_version) = document_metadata(&graph);
        let meta = req.metadata;
        let version = meta
            .version_info
            .or(doc_version)
            .map(|v| v.trim().to_owned())
            .ok_or_else(|| RegistryError::InvalidVersion(String::new()))?;
        if !valid_version(&version) {
            return Err(RegistryError::InvalidVersion(version));
        }
        let source = match req.source_graph {
            Some(g) => g,
            None => self.default_graph_iri(req.prefix)?,
        };
        if source == self.datasets {
            return Err(RegistryError::SourceGraphConflict {
                graph: source,
                owner: "the registry".to_owned(),
            });
        }

        let _guard = self.writes.lock().expect("lock poisoned");
        let records = self.records();
        if records
            .iter()
            .any(|r| r.prefix == req.prefix && r.version_info == version)
        {
            return Err(RegistryError::DuplicateVersion {
                prefix: req.prefix.to_owned(),
                version,
            });
        }
        if let Some(owner) = records
            .iter()
            .find(|r| r.prefix != req.prefix && r.source_graph.as_ref() == Some(&source))
        {
            return Err(RegistryError::SourceGraphConflict {
                graph: source,
                owner: owner.prefix.clone(),
            });
        }
        let prior = records
            .iter()
            .find(|r| r.prefix == req.prefix && r.is_latest())
            .cloned();

        let record = VersionRecord {
            record_iri: self.record_iri(req.prefix, &version)?,
            prefix: req.prefix.to_owned(),
            title: meta.title.or(doc_title).unwrap_or_else(|| req.prefix.to_owned()),
            description: meta.description.or(doc_description),
            version_info: version,
            issued: meta.issued.unwrap_or_else(|| {
                let now = Utc::now().naive_utc();
                now.with_nanosecond_zero()
            }),
            rights: meta.rights,
            license: meta.license,
            source_graph: Some(source.clone()),
            contributor: meta.contributor,
            catalogue: meta.catalogue,
        };

        let mut datasets = self.datasets_graph();
        let mut ops = Vec::new();
        let mut archived = None;
        if let Some(prior) = &prior {
            let prior_source = prior.source_graph.clone().expect("latest records carry a source graph");
            archived = Some(self.archive_latest(prior, &prior_source, &mut datasets)?);
            if prior_source != source {
                ops.push(WriteOp::Delete {
                    graph: Some(prior_source),
                });
            }
        }
        datasets.extend(record.triples());
        ops.push(WriteOp::Put {
            graph: Some(source),
            content: graph,
        });
        ops.push(WriteOp::Put {
            graph: Some(self.datasets.clone()),
            content: datasets,
        });
        self.commit(ops, archived)?;
        Ok(record)
    }

    /// Makes an archived version the latest again, archiving the current one.
    pub fn rollback(&self, prefix: &str, version: &str) -> Result<VersionRecord> {
        let _guard = self.writes.lock().expect("lock poisoned");
        let records = self.records();
        let unknown = || RegistryError::UnknownVersion {
            prefix: prefix.to_owned(),
            version: version.to_owned(),
        };
        let target = records
            .iter()
            .find(|r| r.prefix == prefix && r.version_info == version)
            .cloned()
            .ok_or_else(unknown)?;
        if target.is_latest() {
            return Err(RegistryError::VersionAlreadyLatest {
                prefix: prefix.to_owned(),
                version: version.to_owned(),
            });
        }
        let current = Self::latest_of(&records, prefix)?;
        let source = current
            .source_graph
            .clone()
            .expect("latest records carry a source graph");
        let restored = self.read_archive(prefix, version)?;

        let mut datasets = self.datasets_graph();
        let archived = self.archive_latest(&current, &source, &mut datasets)?;
        let gains_source = Triple::new(target.record_iri.clone(), Iri::from_trusted(dc::SOURCE), source.clone());
        datasets.insert(gains_source);
        let ops = vec![
            WriteOp::Put {
                graph: Some(source.clone()),
                content: restored,
            },
            WriteOp::Put {
                graph: Some(self.datasets.clone()),
                content: datasets,
            },
        ];
        self.commit(ops, Some(archived))?;
        Ok(VersionRecord {
            source_graph: Some(source),
            ..target
        })
    }

    /// Writes the latest graph of `record` to its archive file and drops its
    /// `dc:source` from `datasets`.
    fn archive_latest(&self, record: &VersionRecord, source: &Iri, datasets: &mut Graph) -> Result<ArchiveWrite> {
        let graph = self.store.read().graph(source).unwrap_or_default();
        let bytes = serialize(&graph, SyntaxFormat::Turtle)?;
        let path = self.archive_path(&record.prefix, &record.version_info);
        let previous = match std::fs::read(&path) {
            Ok(b) => Some(b),
            Err(e) if e.kind() == io::ErrorKind::NotFound => None,
            Err(e) => return Err(io_err(&path)(e)),
        };
        write_atomically(&path, &bytes).map_err(io_err(&path))?;
        let undo = ArchiveWrite { path, previous };

        if *self.fail_point.lock().expect("lock poisoned") == Some(FailPoint::AfterArchiveWrite) {
            let path = undo.path.clone();
            undo.undo();
            return Err(io_err(&path)(io::Error::other("injected fault after archive write")));
        }
        datasets.remove(&Triple::new(
            record.record_iri.clone(),
            Iri::from_trusted(dc::SOURCE),
            source.clone(),
        ));
        Ok(undo)
    }

    fn commit(&self, ops: Vec<WriteOp>, archived: Option<ArchiveWrite>) -> Result<()> {
        if let Err(e) = self.store.apply(ops) {
            if let Some(a) = archived {
                a.undo();
            }
            return Err(e.into());
        }
        Ok(())
    }

    /// Case-insensitive substring search over the latest versions.
    pub fn search(&self, query: &str, facets: &BTreeSet<SearchField>) -> Result<Vec<SearchHit>> {
        let needle = query.trim().to_lowercase();
        if needle.is_empty() {
            return Err(RegistryError::EmptyQuery);
        }
        let enabled = |f: SearchField| facets.is_empty() || facets.contains(&f);
        let mut hits = Vec::new();
        for record in self.list() {
            let (_, graph) = self.latest_graph(&record.prefix)?;
            let ontology_hit = |field: SearchField, snippet: String| SearchHit {
                prefix: record.prefix.clone(),
                term_iri: record.record_iri.clone(),
                term_kind: TermKind::Ontology,
                matched_field: field,
                snippet,
            };
            if enabled(SearchField::Prefix) && contains_ci(&record.prefix, &needle) {
                hits.push(ontology_hit(
                    SearchField::Prefix,
                    format!("{}: {}", record.prefix, record.title),
                ));
            }
            if enabled(SearchField::Contributor) {
                if let Some(c) = record.contributor.as_ref().filter(|c| contains_ci(c, &needle)) {
                    hits.push(ontology_hit(SearchField::Contributor, c.clone()));
                }
            }
            if enabled(SearchField::Catalogue) {
                for c in record.catalogue.iter().filter(|c| contains_ci(c, &needle)) {
                    hits.push(ontology_hit(SearchField::Catalogue, c.clone()));
                }
            }
            for (iri, kind) in term_kinds(&graph) {
                let subject = Subject::Iri(iri.clone());
                let literals = |p: &str| -> Vec<String> {
                    let mut v: Vec<String> = graph
                        .objects(&subject, p)
                        .filter_map(Term::as_literal)
                        .map(|l| l.lexical().to_owned())
                        .collect();
                    v.sort();
                    v
                };
                let found = [SearchField::LocalName, SearchField::Label, SearchField::Comment]
                    .into_iter()
                    .filter(|f| enabled(*f))
                    .find_map(|f| {
                        let candidates = match f {
                            SearchField::LocalName => vec![iri.local_name().to_owned()],
                            SearchField::Label => literals(rdfs::LABEL),
                            _ => literals(rdfs::COMMENT),
                        };
                        candidates.into_iter().find(|c| contains_ci(c, &needle)).map(|c| (f, c))
                    });
                if let Some((field, snippet)) = found {
                    hits.push(SearchHit {
                        prefix: record.prefix.clone(),
                        term_iri: iri,
                        term_kind: kind,
                        matched_field: field,
                        snippet,
                    });
                }
            }
        }
        hits.sort();
        Ok(hits)
    }
}

trait NanosecondZero {
    fn with_nanosecond_zero(self) -> Self;
}

impl NanosecondZero for NaiveDateTime {
    fn with_nanosecond_zero(self) -> Self {
        use chrono::Timelike;
        self.with_nanosecond(0).expect("zero nanoseconds is valid")
    }
}

/// Searchable vocabulary terms: IRIs declared as classes, object properties or
/// datatype properties. A term with several declarations takes the first kind
/// in that order.
pub fn term_kinds(g: &Graph) -> BTreeMap<Iri, TermKind> {
    let mut out = BTreeMap::new();
    for (ty, kind) in [
        (owl::CLASS, TermKind::Class),
        (rdfs::CLASS, TermKind::Class),
        (owl::OBJECT_PROPERTY, TermKind::ObjectProperty),
        (owl::DATATYPE_PROPERTY, TermKind::DatatypeProperty),
    ] {
        let ty = Term::Iri(Iri::from_trusted(ty));
        for s in g.subjects(rdf::TYPE, &ty) {
            if let Subject::Iri(i) = s {
                out.entry(i.clone())
                    .and_modify(|k: &mut TermKind| *k = (*k).min(kind))
                    .or_insert(kind);
            }
        }
    }
    out
}

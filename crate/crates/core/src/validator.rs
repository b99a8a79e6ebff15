//! Dataset statistics and ontology validation against SPARQL endpoints.
//!
//! The validator only ever emits the three query shapes built by [`Query`].
//! [`answer`] evaluates exactly those shapes against a local store, which
//! backs both offline mode and the bundled mock endpoint.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::OnceLock;
use std::time::Duration;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Graph, Iri, Subject, Term, Triple};
use crate::registry::{Registry, RegistryError};
use crate::schema::{extract_schema_terms, SchemaTerms};
use crate::store::{QuadPattern, Store, StoreView};
use crate::vocab::{is_core_term, owl, rdf, xsd};

/// Endpoint address that selects the embedded store instead of HTTP.
pub const LOCAL_ENDPOINT: &str = "local";
pub const SPARQL_RESULTS_JSON: &str = "application/sparql-results+json";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);
pub const DEFAULT_PAGE_SIZE: usize = 1000;

#[derive(Debug, Error)]
pub enum ValidatorError {
    #[error("cannot reach endpoint {endpoint}: {message}")]
    Network { endpoint: String, message: String },
    #[error("endpoint error: {0}")]
    Endpoint(String),
    #[error("endpoint {0} timed out")]
    Timeout(String),
    #[error("no registered ontology matches {0}")]
    UnknownOntology(String),
    #[error("no target graphs selected")]
    NoTargetGraphs,
    #[error("invalid endpoint address {0:?}")]
    InvalidEndpoint(String),
    #[error("unsupported query: {0}")]
    UnsupportedQuery(String),
    #[error(transparent)]
    Registry(RegistryError),
}

impl ValidatorError {
    pub fn code(&self) -> &'static str {
        match self {
            ValidatorError::Network { .. } => "network-error",
            ValidatorError::Endpoint(_) => "endpoint-error",
            ValidatorError::Timeout(_) => "timeout",
            ValidatorError::UnknownOntology(_) => "unknown-ontology",
            ValidatorError::NoTargetGraphs => "no-target-graphs",
            ValidatorError::InvalidEndpoint(_) => "invalid-endpoint",
            ValidatorError::UnsupportedQuery(_) => "unsupported-query",
            ValidatorError::Registry(e) => e.code(),
        }
    }
}

impl From<RegistryError> for ValidatorError {
    fn from(e: RegistryError) -> Self {
        match e {
            RegistryError::UnknownOntology(key) => ValidatorError::UnknownOntology(key),
            other => ValidatorError::Registry(other),
        }
    }
}

type Result<T, E = ValidatorError> = std::result::Result<T, E>;

/// An endpoint address plus the graphs a job runs over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndpointSession {
    pub endpoint_url: String,
    pub target_graphs: BTreeSet<Iri>,
    pub timeout: Duration,
    /// Always at least 1.
    pub page_size: usize,
}

impl EndpointSession {
    pub fn new(endpoint_url: impl Into<String>) -> Self {
        EndpointSession {
            endpoint_url: endpoint_url.into(),
            target_graphs: BTreeSet::new(),
            timeout: DEFAULT_TIMEOUT,
            page_size: DEFAULT_PAGE_SIZE,
        }
    }

    pub fn with_graphs(mut self, graphs: impl IntoIterator<Item = Iri>) -> Self {
        self.target_graphs.extend(graphs);
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn with_page_size(mut self, page_size: usize) -> Self {
        self.page_size = page_size.max(1);
        self
    }

    pub fn is_local(&self) -> bool {
        self.endpoint_url == LOCAL_ENDPOINT
    }
}

// SPARQL JSON results

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultTerm {
    #[serde(rename = "type")]
    pub kind: String,
    pub value: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub datatype: Option<String>,
    #[serde(default, rename = "xml:lang", skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
}

impl ResultTerm {
    pub fn iri(iri: &Iri) -> Self {
        ResultTerm {
            kind: "uri".into(),
            value: iri.as_str().to_owned(),
            datatype: None,
            lang: None,
        }
    }

    pub fn integer(n: usize) -> Self {
        ResultTerm {
            kind: "literal".into(),
            value: n.to_string(),
            datatype: Some(xsd::INTEGER.into()),
            lang: None,
        }
    }
}

pub type Binding = BTreeMap<String, ResultTerm>;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultHead {
    #[serde(default)]
    pub vars: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRows {
    pub bindings: Vec<Binding>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparqlResults {
    #[serde(default)]
    pub head: ResultHead,
    pub results: ResultRows,
}

/// Anything that answers SELECT queries with SPARQL JSON results.
pub trait SparqlEndpoint: Send + Sync {
    fn select(&self, query: &str) -> Result<SparqlResults>;
}

/// SPARQL 1.1 protocol client: form-encoded POST, falling back to GET when
/// the endpoint refuses POST.
pub struct HttpEndpoint {
    url: String,
    agent: ureq::Agent,
}

impl HttpEndpoint {
    pub fn new(url: &str, timeout: Duration) -> Result<Self> {
        let lower = url.to_ascii_lowercase();
        if !(lower.starts_with("http://") || lower.starts_with("https://")) {
            return Err(ValidatorError::InvalidEndpoint(url.to_owned()));
        }
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(timeout))
            .http_status_as_error(false)
            .build()
            .new_agent();
        Ok(HttpEndpoint {
            url: url.to_owned(),
            agent,
        })
    }

    fn map_err(&self, e: ureq::Error) -> ValidatorError {
        match e {
            ureq::Error::Timeout(_) => ValidatorError::Timeout(self.url.clone()),
            ureq::Error::Io(io) if io.kind() == std::io::ErrorKind::TimedOut => {
                ValidatorError::Timeout(self.url.clone())
            }
            ureq::Error::BadUri(_) => ValidatorError::InvalidEndpoint(self.url.clone()),
            other => ValidatorError::Network {
                endpoint: self.url.clone(),
                message: other.to_string(),
            },
        }
    }
}

impl SparqlEndpoint for HttpEndpoint {
    fn select(&self, query: &str) -> Result<SparqlResults> {
        let mut resp = self
            .agent
            .post(&self.url)
            .header("Accept", SPARQL_RESULTS_JSON)
            .send_form([("query", query)])
            .map_err(|e| self.map_err(e))?;
        if matches!(resp.status().as_u16(), 405 | 415) {
            resp = self
                .agent
                .get(&self.url)
                .header("Accept", SPARQL_RESULTS_JSON)
                .query("query", query)
                .call()
                .map_err(|e| self.map_err(e))?;
        }
        let status = resp.status();
        let body = resp.body_mut().read_to_string().map_err(|e| self.map_err(e))?;
        if !status.is_success() {
            let snippet: String = body.chars().take(200).collect();
            return Err(ValidatorError::Endpoint(format!(
                "HTTP {}: {}",
                status.as_u16(),
                snippet.trim()
            )));
        }
        serde_json::from_str(&body).map_err(|e| ValidatorError::Endpoint(format!("malformed results: {e}")))
    }
}

/// Answers the validator's queries from an embedded store.
pub struct LocalEndpoint<'a> {
    store: &'a Store,
}

impl<'a> LocalEndpoint<'a> {
    pub fn new(store: &'a Store) -> Self {
        LocalEndpoint { store }
    }
}

impl SparqlEndpoint for LocalEndpoint<'_> {
    fn select(&self, query: &str) -> Result<SparqlResults> {
        answer(&self.store.read(), query)
    }
}

// Query templates

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Graphs {
        limit: usize,
        offset: usize,
    },
    ClassUsage {
        graphs: BTreeSet<Iri>,
        limit: usize,
        offset: usize,
    },
    PropertyUsage {
        graphs: BTreeSet<Iri>,
        limit: usize,
        offset: usize,
    },
}

fn from_clauses(graphs: &BTreeSet<Iri>) -> String {
    graphs.iter().map(|g| format!("FROM <{}>\n", g.as_str())).collect()
}

impl Query {
    pub fn to_sparql(&self) -> String {
        match self {
            Query::Graphs { limit, offset } => format!(
                "SELECT DISTINCT ?g WHERE {{ GRAPH ?g {{ ?s ?p ?o }} }}\nORDER BY ?g\nLIMIT {limit} OFFSET {offset}"
            ),
            Query::ClassUsage { graphs, limit, offset } => format!(
                "SELECT ?class (COUNT(DISTINCT ?s) AS ?count)\n{}WHERE {{ ?s a ?class . FILTER(isIRI(?class)) }}\n\
                 GROUP BY ?class\nORDER BY DESC(?count) ?class\nLIMIT {limit} OFFSET {offset}",
                from_clauses(graphs)
            ),
            Query::PropertyUsage { graphs, limit, offset } => format!(
                "SELECT ?property (COUNT(*) AS ?count)\n{}WHERE {{ ?s ?property ?o }}\n\
                 GROUP BY ?property\nORDER BY DESC(?count) ?property\nLIMIT {limit} OFFSET {offset}",
                from_clauses(graphs)
            ),
        }
    }

    /// Recognises the texts produced by [`Query::to_sparql`], modulo
    /// whitespace and keyword case.
    pub fn parse(text: &str) -> Option<Query> {
        static PATTERNS: OnceLock<[Regex; 3]> = OnceLock::new();
        let [graphs_re, class_re, prop_re] = PATTERNS.get_or_init(|| {
            let page = r"LIMIT (\d+) OFFSET (\d+)$";
            let from = r"((?:FROM <[^<>\s]*> )*)";
            [
                Regex::new(&format!(
                    r"(?i)^SELECT DISTINCT \?g WHERE \{{ GRAPH \?g \{{ \?s \?p \?o \}} \}} ORDER BY \?g {page}"
                )),
                Regex::new(&format!(
                    r"(?i)^SELECT \?class \(COUNT\(DISTINCT \?s\) AS \?count\) {from}WHERE \{{ \?s a \?class \. FILTER\(isIRI\(\?class\)\) \}} GROUP BY \?class ORDER BY DESC\(\?count\) \?class {page}"
                )),
                Regex::new(&format!(
                    r"(?i)^SELECT \?property \(COUNT\(\*\) AS \?count\) {from}WHERE \{{ \?s \?property \?o \}} GROUP BY \?property ORDER BY DESC\(\?count\) \?property {page}"
                )),
            ]
            .map(|r| r.expect("query pattern"))
        });
        let normal = text.split_whitespace().collect::<Vec<_>>().join(" ");
        let number = |c: &regex::Captures<'_>, i: usize| c.get(i)?.as_str().parse::<usize>().ok();
        if let Some(c) = graphs_re.captures(&normal) {
            return Some(Query::Graphs {
                limit: number(&c, 1)?,
                offset: number(&c, 2)?,
            });
        }
        let graphs = |c: &regex::Captures<'_>| -> Option<BTreeSet<Iri>> {
            c[1].split_whitespace()
                .filter(|w| !w.eq_ignore_ascii_case("FROM"))
                .map(|w| Iri::parse(w.trim_start_matches('<').trim_end_matches('>')).ok())
                .collect()
        };
        if let Some(c) = class_re.captures(&normal) {
            return Some(Query::ClassUsage {
                graphs: graphs(&c)?,
                limit: number(&c, 2)?,
                offset: number(&c, 3)?,
            });
        }
        if let Some(c) = prop_re.captures(&normal) {
            return Some(Query::PropertyUsage {
                graphs: graphs(&c)?,
                limit: number(&c, 2)?,
                offset: number(&c, 3)?,
            });
        }
        None
    }
}

fn page<T>(items: Vec<T>, limit: usize, offset: usize) -> impl Iterator<Item = T> {
    items.into_iter().skip(offset).take(limit)
}

/// Sorted by count descending, then IRI ascending.
fn ranked(counts: BTreeMap<Iri, usize>) -> Vec<(Iri, usize)> {
    let mut v: Vec<(Iri, usize)> = counts.into_iter().collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v
}

fn triples_in(view: &StoreView<'_>, graphs: &BTreeSet<Iri>) -> BTreeSet<Triple> {
    graphs
        .iter()
        .flat_map(|g| view.match_quads(&QuadPattern::in_graph(g)))
        .map(|q| q.triple)
        .collect()
}

fn count_rows(var: &str, rows: impl Iterator<Item = (Iri, usize)>) -> SparqlResults {
    SparqlResults {
        head: ResultHead {
            vars: vec![var.to_owned(), "count".to_owned()],
        },
        results: ResultRows {
            bindings: rows
                .map(|(iri, n)| {
                    Binding::from([
                        (var.to_owned(), ResultTerm::iri(&iri)),
                        ("count".to_owned(), ResultTerm::integer(n)),
                    ])
                })
                .collect(),
        },
    }
}

/// Evaluates one of the validator's query shapes against a store snapshot.
/// The FROM graphs form the default graph as the set union of their triples.
pub fn answer(view: &StoreView<'_>, query: &str) -> Result<SparqlResults> {
    let parsed = Query::parse(query).ok_or_else(|| {
        let head: String = query
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ")
            .chars()
            .take(80)
            .collect();
        ValidatorError::UnsupportedQuery(head)
    })?;
    Ok(match parsed {
        Query::Graphs { limit, offset } => SparqlResults {
            head: ResultHead { vars: vec!["g".into()] },
            results: ResultRows {
                bindings: page(view.list_graphs().into_iter().collect(), limit, offset)
                    .map(|g| Binding::from([("g".to_owned(), ResultTerm::iri(&g))]))
                    .collect(),
            },
        },
        Query::ClassUsage { graphs, limit, offset } => {
            let mut typed: BTreeMap<Iri, BTreeSet<Subject>> = BTreeMap::new();
            for t in triples_in(view, &graphs) {
                if t.predicate.as_str() == rdf::TYPE {
                    if let Term::Iri(class) = t.object {
                        typed.entry(class).or_default().insert(t.subject);
                    }
                }
            }
            let counts = typed.into_iter().map(|(c, s)| (c, s.len())).collect();
            count_rows("class", page(ranked(counts), limit, offset))
        }
        Query::PropertyUsage { graphs, limit, offset } => {
            let mut counts: BTreeMap<Iri, usize> = BTreeMap::new();
            for t in triples_in(view, &graphs) {
                *counts.entry(t.predicate).or_default() += 1;
            }
            count_rows("property", page(ranked(counts), limit, offset))
        }
    })
}

// Reports

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TermCount {
    pub iri: Iri,
    pub count: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StatsReport {
    pub class_usage: Vec<TermCount>,
    pub property_usage: Vec<TermCount>,
    pub graphs_covered: BTreeSet<Iri>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub iri: Iri,
    pub count: usize,
    pub defined: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ontology_iri: Iri,
    pub class_verdicts: Vec<Verdict>,
    pub property_verdicts: Vec<Verdict>,
    pub graphs_covered: BTreeSet<Iri>,
}

impl ValidationReport {
    pub fn undefined(&self) -> impl Iterator<Item = &Verdict> {
        self.class_verdicts
            .iter()
            .chain(&self.property_verdicts)
            .filter(|v| !v.defined)
    }

    pub fn is_valid(&self) -> bool {
        self.undefined().next().is_none()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "Ontology: {}\nGraphs: {}\n",
            self.ontology_iri.as_str(),
            self.graphs_covered.len()
        );
        for (title, verdicts) in [
            ("Classes", &self.class_verdicts),
            ("Properties", &self.property_verdicts),
        ] {
            out.push('\n');
            let rows: Vec<[String; 3]> = verdicts
                .iter()
                .map(|v| {
                    [
                        v.iri.as_str().to_owned(),
                        v.count.to_string(),
                        if v.defined { "ok" } else { "FAIL" }.to_owned(),
                    ]
                })
                .collect();
            table(&mut out, title, ["term", "count", "verdict"], &rows);
        }
        out
    }
}

impl StatsReport {
    pub fn to_text(&self) -> String {
        let mut out = format!("Graphs: {}\n", self.graphs_covered.len());
        for (title, usage) in [("Classes", &self.class_usage), ("Properties", &self.property_usage)] {
            out.push('\n');
            let rows: Vec<[String; 2]> = usage
                .iter()
                .map(|t| [t.iri.as_str().to_owned(), t.count.to_string()])
                .collect();
            table(&mut out, title, ["term", "count"], &rows);
        }
        out
    }
}

/// Left-aligned first column, right-aligned counts, trailing columns left-aligned.
fn table<const N: usize>(out: &mut String, title: &str, header: [&str; N], rows: &[[String; N]]) {
    let mut widths = header.map(|h| h.chars().count());
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let _ = writeln!(out, "{title} ({})", rows.len());
    let header = header.map(str::to_owned);
    for row in std::iter::once(&header).chain(rows) {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            let pad = widths[i] - cell.chars().count();
            if i == 1 {
                line.push_str(&" ".repeat(pad));
                line.push_str(cell);
            } else {
                line.push_str(cell);
                line.push_str(&" ".repeat(pad));
            }
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }
}

/// Verdicts for measured usage against an ontology graph. A term is defined
/// when the ontology extracts it or it belongs to a core vocabulary.
pub fn judge(stats: &StatsReport, ontology_iri: Iri, ontology: &Graph) -> ValidationReport {
    let terms = extract_schema_terms(ontology);
    let verdicts = |usage: &[TermCount], declared: &BTreeSet<Iri>| -> Vec<Verdict> {
        usage
            .iter()
            .map(|t| Verdict {
                iri: t.iri.clone(),
                count: t.count,
                defined: declared.contains(&t.iri) || is_core_term(t.iri.as_str()),
            })
            .collect()
    };
    ValidationReport {
        ontology_iri,
        class_verdicts: verdicts(&stats.class_usage, &terms.classes),
        property_verdicts: verdicts(&stats.property_usage, &terms.properties),
        graphs_covered: stats.graphs_covered.clone(),
    }
}

/// One statistics or validation job: a session bound to a connected endpoint.
/// Requests are issued sequentially, one page at a time.
pub struct Validator<'a> {
    session: EndpointSession,
    endpoint: Box<dyn SparqlEndpoint + 'a>,
}

impl<'a> Validator<'a> {
    pub fn new(session: EndpointSession, endpoint: Box<dyn SparqlEndpoint + 'a>) -> Self {
        Validator { session, endpoint }
    }

    /// Connects to the session's endpoint; `local` backs the
    /// [`LOCAL_ENDPOINT`] address.
    pub fn connect(session: EndpointSession, local: Option<&'a Store>) -> Result<Self> {
        let endpoint: Box<dyn SparqlEndpoint + 'a> = if session.is_local() {
            let store = local.ok_or_else(|| ValidatorError::InvalidEndpoint(session.endpoint_url.clone()))?;
            Box::new(LocalEndpoint::new(store))
        } else {
            Box::new(HttpEndpoint::new(&session.endpoint_url, session.timeout)?)
        };
        Ok(Validator::new(session, endpoint))
    }

    pub fn session(&self) -> &EndpointSession {
        &self.session
    }

    /// Runs a paged query until a short page comes back.
    fn paged(&self, make: impl Fn(usize, usize) -> Query) -> Result<Vec<Binding>> {
        let limit = self.session.page_size.max(1);
        let mut rows = Vec::new();
        loop {
            let page = self.endpoint.select(&make(limit, rows.len()).to_sparql())?;
            let n = page.results.bindings.len();
            rows.extend(page.results.bindings);
            if n < limit {
                return Ok(rows);
            }
        }
    }

    fn usage(&self, make: impl Fn(BTreeSet<Iri>, usize, usize) -> Query, var: &str) -> Result<Vec<TermCount>> {
        let graphs = self.targets()?;
        let rows = self.paged(|limit, offset| make(graphs.clone(), limit, offset))?;
        let mut counts: BTreeMap<Iri, usize> = BTreeMap::new();
        for row in rows {
            let iri = binding_iri(&row, var)?;
            let count = binding_count(&row)?;
            if count > 0 {
                *counts.entry(iri).or_default() += count;
            }
        }
        Ok(ranked(counts)
            .into_iter()
            .map(|(iri, count)| TermCount { iri, count })
            .collect())
    }

    fn targets(&self) -> Result<BTreeSet<Iri>> {
        if self.session.target_graphs.is_empty() {
            return Err(ValidatorError::NoTargetGraphs);
        }
        Ok(self.session.target_graphs.clone())
    }

    /// Distinct graph names at the endpoint.
    pub fn enumerate_graphs(&self) -> Result<BTreeSet<Iri>> {
        self.paged(|limit, offset| Query::Graphs { limit, offset })?
            .iter()
            .map(|row| binding_iri(row, "g"))
            .collect()
    }

    /// Classes instantiated through rdf:type and predicates used in the
    /// target graphs.
    pub fn used_terms(&self) -> Result<SchemaTerms> {
        let stats = self.stats()?;
        Ok(SchemaTerms {
            classes: stats.class_usage.into_iter().map(|t| t.iri).collect(),
            properties: stats.property_usage.into_iter().map(|t| t.iri).collect(),
        })
    }

    pub fn stats(&self) -> Result<StatsReport> {
        let class_usage = self.usage(
            |graphs, limit, offset| Query::ClassUsage { graphs, limit, offset },
            "class",
        )?;
        let property_usage = self.usage(
            |graphs, limit, offset| Query::PropertyUsage { graphs, limit, offset },
            "property",
        )?;
        Ok(StatsReport {
            class_usage,
            property_usage,
            graphs_covered: self.session.target_graphs.clone(),
        })
    }

    /// Validates usage against the latest version of a registered ontology,
    /// named by prefix or IRI.
    pub fn validate(&self, registry: &Registry, ontology: &str) -> Result<ValidationReport> {
        self.targets()?;
        let (record, graph) = registry.resolve_ontology(ontology)?;
        let stats = self.stats()?;
        let declared = Term::Iri(Iri::from_trusted(owl::ONTOLOGY));
        let ontology_iri = graph
            .subjects(rdf::TYPE, &declared)
            .filter_map(Subject::as_iri)
            .min()
            .cloned()
            .unwrap_or(record.record_iri);
        Ok(judge(&stats, ontology_iri, &graph))
    }
}

fn binding_iri(row: &Binding, var: &str) -> Result<Iri> {
    let term = row
        .get(var)
        .ok_or_else(|| ValidatorError::Endpoint(format!("result row lacks ?{var}")))?;
    if term.kind != "uri" {
        return Err(ValidatorError::Endpoint(format!(
            "?{var} is not an IRI: {}",
            term.value
        )));
    }
    Iri::parse(&term.value).map_err(|e| ValidatorError::Endpoint(e.to_string()))
}

fn binding_count(row: &Binding) -> Result<usize> {
    let term = row
        .get("count")
        .ok_or_else(|| ValidatorError::Endpoint("result row lacks ?count".into()))?;
    if !matches!(term.kind.as_str(), "literal" | "typed-literal") {
        return Err(ValidatorError::Endpoint(format!(
            "?count is not a literal: {}",
            term.value
        )));
    }
    term.value
        .trim()
        .parse()
        .map_err(|_| ValidatorError::Endpoint(format!("?count is not a number: {}", term.value)))
}

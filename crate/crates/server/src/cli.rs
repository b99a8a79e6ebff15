//! Command-line interface.

use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use ontohub_core::hierarchy::tree_text;
use ontohub_core::validator::Validator;
use ontohub_core::Store;

use crate::background::BackgroundServer;
use crate::config::{parse_duration, ServiceConfig};
use crate::error::AppError;
use crate::hub::{parse_format, Hub, JobReport, RegisterParams};

#[derive(Debug, Parser)]
#[command(
    name = "ontohub",
    version,
    about = "Ontology datahub: registry, views, search and dataset validation"
)]
pub struct Cli {
    /// Flat key = value configuration file.
    #[arg(long, global = true, value_name = "FILE", env = "ONTOHUB_CONFIG")]
    pub config: Option<PathBuf>,
    /// Overrides store-root.
    #[arg(long, global = true, value_name = "DIR")]
    pub store: Option<PathBuf>,
    /// Overrides archive-root.
    #[arg(long, global = true, value_name = "DIR")]
    pub archive: Option<PathBuf>,
    /// Overrides base-iri.
    #[arg(long, global = true, value_name = "IRI")]
    pub base_iri: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct JobArgs {
    /// SPARQL endpoint URL, or `local` for the embedded store.
    #[arg(long)]
    pub endpoint: String,
    /// Target graph IRI; repeatable.
    #[arg(long = "graph", value_name = "IRI", required = true)]
    pub graphs: Vec<String>,
    /// Per-request timeout, e.g. `30s` or `500ms`.
    #[arg(long, value_parser = parse_duration)]
    pub timeout: Option<std::time::Duration>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub page_size: Option<u64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Register a new version of an ontology.
    Register {
        file: PathBuf,
        #[arg(long)]
        prefix: String,
        #[arg(long)]
        version: Option<String>,
        /// `YYYY-MM-DD` or `YYYY-MM-DD HH:MM:SS`.
        #[arg(long)]
        issued: Option<String>,
        #[arg(long)]
        title: Option<String>,
        #[arg(long)]
        description: Option<String>,
        #[arg(long)]
        rights: Option<String>,
        #[arg(long)]
        license: Option<String>,
        #[arg(long)]
        contributor: Option<String>,
        /// Catalogue entry; repeatable.
        #[arg(long)]
        catalogue: Vec<String>,
        #[arg(long)]
        source_graph: Option<String>,
        /// Base IRI for relative references in the document.
        #[arg(long)]
        base: Option<String>,
        /// ttl or nt; guessed from the file extension otherwise.
        #[arg(long)]
        format: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Latest version of every registered ontology.
    List {
        #[arg(long)]
        json: bool,
    },
    /// All versions of one ontology, newest first.
    Versions {
        prefix: String,
        #[arg(long)]
        json: bool,
    },
    /// Serialize a version (the latest by default).
    Dump {
        prefix: String,
        #[arg(long)]
        version: Option<String>,
        /// ttl, nt, rdfxml or rdfjson.
        #[arg(long, default_value = "ttl")]
        format: String,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Class hierarchy of the latest version.
    Tree {
        prefix: String,
        #[arg(long)]
        json: bool,
    },
    /// Class and property index of the latest version (JSON, or HTML).
    Listview {
        prefix: String,
        #[arg(long)]
        html: bool,
    },
    /// VOWL-style graph export of the latest version.
    Vowl { prefix: String },
    /// Search the latest versions of all ontologies.
    Search {
        query: String,
        /// local-name, label, comment, catalogue, prefix or contributor; repeatable.
        #[arg(long)]
        facet: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Triples added and removed between two versions.
    Diff {
        prefix: String,
        from: String,
        to: String,
        #[arg(long)]
        json: bool,
    },
    /// Make an archived version the latest again.
    Rollback { prefix: String, version: String },
    /// Class and property usage counts over target graphs.
    Stats(JobArgs),
    /// Check the terms used in target graphs against a registered ontology.
    Validate {
        #[command(flatten)]
        job: JobArgs,
        /// Prefix or ontology IRI.
        #[arg(long)]
        ontology: String,
        /// Exit with status 1 when any term is undefined.
        #[arg(long)]
        strict: bool,
    },
    /// Graph names available at an endpoint.
    Graphs {
        #[arg(long)]
        endpoint: String,
        #[arg(long, value_parser = parse_duration)]
        timeout: Option<std::time::Duration>,
    },
    /// Run the HTTP service.
    Serve {
        /// Overrides listen-address.
        #[arg(long)]
        listen: Option<SocketAddr>,
    },
    /// Serve a store read-only through the SPARQL subset the validator emits.
    MockEndpoint {
        /// Store root to expose.
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8890")]
        listen: SocketAddr,
    },
}

impl Cli {
    pub fn service_config(&self) -> Result<ServiceConfig, AppError> {
        let mut config = ServiceConfig::load(self.config.as_deref(), std::env::vars())?;
        if let Some(s) = &self.store {
            config.store_root = s.clone();
        }
        if let Some(a) = &self.archive {
            config.archive_root = a.clone();
        }
        if let Some(b) = &self.base_iri {
            config.base_iri = b.trim_end_matches('/').to_owned();
        }
        config.check()?;
        Ok(config)
    }
}

fn columns(rows: &[Vec<String>]) -> String {
    let width = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..width)
        .map(|i| {
            rows.iter()
                .filter_map(|r| r.get(i))
                .map(|c| c.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (i, cell) in row.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            line.push_str(&" ".repeat(widths[i] - cell.chars().count()));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn pretty(value: &impl serde::Serialize) -> Result<String, AppError> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| AppError::Internal(e.to_string()))
}

/// Runs one command. Returns the process exit status.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    match execute(cli, out) {
        Ok(status) => status,
        Err(e) => {
            let _ = writeln!(err, "error[{}]: {e}", e.code());
            if let Some(d) = e.diagnostic() {
                let _ = writeln!(err, "  at line {}, column {}", d.line, d.column);
            }
            e.exit_code()
        }
    }
}

fn write_out(out: &mut dyn Write, bytes: &[u8]) -> Result<(), AppError> {
    out.write_all(bytes).map_err(|source| AppError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<u8, AppError> {
    let config = cli.service_config()?;
    let hub = || Hub::open(config.clone());
    let text = match cli.command {
        Command::Register {
            file,
            prefix,
            version,
            issued,
            title,
            description,
            rights,
            license,
            contributor,
            catalogue,
            source_graph,
            base,
            format,
            json,
        } => {
            let params = RegisterParams {
                prefix,
                version,
                issued,
                title,
                description,
                rights,
                license,
                contributor,
                catalogue: (!catalogue.is_empty()).then(|| catalogue.join(",")),
                source_graph,
                base,
                format,
            };
            let record = hub()?.register_file(&file, &params)?;
            if json {
                pretty(&record)?
            } else {
                format!(
                    "registered {} version {} as {}\n",
                    record.prefix,
                    record.version_info,
                    record.record_iri.as_str()
                )
            }
        }
        Command::List { json } => {
            let records = hub()?.registry.list();
            if json {
                pretty(&records)?
            } else {
                let mut rows = vec![vec!["prefix".into(), "version".into(), "issued".into(), "title".into()]];
                rows.extend(records.iter().map(|r| {
                    vec![
                        r.prefix.clone(),
                        r.version_info.clone(),
                        r.issued.format(ontohub_core::registry::ISSUED_FORMAT).to_string(),
                        r.title.clone(),
                    ]
                }));
                columns(&rows)
            }
        }
        Command::Versions { prefix, json } => {
            let versions = hub()?.registry.versions(&prefix)?;
            if json {
                pretty(&versions)?
            } else {
                let mut rows = vec![vec![
                    "version".into(),
                    "issued".into(),
                    "latest".into(),
                    "record".into(),
                ]];
                rows.extend(versions.iter().map(|r| {
                    vec![
                        r.version_info.clone(),
                        r.issued.format(ontohub_core::registry::ISSUED_FORMAT).to_string(),
                        if r.is_latest() { "*" } else { "" }.into(),
                        r.record_iri.as_str().to_owned(),
                    ]
                }));
                columns(&rows)
            }
        }
        Command::Dump {
            prefix,
            version,
            format,
            output,
        } => {
            let format = parse_format(&format)?;
            let bytes = hub()?.registry.dump(&prefix, version.as_deref(), format)?;
            match output {
                Some(path) => std::fs::write(&path, &bytes).map_err(|source| AppError::Io { path, source })?,
                None => write_out(out, &bytes)?,
            }
            return Ok(0);
        }
        Command::Tree { prefix, json } => {
            let forest = hub()?.tree(&prefix)?;
            if json {
                pretty(&forest)?
            } else {
                tree_text(&forest.roots)
            }
        }
        Command::Listview { prefix, html } => {
            let (record, view) = hub()?.list_view(&prefix)?;
            if html {
                view.to_html(&record.title)
            } else {
                pretty(&view)?
            }
        }
        Command::Vowl { prefix } => pretty(&hub()?.vowl(&prefix)?)?,
        Command::Search { query, facet, json } => {
            let hits = hub()?.search(&query, &facet)?;
            if json {
                pretty(&hits)?
            } else {
                let rows: Vec<Vec<String>> = hits
                    .iter()
                    .map(|h| {
                        vec![
                            h.prefix.clone(),
                            h.term_kind.to_string(),
                            h.matched_field.to_string(),
                            h.term_iri.as_str().to_owned(),
                            h.snippet.clone(),
                        ]
                    })
                    .collect();
                columns(&rows)
            }
        }
        Command::Diff { prefix, from, to, json } => {
            let d = hub()?.registry.diff(&prefix, &from, &to)?;
            if json {
                let lines = |s: &std::collections::BTreeSet<ontohub_core::Triple>| -> Vec<String> {
                    s.iter().map(|t| t.to_string()).collect()
                };
                pretty(&serde_json::json!({ "added": lines(&d.added), "removed": lines(&d.removed) }))?
            } else {
                let mut s = String::new();
                for t in &d.removed {
                    s.push_str(&format!("- {t}\n"));
                }
                for t in &d.added {
                    s.push_str(&format!("+ {t}\n"));
                }
                s
            }
        }
        Command::Rollback { prefix, version } => {
            let record = hub()?.registry.rollback(&prefix, &version)?;
            format!("{} is now at version {}\n", record.prefix, record.version_info)
        }
        Command::Stats(job) => {
            let report = job_report(&config, &job, None)?;
            render(&report, job.json)?
        }
        Command::Validate { job, ontology, strict } => {
            let report = job_report(&config, &job, Some(&ontology))?;
            let text = render(&report, job.json)?;
            write_out(out, text.as_bytes())?;
            let failed = matches!(&report, JobReport::Validation(r) if !r.is_valid());
            return Ok(if strict && failed { 1 } else { 0 });
        }
        Command::Graphs { endpoint, timeout } => {
            let session = ontohub_core::validator::EndpointSession::new(endpoint)
                .with_timeout(timeout.unwrap_or(config.default_timeout))
                .with_page_size(config.page_size);
            let graphs = if session.is_local() {
                hub()?.endpoint_graphs(session)?
            } else {
                Validator::connect(session, None)?.enumerate_graphs()?
            };
            graphs.iter().map(|g| format!("{}\n", g.as_str())).collect()
        }
        Command::Serve { listen } => {
            let addr = listen.unwrap_or(config.listen_address);
            serve(hub()?, addr, out)?;
            return Ok(0);
        }
        Command::MockEndpoint { data, listen } => {
            let store = Arc::new(Store::open(&data)?);
            let server =
                BackgroundServer::spawn(crate::mock::router(store), listen).map_err(|source| AppError::Io {
                    path: PathBuf::from(listen.to_string()),
                    source,
                })?;
            write_out(
                out,
                format!("SPARQL endpoint at {}{}\n", server.url(), crate::mock::PATH).as_bytes(),
            )?;
            let _ = out.flush();
            wait_for_interrupt()?;
            return Ok(0);
        }
    };
    write_out(out, text.as_bytes())?;
    Ok(0)
}

/// Remote jobs without an ontology never touch the local store.
fn job_report(config: &ServiceConfig, job: &JobArgs, ontology: Option<&str>) -> Result<JobReport, AppError> {
    let session = ontohub_core::validator::EndpointSession::new(job.endpoint.trim())
        .with_graphs(
            job.graphs
                .iter()
                .map(|g| ontohub_core::Iri::parse(g).map_err(|e| AppError::BadRequest(format!("graph: {e}"))))
                .collect::<Result<Vec<_>, _>>()?,
        )
        .with_timeout(job.timeout.unwrap_or(config.default_timeout))
        .with_page_size(job.page_size.map(|p| p as usize).unwrap_or(config.page_size));
    if ontology.is_none() && !session.is_local() {
        return Ok(JobReport::Stats(Validator::connect(session, None)?.stats()?));
    }
    Hub::open(config.clone())?.run_job(session, ontology)
}

fn render(report: &JobReport, json: bool) -> Result<String, AppError> {
    if json {
        pretty(report)
    } else {
        Ok(report.to_text())
    }
}

fn runtime() -> Result<tokio::runtime::Runtime, AppError> {
    tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| AppError::Internal(e.to_string()))
}

fn wait_for_interrupt() -> Result<(), AppError> {
    runtime()?.block_on(async {
        let _ = tokio::signal::ctrl_c().await;
    });
    Ok(())
}

fn serve(hub: Hub, addr: SocketAddr, out: &mut dyn Write) -> Result<(), AppError> {
    let rt = runtime()?;
    rt.block_on(async move {
        let listener = tokio::net::TcpListener::bind(addr)
            .await
            .map_err(|source| AppError::Io {
                path: PathBuf::from(addr.to_string()),
                source,
            })?;
        let bound = listener.local_addr().map_err(|e| AppError::Internal(e.to_string()))?;
        write_out(out, format!("listening on http://{bound}\n").as_bytes())?;
        let _ = out.flush();
        axum::serve(listener, crate::http::router(Arc::new(hub)))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| AppError::Internal(e.to_string()))
    })
}

#![allow(dead_code)]

#[path = "../../../core/tests/common/cbdb.rs"]
pub mod cbdb;
#[path = "../../../core/tests/common/dataset.rs"]
pub mod dataset;
#[path = "../../../core/tests/common/foreign.rs"]
pub mod foreign;
#[path = "../../../core/tests/common/gen.rs"]
pub mod gen;
#[path = "../../../core/tests/common/subclass.rs"]
pub mod subclass;

use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::Duration;

use ontohub::background::BackgroundServer;
use ontohub::{Hub, ServiceConfig};
use ontohub_core::{parse, Graph, Iri, Store, SyntaxFormat};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

pub fn fixture_bytes(name: &str) -> Vec<u8> {
    std::fs::read(fixture_path(name)).unwrap_or_else(|e| panic!("fixture {name}: {e}"))
}

pub fn fixture(name: &str) -> Graph {
    parse(&fixture_bytes(name), SyntaxFormat::Turtle, None).unwrap()
}

pub fn iri(s: &str) -> Iri {
    Iri::parse(s).unwrap()
}

pub fn any_port() -> SocketAddr {
    SocketAddr::from(([127, 0, 0, 1], 0))
}

pub fn config_in(dir: &Path) -> ServiceConfig {
    ServiceConfig {
        store_root: dir.join("store"),
        archive_root: dir.join("archive"),
        ..ServiceConfig::default()
    }
}

/// The service on a free port over fresh directories.
pub struct TestService {
    pub dir: tempfile::TempDir,
    pub server: BackgroundServer,
    pub hub: Arc<Hub>,
}

impl TestService {
    pub fn start() -> TestService {
        let dir = tempfile::tempdir().unwrap();
        let hub = Arc::new(Hub::open(config_in(dir.path())).unwrap());
        let server = BackgroundServer::spawn(ontohub::http::router(hub.clone()), any_port()).unwrap();
        TestService { dir, server, hub }
    }

    pub fn url(&self, path: &str) -> String {
        format!("{}{path}", self.server.url())
    }
}

/// A mock SPARQL endpoint over a store seeded with the CBDB-style graphs.
pub struct MockEndpoint {
    pub dir: tempfile::TempDir,
    pub store: Arc<Store>,
    pub server: BackgroundServer,
}

impl MockEndpoint {
    pub fn with(seed: impl FnOnce(&Store)) -> MockEndpoint {
        let dir = tempfile::tempdir().unwrap();
        let store = Arc::new(Store::open(dir.path()).unwrap());
        seed(&store);
        let server = BackgroundServer::spawn(ontohub::mock::router(store.clone()), any_port()).unwrap();
        MockEndpoint { dir, store, server }
    }

    pub fn cbdb() -> MockEndpoint {
        MockEndpoint::with(cbdb::seed)
    }

    pub fn url(&self) -> String {
        format!("{}{}", self.server.url(), ontohub::mock::PATH)
    }
}

pub fn agent() -> ureq::Agent {
    ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(Duration::from_secs(20)))
        .build()
        .new_agent()
}

pub struct Reply {
    pub status: u16,
    pub content_type: String,
    pub headers: Vec<(String, String)>,
    pub body: Vec<u8>,
}

impl Reply {
    pub fn text(&self) -> String {
        String::from_utf8(self.body.clone()).unwrap()
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::from_slice(&self.body)
            .unwrap_or_else(|e| panic!("not JSON ({e}): {}", String::from_utf8_lossy(&self.body)))
    }

    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| v.as_str())
    }
}

fn reply(mut resp: ureq::http::Response<ureq::Body>) -> Reply {
    let headers = resp
        .headers()
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_str().unwrap_or("").to_owned()))
        .collect::<Vec<_>>();
    let content_type = headers
        .iter()
        .find(|(k, _)| k == "content-type")
        .map(|(_, v)| v.clone())
        .unwrap_or_default();
    Reply {
        status: resp.status().as_u16(),
        content_type,
        headers,
        body: resp.body_mut().read_to_vec().unwrap(),
    }
}

pub fn get(url: &str, accept: Option<&str>) -> Reply {
    let mut req = agent().get(url);
    if let Some(a) = accept {
        req = req.header("Accept", a);
    }
    reply(req.call().unwrap())
}

pub fn post(url: &str, content_type: &str, body: &[u8]) -> Reply {
    reply(
        agent()
            .post(url)
            .header("Content-Type", content_type)
            .send(body)
            .unwrap(),
    )
}

pub fn post_json(url: &str, body: &serde_json::Value) -> Reply {
    post(url, "application/json", body.to_string().as_bytes())
}

/// Registers a fixture through the HTTP API.
pub fn register_via_http(service: &TestService, file: &str, query: &str) -> Reply {
    post(
        &service.url(&format!("/ontologies?{query}")),
        "text/turtle",
        &fixture_bytes(file),
    )
}

pub const SCHEMA_31_QUERY: &str = "prefix=schema&version=3.1&issued=2016-08-09&rights=%C2%A9%202016%20Schema&license=https://creativecommons.org/licenses/by/3.0/";
pub const SCHEMA_120_QUERY: &str = "prefix=schema&version=12.0&issued=2021-03-08&rights=%C2%A9%202021%20Schema&license=https://creativecommons.org/licenses/by/3.0/";

/// Output of one CLI invocation.
pub struct Run {
    pub status: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

impl Run {
    pub fn out(&self) -> String {
        String::from_utf8(self.stdout.clone()).unwrap()
    }
}

/// Runs the binary with `--store`/`--archive` under `dir` and a clean
/// environment for configuration variables.
pub fn cli(dir: &Path, args: &[&str]) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ontohub"));
    for (k, _) in std::env::vars() {
        if k.starts_with("ONTOHUB_") {
            cmd.env_remove(k);
        }
    }
    let out = cmd
        .arg("--store")
        .arg(dir.join("store"))
        .arg("--archive")
        .arg(dir.join("archive"))
        .args(args)
        .output()
        .unwrap();
    Run {
        status: out.status.code().unwrap_or(-1),
        stdout: out.stdout,
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

#![allow(dead_code)]

pub mod cbdb;
pub mod dataset;
pub mod foreign;
pub mod gen;
pub mod subclass;

#[allow(unused_imports)]
pub use foreign::{read_rdfjson, read_rdfxml};
#[allow(unused_imports)]
pub use gen::{arb_graph, arb_triple};

use std::path::PathBuf;

use ontohub_core::{parse, BlankNode, Graph, Iri, SyntaxFormat};

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

pub fn ex(local: &str) -> Iri {
    iri(&format!("http://ex.org/{local}"))
}

pub fn blank(l: &str) -> BlankNode {
    BlankNode::new(l).unwrap()
}

pub struct TestRegistry {
    pub dir: tempfile::TempDir,
    pub registry: ontohub_core::registry::Registry,
}

impl TestRegistry {
    pub fn archive_dir(&self) -> PathBuf {
        self.dir.path().join("archive")
    }
}

pub fn open_registry_at(dir: &std::path::Path) -> ontohub_core::registry::Registry {
    let store = ontohub_core::Store::open(dir.join("store")).unwrap();
    ontohub_core::registry::Registry::new(
        store,
        ontohub_core::registry::RegistryConfig {
            base_iri: ontohub_core::registry::DEFAULT_BASE_IRI.to_owned(),
            archive_root: dir.join("archive"),
        },
    )
    .unwrap()
}

pub fn new_registry() -> TestRegistry {
    let dir = tempfile::tempdir().unwrap();
    let registry = open_registry_at(dir.path());
    TestRegistry { dir, registry }
}

pub fn schema_metadata(version: &str) -> ontohub_core::registry::VersionMetadata {
    use ontohub_core::registry::{parse_issued, VersionMetadata};
    let (issued, rights) = match version {
        "3.1" => ("2016-08-09", "© 2016 Schema"),
        "12.0" => ("2021-03-08", "© 2021 Schema"),
        other => panic!("no metadata for {other}"),
    };
    VersionMetadata {
        title: Some("Schema.org vocabulary (schema)".to_owned()),
        description: Some(
            "Search engines including Bing, Google, Yahoo! and Yandex rely on schema.org markup to improve the display of search results, making it easier for people to find the right web pages."
                .to_owned(),
        ),
        version_info: Some(version.to_owned()),
        issued: Some(parse_issued(issued).unwrap()),
        rights: Some(rights.to_owned()),
        license: Some(iri("https://creativecommons.org/licenses/by/3.0/")),
        ..VersionMetadata::default()
    }
}

pub fn register_fixture(
    reg: &ontohub_core::registry::Registry,
    prefix: &str,
    file: &str,
    metadata: ontohub_core::registry::VersionMetadata,
) -> Result<ontohub_core::registry::VersionRecord, ontohub_core::registry::RegistryError> {
    reg.register(ontohub_core::registry::RegisterRequest {
        document: &fixture_bytes(file),
        format: SyntaxFormat::Turtle,
        prefix,
        source_graph: None,
        base: None,
        metadata,
    })
}

pub fn register_schema_pair(reg: &ontohub_core::registry::Registry) {
    register_fixture(reg, "schema", "schema_3.1.ttl", schema_metadata("3.1")).unwrap();
    register_fixture(reg, "schema", "schema_12.0.ttl", schema_metadata("12.0")).unwrap();
}

//! Operator surface of the ontology datahub: the `ontohub` command line,
//! the HTTP service, and a mock SPARQL endpoint for offline validation runs.

pub mod background;
pub mod cli;
pub mod config;
pub mod error;
pub mod http;
pub mod hub;
pub mod mock;

pub use config::ServiceConfig;
pub use error::AppError;
pub use hub::Hub;

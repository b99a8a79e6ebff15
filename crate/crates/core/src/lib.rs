//! Core of the ontology datahub.
//!
//! * [`model`] and [`iso`]: RDF terms, triples, graphs and graph comparison.
//! * [`syntax`]: Turtle / N-Triples reading and the four dump serializations.
//! * [`store`]: the embedded, durable named-graph quad store.
//! * [`registry`]: ontology registration, versions, archives, dumps and search.
//! * [`hierarchy`]: class trees, property inheritance and view exports.
//! * [`validator`]: dataset statistics and validation against SPARQL endpoints.

pub mod hierarchy;
pub mod iso;
pub mod model;
pub mod registry;
pub mod schema;
pub mod store;
pub mod syntax;
pub mod validator;
pub mod vocab;

pub use iso::{canonical_blank_labels, graph_equal_ground};
pub use model::{make_iri, BlankNode, Graph, Iri, Literal, Quad, Subject, Term, TermError, Triple};
pub use store::{GraphPattern, QuadPattern, Store, StoreError, StoreView, WriteOp};
pub use syntax::{parse, serialize, ParseDiagnostic, ParseError, SerializeError, SyntaxFormat};

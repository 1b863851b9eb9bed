//! Detection and removal of non-limited distinct attributes.
//!
//! The crate loads a declared schema and its data, checks normal forms
//! through 3NF and BCNF, finds distinct attributes whose values are not
//! constrained to a fixed set, clusters spelling variants and synonyms, and
//! rewrites the schema so every such attribute references a lookup table or
//! an enumerated type. A workload simulator measures the anomalies each
//! layout admits.

pub mod algebra;
pub mod error;
pub mod fd;
pub mod ingest;
pub mod ldnf;
pub mod model;
pub mod nlda;
pub mod pipeline;
pub mod sim;
pub mod synth;

pub use error::{Error, Result};
pub use model::{AttrType, Attribute, Database, RelationDecl, RelationInstance, SchemaDecl, Value};

//! Schema, data, configuration and workload readers.

pub mod config;
pub mod csv;
pub mod ddl;
pub mod workload;

pub use config::{parse_config, AnalysisConfig, AnnotationKind, Strategy, SynonymGroup};
pub use csv::{data_file_name, load_csv, load_database, write_csv};
pub use ddl::{parse_ddl, to_ddl};
pub use workload::{load_workload, Literal, Operation, Workload};

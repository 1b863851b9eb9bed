use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use ldnf_core::ingest::{data_file_name, load_csv, parse_config, parse_ddl, AnalysisConfig};
use ldnf_core::{Database, Error};
use serde::Serialize;
use sha2::{Digest, Sha256};

/// An input problem; always exits with status 2.
#[derive(Debug)]
pub struct InputError {
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.code, self.message)
    }
}

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        InputError {
            code: e.code(),
            message: e.to_string(),
        }
    }
}

impl InputError {
    pub fn at(path: &Path, e: Error) -> Self {
        InputError {
            code: e.code(),
            message: format!("{}: {e}", path.display()),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        InputError {
            code: "usage",
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Reads a file and records its digest.
pub fn read_tracked(path: &Path, digests: &mut Vec<InputDigest>) -> Result<String, InputError> {
    let text = fs::read_to_string(path).map_err(|e| {
        InputError::at(
            path,
            Error::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            },
        )
    })?;
    digests.push(InputDigest {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(text.as_bytes())),
    });
    Ok(text)
}

pub fn write(path: &Path, contents: &str) -> Result<(), InputError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| io_error(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| io_error(path, e))
}

fn io_error(path: &Path, e: std::io::Error) -> InputError {
    InputError::from(Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub struct Loaded {
    pub db: Database,
    pub config: AnalysisConfig,
    pub digests: Vec<InputDigest>,
}

/// Loads the schema, one CSV per relation from `data_dir`, and the config
/// (defaults when no path is given).
pub fn load(schema: &Path, data_dir: &Path, config: Option<&PathBuf>) -> Result<Loaded, InputError> {
    let mut digests = Vec::new();
    let ddl = read_tracked(schema, &mut digests)?;
    let schema_decl = parse_ddl(&ddl).map_err(|e| InputError::at(schema, e))?;
    let config = match config {
        Some(path) => {
            let text = read_tracked(path, &mut digests)?;
            parse_config(&text).map_err(|e| InputError::at(path, e))?
        }
        None => AnalysisConfig::default(),
    };
    let mut instances = Vec::with_capacity(schema_decl.relations.len());
    for rel in &schema_decl.relations {
        let path = data_dir.join(data_file_name(&rel.name));
        let text = read_tracked(&path, &mut digests)?;
        instances.push(load_csv(text.as_bytes(), rel).map_err(|e| InputError::at(&path, e))?);
    }
    let db = Database::new(schema_decl, instances)?;
    Ok(Loaded { db, config, digests })
}

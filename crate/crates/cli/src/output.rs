//! Deterministic output files: CSV tables with an embedded config hash and
//! JSON reports referencing the same hash.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// Hex SHA-256 of the resolved config serialization; every output file
/// embeds it so reports and tables can be matched up.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let bytes = serde_json::to_vec(config).expect("config serialization");
    let mut hasher = Sha256::new();
    hasher.update(&bytes);
    hex::encode(&hasher.finalize()[..16])
}

pub struct OutDir {
    dir: PathBuf,
    hash: String,
}

impl OutDir {
    pub fn new(dir: &Path, hash: String) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::config(format!("cannot create output dir: {e}")))?;
        Ok(Self { dir: dir.to_path_buf(), hash })
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// Write a CSV table. The first line is a `# config_hash=` comment, the
    /// second the header; floats use the shortest round-trip formatting, so
    /// reruns are byte-identical.
    pub fn write_csv(
        &self,
        name: &str,
        header: &str,
        rows: impl Iterator<Item = Vec<f64>>,
    ) -> Result<PathBuf, CliError> {
        let mut body = String::new();
        writeln!(body, "# config_hash={}", self.hash).unwrap();
        writeln!(body, "{header}").unwrap();
        for row in rows {
            let mut first = true;
            for v in row {
                if !first {
                    body.push(',');
                }
                write!(body, "{v}").unwrap();
                first = false;
            }
            body.push('\n');
        }
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|e| CliError::config(format!("write {name}: {e}")))?;
        Ok(path)
    }

    /// Write a JSON report (pretty, trailing newline).
    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value)
            .map_err(|e| CliError::config(format!("serialize {name}: {e}")))?;
        text.push('\n');
        let path = self.dir.join(name);
        fs::write(&path, text).map_err(|e| CliError::config(format!("write {name}: {e}")))?;
        Ok(path)
    }
}

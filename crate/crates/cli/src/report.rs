use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use hollowise::io::{read_matrix, write_matrix};
use hollowise::matrix::DenseMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

/// Machine-readable summary of one command run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: BTreeMap<String, InputDigest>,
    pub outputs: Vec<PathBuf>,
    /// Recomputed from the written files.
    pub residuals: BTreeMap<String, f64>,
    /// Command-specific values that are not residuals (gains, counts, tables).
    pub details: serde_json::Value,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub(crate) fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
            residuals: BTreeMap::new(),
            details: serde_json::Value::Object(Default::default()),
            wall_time_ms: 0.0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub(crate) fn detail(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).expect("detail serialises");
        self.details
            .as_object_mut()
            .expect("details is an object")
            .insert(key.into(), v);
    }

    pub(crate) fn residual(&mut self, key: &str, value: f64) {
        self.residuals.insert(key.into(), value);
    }

    /// Reads a matrix and records the digest of the file bytes.
    pub(crate) fn input(&mut self, key: &str, path: &Path) -> CliResult<DenseMatrix> {
        let bytes = std::fs::read(path)
            .map_err(|e| hollowise::Error::Parse(format!("{}: {e}", path.display())))?;
        self.inputs.insert(
            key.into(),
            InputDigest {
                path: path.to_path_buf(),
                sha256: hex::encode(Sha256::digest(&bytes)),
            },
        );
        let text = String::from_utf8(bytes)
            .map_err(|_| hollowise::Error::Parse(format!("{}: not UTF-8", path.display())))?;
        Ok(hollowise::io::parse_auto(&text)?)
    }

    /// Writes `m` and returns what a reader gets back from the file.
    pub(crate) fn output_matrix(&mut self, path: PathBuf, m: &DenseMatrix) -> CliResult<DenseMatrix> {
        write_matrix(&path, m).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        let back = read_matrix(&path)?;
        self.outputs.push(path);
        Ok(back)
    }

    pub(crate) fn output_file(&mut self, path: PathBuf, body: &str) -> CliResult<()> {
        write_file(&path, body)?;
        self.outputs.push(path);
        Ok(())
    }
}

pub(crate) fn write_file(path: &Path, body: &str) -> CliResult<()> {
    std::fs::write(path, body).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub(crate) fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

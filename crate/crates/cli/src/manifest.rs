use std::fs;

use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

/// Everything that determines a run's output.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub argv: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub config: Map<String, Value>,
}

impl RunManifest {
    pub fn new(command: &str, argv: &[String]) -> Self {
        Self {
            tool: "graphcalc",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            argv: argv.to_vec(),
            inputs: Vec::new(),
            config: Map::new(),
        }
    }

    /// Read a UTF-8 input file and record its digest.
    pub fn read(&mut self, role: &str, path: &str) -> Result<String, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::io(format!("cannot read {path:?}: {}", e.kind())))?;
        self.inputs.push(InputDigest {
            role: role.to_string(),
            path: path.to_string(),
            sha256: sha256_hex(&bytes),
        });
        String::from_utf8(bytes).map_err(|_| CliError::validation("parse", format!("{path:?} is not UTF-8")))
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.config.insert(key.to_string(), value.into());
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

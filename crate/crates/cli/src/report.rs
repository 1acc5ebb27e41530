//! Report envelope and sidecar output.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Serialize)]
pub struct ReportFile {
    pub command: String,
    pub inputs_digest: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub results: serde_json::Value,
    pub warnings: Vec<String>,
}

pub fn digest(bytes: &[u8]) -> String {
    let hash = Sha256::digest(bytes);
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

impl ReportFile {
    /// Pretty JSON with sorted object keys (serde_json's default map),
    /// one trailing newline; byte-identical across runs for identical
    /// inputs and flags.
    pub fn render(&self) -> Result<String, CliError> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::invalid_input(format!("serialization failed: {e}")))?;
        text.push('\n');
        Ok(text)
    }

    pub fn emit(&self, out: Option<&Path>) -> Result<(), CliError> {
        let text = self.render()?;
        match out {
            Some(path) => std::fs::write(path, text).map_err(|e| {
                CliError::invalid_input(format!("cannot write {}: {e}", path.display()))
            }),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::invalid_input(format!("cannot write stdout: {e}")))
            }
        }
    }
}

pub struct Csv {
    pub header: &'static str,
    pub rows: Vec<String>,
}

impl Csv {
    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = String::from(self.header);
        text.push('\n');
        for row in &self.rows {
            text.push_str(row);
            text.push('\n');
        }
        std::fs::write(path, text)
            .map_err(|e| CliError::invalid_input(format!("cannot write {}: {e}", path.display())))
    }
}

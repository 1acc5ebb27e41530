//! Input file schema and validation.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pickdisc::DiscPoint;
use serde::Deserialize;

use crate::CliError;

/// On-disk problem description: nodes (and optionally values) as
/// `[re, im]` pairs, plus free-form metadata.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub nodes: Vec<[f64; 2]>,
    #[serde(default)]
    pub values: Option<Vec<[f64; 2]>>,
    /// Free-form; accepted and carried by the file format, not consumed
    /// by any command.
    #[serde(default)]
    #[allow(dead_code)]
    pub metadata: BTreeMap<String, String>,
}

pub struct Problem {
    pub nodes: Vec<DiscPoint>,
    pub values: Option<Vec<Complex64>>,
}

impl ProblemFile {
    pub fn parse(bytes: &[u8]) -> Result<Problem, CliError> {
        let file: ProblemFile = serde_json::from_slice(bytes)
            .map_err(|e| CliError::invalid_input(format!("malformed problem file: {e}")))?;
        if file.nodes.is_empty() {
            return Err(CliError::invalid_input("problem has no nodes"));
        }
        let mut nodes = Vec::with_capacity(file.nodes.len());
        for (i, [re, im]) in file.nodes.iter().enumerate() {
            let p = DiscPoint::new(*re, *im).map_err(|e| {
                CliError::invalid_input(format!("nodes[{i}] = [{re}, {im}]: {e}"))
            })?;
            nodes.push(p);
        }
        let values = match &file.values {
            None => None,
            Some(raw) => {
                if raw.len() != nodes.len() {
                    return Err(CliError::invalid_input(format!(
                        "values has length {} but nodes has length {}",
                        raw.len(),
                        nodes.len()
                    )));
                }
                let mut values = Vec::with_capacity(raw.len());
                for (i, [re, im]) in raw.iter().enumerate() {
                    let w = Complex64::new(*re, *im);
                    if !(w.norm() <= 1.0 + 1e-12) {
                        return Err(CliError::invalid_input(format!(
                            "values[{i}] = [{re}, {im}] has modulus {} > 1",
                            w.norm()
                        )));
                    }
                    values.push(w);
                }
                Some(values)
            }
        };
        Ok(Problem { nodes, values })
    }
}

impl Problem {
    pub fn values_required(&self, command: &str) -> Result<&[Complex64], CliError> {
        self.values.as_deref().ok_or_else(|| {
            CliError::invalid_input(format!("the {command} command requires a values array"))
        })
    }
}

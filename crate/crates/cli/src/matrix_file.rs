//! JSON matrix files: `{"version": "1", "dim_rows", "dim_cols", "entries": [[re, im], ...]}`.

use std::fs;
use std::path::Path;

use numrad_core::{c64, ComplexMatrix};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::output::round12;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub version: String,
    pub dim_rows: usize,
    pub dim_cols: usize,
    /// Row-major `[re, im]` pairs.
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            version: FORMAT_VERSION.to_string(),
            dim_rows: m.rows(),
            dim_cols: m.cols(),
            entries: m.data().iter().map(|z| [round12(z.re), round12(z.im)]).collect(),
        }
    }

    pub fn into_matrix(self) -> Result<ComplexMatrix, String> {
        if self.version != FORMAT_VERSION {
            return Err(format!(
                "unsupported version \"{}\" (expected \"{FORMAT_VERSION}\")",
                self.version
            ));
        }
        let expected = self.dim_rows * self.dim_cols;
        if self.entries.len() != expected {
            return Err(format!(
                "entries has {} pairs but dim_rows x dim_cols = {expected}",
                self.entries.len()
            ));
        }
        let data = self.entries.iter().map(|&[re, im]| c64::new(re, im)).collect();
        ComplexMatrix::new(self.dim_rows, self.dim_cols, data).map_err(|e| e.to_string())
    }
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, String> {
    let file: MatrixFile = serde_json::from_str(text)
        .map_err(|e| format!("line {}, column {}: {}", e.line(), e.column(), strip_position(&e)))?;
    file.into_matrix()
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(k) => s[..k].to_string(),
        None => s,
    }
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_matrix(&text).map_err(|msg| CliError::Input(format!("{}: {msg}", path.display())))
}

pub fn write_matrix(path: &Path, m: &ComplexMatrix) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(&MatrixFile::from_matrix(m)).map_err(|e| CliError::Input(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

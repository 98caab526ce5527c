//! Run manifests and the CSV / JSON document writers.
//!
//! CSV: `# key = value` manifest lines (values JSON-encoded), a header row
//! naming columns and units, then data rows with 9 significant digits.
//! JSON: an object with `manifest`, `quantity`, `axes` and `values`; floats
//! are written in their shortest round-trip form.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub molecule: String,
    pub molecule_sha256: String,
    pub format: Format,
    pub parameters: BTreeMap<&'static str, Value>,
}

impl RunManifest {
    pub fn new(
        command: &'static str,
        molecule: String,
        molecule_bytes: &[u8],
        format: Format,
    ) -> Self {
        let digest = Sha256::digest(molecule_bytes);
        let molecule_sha256 = digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        RunManifest {
            tool: env!("CARGO_BIN_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            molecule,
            molecule_sha256,
            format,
            parameters: BTreeMap::new(),
        }
    }

    pub fn set(&mut self, key: &'static str, value: impl Serialize) {
        self.parameters.insert(
            key,
            serde_json::to_value(value).expect("manifest values serialize"),
        );
    }
}

pub enum Document {
    Curve {
        x_name: &'static str,
        y_name: &'static str,
        x: Vec<f64>,
        y: Vec<f64>,
    },
    /// `values[i][j]` at `(theta_deg[i], phi_deg[j])`
    Matrix {
        y_name: &'static str,
        theta_deg: Vec<f64>,
        phi_deg: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

pub fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

pub fn render(doc: &Document, manifest: &RunManifest) -> String {
    match manifest.format {
        Format::Csv => render_csv(doc, manifest),
        Format::Json => render_json(doc, manifest),
    }
}

fn render_csv(doc: &Document, manifest: &RunManifest) -> String {
    let mut out = String::new();
    let head = serde_json::to_value(manifest).expect("manifest serializes");
    if let Value::Object(map) = head {
        for (key, value) in map {
            if let Value::Object(params) = &value {
                for (k, v) in params {
                    let _ = writeln!(out, "# {key}.{k} = {v}");
                }
            } else {
                let _ = writeln!(out, "# {key} = {value}");
            }
        }
    }
    match doc {
        Document::Curve {
            x_name,
            y_name,
            x,
            y,
        } => {
            let _ = writeln!(out, "{x_name},{y_name}");
            for (a, b) in x.iter().zip(y) {
                let _ = writeln!(out, "{},{}", sig9(*a), sig9(*b));
            }
        }
        Document::Matrix {
            y_name,
            theta_deg,
            phi_deg,
            values,
        } => {
            let _ = writeln!(out, "theta_deg,phi_deg,{y_name}");
            for (theta, row) in theta_deg.iter().zip(values) {
                for (phi, v) in phi_deg.iter().zip(row) {
                    let _ = writeln!(out, "{},{},{}", sig9(*theta), sig9(*phi), sig9(*v));
                }
            }
        }
    }
    out
}

fn render_json(doc: &Document, manifest: &RunManifest) -> String {
    let value = match doc {
        Document::Curve {
            x_name,
            y_name,
            x,
            y,
        } => json!({
            "manifest": manifest,
            "quantity": y_name,
            "axes": { *x_name: x },
            "values": y,
        }),
        Document::Matrix {
            y_name,
            theta_deg,
            phi_deg,
            values,
        } => json!({
            "manifest": manifest,
            "quantity": y_name,
            "axes": { "theta_deg": theta_deg, "phi_deg": phi_deg },
            "values": values,
        }),
    };
    let mut s = serde_json::to_string_pretty(&value).expect("document serializes");
    s.push('\n');
    s
}

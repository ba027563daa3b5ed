//! Run manifests: a structured, byte-stable record of what a scenario run
//! produced.
//!
//! The manifest is TOML with a fixed key order, written by hand rather than
//! through a serializer so the layout is part of the contract: rerunning a
//! scenario in deterministic mode must reproduce the manifest byte for byte.
//! Wall time is the one field that cannot be stable, so deterministic runs
//! omit it.

use sha2::{Digest, Sha256};
use std::fmt::Write as _;

/// One value in the summary block. Floats are written in full round-trip
/// precision so downstream diffs are exact.
#[derive(Debug, Clone, PartialEq)]
pub enum SummaryValue {
    Float(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for SummaryValue {
    fn from(v: f64) -> Self {
        Self::Float(v)
    }
}

impl From<i64> for SummaryValue {
    fn from(v: i64) -> Self {
        Self::Int(v)
    }
}

impl From<&str> for SummaryValue {
    fn from(v: &str) -> Self {
        Self::Text(v.to_owned())
    }
}

/// One output file: name relative to the run directory, size, and checksum.
#[derive(Debug, Clone, PartialEq)]
pub struct FileRecord {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Everything a run leaves behind besides the data files themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultManifest {
    /// Scenario name (bundled name or file stem).
    pub name: String,
    /// Scenario kind label, e.g. `finite_2x2`.
    pub kind: String,
    /// Version of the engine that produced the results.
    pub engine_version: String,
    /// Whether the run was made in deterministic mode.
    pub deterministic: bool,
    /// Content hash of the resolved scenario (its canonical TOML form).
    pub scenario_digest: String,
    /// Wall-clock duration; `None` in deterministic mode.
    pub wall_time_s: Option<f64>,
    /// Final-state summary statistics, in a fixed per-kind order.
    pub summary: Vec<(String, SummaryValue)>,
    /// Emitted files, sorted by name.
    pub files: Vec<FileRecord>,
}

impl ResultManifest {
    /// Renders the manifest with stable key ordering.
    pub fn to_toml(&self) -> String {
        let mut out = String::new();
        out.push_str("schema = 1\n");
        writeln!(out, "name = {}", toml_string(&self.name)).unwrap();
        writeln!(out, "kind = {}", toml_string(&self.kind)).unwrap();
        writeln!(out, "engine_version = {}", toml_string(&self.engine_version)).unwrap();
        writeln!(out, "deterministic = {}", self.deterministic).unwrap();
        writeln!(out, "scenario_digest = {}", toml_string(&self.scenario_digest)).unwrap();
        if let Some(w) = self.wall_time_s {
            writeln!(out, "wall_time_s = {}", fmt_f64(w)).unwrap();
        }
        out.push_str("\n[summary]\n");
        for (key, value) in &self.summary {
            let rendered = match value {
                SummaryValue::Float(v) => fmt_f64(*v),
                SummaryValue::Int(v) => v.to_string(),
                SummaryValue::Text(v) => toml_string(v),
            };
            writeln!(out, "{key} = {rendered}").unwrap();
        }
        for file in &self.files {
            out.push_str("\n[[files]]\n");
            writeln!(out, "name = {}", toml_string(&file.name)).unwrap();
            writeln!(out, "bytes = {}", file.bytes).unwrap();
            writeln!(out, "sha256 = {}", toml_string(&file.sha256)).unwrap();
        }
        out
    }
}

/// Full round-trip float rendering, valid as a TOML value.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".to_owned()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".to_owned() } else { "-inf".to_owned() }
    } else {
        format!("{v:e}")
    }
}

/// Hex SHA-256 of a byte slice.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for byte in digest {
        write!(out, "{byte:02x}").unwrap();
    }
    out
}

/// Renders a basic TOML string literal (quotes and escapes).
fn toml_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 => {
                write!(out, "\\u{:04X}", c as u32).unwrap();
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

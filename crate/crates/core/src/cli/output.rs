//! Artifact writing: provenance, CSV formatting, pass/fail checks.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::Result;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub version: String,
}

impl Provenance {
    pub fn new(command: &str, config_bytes: &[u8], seed: u64) -> Self {
        let digest = Sha256::digest(config_bytes);
        let config_sha256 = digest.iter().fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        });
        Self {
            command: command.to_string(),
            config_sha256,
            seed,
            version: VERSION.to_string(),
        }
    }

    /// Comment line placed above the CSV header row.
    pub fn csv_comment(&self) -> String {
        format!(
            "# qbattery {} command={} config_sha256={} seed={}\n",
            self.version, self.command, self.config_sha256, self.seed
        )
    }
}

/// One pass/fail verdict computed by a command.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: Value,
    pub limit: Value,
}

impl Check {
    /// Passes when `value <= limit`.
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            pass: value <= limit,
            value: json!(value),
            limit: json!(limit),
        }
    }

    pub fn equals<T: Serialize + PartialEq>(
        name: impl Into<String>,
        value: T,
        expected: T,
    ) -> Self {
        let pass = value == expected;
        Self {
            name: name.into(),
            pass,
            value: serde_json::to_value(value).unwrap_or(Value::Null),
            limit: serde_json::to_value(expected).unwrap_or(Value::Null),
        }
    }

    pub fn flag(name: impl Into<String>, pass: bool) -> Self {
        Self {
            name: name.into(),
            pass,
            value: json!(pass),
            limit: json!(true),
        }
    }
}

/// A command's result: the JSON document plus any CSV side artifact.
#[derive(Debug, Clone)]
pub struct Report {
    pub provenance: Provenance,
    pub results: Value,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.clone())
            .collect()
    }

    /// Single JSON document; keys are sorted because `serde_json::Map` is ordered.
    pub fn to_json(&self) -> Result<String> {
        let doc = json!({
            "provenance": self.provenance,
            "results": self.results,
            "checks": self.checks,
            "failures": self.failures(),
            "pass": self.failures().is_empty(),
        });
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }
}

/// 17 significant digits, exponent form; round-trips every finite `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV builder with a provenance comment and a header row; LF line endings.
pub struct Csv {
    buf: String,
    columns: usize,
}

impl Csv {
    pub fn new(provenance: &Provenance, header: &[&str]) -> Self {
        let mut buf = provenance.csv_comment();
        buf.push_str(&header.join(","));
        buf.push('\n');
        Self {
            buf,
            columns: header.len(),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns);
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents.as_bytes())?;
    Ok(())
}

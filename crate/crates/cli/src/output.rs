//! Header block, config hash and file emission.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{io_error, CliError};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance of one output: code version, config hash and entropy base.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub program: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config_sha256: String,
    pub base: String,
}

impl Meta {
    /// Hashes `command` and the resolved `entries` as sorted `key=value`
    /// lines.
    pub fn new(command: &'static str, entries: &BTreeMap<String, String>, base: &str) -> Self {
        let mut canonical = format!("command={command}\n");
        for (k, v) in entries {
            let _ = writeln!(canonical, "{k}={v}");
        }
        Self {
            program: "hubbard-rg",
            version: VERSION,
            command,
            config_sha256: sha256_hex(canonical.as_bytes()),
            base: base.to_string(),
        }
    }

    /// `#`-prefixed lines placed above a CSV header row.
    pub fn csv_header(&self) -> String {
        format!(
            "# {} {}\n# command {}\n# config_sha256 {}\n# base {}\n",
            self.program, self.version, self.command, self.config_sha256, self.base
        )
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// CSV text: the header block, the column row, then `rows`.
pub fn csv_text(meta: &Meta, columns: &[&str], rows: &[Vec<String>]) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let fail = |e: csv::Error| CliError::Validation(format!("csv encoding: {e}"));
    w.write_record(columns).map_err(fail)?;
    for row in rows {
        w.write_record(row).map_err(fail)?;
    }
    let body = w.into_inner().map_err(|e| CliError::Validation(format!("csv encoding: {e}")))?;
    let mut text = meta.csv_header();
    text.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(text)
}

/// Pretty JSON of `{"meta": meta, ...body}` with a trailing newline.
pub fn json_text<T: Serialize>(meta: &Meta, body: &T) -> Result<String, CliError> {
    let mut value = serde_json::to_value(body).map_err(|e| CliError::Validation(e.to_string()))?;
    let meta = serde_json::to_value(meta).map_err(|e| CliError::Validation(e.to_string()))?;
    match &mut value {
        serde_json::Value::Object(map) => {
            map.insert("meta".into(), meta);
        }
        other => {
            let inner = other.take();
            *other = serde_json::json!({ "meta": meta, "data": inner });
        }
    }
    let mut s = serde_json::to_string_pretty(&value).map_err(|e| CliError::Validation(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn num(x: f64) -> String {
    x.to_string()
}

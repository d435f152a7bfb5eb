//! Provenance header, number formatting and output sinks.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use latticegate::format::round9;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_011_031;

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub version: &'static str,
    pub config_hash: String,
    pub seed: u64,
}

impl Provenance {
    /// Hash of every setting that can change the output. Worker counts and
    /// output paths are left out by the callers.
    pub fn new<S: Serialize>(command: &str, settings: &S, files: &[&str], seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(command.as_bytes());
        h.update([0]);
        h.update(serde_json::to_vec(settings).expect("settings serialize"));
        for f in files {
            h.update([0]);
            h.update(f.as_bytes());
        }
        Self {
            version: env!("CARGO_PKG_VERSION"),
            config_hash: hex::encode(h.finalize()),
            seed,
        }
    }

    pub fn csv_header(&self) -> String {
        format!(
            "# schema_version={}\n# version={}\n# config_hash={}\n# seed={}\n",
            SCHEMA_VERSION, self.version, self.config_hash, self.seed
        )
    }
}

fn round_all(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round9(n.as_f64().unwrap_or(f64::NAN));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_all).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_all(v))).collect()),
        other => other,
    }
}

/// `{schema_version, provenance, command, ...body}` with every float
/// rounded to nine significant digits.
pub fn json_document<T: Serialize>(
    command: &str,
    prov: &Provenance,
    body: &T,
) -> Result<String, CliError> {
    let mut doc = Map::new();
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    doc.insert("provenance".into(), serde_json::to_value(prov)?);
    doc.insert("command".into(), json!(command));
    match round_all(serde_json::to_value(body)?) {
        Value::Object(fields) => doc.extend(fields),
        other => {
            doc.insert("result".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(doc))?;
    s.push('\n');
    Ok(s)
}

pub fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

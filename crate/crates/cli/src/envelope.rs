//! Result envelopes, exit codes and the on-disk result cache.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Map, Value};
use singval::Error;

use crate::{EXIT_DOMAIN, EXIT_INCONSISTENT, EXIT_OK, EXIT_PRECISION};

pub const TOOL: &str = "singval";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

pub fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Refused(_) | Error::Unsupported(_) | Error::Parse(_) => EXIT_DOMAIN,
        Error::Precision(_) | Error::NotFound(_) | Error::Assumption(_) => EXIT_PRECISION,
        Error::Grouping(_) | Error::Degenerate(_) | Error::Inconsistency(_) | Error::Derivation(_) => {
            EXIT_INCONSISTENT
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Domain(_) => "domain",
        Error::Precision(_) => "precision",
        Error::NotFound(_) => "not_found",
        Error::Grouping(_) => "grouping",
        Error::Assumption(_) => "assumption",
        Error::Degenerate(_) => "degenerate",
        Error::Unsupported(_) => "unsupported",
        Error::Refused(_) => "refused",
        Error::Inconsistency(_) => "inconsistency",
        Error::Derivation(_) => "derivation",
        Error::Parse(_) => "parse",
    }
}

/// Successful computation: outputs, certificates and the exit code to use
/// (non-zero when a check inside the outputs failed).
pub struct Outcome {
    pub outputs: Value,
    pub certificates: Value,
    pub exit_code: u8,
}

impl Outcome {
    pub fn ok(outputs: Value) -> Self {
        Outcome { outputs, certificates: Value::Null, exit_code: EXIT_OK }
    }

    pub fn certified(outputs: Value, certificates: Value) -> Self {
        Outcome { outputs, certificates, exit_code: EXIT_OK }
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

#[derive(Debug, Serialize)]
pub struct ErrorInfo {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Serialize)]
pub struct Envelope {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub inputs: Value,
    pub outputs: Value,
    pub certificates: Value,
    pub timings: Value,
    pub cached: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    #[serde(skip)]
    pub exit_code: u8,
}

impl Envelope {
    /// Run `f` unless the cache already holds the outputs for these inputs.
    pub fn run<F>(command: &str, inputs: Value, cache: Option<&Cache>, f: F) -> Envelope
    where
        F: FnOnce() -> Result<Outcome, Error>,
    {
        let key = cache_key(command, &inputs);
        if let Some(hit) = cache.and_then(|c| c.get(&key)) {
            return Envelope {
                tool: TOOL,
                version: VERSION,
                command: command.into(),
                inputs,
                outputs: hit["outputs"].clone(),
                certificates: hit["certificates"].clone(),
                timings: json!({ "elapsed_ms": 0.0 }),
                cached: true,
                error: None,
                exit_code: EXIT_OK,
            };
        }
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        match result {
            Ok(out) => {
                if out.exit_code == EXIT_OK {
                    if let Some(c) = cache {
                        c.put(&key, &json!({ "outputs": out.outputs, "certificates": out.certificates }));
                    }
                }
                Envelope {
                    tool: TOOL,
                    version: VERSION,
                    command: command.into(),
                    inputs,
                    outputs: out.outputs,
                    certificates: out.certificates,
                    timings: json!({ "elapsed_ms": elapsed }),
                    cached: false,
                    error: None,
                    exit_code: out.exit_code,
                }
            }
            Err(e) => Envelope::failure(command, inputs, &e, elapsed),
        }
    }

    pub fn failure(command: &str, inputs: Value, e: &Error, elapsed_ms: f64) -> Envelope {
        Envelope {
            tool: TOOL,
            version: VERSION,
            command: command.into(),
            inputs,
            outputs: Value::Null,
            certificates: Value::Null,
            timings: json!({ "elapsed_ms": elapsed_ms }),
            cached: false,
            error: Some(ErrorInfo { kind: error_kind(e).into(), message: e.to_string() }),
            exit_code: exit_code_for(e),
        }
    }

    pub fn emit(&self, format: Format) {
        if let Some(err) = &self.error {
            eprintln!("error: {}", err.message);
        }
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        match format {
            Format::Json => {
                let text = serde_json::to_string_pretty(self).unwrap_or_default();
                let _ = writeln!(out, "{text}");
            }
            Format::Text => {
                let _ = writeln!(out, "{} {}", self.command, compact(&self.inputs));
                if let Value::Object(map) = &self.outputs {
                    for (k, v) in map {
                        let _ = writeln!(out, "  {k}: {}", render(v));
                    }
                }
                if let Some(err) = &self.error {
                    let _ = writeln!(out, "  error ({}): {}", err.kind, err.message);
                }
            }
        }
    }
}

fn compact(v: &Value) -> String {
    serde_json::to_string(v).unwrap_or_default()
}

/// Decimal values print as scientific strings, everything else as JSON.
fn render(v: &Value) -> String {
    if let Value::Object(m) = v {
        if let (Some(Value::String(sign)), Some(Value::String(digits)), Some(exp)) =
            (m.get("sign"), m.get("digits"), m.get("exponent").and_then(Value::as_i64))
        {
            let s = if sign == "-" { "-" } else { "" };
            return format!("{s}0.{digits}e{exp}");
        }
    }
    match v {
        Value::String(s) => s.clone(),
        other => compact(other),
    }
}

fn cache_key(command: &str, inputs: &Value) -> String {
    let mut key = format!("{command}-v{VERSION}");
    if let Value::Object(map) = inputs {
        let sorted: Map<String, Value> = map.clone().into_iter().collect();
        for (k, v) in sorted {
            key.push_str(&format!("-{k}={}", compact(&v).trim_matches('"')));
        }
    }
    key.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-=._".contains(c) { c } else { '_' })
        .collect()
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: PathBuf) -> Self {
        Cache { dir }
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<Value> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put(&self, key: &str, value: &Value) {
        if fs::create_dir_all(&self.dir).is_err() {
            return;
        }
        let _ = write_atomic(&self.path(key), &serde_json::to_string(value).unwrap_or_default());
    }
}

/// Write to a sibling temporary file and rename over the target.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".tmp{}", std::process::id()));
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use ptrank_core::Error;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::Global;

/// Exit 2 for usage and input problems, 1 when a check ran and failed.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Core(Error),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Core(Error::InvalidCertificate(_) | Error::VerificationFailed(_)) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

pub enum Outcome {
    /// A JSON object written as is.
    Object(String),
    Report { ok: bool, body: Value },
}

impl Outcome {
    /// Writes to `out` or stdout and reports whether the run succeeded.
    pub fn emit(self, out: Option<&Path>) -> Result<bool, CliError> {
        let (ok, text) = match self {
            Outcome::Object(s) => (true, s),
            Outcome::Report { ok, body } => {
                (ok, serde_json::to_string_pretty(&body).expect("report values serialize"))
            }
        };
        write_text(out, &text)?;
        Ok(ok)
    }
}

pub fn write_text(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| CliError::Io(format!("writing {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            writeln!(stdout, "{text}").map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

pub fn budget_value(b: u128) -> Value {
    match u64::try_from(b) {
        Ok(x) => json!(x),
        Err(_) => json!(b.to_string()),
    }
}

/// Collects the provenance fields every report carries.
pub struct Report {
    command: String,
    seed: u64,
    field: String,
    budget: u128,
    inputs: Vec<Value>,
    start: Instant,
}

impl Report {
    pub fn new(command: &str, g: &Global, budget: u128) -> Self {
        Report {
            command: command.to_string(),
            seed: g.seed,
            field: g.field.clone().unwrap_or_default(),
            budget,
            inputs: Vec::new(),
            start: Instant::now(),
        }
    }

    /// Reads an input file and records its SHA-256.
    pub fn read(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
        let digest = hex::encode(Sha256::digest(&bytes));
        self.inputs.push(json!({ "path": path.display().to_string(), "sha256": digest }));
        String::from_utf8(bytes).map_err(|_| CliError::Usage(format!("{} is not UTF-8", path.display())))
    }

    /// The field actually used, when it comes from an input rather than `--field`.
    pub fn set_field(&mut self, field: String) {
        self.field = field;
    }

    pub fn finish(self, ok: bool, result: Value) -> Outcome {
        let mut body = Map::new();
        body.insert("command".into(), json!(self.command));
        body.insert("ok".into(), json!(ok));
        body.insert("seed".into(), json!(self.seed));
        body.insert("field".into(), json!(self.field));
        body.insert("budget".into(), budget_value(self.budget));
        body.insert("inputs".into(), Value::Array(self.inputs));
        body.insert("result".into(), result);
        body.insert("wall_ms".into(), json!(self.start.elapsed().as_millis() as u64));
        Outcome::Report { ok, body: Value::Object(body) }
    }
}

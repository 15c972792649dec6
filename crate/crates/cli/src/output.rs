use std::fmt;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::ValueEnum;
use serde::Serialize;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
pub enum CliError {
    /// Invalid parameters: exit code 2.
    Usage(String),
    /// Unwritable output: exit code 3.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Io(_) => ExitCode::from(3),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<qcp::Error> for CliError {
    fn from(e: qcp::Error) -> Self {
        match e {
            qcp::Error::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Provenance wrapper around every command's output.
#[derive(Serialize)]
pub struct RunRecord<I: Serialize, O: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub inputs: I,
    /// Absent when rows carry their own paths.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula_path: Option<&'static str>,
    pub outputs: O,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl<I: Serialize, O: Serialize> RunRecord<I, O> {
    pub fn new(command: &'static str, formula_path: Option<&'static str>, inputs: I, outputs: O) -> Self {
        RunRecord {
            tool: "qcp",
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs,
            formula_path,
            outputs,
            seed: None,
            timestamp: None,
        }
    }

    pub fn with_run_info(mut self, seed: Option<u64>, timestamp: bool) -> Self {
        self.seed = seed;
        if timestamp {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or_default();
            self.timestamp = Some(format!("unix:{secs}"));
        }
        self
    }

    pub fn to_json(&self) -> CliResult<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Usage(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

/// RFC 4180 text with LF line endings.
pub fn csv_text(header: &[&str], rows: &[Vec<String>]) -> CliResult<String> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

pub fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

pub fn num(x: f64) -> String {
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_and_uses_lf() {
        let t = csv_text(&["a", "b"], &[vec!["x, y".into(), num(0.1)]]).unwrap();
        assert_eq!(t, "a,b\n\"x, y\",0.1\n");
    }

    #[test]
    fn library_errors_map_to_exit_codes() {
        let usage: CliError = qcp::Error::InvalidOverlap(2.0).into();
        assert!(matches!(usage, CliError::Usage(_)));
        let io: CliError = qcp::Error::Io(std::io::Error::other("disk")).into();
        assert!(matches!(io, CliError::Io(_)));
    }
}

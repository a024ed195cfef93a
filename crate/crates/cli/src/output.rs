use std::fmt;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::Value;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug)]
pub enum CliError {
    Domain(superpattern::Error),
    Usage(String),
    Io(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Domain(e) => e.code(),
            CliError::Usage(_) => "usage",
            CliError::Io(_) => "io_error",
        }
    }

    pub fn exit_status(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Domain(e) => write!(f, "{e}"),
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<superpattern::Error> for CliError {
    fn from(e: superpattern::Error) -> Self {
        CliError::Domain(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// What a subcommand produced, renderable in each supported format.
pub struct Payload {
    pub json: Value,
    pub text: Option<String>,
    pub csv: Option<Table>,
    pub default: Format,
}

impl Payload {
    pub fn json<T: serde::Serialize>(value: &T) -> Payload {
        Payload::from_value(serde_json::to_value(value).expect("report types serialize"))
    }

    pub fn from_value(json: Value) -> Payload {
        Payload {
            json,
            text: None,
            csv: None,
            default: Format::Json,
        }
    }

    pub fn render(self, requested: Option<Format>) -> CliResult<String> {
        match requested.unwrap_or(self.default) {
            Format::Json => Ok(format!("{}\n", serde_json::to_string_pretty(&self.json).expect("valid json"))),
            Format::Text => Ok(self.text.unwrap_or_else(|| text_lines(&self.json))),
            Format::Csv => self
                .csv
                .map(|t| csv_text(&t))
                .ok_or_else(|| CliError::Usage("csv output is only available for per-trial simulation tables".into())),
        }
    }
}

fn text_lines(v: &Value) -> String {
    let mut out = String::new();
    match v {
        Value::Object(map) => {
            for (key, val) in map {
                out.push_str(&format!("{key}: {}\n", scalar(val)));
            }
        }
        Value::Array(items) => {
            for item in items {
                out.push_str(&scalar(item));
                out.push('\n');
            }
        }
        other => {
            out.push_str(&scalar(other));
            out.push('\n');
        }
    }
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn csv_text(t: &Table) -> String {
    let mut out = t.header.join(",");
    out.push('\n');
    for row in &t.rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn emit(body: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(body.as_bytes()).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::Io(format!("cannot write to stdout: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}

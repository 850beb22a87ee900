use serde::Serialize;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use crate::config::RunConfig;
use crate::CliError;

/// Shortest decimal that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

/// A CSV table built in memory so identical inputs give identical bytes.
pub struct Table {
    w: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(header).expect("in-memory write");
        Table { w }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.w.write_record(fields).expect("in-memory write");
    }

    pub fn finish(self) -> String {
        let bytes = self.w.into_inner().expect("in-memory flush");
        String::from_utf8(bytes).expect("utf-8 fields")
    }
}

/// Result of a subcommand before anything touches the filesystem.
#[derive(Default)]
pub struct Output {
    pub summary: serde_json::Value,
    /// Table printed to stdout when no output directory is set.
    pub primary: Option<(String, String)>,
    pub files: Vec<(String, String)>,
}

impl Output {
    pub fn summary(v: serde_json::Value) -> Self {
        Output { summary: v, ..Default::default() }
    }

    pub fn file(&mut self, name: &str, body: String) {
        self.files.push((name.to_string(), body));
    }
}

#[derive(Debug, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub started_unix_s: f64,
    pub wall_time_s: f64,
}

impl Metadata {
    pub fn new(command: &str, cfg: &RunConfig, started: SystemTime, wall: Duration) -> Self {
        Metadata {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config_hash: cfg.hash(),
            started_unix_s: started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
            wall_time_s: wall.as_secs_f64(),
        }
    }
}

fn write(dir: &Path, name: &str, body: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

/// Write every artifact plus `config.json` and `metadata.json` into `dir`.
pub fn write_all(dir: &Path, out: &Output, cfg: &RunConfig, meta: &Metadata) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for (name, body) in out.primary.iter().chain(&out.files) {
        written.push(write(dir, name, body)?);
    }
    written.push(write(dir, "config.json", &cfg.to_json())?);
    let meta = serde_json::to_string_pretty(meta).expect("metadata serializes");
    written.push(write(dir, "metadata.json", &meta)?);
    Ok(written)
}

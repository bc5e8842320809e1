//! Run manifests: what was run, with which config, and what it produced.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};

use crate::config::ExperimentConfig;
use crate::error::CliError;

pub const MANIFEST_HEADER: &str = "# fracdrift run manifest";
pub const MANIFEST_NAME: &str = "manifest.txt";

/// A file written by a run. `rows` counts CSV data rows, header excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub rows: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub tool: String,
    pub command: String,
    pub started: DateTime<Utc>,
    pub finished: DateTime<Utc>,
    pub config: ExperimentConfig,
    pub files: Vec<OutputFile>,
}

pub fn tool_version() -> String {
    format!("fracdrift {}", env!("CARGO_PKG_VERSION"))
}

impl RunManifest {
    pub fn to_text(&self) -> String {
        let stamp = |t: &DateTime<Utc>| t.to_rfc3339_opts(SecondsFormat::Millis, true);
        let mut out = String::new();
        let _ = writeln!(out, "{MANIFEST_HEADER}");
        let _ = writeln!(out, "tool = {}", self.tool);
        let _ = writeln!(out, "command = {}", self.command);
        let _ = writeln!(out, "started = {}", stamp(&self.started));
        let _ = writeln!(out, "finished = {}", stamp(&self.finished));
        out.push_str("\n[config]\n");
        out.push_str(&self.config.to_text());
        out.push_str("\n[files]\n");
        for f in &self.files {
            match f.rows {
                Some(rows) => {
                    let _ = writeln!(out, "{} rows={rows}", f.name);
                }
                None => {
                    let _ = writeln!(out, "{}", f.name);
                }
            }
        }
        out
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        write_atomic(&dir.join(MANIFEST_NAME), self.to_text().as_bytes())
    }
}

/// Writes `contents` to a temporary file next to `path`, then renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(CliError::io(dir))?;
    tmp.write_all(contents).map_err(CliError::io(tmp.path()))?;
    tmp.as_file().sync_all().map_err(CliError::io(tmp.path()))?;
    tmp.persist(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e.error,
    })?;
    Ok(())
}

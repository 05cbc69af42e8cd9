//! Artifact emission: CSV/JSON writers with fixed numeric formatting, content
//! digests, and the run manifest that lists everything written.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Formats a float with 12 significant digits, the fixed artifact precision.
pub fn fmt_f64(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".to_string() } else { "-inf".to_string() };
    }
    // normalize the sign of zero so degenerate entropies print as 0
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.11e}")
}

/// One emitted file with its content digest.
#[derive(Debug, Clone, Serialize)]
pub struct ArtifactRecord {
    /// File name relative to the output directory.
    pub file: String,
    /// Lowercase hex SHA-256 of the file contents.
    pub sha256: String,
    /// Content size in bytes.
    pub bytes: usize,
}

/// Collects artifacts for one run and writes them under a single directory.
#[derive(Debug)]
pub struct ArtifactSink {
    dir: PathBuf,
    records: Vec<ArtifactRecord>,
}

impl ArtifactSink {
    /// Creates the output directory (and parents) and an empty record list.
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), records: Vec::new() })
    }

    /// Directory artifacts land in.
    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Files written so far, in emission order.
    pub fn records(&self) -> &[ArtifactRecord] {
        &self.records
    }

    /// Writes raw bytes and records the digest.
    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.dir.join(name), bytes)?;
        let digest = Sha256::digest(bytes);
        self.records.push(ArtifactRecord {
            file: name.to_string(),
            sha256: format!("{digest:x}"),
            bytes: bytes.len(),
        });
        Ok(())
    }

    /// Writes a CSV artifact from a header and preformatted rows.
    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header)?;
        for row in rows {
            writer.write_record(row)?;
        }
        let bytes = writer.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        self.write_bytes(name, &bytes)
    }

    /// Writes a pretty-printed JSON artifact with a trailing newline.
    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }
}

/// Manifest of one run: the resolved config, engines, artifacts, and timing.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    /// Binary name and version that produced the run.
    pub tool: ToolInfo,
    /// Experiment name in kebab case.
    pub experiment: String,
    /// Resolved configuration after flag overrides.
    pub config: serde_json::Value,
    /// Engines the run exercised.
    pub engines: Vec<String>,
    /// Every emitted file with its digest.
    pub artifacts: Vec<ArtifactRecord>,
    /// Numerical-contract findings; empty on a clean run.
    pub violations: Vec<String>,
    /// Wall-clock duration of the run in milliseconds.
    pub wall_time_ms: u128,
}

/// Name and version of the producing binary.
#[derive(Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

impl ToolInfo {
    pub fn current() -> Self {
        Self { name: "qboltz", version: env!("CARGO_PKG_VERSION") }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_keeps_twelve_significant_digits() {
        assert_eq!(fmt_f64(std::f64::consts::LN_2), "6.93147180560e-1");
        assert_eq!(fmt_f64(0.0), "0.00000000000e0");
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!(fmt_f64(-1234.5), "-1.23450000000e3");
    }

    #[test]
    fn sink_records_digests_of_written_content() {
        let dir = std::env::temp_dir().join(format!("qboltz-sink-{}", std::process::id()));
        let mut sink = ArtifactSink::new(&dir).expect("creates dir");
        sink.write_csv("demo.csv", &["a", "b"], &[vec!["1".into(), "2".into()]])
            .expect("writes");
        assert_eq!(sink.records().len(), 1);
        assert_eq!(sink.records()[0].file, "demo.csv");
        assert_eq!(sink.records()[0].sha256.len(), 64);
        let bytes = std::fs::read(dir.join("demo.csv")).expect("file exists");
        assert_eq!(bytes, b"a,b\n1,2\n");
        std::fs::remove_dir_all(&dir).ok();
    }
}

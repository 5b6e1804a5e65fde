//! Deterministic output files and run metadata sidecars.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use polarscope::rng::PRNG_VERSION;

use crate::cache::to_hex;
use crate::config::LoadedConfig;
use crate::error::{CliError, Result};

/// Collects files under one root; writes happen in call order.
pub struct OutputDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into(), written: Vec::new() }
    }

    pub fn write(&mut self, rel: impl AsRef<Path>, bytes: &[u8]) -> Result<()> {
        let path = self.root.join(rel.as_ref());
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, rel: impl AsRef<Path>, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
        bytes.push(b'\n');
        self.write(rel, &bytes)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

/// CSV document built in memory.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new<I, S>(header: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.writer.into_inner().expect("in-memory flush")
    }
}

/// Shortest round-trip decimal; empty when undefined.
pub fn num(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn file_digest(path: &Path) -> Result<(String, u64)> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = BufReader::with_capacity(1 << 20, file);
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 20];
    let mut total = 0u64;
    loop {
        let n = reader.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            break;
        }
        total += n as u64;
        h.update(&buf[..n]);
    }
    Ok((to_hex(&h.finalize()), total))
}

/// Sidecar describing a run: tool, effective config and input digests.
/// Holds no timestamps, so reruns produce identical bytes.
pub fn run_metadata(command: &str, cfg: &LoadedConfig, extra: Value) -> Result<Value> {
    let mut inputs = Vec::new();
    for (key, path) in cfg.referenced_paths() {
        let (sha256, bytes) = file_digest(&path)?;
        inputs.push(json!({ "key": key, "sha256": sha256, "bytes": bytes }));
    }
    Ok(json!({
        "tool": "polarscope",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "prng": PRNG_VERSION,
        "objective_tag": cfg.config.objective.tag(),
        "config": cfg.config,
        "inputs": inputs,
        "details": extra,
    }))
}

/// Lowercase ASCII slug for labels used in headers and file names.
pub fn slug(label: &str) -> String {
    let mut out = String::new();
    for c in label.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_and_slugs() {
        assert_eq!(num(None), "");
        assert_eq!(num(Some(0.1)), "0.1");
        assert_eq!(num(Some(-1.0)), "-1");
        assert_eq!(slug("Conservative Right"), "conservative_right");
        assert_eq!(slug("Liberal Left #2"), "liberal_left_2");
    }

    #[test]
    fn tables_quote_when_needed() {
        let mut t = Table::new(["a", "b"]);
        t.row(["x,y", "z"]);
        assert_eq!(String::from_utf8(t.into_bytes()).unwrap(), "a,b\n\"x,y\",z\n");
    }
}

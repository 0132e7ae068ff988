//! Report files and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use crate::error::{Error, Result};

/// Create `dir` and check it accepts files.
pub fn ensure_writable(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".pdsel-write-test");
    fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))?;
    Ok(())
}

/// Collects the files written by one job.
pub struct Writer {
    dir: PathBuf,
    files: Vec<String>,
}

impl Writer {
    pub fn new(dir: &Path) -> Result<Self> {
        ensure_writable(dir)?;
        Ok(Writer {
            dir: dir.to_path_buf(),
            files: vec![],
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.dir.join(name)
    }

    pub fn bytes(&mut self, name: &str, data: &[u8]) -> Result<()> {
        let p = self.path(name);
        fs::write(&p, data).map_err(|e| Error::io(&p, e))
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        for r in rows {
            w.serialize(r)?;
        }
        let buf = w.into_inner().map_err(|e| Error::io(&self.dir, e.into_error()))?;
        self.bytes(name, &buf)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.bytes(name, text.as_bytes())
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }
}

/// Written next to every report; `config` and `seed` alone reproduce it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config: RunConfig,
    pub seed: u64,
    pub threads: usize,
    pub wall_time_secs: f64,
    /// Failed method evaluations across all replications and cells.
    pub failures: usize,
    pub files: Vec<String>,
}

pub const MANIFEST: &str = "manifest.json";

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of one named check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub tolerance: String,
    pub passed: bool,
}

impl Verdict {
    pub fn new(
        name: impl Into<String>,
        expected: impl Into<String>,
        actual: impl Into<String>,
        tolerance: impl Into<String>,
        passed: bool,
    ) -> Self {
        Verdict {
            name: name.into(),
            expected: expected.into(),
            actual: actual.into(),
            tolerance: tolerance.into(),
            passed,
        }
    }
}

/// Record of one run, written as `<out>/<run_id>/manifest.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub timestamp: String,
    pub subcommand: String,
    pub config: BTreeMap<String, String>,
    pub verdicts: Vec<Verdict>,
    /// Paths relative to the run directory.
    pub files: Vec<String>,
    /// Derived numbers worth keeping next to the verdicts, such as fit results.
    pub summary: BTreeMap<String, f64>,
}

impl RunManifest {
    pub fn passed(&self) -> bool {
        !self.verdicts.is_empty() && self.verdicts.iter().all(|v| v.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.passed)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<RunManifest> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// A fresh run directory under `out`, named `<subcommand>-<timestamp>` with a
/// numeric suffix if that name is taken.
pub fn create_run_dir(out: &Path, subcommand: &str, stamp: &chrono::DateTime<chrono::Utc>) -> Result<(String, PathBuf)> {
    std::fs::create_dir_all(out)?;
    let base = format!("{subcommand}-{}", stamp.format("%Y%m%dT%H%M%S%.3fZ"));
    for attempt in 0u32.. {
        let id = if attempt == 0 { base.clone() } else { format!("{base}-{attempt}") };
        let dir = out.join(&id);
        match std::fs::create_dir(&dir) {
            Ok(()) => return Ok((id, dir)),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => continue,
            Err(e) => return Err(Error::Io(e)),
        }
    }
    unreachable!("run id space exhausted")
}

//! Reproducible experiments behind the `beurling-lab` binary.
//!
//! Each run writes CSV tables and a `manifest.json` into a fresh directory
//! `<out>/<run_id>/`. CSV bodies depend only on the [`RunConfig`], so two
//! runs with the same settings produce byte-identical tables. Floats are
//! written with 17 significant digits, exact rationals as `num/den`.

mod config;
mod manifest;
mod runs;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub use config::{
    parse_config_text, parse_override, read_config_file, RunConfig, Subcommand, DEFAULT_OUT, DEFAULT_SEED, OUT_ENV,
};
pub use manifest::{RunManifest, Verdict};
pub use runs::{battery, linear_fit, LinearFit, BATTERY};

use crate::error::{Error, Result};

/// Collects the files, verdicts and summary numbers of one run.
pub(crate) struct Recorder {
    dir: PathBuf,
    prefix: String,
    files: Vec<String>,
    verdicts: Vec<Verdict>,
    summary: BTreeMap<String, f64>,
}

impl Recorder {
    fn new(dir: PathBuf) -> Self {
        Recorder {
            dir,
            prefix: String::new(),
            files: Vec::new(),
            verdicts: Vec::new(),
            summary: BTreeMap::new(),
        }
    }

    fn qualified(&self, name: &str) -> String {
        format!("{}{name}", self.prefix)
    }

    /// Writes a CSV table with the given header.
    pub(crate) fn table(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_path(self.dir.join(name))?;
        w.write_record(header)?;
        for row in rows {
            w.write_record(row)?;
        }
        w.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub(crate) fn text_file(&mut self, name: &str, contents: &str) -> Result<()> {
        std::fs::write(self.dir.join(name), contents)?;
        self.files.push(name.to_string());
        Ok(())
    }

    pub(crate) fn check(&mut self, name: &str, expected: impl Into<String>, actual: impl Into<String>, tolerance: impl Into<String>, passed: bool) {
        let name = self.qualified(name);
        self.verdicts.push(Verdict::new(name, expected, actual, tolerance, passed));
    }

    pub(crate) fn note(&mut self, key: &str, value: f64) {
        let key = self.qualified(key);
        self.summary.insert(key, value);
    }
}

/// Runs `cfg.subcommand` and writes its outputs under `cfg.out`.
///
/// Invalid settings give [`Error::Config`]. A numerical failure inside an
/// experiment becomes a failed verdict named `error`, so the manifest is
/// still written.
pub fn run(cfg: &RunConfig) -> Result<(RunManifest, PathBuf)> {
    cfg.validate()?;
    let stamp = chrono::Utc::now();
    let (run_id, dir) = manifest::create_run_dir(&cfg.out, cfg.subcommand.name(), &stamp)?;
    let mut rec = Recorder::new(dir.clone());
    match cfg.subcommand {
        Subcommand::All => {
            for sub in Subcommand::EXPERIMENTS {
                rec.prefix = format!("{sub}/");
                match cfg.for_subcommand(sub) {
                    Ok(sub_cfg) => run_one(&sub_cfg, &mut rec),
                    Err(e) => rec.check("error", "valid configuration", e.to_string(), "-", false),
                }
            }
            rec.prefix.clear();
        }
        _ => run_one(cfg, &mut rec),
    }
    let manifest = RunManifest {
        run_id,
        timestamp: stamp.to_rfc3339(),
        subcommand: cfg.subcommand.to_string(),
        config: cfg.echo(),
        verdicts: rec.verdicts,
        files: rec.files,
        summary: rec.summary,
    };
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok((manifest, dir))
}

fn run_one(cfg: &RunConfig, rec: &mut Recorder) {
    let outcome = match cfg.subcommand {
        Subcommand::Identities => runs::identities(cfg, rec),
        Subcommand::Lemma => runs::lemma(cfg, rec),
        Subcommand::Decay => runs::decay(cfg, rec),
        Subcommand::Counterexample => runs::counterexample(cfg, rec),
        Subcommand::Cotlar => runs::cotlar(cfg, rec),
        Subcommand::TheoremB => runs::theorem_b(cfg, rec),
        Subcommand::SpectralValidate => runs::spectral_validate(cfg, rec),
        Subcommand::All => unreachable!("expanded by run"),
    };
    if let Err(e) = outcome {
        rec.check("error", "no error", e.to_string(), "-", false);
    }
}

/// Builds a [`RunConfig`] from an optional config file and `key=value`
/// overrides, then applies `--out` and `--seed`.
pub fn resolve_config(
    subcommand: Subcommand,
    config_file: Option<&Path>,
    overrides: &[String],
    out: Option<PathBuf>,
    seed: Option<u64>,
) -> Result<RunConfig> {
    let mut pairs = match config_file {
        Some(p) => read_config_file(p)?,
        None => Vec::new(),
    };
    for o in overrides {
        pairs.push(parse_override(o)?);
    }
    let mut cfg = RunConfig::build(subcommand, pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
    if let Some(out) = out {
        cfg.out = out;
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

/// Process exit code: 0 when every verdict passed, 1 otherwise, 2 for an
/// invalid configuration.
pub fn exit_code(outcome: &Result<(RunManifest, PathBuf)>) -> i32 {
    match outcome {
        Ok((m, _)) if m.passed() => 0,
        Ok(_) => 1,
        Err(Error::Config(_)) => 2,
        Err(_) => 1,
    }
}

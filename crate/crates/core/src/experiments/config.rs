use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "BEURLING_LAB_OUT";

/// Output directory used when neither `--out` nor [`OUT_ENV`] is given.
pub const DEFAULT_OUT: &str = "runs";

/// Default seed for randomized inputs.
pub const DEFAULT_SEED: u64 = 20_240_607;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subcommand {
    Identities,
    Lemma,
    Decay,
    Counterexample,
    Cotlar,
    TheoremB,
    SpectralValidate,
    All,
}

impl Subcommand {
    /// Every concrete experiment, in the order `all` runs them.
    pub const EXPERIMENTS: [Subcommand; 7] = [
        Subcommand::Identities,
        Subcommand::Lemma,
        Subcommand::Decay,
        Subcommand::Counterexample,
        Subcommand::Cotlar,
        Subcommand::TheoremB,
        Subcommand::SpectralValidate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Identities => "identities",
            Subcommand::Lemma => "lemma",
            Subcommand::Decay => "decay",
            Subcommand::Counterexample => "counterexample",
            Subcommand::Cotlar => "cotlar",
            Subcommand::TheoremB => "theorem-b",
            Subcommand::SpectralValidate => "spectral-validate",
            Subcommand::All => "all",
        }
    }
}

impl fmt::Display for Subcommand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Subcommand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Subcommand::EXPERIMENTS
            .iter()
            .chain(std::iter::once(&Subcommand::All))
            .find(|c| c.name() == s)
            .copied()
            .ok_or_else(|| Error::Config(format!("unknown subcommand '{s}'")))
    }
}

/// Settings for one experiment run.
///
/// Every field has a per-subcommand default (see [`RunConfig::defaults`]);
/// a flat `key = value` file and command-line `key=value` pairs override it,
/// in that order. Lists are comma separated.
///
/// | key | meaning |
/// |---|---|
/// | `tol` | quadrature tolerance (relative to the natural size of the value in `decay` and `counterexample`) |
/// | `max_depth` | quadrature depth limit |
/// | `n` | grid sizes (powers of two, at least 16) |
/// | `half_width` | grid half-width `L` |
/// | `alphas`, `m` | counterexample points `z = alpha (1 + i)` and the margin `m` |
/// | `moduli` | `|z|` values for `decay` |
/// | `radii` | outer radii `R` for `theorem-b` |
/// | `ks` | transform orders |
/// | `js` | indices for `identities` |
/// | `j` | maximal-function iterate |
/// | `seed` | seed for randomized inputs |
/// | `out` | output directory |
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub subcommand: Subcommand,
    pub tol: f64,
    pub max_depth: usize,
    pub n: Vec<usize>,
    pub half_width: f64,
    pub alphas: Vec<f64>,
    pub m: f64,
    pub moduli: Vec<f64>,
    pub radii: Vec<f64>,
    pub ks: Vec<u32>,
    pub js: Vec<u32>,
    pub j: u32,
    pub seed: u64,
    pub out: PathBuf,
    /// The `key = value` pairs applied over the defaults, in order.
    pub settings: Vec<(String, String)>,
}

const KEYS: [&str; 14] = [
    "tol",
    "max_depth",
    "n",
    "half_width",
    "alphas",
    "m",
    "moduli",
    "radii",
    "ks",
    "js",
    "j",
    "seed",
    "out",
    "subcommand",
];

impl RunConfig {
    pub fn defaults(subcommand: Subcommand) -> RunConfig {
        let out = std::env::var_os(OUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
        let mut cfg = RunConfig {
            subcommand,
            tol: 1e-8,
            max_depth: 30,
            n: vec![1024],
            half_width: 4.0,
            alphas: vec![8.0, 16.0, 32.0, 64.0, 128.0],
            m: crate::counterexample::DEFAULT_M,
            moduli: vec![4.0, 8.0, 16.0, 32.0, 64.0],
            radii: vec![30.0, 300.0, 3000.0],
            ks: vec![1, 2, 3, 4],
            js: (1..=8).collect(),
            j: 2,
            seed: DEFAULT_SEED,
            out,
            settings: Vec::new(),
        };
        match subcommand {
            Subcommand::Lemma => cfg.tol = 1e-10,
            Subcommand::Decay => {
                cfg.tol = 1e-6;
                cfg.ks = vec![1, 2];
            }
            Subcommand::Cotlar => {
                cfg.ks = vec![1, 3];
                cfg.n = vec![256, 512];
                cfg.half_width = 8.0;
            }
            Subcommand::TheoremB => {
                cfg.ks = vec![2];
                cfg.tol = 1e-10;
            }
            _ => {}
        }
        cfg
    }

    /// Defaults for `subcommand` with `pairs` applied in order.
    pub fn build<'a>(subcommand: Subcommand, pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<RunConfig> {
        let mut cfg = RunConfig::defaults(subcommand);
        for (k, v) in pairs {
            cfg.set(k, v)?;
            cfg.settings.push((k.to_string(), v.to_string()));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "tol" => self.tol = parse(key, value)?,
            "max_depth" => self.max_depth = parse(key, value)?,
            "n" => self.n = parse_list(key, value)?,
            "half_width" => self.half_width = parse(key, value)?,
            "alphas" => self.alphas = parse_list(key, value)?,
            "m" => self.m = parse(key, value)?,
            "moduli" => self.moduli = parse_list(key, value)?,
            "radii" => self.radii = parse_list(key, value)?,
            "ks" => self.ks = parse_list(key, value)?,
            "js" => self.js = parse_list(key, value)?,
            "j" => self.j = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            // a config file may name its subcommand; the command line wins
            "subcommand" => {
                value.parse::<Subcommand>()?;
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown key '{other}' (known: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// The configuration `subcommand` gets inside an `all` run: its own
    /// defaults with the same explicit settings, output directory and seed.
    pub fn for_subcommand(&self, subcommand: Subcommand) -> Result<RunConfig> {
        let mut cfg = RunConfig::build(subcommand, self.settings.iter().map(|(k, v)| (k.as_str(), v.as_str())))?;
        cfg.out = self.out.clone();
        cfg.seed = self.seed;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_depth < 4 {
            return bad("max_depth must be at least 4".into());
        }
        for (name, empty) in [
            ("n", self.n.is_empty()),
            ("alphas", self.alphas.is_empty()),
            ("moduli", self.moduli.is_empty()),
            ("radii", self.radii.is_empty()),
            ("ks", self.ks.is_empty()),
            ("js", self.js.is_empty()),
        ] {
            if empty {
                return bad(format!("{name} must not be empty"));
            }
        }
        if let Some(n) = self.n.iter().find(|&&n| n < 16 || !n.is_power_of_two()) {
            return bad(format!("grid size {n} is not a power of two >= 16"));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return bad("half_width must be positive".into());
        }
        if self.ks.contains(&0) || self.js.contains(&0) || self.j == 0 {
            return bad("ks, js and j must be positive".into());
        }
        if !(self.m > 2.0) {
            return bad(format!("m must exceed 2, got {}", self.m));
        }
        if let Some(a) = self.alphas.iter().find(|&&a| !(a > self.m && a.is_finite())) {
            return bad(format!("alpha {a} must exceed m = {}", self.m));
        }
        if let Some(r) = self.moduli.iter().find(|&&r| !(r > 3.0 && r.is_finite())) {
            return bad(format!("modulus {r} must exceed 3"));
        }
        if let Some(r) = self.radii.iter().find(|&&r| !(r > 3.0 && r.is_finite())) {
            return bad(format!("radius {r} must exceed 3"));
        }
        match self.subcommand {
            Subcommand::Cotlar if self.ks.iter().any(|k| k % 2 == 0) => bad("cotlar needs odd ks".into()),
            Subcommand::TheoremB if self.ks.iter().any(|k| k % 2 == 1) => bad("theorem-b needs even ks".into()),
            _ => Ok(()),
        }
    }

    /// The settings as strings, for the manifest.
    pub fn echo(&self) -> BTreeMap<String, String> {
        let list = |v: &[String]| v.join(",");
        let fl = |v: &[f64]| list(&v.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        let int = |v: &[u32]| list(&v.iter().map(|x| x.to_string()).collect::<Vec<_>>());
        BTreeMap::from([
            ("subcommand".into(), self.subcommand.to_string()),
            ("tol".into(), self.tol.to_string()),
            ("max_depth".into(), self.max_depth.to_string()),
            ("n".into(), list(&self.n.iter().map(|x| x.to_string()).collect::<Vec<_>>())),
            ("half_width".into(), self.half_width.to_string()),
            ("alphas".into(), fl(&self.alphas)),
            ("m".into(), self.m.to_string()),
            ("moduli".into(), fl(&self.moduli)),
            ("radii".into(), fl(&self.radii)),
            ("ks".into(), int(&self.ks)),
            ("js".into(), int(&self.js)),
            ("j".into(), self.j.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("out".into(), self.out.display().to_string()),
        ])
    }
}

/// Reads `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_text(&text)
}

/// Splits a command-line `key=value` override.
pub fn parse_override(arg: &str) -> Result<(String, String)> {
    arg.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| Error::Config(format!("expected key=value, got '{arg}'")))
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("cannot parse {key} = '{value}'")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

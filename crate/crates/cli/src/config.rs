//! Run configuration: a TOML file plus command-line overrides.
//!
//! See `docs/config.md` for the schema.

use std::path::{Path, PathBuf};

use corn_core::corn::PoolSpec;
use corn_core::logopt::DEFAULT_TOL;
use corn_core::market::SyntheticMarketSpec;
use serde::Deserialize;

use crate::CliError;

pub const DEFAULT_THRESHOLD: f64 = 0.01;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    input: InputSection,
    #[serde(default)]
    pool: Option<PoolSpec>,
    #[serde(default)]
    run: RunSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InputSection {
    csv: Option<PathBuf>,
    #[serde(default)]
    prices: bool,
    synthetic: Option<SyntheticMarketSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    n: Option<usize>,
    #[serde(default)]
    seeds: Vec<u64>,
    tol: Option<f64>,
    out: Option<PathBuf>,
    threshold: Option<f64>,
    jobs: Option<usize>,
    #[serde(default)]
    log2: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    /// Relative prices (or raw prices when `prices` is set) from a CSV file.
    Csv {
        path: PathBuf,
        prices: bool,
    },
    Synthetic(SyntheticMarketSpec),
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Input,
    pub pool: PoolSpec,
    /// Horizon. Required for synthetic input; for CSV input it truncates.
    pub n: Option<usize>,
    pub seeds: Vec<u64>,
    pub tol: f64,
    pub out: PathBuf,
    pub threshold: f64,
    /// Worker threads; 0 lets the runtime decide.
    pub jobs: usize,
    pub log2: bool,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seeds: Option<Vec<u64>>,
    pub n: Option<usize>,
    pub pool: Option<PoolSpec>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub threshold: Option<f64>,
    pub jobs: Option<usize>,
    pub log2: bool,
}

impl RunConfig {
    /// Reads `path`; relative paths inside the file resolve against its
    /// directory.
    pub fn load(path: &Path, overrides: Overrides) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::from_toml(&text, base, overrides)
    }

    pub fn from_toml(text: &str, base: &Path, overrides: Overrides) -> Result<Self, CliError> {
        let file: FileConfig = toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))?;
        let input = match (file.input.csv, file.input.synthetic) {
            (Some(csv), None) => Input::Csv {
                path: base.join(csv),
                prices: file.input.prices,
            },
            (None, Some(spec)) => {
                if file.input.prices {
                    return Err(CliError::Config("input.prices applies only to csv input".into()));
                }
                Input::Synthetic(spec)
            }
            (Some(_), Some(_)) => return Err(CliError::Config("input: give either csv or synthetic, not both".into())),
            (None, None) => return Err(CliError::Config("input: one of csv or synthetic is required".into())),
        };
        let run = file.run;
        let config = RunConfig {
            input,
            pool: overrides.pool.or(file.pool).unwrap_or_default(),
            n: overrides.n.or(run.n),
            seeds: overrides.seeds.unwrap_or(run.seeds),
            tol: overrides.tol.or(run.tol).unwrap_or(DEFAULT_TOL),
            out: overrides
                .out
                .or_else(|| run.out.map(|o| base.join(o)))
                .unwrap_or_else(|| PathBuf::from("corn-out")),
            threshold: overrides.threshold.or(run.threshold).unwrap_or(DEFAULT_THRESHOLD),
            jobs: overrides.jobs.or(run.jobs).unwrap_or(0),
            log2: overrides.log2 || run.log2,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: &str| Err(CliError::Config(msg.to_string()));
        self.pool.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.n == Some(0) {
            return bad("n must be at least 1");
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad("tol must be positive");
        }
        if !(self.threshold.is_finite() && self.threshold >= 0.0) {
            return bad("threshold must be non-negative");
        }
        if let Input::Synthetic(spec) = &self.input {
            spec.validate().map_err(|e| CliError::Config(e.to_string()))?;
            if self.n.is_none() {
                return bad("synthetic input needs run.n");
            }
            if self.seeds.is_empty() {
                return bad("synthetic input needs at least one seed");
            }
        }
        Ok(())
    }
}

/// Parses `W,P` into a pool.
pub fn parse_pool(s: &str) -> Result<PoolSpec, String> {
    let (w, p) = s.split_once(',').ok_or_else(|| format!("expected W,P, got {s:?}"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("{v:?}: {e}"));
    Ok(PoolSpec::new(parse(w)?, parse(p)?))
}

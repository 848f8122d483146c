//! Runs the identity suites of `siegel-core`, the potential classifier and
//! the Möbius constraint report, producing deterministic reports.

pub mod input;
pub mod report;
pub mod suites;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use siegel_core::GeomError;
use thiserror::Error;

pub use input::{classify, classify_file, mobius, mobius_file};
pub use report::{Check, Deviation, Report, Status, Summary};
pub use suites::run;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    InvalidConfig(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

impl CliError {
    /// Process exit code: 2 for unusable input, 1 for computation errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::InvalidConfig(_) | CliError::Io { .. } => 2,
            CliError::Geom(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Metric,
    Potential,
    Tables,
    Grading,
    Normalize,
    Mobius,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Metric,
        Suite::Potential,
        Suite::Tables,
        Suite::Grading,
        Suite::Normalize,
        Suite::Mobius,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Metric => "metric",
            Suite::Potential => "potential",
            Suite::Tables => "tables",
            Suite::Grading => "grading",
            Suite::Normalize => "normalize",
            Suite::Mobius => "mobius",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| CliError::InvalidConfig(format!("unknown suite {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Structured,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "structured" | "json" => Ok(Format::Structured),
            _ => Err(CliError::InvalidConfig(format!("unknown format {s:?}"))),
        }
    }
}

/// Largest dimension accepted by [`run`].
pub const MAX_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub n_list: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
    /// Tolerance overrides keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
    pub suites: Vec<Suite>,
    pub format: Format,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            n_list: (1..=5).collect(),
            samples: 100,
            seed: 0,
            tolerances: BTreeMap::new(),
            suites: Suite::ALL.to_vec(),
            format: Format::Text,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(CliError::InvalidConfig("n list is empty".into()));
        }
        if let Some(n) = self.n_list.iter().find(|&&n| n == 0 || n > MAX_N) {
            return Err(CliError::InvalidConfig(format!("n = {n} outside 1..={MAX_N}")));
        }
        if self.samples == 0 {
            return Err(CliError::InvalidConfig("samples must be positive".into()));
        }
        if self.suites.is_empty() {
            return Err(CliError::InvalidConfig("no suites selected".into()));
        }
        for (name, t) in &self.tolerances {
            if !(t.is_finite() && *t >= 0.0) {
                return Err(CliError::InvalidConfig(format!("tolerance {name} = {t} is not a finite nonnegative number")));
            }
        }
        Ok(())
    }
}

/// Parses `NAME=VALUE`.
pub fn parse_tolerance(s: &str) -> Result<(String, f64)> {
    let (name, value) = s
        .rsplit_once('=')
        .ok_or_else(|| CliError::InvalidConfig(format!("tolerance {s:?} is not NAME=VALUE")))?;
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| CliError::InvalidConfig(format!("tolerance {s:?}: {value:?} is not a number")))?;
    Ok((name.trim().to_string(), v))
}

/// Parses `3`, `1,2,4` or `1..5` (inclusive).
pub fn parse_n_list(s: &str) -> Result<Vec<usize>> {
    let bad = || CliError::InvalidConfig(format!("cannot parse n list {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let lo: usize = a.trim().parse().map_err(|_| bad())?;
        let hi: usize = b.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect()
}

pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Text => report.to_text(),
        Format::Structured => report.to_json() + "\n",
    }
}

//! Configuration resolution: defaults, then the `key=value` config file,
//! then command-line flags, with later layers winning.
//!
//! Config keys use the long flag names without the leading dashes
//! (`phi=0.5`, `speed-kmh=25`). A malformed entry is a usage error, the
//! same as the equivalent bad flag.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{CliError, Result};

/// Every key a config file may set, across all subcommands. Commands read
/// the subset they understand; unknown keys are rejected to catch typos.
pub const KNOWN_KEYS: &[&str] = &[
    "trips",
    "emissions",
    "map",
    "routes",
    "out",
    "policy",
    "phi",
    "phis",
    "e0",
    "lev-threshold",
    "hev-threshold",
    "ev-fraction",
    "ev-fractions",
    "horizon-s",
    "speed-kmh",
    "trip-speed-kmh",
    "max-queue-wait-s",
    "detour",
    "routing",
    "seed",
    "jobs",
    "ratio-method",
    "drivers",
    "requests",
    "extent-km",
    "rate-per-hour",
    "lev-fraction",
    "start-ts",
    "instances",
    "min-requests",
    "max-requests",
    "min-drivers",
    "max-drivers",
];

/// A parsed `key=value` config file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

/// Loads a config file; blank lines and `#` comments are ignored.
pub fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut entries = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "{}: line {}: expected key=value",
                path.display(),
                i + 1
            ))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KNOWN_KEYS.contains(&key) {
            return Err(CliError::Usage(format!(
                "{}: line {}: unknown config key {key:?}",
                path.display(),
                i + 1
            )));
        }
        entries.insert(key.to_string(), value.to_string());
    }
    Ok(ConfigFile { entries })
}

impl ConfigFile {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }
}

/// Merges one flag: command line first, then the config file, then the
/// caller's default.
pub struct Resolver<'a> {
    file: Option<&'a ConfigFile>,
}

impl<'a> Resolver<'a> {
    pub fn new(file: Option<&'a ConfigFile>) -> Self {
        Resolver { file }
    }

    fn file_value(&self, key: &str) -> Option<&str> {
        self.file.and_then(|f| f.get(key))
    }

    /// Resolved value of a flag with a default.
    pub fn flag<T: FromStr>(&self, cli: Option<T>, key: &str, default: T) -> Result<T> {
        Ok(self.opt_flag(cli, key)?.unwrap_or(default))
    }

    /// Resolved value of a flag with no default.
    pub fn opt_flag<T: FromStr>(&self, cli: Option<T>, key: &str) -> Result<Option<T>> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.file_value(key) {
            None => Ok(None),
            Some(s) => s.parse().map(Some).map_err(|_| {
                CliError::Usage(format!("config key {key}: cannot parse {s:?}"))
            }),
        }
    }

    /// Resolved path flag; config-file values are taken verbatim.
    pub fn path(&self, cli: Option<PathBuf>, key: &str) -> Option<PathBuf> {
        cli.or_else(|| self.file_value(key).map(PathBuf::from))
    }

    /// Resolved comma-separated list flag.
    pub fn list_flag<T: FromStr>(&self, cli: Option<Vec<T>>, key: &str) -> Result<Option<Vec<T>>> {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.file_value(key) {
            None => Ok(None),
            Some(s) => parse_list(s)
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key {key}: {e}"))),
        }
    }
}

/// Parses a comma-separated list; empty input or an empty element fails.
pub fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, String> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err("empty list element".to_string());
        }
        out.push(
            part.parse()
                .map_err(|_| format!("cannot parse list element {part:?}"))?,
        );
    }
    Ok(out)
}

/// Range checks shared by flag parsers and config resolution. Each takes
/// the flag name so the message points at what to fix.
pub fn require_finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be finite, got {v}")))
    }
}

pub fn require_positive(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be positive, got {v}")))
    }
}

pub fn require_non_negative(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!(
            "--{name} must be zero or more, got {v}"
        )))
    }
}

pub fn require_unit_fraction(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(CliError::Usage(format!(
            "--{name} must be between 0 and 1, got {v}"
        )))
    }
}

pub fn require_detour(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v >= 1.0 {
        Ok(v)
    } else {
        Err(CliError::Usage(format!(
            "--{name} must be at least 1, got {v}"
        )))
    }
}

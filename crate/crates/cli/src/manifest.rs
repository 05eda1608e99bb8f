//! Run manifests: enough provenance to reproduce any report byte for byte.
//!
//! Every report embeds a manifest carrying the resolved configuration, the
//! digests of every input file, the tool version, and the seed. All fields
//! are derived from the inputs alone (the time window comes from the data,
//! not the wall clock), so rerunning the same command on the same files
//! produces identical output.

use std::collections::BTreeMap;
use std::fs;
use std::io::Read;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};

/// Name and version baked into every manifest.
pub const TOOL_NAME: &str = "greenride";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Identity of one input file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// First and last request timestamps of the dataset, unix seconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DataWindow {
    pub start_ts: i64,
    pub end_ts: i64,
}

/// Row bookkeeping for the loaded dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct DatasetStats {
    pub trips: usize,
    pub drivers: usize,
    pub rows_accepted: usize,
    pub rows_rejected: usize,
}

/// Everything needed to rerun a command and get the same bytes out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    /// Subcommand that produced the report.
    pub command: String,
    /// The one seed all randomness descends from.
    pub seed: u64,
    /// Fully resolved configuration after merging defaults, the config
    /// file, and command-line flags.
    pub config: serde_json::Value,
    /// Digests of every input file, keyed by role (trips, emissions, ...).
    pub inputs: BTreeMap<&'static str, FileDigest>,
    /// Request time span of the dataset, when it has any trips.
    pub window: Option<DataWindow>,
    pub dataset: DatasetStats,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, config: serde_json::Value) -> Self {
        RunManifest {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            command: command.to_string(),
            seed,
            config,
            inputs: BTreeMap::new(),
            window: None,
            dataset: DatasetStats::default(),
        }
    }

    /// Records an input file under a role name, digesting its contents.
    pub fn add_input(&mut self, role: &'static str, path: &Path) -> Result<()> {
        self.inputs.insert(
            role,
            FileDigest {
                path: path.display().to_string(),
                sha256: sha256_file(path)?,
            },
        );
        Ok(())
    }

    /// Compact single-line JSON, used as the `# manifest=` comment in CSVs.
    pub fn to_comment_line(&self) -> String {
        let json = serde_json::to_string(self).expect("manifest serializes");
        format!("# manifest={json}")
    }
}

/// Hex SHA-256 of a file's contents.
pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf).map_err(|e| CliError::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

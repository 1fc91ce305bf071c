//! Provenance records written alongside every command's output.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::user;

/// Describes one command invocation: directory outputs hold it as
/// `run_manifest.json`, file outputs as a `<name>.manifest.json` sidecar.
/// The timestamp is the only non-deterministic output a command produces.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub flags: BTreeMap<String, String>,
    pub input_digests: BTreeMap<String, String>,
    pub tool_version: String,
    pub timestamp_unix: u64,
}

impl RunManifest {
    pub fn new(
        command: &str,
        flags: BTreeMap<String, String>,
        input_digests: BTreeMap<String, String>,
    ) -> Self {
        let timestamp_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Self {
            command: command.to_string(),
            flags,
            input_digests,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix,
        }
    }

    pub fn write_into_dir(&self, dir: &Path) -> anyhow::Result<()> {
        self.write_to(&dir.join("run_manifest.json"))
    }

    pub fn write_beside(&self, output_file: &Path) -> anyhow::Result<()> {
        let mut name = output_file
            .file_name()
            .map(|n| n.to_os_string())
            .context("output path has no file name")
            .map_err(user)?;
        name.push(".manifest.json");
        self.write_to(&output_file.with_file_name(name))
    }

    fn write_to(&self, path: &Path) -> anyhow::Result<()> {
        let json = serde_json::to_string_pretty(self).context("serializing run manifest")?;
        fs::write(path, json + "\n")
            .with_context(|| format!("writing {}", path.display()))
            .map_err(user)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

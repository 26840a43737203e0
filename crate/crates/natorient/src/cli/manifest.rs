//! Run manifest: every subcommand records its command line, input
//! digests, outputs and wall time as `manifest.json` in the output
//! directory. The manifest is run metadata, not a data file, so it is
//! the one output allowed to differ between reruns.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::CliError;

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub tool_version: String,
    pub wall_time_ms: u64,
}

/// Collects manifest data while a subcommand runs.
pub struct ManifestBuilder {
    command: String,
    parameters: BTreeMap<String, String>,
    inputs: Vec<InputDigest>,
    outputs: Vec<String>,
    started: Instant,
}

impl ManifestBuilder {
    pub fn new(command: &str) -> Self {
        ManifestBuilder {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started: Instant::now(),
        }
    }

    pub fn parameter(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }

    pub fn input(&mut self, path: &Path) -> Result<&mut Self, CliError> {
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(path)?,
        });
        Ok(self)
    }

    pub fn output(&mut self, path: &Path) -> &mut Self {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        self.outputs.push(name);
        self
    }

    /// Serializes the manifest into `<out_dir>/manifest.json`.
    pub fn write(self, out_dir: &Path) -> Result<PathBuf, CliError> {
        let manifest = RunManifest {
            command: self.command,
            parameters: self.parameters,
            inputs: self.inputs,
            outputs: self.outputs,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time_ms: self.started.elapsed().as_millis() as u64,
        };
        let path = out_dir.join("manifest.json");
        let mut json = serde_json::to_string_pretty(&manifest)
            .map_err(|e| CliError::Internal(format!("manifest serialization: {e}")))?;
        json.push('\n');
        std::fs::write(&path, json)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

fn sha256_hex(path: &Path) -> Result<String, CliError> {
    let mut file = std::fs::File::open(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file
            .read(&mut buf)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        use std::fmt::Write;
        let _ = write!(hex, "{byte:02x}");
    }
    Ok(hex)
}

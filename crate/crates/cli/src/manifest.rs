//! Sidecar manifests recording how every output file was produced.

use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliResult;

pub const MANIFEST_KIND: &str = "qgt.manifest.v1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub kind: String,
    pub subcommand: String,
    /// Resolved arguments; a valid `--config` document.
    pub config: Value,
    pub seed: Option<u64>,
    pub tool_version: String,
    pub started_unix_secs: u64,
    pub wall_clock_secs: f64,
    pub outputs: Vec<OutputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Collects outputs of one run and writes their manifests.
pub struct Recorder {
    subcommand: String,
    config: Value,
    seed: Option<u64>,
    started_unix_secs: u64,
    clock: Instant,
    outputs: Vec<(PathBuf, String)>,
}

impl Recorder {
    pub fn new(subcommand: &str, config: Value, seed: Option<u64>) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            config,
            seed,
            started_unix_secs: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            clock: Instant::now(),
            outputs: Vec::new(),
        }
    }

    /// Writes an output file and remembers its digest.
    pub fn write(&mut self, path: &Path, contents: &str) -> CliResult<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, contents)?;
        self.outputs.push((path.to_path_buf(), sha256_hex(contents.as_bytes())));
        Ok(())
    }

    /// Writes one manifest next to every recorded output.
    pub fn finish(self) -> CliResult<()> {
        let manifest = RunManifest {
            kind: MANIFEST_KIND.into(),
            subcommand: self.subcommand,
            config: self.config,
            seed: self.seed,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            started_unix_secs: self.started_unix_secs,
            wall_clock_secs: self.clock.elapsed().as_secs_f64(),
            outputs: self
                .outputs
                .iter()
                .map(|(p, d)| OutputDigest {
                    path: p.display().to_string(),
                    sha256: d.clone(),
                })
                .collect(),
        };
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        for (p, _) in &self.outputs {
            std::fs::write(sidecar_path(p), &text)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_of_known_input() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("out/a.csv")), PathBuf::from("out/a.csv.manifest.json"));
    }
}

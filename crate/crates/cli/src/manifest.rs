use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

pub fn digest(path: &Path) -> anyhow::Result<InputDigest> {
    let data = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let hash = Sha256::digest(&data);
    Ok(InputDigest {
        path: path.display().to_string(),
        sha256: hash.iter().map(|b| format!("{b:02x}")).collect(),
        bytes: data.len() as u64,
    })
}

/// Record of one command run: everything needed to reproduce it.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: &'static str,
    pub version: &'static str,
    pub argv: Vec<String>,
    pub config: Value,
    pub seed: u64,
    pub inputs: Vec<InputDigest>,
    pub duration_secs: f64,
    pub artifacts: Vec<String>,
}

/// Collects artifacts while a command runs and writes `manifest.json` last.
pub struct ManifestBuilder {
    started: Instant,
    out: PathBuf,
    manifest: RunManifest,
}

impl ManifestBuilder {
    pub fn new(
        command: &'static str,
        argv: &[String],
        out: &Path,
        seed: u64,
        config: Value,
    ) -> anyhow::Result<Self> {
        fs::create_dir_all(out)
            .with_context(|| format!("creating output directory {}", out.display()))?;
        Ok(ManifestBuilder {
            started: Instant::now(),
            out: out.to_path_buf(),
            manifest: RunManifest {
                command,
                version: env!("CARGO_PKG_VERSION"),
                argv: argv.to_vec(),
                config,
                seed,
                inputs: Vec::new(),
                duration_secs: 0.0,
                artifacts: Vec::new(),
            },
        })
    }

    pub fn input(&mut self, path: &Path) -> anyhow::Result<()> {
        self.manifest.inputs.push(digest(path)?);
        Ok(())
    }

    /// Path for an artifact inside the output directory, recorded in the
    /// manifest.
    pub fn artifact(&mut self, name: &str) -> PathBuf {
        self.manifest.artifacts.push(name.to_string());
        self.out.join(name)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        let path = self.artifact(name);
        let text = serde_json::to_string_pretty(value)?;
        fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }

    pub fn finish(mut self) -> anyhow::Result<()> {
        self.manifest.duration_secs = self.started.elapsed().as_secs_f64();
        self.manifest.artifacts.push("manifest.json".into());
        let path = self.out.join("manifest.json");
        let text = serde_json::to_string_pretty(&self.manifest)?;
        fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }
}

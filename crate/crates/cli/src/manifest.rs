//! Run manifests: what was run, with which configuration, on which bytes.
//!
//! Inputs and outputs are keyed by location-independent names (outputs
//! relative to the output directory), so two runs over identical inputs
//! produce identical manifests wherever they live.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{io_error, Result};

pub const MANIFEST_NAME: &str = "manifest.json";

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| io_error(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub options: BTreeMap<String, String>,
    pub seed: u64,
    pub config_sha256: String,
    pub config: RunConfig,
    pub inputs: BTreeMap<String, String>,
    pub outputs: BTreeMap<String, String>,
}

pub struct ManifestBuilder {
    out_dir: PathBuf,
    manifest: RunManifest,
    outputs: Vec<PathBuf>,
}

impl ManifestBuilder {
    pub fn new(command: &str, cfg: &RunConfig, out_dir: &Path) -> Self {
        ManifestBuilder {
            out_dir: out_dir.to_path_buf(),
            manifest: RunManifest {
                tool: "deepfuse",
                version: env!("CARGO_PKG_VERSION"),
                command: command.to_string(),
                options: BTreeMap::new(),
                seed: cfg.seed,
                config_sha256: cfg.digest(),
                config: cfg.clone(),
                inputs: BTreeMap::new(),
                outputs: BTreeMap::new(),
            },
            outputs: Vec::new(),
        }
    }

    pub fn option(&mut self, key: &str, value: impl ToString) {
        self.manifest.options.insert(key.to_string(), value.to_string());
    }

    /// Records `path` under `key`.
    pub fn input(&mut self, key: impl Into<String>, path: &Path) -> Result<()> {
        let digest = sha256_file(path)?;
        self.manifest.inputs.insert(key.into(), digest);
        Ok(())
    }

    /// Records a single-file input by its file name.
    pub fn input_file(&mut self, path: &Path) -> Result<()> {
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        self.input(name, path)
    }

    /// Records a file found under `root` as `<root name>/<relative path>`.
    pub fn input_under(&mut self, root: &Path, path: &Path) -> Result<()> {
        let root_name = root
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| ".".into());
        let rel = path.strip_prefix(root).unwrap_or(path);
        let key = format!("{root_name}/{}", rel.to_string_lossy().replace('\\', "/"));
        self.input(key, path)
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    /// Digests the outputs and writes `manifest.json` into the output directory.
    pub fn finish(mut self) -> Result<PathBuf> {
        for p in &self.outputs {
            let key = p.strip_prefix(&self.out_dir).unwrap_or(p).to_string_lossy().replace('\\', "/");
            self.manifest.outputs.insert(key, sha256_file(p)?);
        }
        let path = self.out_dir.join(MANIFEST_NAME);
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| io_error(&path, e))?;
        Ok(path)
    }
}

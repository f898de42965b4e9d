//! Output files and their manifests.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use evcat::Fingerprint;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

/// Everything needed to re-run a subcommand bit-identically.
#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a RunConfig,
    /// Extra command parameters not in the config.
    parameters: &'a BTreeMap<String, String>,
    inputs: &'a BTreeMap<String, FileRecord>,
    outputs: BTreeMap<String, FileRecord>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileRecord {
    pub path: PathBuf,
    pub sha256: Fingerprint,
}

/// Collects inputs and outputs of one subcommand run.
#[derive(Debug)]
pub struct Run<'a> {
    command: &'static str,
    config: &'a RunConfig,
    dir: PathBuf,
    parameters: BTreeMap<String, String>,
    inputs: BTreeMap<String, FileRecord>,
    outputs: BTreeMap<String, FileRecord>,
}

pub fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::io(path, e))
}

impl<'a> Run<'a> {
    pub fn new(command: &'static str, config: &'a RunConfig) -> Result<Self, CliError> {
        let dir = config.output_dir.clone();
        std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(Run {
            command,
            config,
            dir,
            parameters: BTreeMap::new(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
        })
    }

    pub fn parameter(&mut self, name: &str, value: impl ToString) {
        self.parameters.insert(name.to_string(), value.to_string());
    }

    /// Reads an input file, recording its fingerprint.
    pub fn input(&mut self, role: &str, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = read(path)?;
        self.inputs.insert(
            role.to_string(),
            FileRecord {
                path: path.to_path_buf(),
                sha256: Fingerprint::of_bytes(&bytes),
            },
        );
        Ok(bytes)
    }

    pub fn input_text(&mut self, role: &str, path: &Path) -> Result<String, CliError> {
        String::from_utf8(self.input(role, path)?).map_err(|_| CliError::Data(format!("{}: not UTF-8", path.display())))
    }

    pub fn write(&mut self, name: &str, contents: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        self.outputs.insert(
            name.to_string(),
            FileRecord {
                path: path.clone(),
                sha256: Fingerprint::of_bytes(contents),
            },
        );
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Invariant(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Writes `<command>.manifest.json` next to the outputs.
    pub fn finish(self) -> Result<(), CliError> {
        let manifest = Manifest {
            tool: "evcat",
            version: env!("CARGO_PKG_VERSION"),
            command: self.command,
            config: self.config,
            parameters: &self.parameters,
            inputs: &self.inputs,
            outputs: self.outputs.clone(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Invariant(e.to_string()))?;
        text.push('\n');
        let path = self.dir.join(format!("{}.manifest.json", self.command));
        std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))
    }
}

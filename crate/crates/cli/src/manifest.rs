use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
struct FileEntry {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    args: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    inputs: Vec<FileEntry>,
    outputs: Vec<FileEntry>,
}

/// Files read and written by one invocation.
#[derive(Debug, Default)]
pub struct Run {
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
}

impl Run {
    pub fn input(&mut self, p: &Path) {
        self.inputs.push(p.to_path_buf());
    }

    pub fn output(&mut self, p: &Path) {
        self.outputs.push(p.to_path_buf());
    }
}

fn entry(path: &Path) -> Result<FileEntry> {
    let bytes = fs::read(path).with_context(|| format!("hashing {}", path.display()))?;
    Ok(FileEntry {
        path: path.display().to_string(),
        sha256: hex::encode(Sha256::digest(&bytes)),
    })
}

/// Writes `<primary output>.manifest.json` next to the first output.
pub fn write(command: &str, args: &[String], run: &Run) -> Result<Option<PathBuf>> {
    let Some(primary) = run.outputs.first() else {
        return Ok(None);
    };
    let manifest = Manifest {
        tool: "genre-grid",
        version: env!("CARGO_PKG_VERSION"),
        command,
        args,
        seed: run.seed,
        inputs: run.inputs.iter().map(|p| entry(p)).collect::<Result<_>>()?,
        outputs: run.outputs.iter().map(|p| entry(p)).collect::<Result<_>>()?,
    };
    let mut path = primary.clone().into_os_string();
    path.push(".manifest.json");
    let path = PathBuf::from(path);
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(Some(path))
}

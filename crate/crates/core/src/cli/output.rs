use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use super::CliError;

/// Accumulates everything that determines a command's output and names
/// the output directory after it.
pub struct OutputKey {
    command: &'static str,
    hasher: Sha256,
}

impl OutputKey {
    pub fn new(command: &'static str) -> Self {
        let mut key = OutputKey { command, hasher: Sha256::new() };
        key.add(command.as_bytes());
        key
    }

    /// Length-prefixed so that adjacent parts cannot run together.
    pub fn add(&mut self, part: &[u8]) -> &mut Self {
        self.hasher.update((part.len() as u64).to_le_bytes());
        self.hasher.update(part);
        self
    }

    pub fn add_str(&mut self, part: &str) -> &mut Self {
        self.add(part.as_bytes())
    }

    pub fn finish(self, root: &Path) -> Result<OutputDir, CliError> {
        let digest = hex::encode(self.hasher.finalize());
        let dir = root.join(format!("{}-{}", self.command, &digest[..16]));
        fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
        Ok(OutputDir { dir })
    }
}

pub struct OutputDir {
    dir: PathBuf,
}

impl OutputDir {
    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

/// File-name-safe form of a strategy descriptor or run name.
pub fn slug(s: &str) -> String {
    s.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' }).collect()
}

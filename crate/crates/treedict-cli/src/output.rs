//! Output-directory helpers. Every artifact is written atomically (temp
//! file + rename) and every command echoes its resolved configuration
//! into the output directory as run_config.json.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

pub struct OutputDir {
    dir: PathBuf,
}

impl OutputDir {
    /// Creates (or reuses) the directory.
    pub fn create(dir: &Path) -> Result<OutputDir, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {}", dir.display(), e)))?;
        Ok(OutputDir {
            dir: dir.to_path_buf(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let target = self.path(name);
        let tmp = self.dir.join(format!(".{}.tmp", name));
        fs::write(&tmp, bytes)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {}", tmp.display(), e)))?;
        fs::rename(&tmp, &target).map_err(|e| {
            CliError::Runtime(format!("cannot rename to {}: {}", target.display(), e))
        })?;
        Ok(())
    }

    /// Serializes the resolved run configuration next to the artifacts.
    pub fn echo_config<A: Serialize>(
        &self,
        command: &str,
        args: &A,
        resolved: serde_json::Value,
    ) -> Result<(), CliError> {
        let echo = serde_json::json!({
            "command": command,
            "args": args,
            "resolved": resolved,
        });
        let text =
            serde_json::to_string_pretty(&echo).map_err(|e| CliError::Runtime(e.to_string()))?;
        self.write("run_config.json", text.as_bytes())
    }
}

/// Usage-level check that an input file exists, before any output is
/// created.
pub fn require_file(path: &Path, what: &str) -> Result<(), CliError> {
    if !path.is_file() {
        return Err(CliError::Usage(format!(
            "{} '{}' does not exist",
            what,
            path.display()
        )));
    }
    Ok(())
}

//! File output shared by every artifact writer.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::error::Result;

/// Writes `bytes` to a temporary file next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Run configuration snapshot embedded in every output file.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
}

impl Provenance {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        Self {
            tool: "fdim".into(),
            version: crate::VERSION.into(),
            command: command.into(),
            seed,
            params: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.params.insert(key.into(), value.to_string());
        self
    }

    pub fn set(&mut self, key: impl Into<String>, value: impl ToString) {
        self.params.insert(key.into(), value.to_string());
    }

    /// `key=value` lines, stable order.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "tool={}\nversion={}\ncommand={}\nseed={}\n",
            self.tool, self.version, self.command, self.seed
        );
        for (k, v) in &self.params {
            s.push_str(&format!("{k}={v}\n"));
        }
        s
    }
}

//! Content-addressed on-disk cache.
//!
//! Entries live at `<dir>/<kind>/<sha256(version, kind, inputs)>`. Writes go
//! to a temporary file in the same directory and are renamed into place, so
//! concurrent readers never see a partial entry.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::PipelineError;

/// Bumped whenever a cached format or the meaning of a cached value changes.
pub const CACHE_FORMAT: &str = "sharbly-cache/1";

#[derive(Clone, Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn key(kind: &str, inputs: &str) -> String {
        let mut h = Sha256::new();
        for part in [CACHE_FORMAT, kind, inputs] {
            h.update(part.as_bytes());
            h.update([0u8]);
        }
        hex::encode(h.finalize())
    }

    fn path(&self, kind: &str, inputs: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(kind).join(Self::key(kind, inputs)))
    }

    pub fn load(&self, kind: &str, inputs: &str) -> Option<String> {
        let path = self.path(kind, inputs)?;
        fs::read_to_string(path).ok()
    }

    pub fn store(&self, kind: &str, inputs: &str, content: &str) -> Result<(), PipelineError> {
        let Some(path) = self.path(kind, inputs) else { return Ok(()) };
        let parent = path.parent().expect("cache entries have a parent directory");
        fs::create_dir_all(parent)?;
        let mut tmp = tempfile::NamedTempFile::new_in(parent)?;
        tmp.write_all(content.as_bytes())?;
        tmp.flush()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(())
    }

    /// Cached JSON value, or `compute()` stored for next time. Unreadable
    /// entries are recomputed and overwritten.
    pub fn json<T, F>(&self, kind: &str, inputs: &str, compute: F) -> Result<T, PipelineError>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T, PipelineError>,
    {
        if let Some(text) = self.load(kind, inputs) {
            match serde_json::from_str(&text) {
                Ok(v) => {
                    log::debug!("cache hit {kind} [{inputs}]");
                    return Ok(v);
                }
                Err(e) => log::warn!("discarding unreadable cache entry {kind} [{inputs}]: {e}"),
            }
        }
        let v = compute()?;
        let text = serde_json::to_string(&v).map_err(|e| PipelineError::Parse(e.to_string()))?;
        self.store(kind, inputs, &text)?;
        Ok(v)
    }
}

//! Content-addressed on-disk cache, one subdirectory per pipeline stage.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Deterministic key for a stage payload: hex SHA-256 of `stage`, a NUL
/// separator, and the payload bytes.
pub fn cache_key(stage: &str, payload: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(stage.as_bytes());
    hasher.update([0u8]);
    hasher.update(payload);
    hex::encode(hasher.finalize())
}

/// Key for a serializable payload. The value is routed through
/// `serde_json::Value` so object keys are emitted in sorted order.
pub fn cache_key_json<T: Serialize + ?Sized>(stage: &str, payload: &T) -> String {
    cache_key(stage, &canonical_json(payload))
}

pub(crate) fn canonical_json<T: Serialize + ?Sized>(payload: &T) -> Vec<u8> {
    let value = serde_json::to_value(payload).expect("cache payloads are plain data");
    serde_json::to_vec(&value).expect("json value always serializes")
}

/// A cache rooted at a directory. `None` root disables caching entirely.
#[derive(Debug, Clone, Default)]
pub struct StageCache {
    root: Option<PathBuf>,
}

impl StageCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self {
            root: Some(root.into()),
        }
    }

    pub fn disabled() -> Self {
        Self { root: None }
    }

    pub fn root(&self) -> Option<&Path> {
        self.root.as_deref()
    }

    fn path(&self, stage: &str, key: &str) -> Option<PathBuf> {
        self.root.as_ref().map(|r| r.join(stage).join(key))
    }

    pub fn get(&self, stage: &str, key: &str) -> Option<Vec<u8>> {
        let path = self.path(stage, key)?;
        fs::read(path).ok()
    }

    /// Writes via a temporary file and rename so an interrupted run never
    /// leaves a truncated entry behind.
    pub fn put(&self, stage: &str, key: &str, bytes: &[u8]) -> io::Result<()> {
        let Some(path) = self.path(stage, key) else {
            return Ok(());
        };
        let dir = path.parent().expect("stage dir");
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(".{key}.tmp"));
        fs::write(&tmp, bytes)?;
        fs::rename(tmp, path)
    }

    pub fn get_json<T: serde::de::DeserializeOwned>(&self, stage: &str, key: &str) -> Option<T> {
        let bytes = self.get(stage, key)?;
        match serde_json::from_slice(&bytes) {
            Ok(v) => Some(v),
            Err(e) => {
                tracing::warn!(stage, key, error = %e, "ignoring unreadable cache entry");
                None
            }
        }
    }

    pub fn put_json<T: Serialize>(&self, stage: &str, key: &str, value: &T) -> io::Result<()> {
        let bytes = serde_json::to_vec_pretty(value).map_err(io::Error::other)?;
        self.put(stage, key, &bytes)
    }
}

use std::fs;
use std::path::PathBuf;

use serde::{de::DeserializeOwned, Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::table::SCHEMA_VERSION;

/// Canonical description of one cached computation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CacheKey(String);

impl CacheKey {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        command: &str,
        n: u64,
        k: usize,
        odd: bool,
        interval: (f64, f64),
        method: &str,
        tolerance: f64,
        seed: Option<u64>,
    ) -> Self {
        let seed = seed.map_or_else(|| "-".to_string(), |s| s.to_string());
        CacheKey(format!(
            "command={command};n={n};k={k};parity={};interval=[{:?},{:?}];method={method};tolerance={:?};seed={seed};schema_version={SCHEMA_VERSION}",
            if odd { "odd" } else { "even" },
            interval.0,
            interval.1,
            tolerance,
        ))
    }

    pub fn file_name(&self) -> String {
        hex::encode(Sha256::digest(self.0.as_bytes()))
    }
}

#[derive(Serialize, Deserialize)]
struct Entry<T> {
    key: String,
    value: T,
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    /// A stored value, if present and written under the same key.
    pub fn get<T: DeserializeOwned>(&self, key: &CacheKey) -> Option<T> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        let entry: Entry<T> = serde_json::from_str(&text).ok()?;
        (entry.key == key.0).then_some(entry.value)
    }

    pub fn put<T: Serialize>(&self, key: &CacheKey, value: &T) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let entry = Entry {
            key: key.0.clone(),
            value,
        };
        let text = serde_json::to_string(&entry).map_err(std::io::Error::other)?;
        let tmp = self.dir.join(format!("{}.tmp{}", key.file_name(), std::process::id()));
        fs::write(&tmp, text)?;
        fs::rename(tmp, self.path(key))
    }
}

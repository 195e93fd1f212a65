use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use super::client::{CompletionRequest, CompletionResponse};
use super::LlmError;

/// One cache file: the request echo and the stored response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub digest: String,
    pub request: CompletionRequest,
    pub response: CompletionResponse,
}

/// Directory of `<digest>.json` files. Readers never see partial files:
/// writes go to a temporary name in the same directory and are renamed.
#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl ResponseCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ResponseCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, digest: &str) -> PathBuf {
        self.dir.join(format!("{digest}.json"))
    }

    pub fn get(&self, digest: &str) -> Result<Option<CacheEntry>, LlmError> {
        let path = self.path_for(digest);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(source) => return Err(LlmError::Io { path, source }),
        };
        let entry: CacheEntry = serde_json::from_str(&text)
            .map_err(|e| LlmError::CacheFormat { path: path.clone(), message: e.to_string() })?;
        if entry.digest != digest || entry.request.digest() != digest {
            return Err(LlmError::CacheFormat { path, message: "digest does not match request".into() });
        }
        Ok(Some(entry))
    }

    pub fn put(&self, entry: &CacheEntry) -> Result<(), LlmError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| LlmError::Io { path, source }
        };
        fs::create_dir_all(&self.dir).map_err(io(&self.dir))?;
        let mut body = serde_json::to_string_pretty(entry).expect("cache entries serialize");
        body.push('\n');
        let tmp = self.dir.join(format!(
            ".{}.{}.{}.tmp",
            entry.digest,
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        let mut file = fs::File::create(&tmp).map_err(io(&tmp))?;
        file.write_all(body.as_bytes()).and_then(|_| file.sync_all()).map_err(io(&tmp))?;
        drop(file);
        let dest = self.path_for(&entry.digest);
        fs::rename(&tmp, &dest).map_err(io(&dest))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llmclient::DecodeSettings;

    fn entry(prompt: &str) -> CacheEntry {
        let request = CompletionRequest::new("m", prompt, DecodeSettings::default());
        CacheEntry {
            digest: request.digest(),
            request,
            response: CompletionResponse { text: "[happy]".into(), provider: serde_json::json!({}), timestamp: 0 },
        }
    }

    #[test]
    fn put_then_get() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::new(dir.path().join("c"));
        let e = entry("hello");
        assert!(cache.get(&e.digest).unwrap().is_none());
        cache.put(&e).unwrap();
        assert_eq!(cache.get(&e.digest).unwrap().unwrap(), e);
        let names: Vec<_> = fs::read_dir(cache.dir()).unwrap().map(|d| d.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1, "no temp files left behind");
    }

    #[test]
    fn tampered_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::new(dir.path());
        let e = entry("hello");
        let mut other = entry("other");
        other.digest = e.digest.clone();
        cache.put(&other).unwrap();
        assert!(matches!(cache.get(&e.digest), Err(LlmError::CacheFormat { .. })));
    }
}

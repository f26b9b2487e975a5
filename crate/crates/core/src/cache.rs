//! On-disk cache of stabilizer chains, keyed by a SHA-256 hash of the group's
//! generator images. A cached chain is rebuilt and checked against the
//! stored order before use, so a hit never changes a result.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::permcore::{ChainRecord, PermGroup, StabilizerChain};

/// Overrides the cache directory.
pub const CACHE_ENV: &str = "WREATHGEN_CACHE_DIR";

const VERSION: &str = "wreathgen-cache/1";

#[derive(Serialize, Deserialize)]
struct Entry {
    version: String,
    key: String,
    chain: ChainRecord,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// The directory named by [`CACHE_ENV`], else `fallback`.
    pub fn from_env(fallback: Option<PathBuf>) -> Option<Self> {
        std::env::var_os(CACHE_ENV).map(PathBuf::from).or(fallback).map(Cache::new)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Content hash of the degree and generator images, in hex.
    pub fn key(g: &PermGroup) -> String {
        let mut h = Sha256::new();
        h.update(VERSION.as_bytes());
        h.update((g.degree() as u64).to_le_bytes());
        for p in g.generators() {
            h.update(b"|");
            for &x in p.images() {
                h.update(x.to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("chain-{key}.json"))
    }

    /// `g` with its chain attached from the cache when present, or computed
    /// and stored otherwise. The flag reports a hit.
    pub fn chain(&self, g: PermGroup) -> Result<(PermGroup, bool)> {
        let key = Self::key(&g);
        let path = self.path(&key);
        if let Ok(text) = fs::read_to_string(&path) {
            let entry: Entry = serde_json::from_str(&text)?;
            if entry.version != VERSION || entry.key != key {
                return Err(Error::invariant(format!("cache entry {} does not match its key", path.display())));
            }
            let chain = StabilizerChain::from_record(&entry.chain)?;
            return Ok((g.with_chain(chain)?, true));
        }
        let record = g.chain().to_record();
        fs::create_dir_all(&self.dir)?;
        let entry = Entry { version: VERSION.into(), key, chain: record };
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, serde_json::to_string(&entry)?)?;
        fs::rename(&tmp, &path)?;
        Ok((g, false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn hit_matches_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let (a, hit) = cache.chain(catalog::a5_squared()).unwrap();
        assert!(!hit);
        let (b, hit) = cache.chain(catalog::a5_squared()).unwrap();
        assert!(hit);
        assert_eq!(a.order(), b.order());
        assert_ne!(Cache::key(&catalog::alternating(5)), Cache::key(&catalog::psl2_5()));
    }

    #[test]
    fn corrupt_entry_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let g = catalog::alternating(5);
        cache.chain(g.clone()).unwrap();
        let path = cache.path(&Cache::key(&g));
        let text = fs::read_to_string(&path).unwrap().replace("\"60\"", "\"61\"");
        fs::write(&path, text).unwrap();
        assert!(cache.chain(g).is_err());
    }
}

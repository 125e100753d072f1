//! JSONL cache of α-functionals, keyed by a hash of the generators and `r`.
//!
//! The functionals do not depend on the cocycle, so one cache file serves
//! every cocycle on the same group. Records whose hash does not match are
//! dropped and the file is rewritten.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use margulis_core::{ConjClass, DeformationSpace, Word};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheRecord {
    pub hash: String,
    pub r: usize,
    pub word: Word,
    pub ell: f64,
    /// `c` with `α_u(γ) = ⟨c, (u(g₁), …, u(g_k))⟩`.
    pub coefficients: Vec<f64>,
}

pub fn group_hash(space: &DeformationSpace) -> String {
    let mut h = Sha256::new();
    for g in space.group().generators() {
        for e in g.entries() {
            h.update(e.to_le_bytes());
        }
    }
    h.update((space.rep().r() as u64).to_le_bytes());
    hex::encode(h.finalize())
}

pub struct Cache {
    path: Option<PathBuf>,
    hash: String,
    r: usize,
    records: HashMap<String, CacheRecord>,
    dirty: bool,
}

impl Cache {
    /// Opens the cache under `dir`, or an in-memory cache when `dir` is `None`.
    pub fn open(dir: Option<&Path>, space: &DeformationSpace) -> Result<Self, CliError> {
        let hash = group_hash(space);
        let r = space.rep().r();
        let mut cache = Cache {
            path: None,
            hash,
            r,
            records: HashMap::new(),
            dirty: false,
        };
        let Some(dir) = dir else { return Ok(cache) };
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let path = dir.join(format!("{}.jsonl", cache.hash));
        if let Ok(text) = fs::read_to_string(&path) {
            for line in text.lines().filter(|l| !l.trim().is_empty()) {
                match serde_json::from_str::<CacheRecord>(line) {
                    Ok(rec) if rec.hash == cache.hash && rec.r == r => {
                        cache.records.insert(rec.word.to_string(), rec);
                    }
                    // stale or unreadable: drop it and rewrite on save
                    _ => cache.dirty = true,
                }
            }
        }
        cache.path = Some(path);
        Ok(cache)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn get_or_compute(
        &mut self,
        space: &DeformationSpace,
        class: &ConjClass,
    ) -> Result<CacheRecord, CliError> {
        let key = class.to_string();
        if let Some(rec) = self.records.get(&key) {
            return Ok(rec.clone());
        }
        let rec = CacheRecord {
            hash: self.hash.clone(),
            r: self.r,
            word: class.rep().clone(),
            ell: space.length(class.rep())?,
            coefficients: space
                .alpha_functional(class.rep())?
                .stacked()
                .iter()
                .copied()
                .collect(),
        };
        self.records.insert(key, rec.clone());
        self.dirty = true;
        Ok(rec)
    }

    /// Rewrites the cache file atomically if anything changed.
    pub fn save(&self) -> Result<(), CliError> {
        let (Some(path), true) = (&self.path, self.dirty) else {
            return Ok(());
        };
        let mut keys: Vec<&CacheRecord> = self.records.values().collect();
        keys.sort_by(|a, b| {
            (a.word.len(), a.word.to_string()).cmp(&(b.word.len(), b.word.to_string()))
        });
        let mut text = String::new();
        for rec in keys {
            text.push_str(&serde_json::to_string(rec).expect("serializable"));
            text.push('\n');
        }
        write_atomic(path, text.as_bytes())
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

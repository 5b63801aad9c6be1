//! Joint spectrum cache: `cache/<hash>.json`, one header line followed by the
//! payload. The header carries the content hash of the truncation parameters
//! and a SHA-256 checksum of the exact payload bytes.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::net::{JointEigenspace, TwoDNet};

pub const CACHE_VERSION: u32 = 1;

/// What the cache key is computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumKey {
    pub version: u32,
    pub spacings: (f64, f64),
    pub modes: (usize, usize),
    pub per_mode_caps: (u8, u8),
    pub energy_caps: (Option<f64>, Option<f64>),
}

impl SpectrumKey {
    pub fn of(net: &TwoDNet) -> Self {
        let (a, b) = (&net.net1, &net.net2);
        SpectrumKey {
            version: CACHE_VERSION,
            spacings: (a.grid().spacing(), b.grid().spacing()),
            modes: (a.grid().count(), b.grid().count()),
            per_mode_caps: (a.per_mode_cap(), b.per_mode_cap()),
            energy_caps: (a.energy_cap(), b.energy_cap()),
        }
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(
            serde_json::to_vec(self).expect("key serializes"),
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Header {
    version: u32,
    hash: String,
    checksum: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachedSpectrum {
    pub key: SpectrumKey,
    pub dim: usize,
    pub spectrum: Vec<JointEigenspace>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    /// A file was present under the hash but described another model.
    Stale,
}

pub fn cache_path(dir: &Path, hash: &str) -> PathBuf {
    dir.join(format!("{hash}.json"))
}

/// Writes the joint spectrum of `net` and returns its hash.
pub fn cache_spectrum(net: &TwoDNet, dir: &Path) -> Result<String> {
    let key = SpectrumKey::of(net);
    let hash = key.hash();
    let payload = serde_json::to_string(&CachedSpectrum {
        key,
        dim: net.dim(),
        spectrum: net.joint_spectrum().to_vec(),
    })?;
    let header = Header {
        version: CACHE_VERSION,
        hash: hash.clone(),
        checksum: hex::encode(Sha256::digest(payload.as_bytes())),
    };
    std::fs::create_dir_all(dir)?;
    let path = cache_path(dir, &hash);
    let tmp = path.with_extension("json.tmp");
    std::fs::write(
        &tmp,
        format!("{}\n{payload}", serde_json::to_string(&header)?),
    )?;
    std::fs::rename(&tmp, &path)?;
    Ok(hash)
}

/// Reads `cache/<hash>.json`. Corruption and hash mismatches are errors.
pub fn load_spectrum(dir: &Path, hash: &str) -> Result<CachedSpectrum> {
    let path = cache_path(dir, hash);
    let bytes = std::fs::read(&path)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| Error::Cache(format!("{} is not UTF-8", path.display())))?;
    let (head, payload) = text
        .split_once('\n')
        .ok_or_else(|| Error::Cache(format!("{} has no header line", path.display())))?;
    let header: Header = serde_json::from_str(head)
        .map_err(|e| Error::Cache(format!("{}: bad header: {e}", path.display())))?;
    if header.version != CACHE_VERSION {
        return Err(Error::Cache(format!(
            "version {} (expected {CACHE_VERSION})",
            header.version
        )));
    }
    let checksum = hex::encode(Sha256::digest(payload.as_bytes()));
    if checksum != header.checksum {
        return Err(Error::Cache(format!(
            "checksum mismatch in {}",
            path.display()
        )));
    }
    let cached: CachedSpectrum = serde_json::from_str(payload)
        .map_err(|e| Error::Cache(format!("{}: bad payload: {e}", path.display())))?;
    let actual = cached.key.hash();
    if header.hash != hash || actual != hash {
        return Err(Error::StaleCache {
            expected: hash.to_string(),
            found: actual,
        });
    }
    Ok(cached)
}

/// Loads the cached spectrum of `net`, recomputing on a miss or a stale entry.
/// A checksum failure is surfaced, not repaired.
pub fn spectrum_with_cache(
    net: &TwoDNet,
    dir: &Path,
) -> Result<(Vec<JointEigenspace>, CacheStatus)> {
    let hash = SpectrumKey::of(net).hash();
    if !cache_path(dir, &hash).exists() {
        cache_spectrum(net, dir)?;
        return Ok((net.joint_spectrum().to_vec(), CacheStatus::Miss));
    }
    match load_spectrum(dir, &hash) {
        Ok(c) if c.spectrum == net.joint_spectrum() && c.dim == net.dim() => {
            Ok((c.spectrum, CacheStatus::Hit))
        }
        Ok(_) => {
            log::warn!("cached spectrum {hash} disagrees with the model; recomputing");
            cache_spectrum(net, dir)?;
            Ok((net.joint_spectrum().to_vec(), CacheStatus::Stale))
        }
        Err(e @ Error::StaleCache { .. }) => {
            log::warn!("{e}; recomputing");
            cache_spectrum(net, dir)?;
            Ok((net.joint_spectrum().to_vec(), CacheStatus::Stale))
        }
        Err(e) => Err(e),
    }
}

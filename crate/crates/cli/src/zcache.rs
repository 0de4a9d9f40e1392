//! On-disk cache for samples of the limiting variable.
//!
//! Sampling is the most expensive Monte-Carlo step (terms x samples
//! exponential draws), yet the sample depends only on `(terms, m, seed)`.
//! Sorted samples are stored as little-endian f64 under a key-derived file
//! name and reloaded on demand; a reload is bit-identical to a resample.

use anyhow::{Context, Result};
use chandet::EmpiricalDistribution;
use std::path::{Path, PathBuf};

const MAGIC: &[u8; 8] = b"ZETAF64\x01";

pub fn cache_path(dir: &Path, terms: u32, m: u64, seed: u64) -> PathBuf {
    dir.join(format!("zeta_k{terms}_m{m}_s{seed}.bin"))
}

/// Load the sample for `(terms, m, seed)` from `dir`, or compute it in
/// parallel and persist it.
pub fn load_or_sample(dir: &Path, terms: u32, m: u64, seed: u64) -> Result<EmpiricalDistribution> {
    let path = cache_path(dir, terms, m, seed);
    if path.is_file() {
        if let Some(dist) = try_read(&path, m)? {
            return Ok(dist);
        }
    }
    let dist = crate::par::zeta_samples(terms, m, seed);
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    write_samples(&path, dist.samples())?;
    Ok(dist)
}

fn try_read(path: &Path, expect_m: u64) -> Result<Option<EmpiricalDistribution>> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    if bytes.len() < 16 || &bytes[..8] != MAGIC {
        return Ok(None); // stale or foreign file: recompute
    }
    let count = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
    if count != expect_m || bytes.len() != 16 + 8 * count as usize {
        return Ok(None);
    }
    let samples: Vec<f64> = bytes[16..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(Some(EmpiricalDistribution::from_samples(samples)))
}

fn write_samples(path: &Path, samples: &[f64]) -> Result<()> {
    let mut bytes = Vec::with_capacity(16 + 8 * samples.len());
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&(samples.len() as u64).to_le_bytes());
    for s in samples {
        bytes.extend_from_slice(&s.to_le_bytes());
    }
    std::fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

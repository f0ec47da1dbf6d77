//! Moment tables on disk as `{alpha, t, bits, K, values}` JSON documents.

use std::fs;
use std::path::{Path, PathBuf};

use hankel_core::moments::{compute_moment_table, MomentTable, WeightParams};
use hankel_core::PrecisionContext;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentDocument {
    pub alpha: f64,
    pub t: f64,
    pub bits: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub values: Vec<String>,
}

impl MomentDocument {
    pub fn from_table(table: &MomentTable) -> Self {
        MomentDocument {
            alpha: table.params().alpha(),
            t: table.params().t(),
            bits: table.bits(),
            k: table.max_index(),
            values: table.decimal_values(),
        }
    }

    pub fn to_table(&self) -> Result<MomentTable, CliError> {
        let p = WeightParams::new(self.alpha, self.t).map_err(|e| CliError::Config(e.to_string()))?;
        if self.values.len() != self.k + 1 {
            return Err(CliError::Numeric(format!(
                "moment document declares K={} but holds {} values",
                self.k,
                self.values.len()
            )));
        }
        MomentTable::from_decimal(p, self.bits, &self.values).map_err(|e| CliError::Numeric(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

pub fn cache_file_name(alpha: f64, t: f64, bits: usize, k: usize) -> String {
    format!("mom_a{alpha}_t{t}_b{bits}_K{k}.json")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Disabled,
    Hit,
    Stored,
}

/// The table for `(p, bits, K)`, read from `dir` when an exact match exists
/// and written there otherwise.
pub fn load_or_compute(
    p: &WeightParams,
    bits: usize,
    k: usize,
    dir: Option<&Path>,
) -> Result<(MomentTable, CacheStatus), CliError> {
    let compute = || {
        let ctx = PrecisionContext::with_bits(bits).map_err(|e| CliError::Config(e.to_string()))?;
        compute_moment_table(p, k, &ctx).map_err(|e| CliError::Numeric(e.to_string()))
    };
    let Some(dir) = dir else {
        return Ok((compute()?, CacheStatus::Disabled));
    };
    let path = dir.join(cache_file_name(p.alpha(), p.t(), bits, k));
    if let Some(table) = read_cached(&path, p, bits, k) {
        return Ok((table, CacheStatus::Hit));
    }
    let table = compute()?;
    fs::create_dir_all(dir)?;
    write_atomic(&path, MomentDocument::from_table(&table).to_json()?.as_bytes())?;
    Ok((table, CacheStatus::Stored))
}

fn read_cached(path: &Path, p: &WeightParams, bits: usize, k: usize) -> Option<MomentTable> {
    let text = fs::read_to_string(path).ok()?;
    let doc: MomentDocument = match serde_json::from_str(&text) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("ignoring unreadable cache file {}: {e}", path.display());
            return None;
        }
    };
    if doc.alpha != p.alpha() || doc.t != p.t() || doc.bits != bits || doc.k != k {
        return None;
    }
    match doc.to_table() {
        Ok(t) => Some(t),
        Err(e) => {
            eprintln!("ignoring invalid cache file {}: {e}", path.display());
            None
        }
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = PathBuf::from(path);
    tmp.set_extension(format!("tmp{}", std::process::id()));
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_names() {
        assert_eq!(cache_file_name(0.0, 1.0, 256, 40), "mom_a0_t1_b256_K40.json");
        assert_eq!(cache_file_name(-0.5, 0.1, 128, 6), "mom_a-0.5_t0.1_b128_K6.json");
    }

    #[test]
    fn document_roundtrip() {
        let p = WeightParams::new(0.5, 1.0).unwrap();
        let ctx = PrecisionContext::with_bits(192).unwrap();
        let table = compute_moment_table(&p, 12, &ctx).unwrap();
        let doc = MomentDocument::from_table(&table);
        let back: MomentDocument = serde_json::from_str(&doc.to_json().unwrap()).unwrap();
        assert_eq!(back, doc);
        let t2 = back.to_table().unwrap();
        assert_eq!(MomentDocument::from_table(&t2), doc);
    }

    #[test]
    fn cache_hit_returns_same_table() {
        let dir = tempfile::tempdir().unwrap();
        let p = WeightParams::new(0.0, 1.0).unwrap();
        let (a, s1) = load_or_compute(&p, 128, 8, Some(dir.path())).unwrap();
        let (b, s2) = load_or_compute(&p, 128, 8, Some(dir.path())).unwrap();
        assert_eq!((s1, s2), (CacheStatus::Stored, CacheStatus::Hit));
        assert_eq!(a.decimal_values(), b.decimal_values());
    }

    #[test]
    fn corrupt_cache_is_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let p = WeightParams::new(0.0, 0.0).unwrap();
        fs::write(dir.path().join(cache_file_name(0.0, 0.0, 128, 4)), "{not json").unwrap();
        let (t, s) = load_or_compute(&p, 128, 4, Some(dir.path())).unwrap();
        assert_eq!(s, CacheStatus::Stored);
        assert_eq!(t.values()[4].to_f64(), 24.0);
    }
}

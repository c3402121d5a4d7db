//! Content-addressed artifact cache with SHA-256 sidecars.
//!
//! Each artifact `<kind>-<key>.bin` has a `<kind>-<key>.bin.sha256` sidecar
//! holding the hex digest of its bytes. Both are written through a temporary
//! file and renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use gz_core::goldbach::ClassConvolution;
use gz_core::lfunc::{ZeroCatalog, ZeroFinder, ZeroSet};
use gz_core::characters::build_group;
use gz_core::numtheory::{build_sieve, SieveTable};

use crate::error::{CliError, CliResult};

pub const CACHE_FORMAT_VERSION: u32 = 1;

/// Outcome of a cache lookup, reported in summaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    /// Present but failed its checksum; recomputed.
    Corrupt,
    Disabled,
}

impl CacheStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Hit => "hit",
            Self::Miss => "miss",
            Self::Corrupt => "corrupt",
            Self::Disabled => "disabled",
        }
    }
}

pub fn cache_key(version: u32, kind: &str, params: &[(&str, String)]) -> String {
    let mut h = Sha256::new();
    h.update(format!("gz-cache/v{version}\n{kind}\n"));
    for (k, v) in params {
        h.update(format!("{k}={v}\n"));
    }
    hex::encode(&h.finalize()[..16])
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: Some(dir.into()) }
    }

    pub fn disabled() -> Self {
        Self { dir: None }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn path_for(&self, kind: &str, params: &[(&str, String)]) -> Option<PathBuf> {
        let key = cache_key(CACHE_FORMAT_VERSION, kind, params);
        self.dir.as_ref().map(|d| d.join(format!("{kind}-{key}.bin")))
    }

    fn sidecar(path: &Path) -> PathBuf {
        let mut s = path.as_os_str().to_owned();
        s.push(".sha256");
        PathBuf::from(s)
    }

    /// Bytes stored under the key, if present and intact.
    pub fn load(&self, kind: &str, params: &[(&str, String)]) -> (Option<Vec<u8>>, CacheStatus) {
        let Some(path) = self.path_for(kind, params) else {
            return (None, CacheStatus::Disabled);
        };
        let Ok(bytes) = std::fs::read(&path) else {
            return (None, CacheStatus::Miss);
        };
        let expected = std::fs::read_to_string(Self::sidecar(&path)).unwrap_or_default();
        if expected.trim() != digest(&bytes) {
            eprintln!("cache: checksum mismatch for {}, recomputing", path.display());
            let _ = std::fs::remove_file(&path);
            let _ = std::fs::remove_file(Self::sidecar(&path));
            return (None, CacheStatus::Corrupt);
        }
        (Some(bytes), CacheStatus::Hit)
    }

    pub fn store(&self, kind: &str, params: &[(&str, String)], bytes: &[u8]) -> CliResult<()> {
        let Some(path) = self.path_for(kind, params) else {
            return Ok(());
        };
        let dir = path.parent().expect("cache path has a parent");
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        atomic_write(&path, bytes)?;
        atomic_write(&Self::sidecar(&path), format!("{}\n", digest(bytes)).as_bytes())
    }

    /// Loads or computes, storing fresh results.
    fn cached<T>(
        &self,
        kind: &str,
        params: &[(&str, String)],
        decode: impl FnOnce(&[u8]) -> Option<T>,
        compute: impl FnOnce() -> CliResult<T>,
        encode: impl FnOnce(&T) -> CliResult<Vec<u8>>,
    ) -> CliResult<(T, CacheStatus)> {
        let (bytes, mut status) = self.load(kind, params);
        if let Some(value) = bytes.as_deref().and_then(decode) {
            return Ok((value, status));
        }
        if status == CacheStatus::Hit {
            status = CacheStatus::Corrupt;
        }
        let value = compute()?;
        if self.dir.is_some() {
            self.store(kind, params, &encode(&value)?)?;
        }
        Ok((value, status))
    }

    pub fn sieve(&self, limit: u64) -> CliResult<(SieveTable, CacheStatus)> {
        self.cached(
            "sieve",
            &[("limit", limit.to_string())],
            |b| SieveTable::from_bytes(b).ok().filter(|s| s.limit() == limit),
            || Ok(build_sieve(limit)?),
            |s| Ok(s.to_bytes()),
        )
    }

    pub fn zeros(&self, q: u64, height: f64) -> CliResult<(ZeroCatalog, CacheStatus)> {
        let f = ZeroFinder::default();
        let params = [
            ("q", q.to_string()),
            ("height", height.to_string()),
            ("step_fraction", f.step_fraction.to_string()),
            ("max_refinements", f.max_refinements.to_string()),
            ("window", f.window.to_string()),
            ("contour_margin", f.contour_margin.to_string()),
        ];
        let group = build_group(q)?;
        let (sets, status) = self.cached(
            "zeros",
            &params,
            |b| serde_json::from_slice::<Vec<ZeroSet>>(b).ok(),
            || Ok(ZeroCatalog::compute(q, height)?.sets().to_vec()),
            |sets| Ok(serde_json::to_vec(sets)?),
        )?;
        Ok((ZeroCatalog::from_sets(group, sets)?, status))
    }

    pub fn convolution(
        &self,
        q: u64,
        a: u64,
        b: u64,
        x: u64,
        sieve: impl FnOnce() -> CliResult<SieveTable>,
    ) -> CliResult<(ClassConvolution, CacheStatus)> {
        let params = [
            ("q", q.to_string()),
            ("a", (a % q).to_string()),
            ("b", (b % q).to_string()),
            ("x", x.to_string()),
        ];
        self.cached(
            "conv",
            &params,
            |bytes| {
                if bytes.len() != 8 * (x as usize + 1) {
                    return None;
                }
                let values = bytes
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                    .collect();
                ClassConvolution::from_values(q, a, b, values).ok()
            },
            || {
                let s = sieve()?;
                Ok(gz_core::goldbach::build_class_convolution(q, a as i64, b as i64, x, &s)?)
            },
            |c| Ok(c.values.iter().flat_map(|v| v.to_le_bytes()).collect()),
        )
    }
}

pub fn atomic_write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_depend_on_everything() {
        let p = [("limit", "100".to_string())];
        let k = cache_key(1, "sieve", &p);
        assert_eq!(k, cache_key(1, "sieve", &p));
        assert_ne!(k, cache_key(2, "sieve", &p));
        assert_ne!(k, cache_key(1, "zeros", &p));
        assert_ne!(k, cache_key(1, "sieve", &[("limit", "101".to_string())]));
        assert_eq!(k.len(), 32);
    }

    #[test]
    fn store_load_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let p = [("limit", "1000".to_string())];
        let (s1, st) = cache.sieve(1000).unwrap();
        assert_eq!(st, CacheStatus::Miss);
        let (s2, st) = cache.sieve(1000).unwrap();
        assert_eq!(st, CacheStatus::Hit);
        assert_eq!(s1.lambda(), s2.lambda());
        let path = cache.path_for("sieve", &p).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
        let (s3, st) = cache.sieve(1000).unwrap();
        assert_eq!(st, CacheStatus::Corrupt);
        assert_eq!(s3.lambda(), s1.lambda());
        assert_eq!(cache.sieve(1000).unwrap().1, CacheStatus::Hit);
        std::fs::remove_file(Cache::sidecar(&path)).unwrap();
        assert_eq!(cache.load("sieve", &p).1, CacheStatus::Corrupt);
        let leftovers: Vec<_> = std::fs::read_dir(dir.path())
            .unwrap()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_name().to_string_lossy().starts_with(".tmp"))
            .collect();
        assert!(leftovers.is_empty());
    }

    #[test]
    fn convolution_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let build = || Ok(build_sieve(2000).unwrap());
        let (c1, st) = cache.convolution(3, 1, 2, 2000, build).unwrap();
        assert_eq!(st, CacheStatus::Miss);
        let (c2, st) = cache.convolution(3, 4, 5, 2000, || panic!("should hit")).unwrap();
        assert_eq!(st, CacheStatus::Hit);
        assert_eq!(c1.values, c2.values);
        assert_eq!(c1.cumulative, c2.cumulative);
        let (_, st) = Cache::disabled().convolution(3, 1, 2, 100, build).unwrap();
        assert_eq!(st, CacheStatus::Disabled);
    }
}

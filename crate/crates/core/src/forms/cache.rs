//! Memoization for form construction: a process-wide in-memory cache plus an
//! optional on-disk cache.
//!
//! Both caches are keyed by `(FormId, box)`. The memory cache is safe for
//! concurrent readers and idempotent under racing writers (duplicate
//! computation is acceptable; values for equal keys are identical). Disk
//! cache files are the standard series JSON wrapped with a header carrying
//! the job hash; writes go to a temporary file and are renamed into place so
//! concurrent processes never observe partial files.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Arc, OnceLock, RwLock};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::series::json::{from_json, to_json, SeriesJson};
use crate::series::{BiSeries, BoxSpec, SeriesError};

use super::FormId;

fn job_value(form: &FormId, spec: BoxSpec) -> Value {
    json!({
        "form": form.to_value(),
        "box": { "tmax": spec.tmax, "qlo": spec.qlo, "qhi": spec.qhi },
    })
}

/// Content hash of an arbitrary job description document.
pub fn hash_value(job: &Value) -> String {
    let canonical = serde_json::to_string(job).expect("job serialization");
    let digest = Sha256::digest(canonical.as_bytes());
    hex::encode(digest)
}

/// Content hash of a form-construction job (hex, truncated for file names).
pub fn job_hash(form: &FormId, spec: BoxSpec) -> String {
    hash_value(&job_value(form, spec))
}

fn memo() -> &'static RwLock<HashMap<String, Arc<BiSeries>>> {
    static MEMO: OnceLock<RwLock<HashMap<String, Arc<BiSeries>>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Build a form through the process-wide memo cache.
pub fn build_cached(form: &FormId, spec: BoxSpec) -> Result<Arc<BiSeries>, SeriesError> {
    let key = job_hash(form, spec);
    if let Some(hit) = memo().read().expect("memo lock").get(&key) {
        return Ok(Arc::clone(hit));
    }
    let value = Arc::new(form.build(spec)?);
    let mut guard = memo().write().expect("memo lock");
    let entry = guard.entry(key).or_insert_with(|| Arc::clone(&value));
    Ok(Arc::clone(entry))
}

/// On-disk cache rooted at a directory.
pub struct DiskCache {
    dir: PathBuf,
}

impl DiskCache {
    pub fn new(dir: impl Into<PathBuf>) -> DiskCache {
        DiskCache { dir: dir.into() }
    }

    pub fn path_for(&self, form: &FormId, spec: BoxSpec) -> PathBuf {
        let hash = job_hash(form, spec);
        self.dir
            .join(format!("{}-{}.json", form.kind_slug(), &hash[..16]))
    }

    /// Fetch from disk or build and persist. The returned bytes of a cache
    /// hit are identical to a cold recomputation because both sides
    /// serialize the same deterministic document.
    pub fn get_or_build(&self, form: &FormId, spec: BoxSpec) -> Result<BiSeries, SeriesError> {
        self.get_or_build_job(&form.kind_slug(), &job_value(form, spec), || {
            form.build(spec)
        })
    }

    /// Generic entry point keyed by an arbitrary job document.
    pub fn get_or_build_job(
        &self,
        slug: &str,
        job: &Value,
        build: impl FnOnce() -> Result<BiSeries, SeriesError>,
    ) -> Result<BiSeries, SeriesError> {
        let hash = hash_value(job);
        let path = self.dir.join(format!("{slug}-{}.json", &hash[..16]));
        if let Some(series) = self.load(&path, &hash)? {
            return Ok(series);
        }
        let series = build()?;
        self.store(&path, &hash, job, &series)?;
        Ok(series)
    }

    fn load(&self, path: &Path, hash: &str) -> Result<Option<BiSeries>, SeriesError> {
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(_) => return Ok(None),
        };
        let doc: Value = serde_json::from_str(&text)
            .map_err(|e| SeriesError::InvalidData(format!("cache file {path:?}: {e}")))?;
        if doc.get("job_hash").and_then(Value::as_str) != Some(hash) {
            return Ok(None); // stale or foreign file; recompute
        }
        let series: SeriesJson = serde_json::from_value(
            doc.get("series")
                .cloned()
                .ok_or_else(|| SeriesError::InvalidData("cache file without series".into()))?,
        )
        .map_err(|e| SeriesError::InvalidData(e.to_string()))?;
        Ok(Some(from_json(&series)?))
    }

    fn store(
        &self,
        path: &Path,
        hash: &str,
        job: &Value,
        series: &BiSeries,
    ) -> Result<(), SeriesError> {
        fs::create_dir_all(&self.dir)
            .map_err(|e| SeriesError::InvalidData(format!("cache dir: {e}")))?;
        let doc = json!({
            "job_hash": hash,
            "job": job,
            "series": to_json(series),
        });
        let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
        let mut file = fs::File::create(&tmp)
            .map_err(|e| SeriesError::InvalidData(format!("cache write: {e}")))?;
        file.write_all(
            serde_json::to_string_pretty(&doc)
                .expect("cache doc")
                .as_bytes(),
        )
        .map_err(|e| SeriesError::InvalidData(format!("cache write: {e}")))?;
        drop(file);
        fs::rename(&tmp, path)
            .map_err(|e| SeriesError::InvalidData(format!("cache rename: {e}")))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::compare;

    #[test]
    fn memo_is_idempotent_under_racing_writers() {
        let spec = BoxSpec::with_default_window(6);
        let form = FormId::PhiMinus21;
        let handles: Vec<_> = (0..4)
            .map(|_| {
                let f = form.clone();
                std::thread::spawn(move || build_cached(&f, spec).unwrap())
            })
            .collect();
        let results: Vec<_> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for r in &results[1..] {
            assert!(compare(r, &results[0]).unwrap().equal);
        }
    }

    #[test]
    fn disk_cache_hit_is_byte_identical_to_cold_build() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DiskCache::new(dir.path());
        let spec = BoxSpec::with_default_window(5);
        let form = FormId::Delta;
        let cold = cache.get_or_build(&form, spec).unwrap();
        let path = cache.path_for(&form, spec);
        assert!(path.exists());
        let bytes_after_build = fs::read(&path).unwrap();
        let warm = cache.get_or_build(&form, spec).unwrap();
        assert!(compare(&cold, &warm).unwrap().equal);
        assert_eq!(bytes_after_build, fs::read(&path).unwrap());
        // Serialized forms agree byte for byte with a fresh computation.
        assert_eq!(
            crate::series::json::to_string(&warm),
            crate::series::json::to_string(&form.build(spec).unwrap()),
        );
    }

    #[test]
    fn stale_or_foreign_files_are_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DiskCache::new(dir.path());
        let spec = BoxSpec::with_default_window(3);
        let form = FormId::ThetaD4;
        let path = cache.path_for(&form, spec);
        fs::create_dir_all(dir.path()).unwrap();
        fs::write(&path, "{\"job_hash\": \"bogus\", \"series\": null}").unwrap();
        let s = cache.get_or_build(&form, spec).unwrap();
        assert_eq!(s.coeff(0, 1).unwrap(), crate::rational::rat(24));
    }
}

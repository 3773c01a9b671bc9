//! Persistent store of verified points per `N`.
//!
//! The file is one JSON document:
//! `{"schema_version": 1, "entries": {"3": [{"point", "triangle", "source"}]}}`.
//! Nothing read from disk is trusted: every entry is re-verified on load and
//! dropped with a warning if any check fails.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use excircle::arith::{fmt_rational, parse_rational, BigRational};
use excircle::curve::{Curve, Point};
use excircle::triangle::{region_ok, synthesize, verify, Triangle};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Search,
    Family,
    Sequence,
    Manual,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub point: Point,
    pub triangle: Triangle,
    pub source: Source,
}

#[derive(Serialize)]
struct CacheFile<'a> {
    schema_version: u64,
    entries: &'a BTreeMap<String, Vec<Entry>>,
}

#[derive(Debug, Default)]
pub struct Cache {
    path: Option<PathBuf>,
    entries: BTreeMap<String, Vec<Entry>>,
    dirty: bool,
}

/// Why an entry was refused.
pub fn check_entry(n: &BigRational, e: &Entry) -> Result<(), String> {
    let c = Curve::new(n.clone()).map_err(|err| err.to_string())?;
    if !c.contains(&e.point) {
        return Err(format!("point {} is not on E_{n}", e.point));
    }
    if !region_ok(&c, &e.point) {
        return Err(format!("point {} is outside the admissible region", e.point));
    }
    let ratio = verify(&e.triangle).map_err(|err| err.to_string())?.excircle_h;
    if ratio != *n {
        return Err(format!("triangle {} has ratio {ratio}, not {n}", e.triangle));
    }
    let (t, _) = synthesize(&c, &e.point).map_err(|err| err.to_string())?;
    if t.mirror_key() != e.triangle.mirror_key() {
        return Err(format!("point {} gives {t}, not {}", e.point, e.triangle));
    }
    Ok(())
}

fn warn(msg: &str) {
    eprintln!("warning: {msg}");
}

impl Cache {
    /// A cache that never touches disk.
    pub fn in_memory() -> Self {
        Cache::default()
    }

    /// Reads `path` if it exists. Unreadable or malformed content is
    /// reported and ignored.
    pub fn load(path: &Path) -> Self {
        let mut cache = Cache {
            path: Some(path.to_path_buf()),
            ..Cache::default()
        };
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return cache,
            Err(e) => {
                warn(&format!("cannot read cache {}: {e}", path.display()));
                return cache;
            }
        };
        let doc: Value = match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(e) => {
                warn(&format!("ignoring malformed cache {}: {e}", path.display()));
                return cache;
            }
        };
        match doc.get("schema_version").and_then(Value::as_u64) {
            Some(SCHEMA_VERSION) => {}
            other => {
                warn(&format!("ignoring cache with schema_version {other:?}, expected {SCHEMA_VERSION}"));
                return cache;
            }
        }
        let Some(entries) = doc.get("entries").and_then(Value::as_object) else {
            warn("ignoring cache without an entries map");
            return cache;
        };
        for (key, list) in entries {
            let n = match parse_rational(key) {
                Ok(n) => n,
                Err(e) => {
                    warn(&format!("dropping cache entries under {key:?}: {e}"));
                    continue;
                }
            };
            let Some(list) = list.as_array() else {
                warn(&format!("dropping cache entries under {key:?}: not a list"));
                continue;
            };
            for raw in list {
                let entry = match serde_json::from_value::<Entry>(raw.clone()) {
                    Ok(e) => e,
                    Err(e) => {
                        warn(&format!("dropping unreadable cache entry for N={key}: {e}"));
                        continue;
                    }
                };
                match check_entry(&n, &entry) {
                    Ok(()) => {
                        cache.push(&n, entry);
                    }
                    Err(why) => warn(&format!("dropping cache entry for N={key}: {why}")),
                }
            }
        }
        cache.dirty = false;
        cache
    }

    pub fn get(&self, n: &BigRational) -> &[Entry] {
        self.entries.get(&fmt_rational(n)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Adds a verified entry unless the same triangle (up to the `f <-> g`
    /// mirror) is already stored. Returns whether it was added.
    pub fn insert(&mut self, n: &BigRational, entry: Entry) -> Result<bool, String> {
        check_entry(n, &entry)?;
        Ok(self.push(n, entry))
    }

    fn push(&mut self, n: &BigRational, entry: Entry) -> bool {
        let list = self.entries.entry(fmt_rational(n)).or_default();
        let key = entry.triangle.mirror_key();
        if list.iter().any(|e| e.triangle.mirror_key() == key) {
            return false;
        }
        list.push(entry);
        self.dirty = true;
        true
    }

    /// Writes through a temporary file in the same directory and renames it
    /// into place. No-op when nothing changed or the cache is in memory.
    pub fn save(&mut self) -> std::io::Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        if !self.dirty {
            return Ok(());
        }
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let body = serde_json::to_string_pretty(&CacheFile {
            schema_version: SCHEMA_VERSION,
            entries: &self.entries,
        })
        .expect("cache serialises");
        let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
        tmp_name.push(format!(".tmp.{}", std::process::id()));
        let tmp = path.with_file_name(tmp_name);
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(body.as_bytes())?;
            f.write_all(b"\n")?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        self.dirty = false;
        Ok(())
    }
}

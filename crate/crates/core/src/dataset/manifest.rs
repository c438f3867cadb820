//! JSON-lines pair manifest. Paths are relative to the manifest's directory
//! and name cube files by stem (see `io::cube_file`).

use std::fs;
use std::path::{Component, Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_atomic;

pub const MANIFEST_FILE: &str = "manifest.jsonl";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRecord {
    pub mosaic: String,
    pub cube: String,
    pub source: String,
    pub origin: [usize; 2],
    pub aug: String,
    pub hard: Option<bool>,
    pub count: Option<usize>,
}

impl PairRecord {
    pub fn mosaic_path(&self, base: &Path) -> PathBuf {
        base.join(&self.mosaic)
    }

    pub fn cube_path(&self, base: &Path) -> PathBuf {
        base.join(&self.cube)
    }
}

pub fn read_manifest(path: &Path) -> Result<Vec<PairRecord>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line)
                .map_err(|e| Error::format(path, format!("line {}: {e}", i + 1)))
        })
        .collect()
}

pub fn write_manifest(path: &Path, records: &[PairRecord]) -> Result<()> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("record serializes"));
        out.push('\n');
    }
    write_atomic(path, out.as_bytes())
}

/// Splits records into those whose index is listed and the rest, keeping order.
pub fn partition(records: &[PairRecord], indices: &[usize]) -> (Vec<PairRecord>, Vec<PairRecord>) {
    let mut picked = vec![false; records.len()];
    for &i in indices {
        if i < records.len() {
            picked[i] = true;
        }
    }
    let (a, b): (Vec<_>, Vec<_>) = records.iter().cloned().zip(picked).partition(|(_, p)| *p);
    (a.into_iter().map(|(r, _)| r).collect(), b.into_iter().map(|(r, _)| r).collect())
}

fn normalize(path: &Path) -> Vec<Component<'_>> {
    let mut out: Vec<Component> = Vec::new();
    for c in path.components() {
        match c {
            Component::CurDir => {}
            Component::ParentDir if matches!(out.last(), Some(Component::Normal(_))) => {
                out.pop();
            }
            other => out.push(other),
        }
    }
    out
}

/// Lexical path from `base` to `target`; both should be absolute.
pub fn relative_path(target: &Path, base: &Path) -> PathBuf {
    let t = normalize(target);
    let b = normalize(base);
    let common = t.iter().zip(&b).take_while(|(x, y)| x == y).count();
    let mut rel = PathBuf::new();
    for _ in common..b.len() {
        rel.push("..");
    }
    for c in &t[common..] {
        rel.push(c.as_os_str());
    }
    rel
}

/// Manifest paths always use '/' separators.
pub(crate) fn path_string(p: &Path) -> String {
    p.components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join("/")
}

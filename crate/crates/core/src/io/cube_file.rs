//! Cube container: a JSON sidecar (`<stem>.json`) describing a raw payload
//! (`<stem>.bsq`) of little-endian f32 samples, band-sequential, row-major
//! within each band.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::write_atomic;
use crate::cube::{validate_cube, SpectralCube};
use crate::error::{Error, Result};
use crate::pattern::SfaPattern;

pub const DTYPE: &str = "f32le";
pub const INTERLEAVE: &str = "bsq";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubeSidecar {
    pub height: usize,
    pub width: usize,
    pub bands: usize,
    pub dtype: String,
    pub interleave: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<SfaPattern>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wavelengths_nm: Option<Vec<f64>>,
}

/// Optional metadata carried alongside the samples.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CubeMeta {
    pub pattern: Option<SfaPattern>,
    pub wavelengths_nm: Option<Vec<f64>>,
}

impl CubeMeta {
    pub fn with_pattern(pattern: &SfaPattern) -> Self {
        Self {
            pattern: Some(pattern.clone()),
            wavelengths_nm: None,
        }
    }
}

impl CubeSidecar {
    fn check(&self, path: &Path) -> Result<()> {
        let bad = |msg: String| Err(Error::format(path, msg));
        if self.height == 0 || self.width == 0 || self.bands == 0 {
            return bad(format!(
                "dimensions must be positive, got {}x{}x{}",
                self.height, self.width, self.bands
            ));
        }
        if self.dtype != DTYPE {
            return bad(format!("unsupported dtype '{}', expected '{DTYPE}'", self.dtype));
        }
        if self.interleave != INTERLEAVE {
            return bad(format!(
                "unsupported interleave '{}', expected '{INTERLEAVE}'",
                self.interleave
            ));
        }
        if let Some(wl) = &self.wavelengths_nm {
            if wl.len() != self.bands {
                return bad(format!(
                    "{} wavelengths for {} bands",
                    wl.len(),
                    self.bands
                ));
            }
        }
        Ok(())
    }

    fn payload_bytes(&self) -> u64 {
        (self.height * self.width * self.bands) as u64 * 4
    }
}

/// Strips a trailing `.json` / `.bsq` so either file of a pair names the cube.
pub fn cube_stem(path: &Path) -> PathBuf {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") | Some("bsq") => path.with_extension(""),
        _ => path.to_path_buf(),
    }
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    with_suffix(&cube_stem(path), ".json")
}

pub fn payload_path(path: &Path) -> PathBuf {
    with_suffix(&cube_stem(path), ".bsq")
}

pub fn write_cube_with_meta(cube: &SpectralCube, path: &Path, meta: &CubeMeta) -> Result<()> {
    let (height, width, bands) = cube.dims();
    let sidecar = CubeSidecar {
        height,
        width,
        bands,
        dtype: DTYPE.into(),
        interleave: INTERLEAVE.into(),
        pattern: meta.pattern.clone(),
        wavelengths_nm: meta.wavelengths_nm.clone(),
    };
    sidecar.check(path)?;
    let mut payload = Vec::with_capacity(cube.as_slice().len() * 4);
    for x in cube.as_slice() {
        payload.extend_from_slice(&x.to_le_bytes());
    }
    let mut json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    json.push('\n');
    write_atomic(&payload_path(path), &payload)?;
    write_atomic(&sidecar_path(path), json.as_bytes())
}

pub fn write_cube(cube: &SpectralCube, path: &Path) -> Result<()> {
    write_cube_with_meta(cube, path, &CubeMeta::default())
}

pub fn read_cube_with_meta(path: &Path) -> Result<(SpectralCube, CubeMeta)> {
    let sc_path = sidecar_path(path);
    let text = fs::read_to_string(&sc_path).map_err(|e| Error::io(&sc_path, e))?;
    let sidecar: CubeSidecar =
        serde_json::from_str(&text).map_err(|e| Error::format(&sc_path, e.to_string()))?;
    sidecar.check(&sc_path)?;

    let pl_path = payload_path(path);
    let bytes = fs::read(&pl_path).map_err(|e| Error::io(&pl_path, e))?;
    let expected = sidecar.payload_bytes();
    if bytes.len() as u64 != expected {
        return Err(Error::PayloadLength {
            path: pl_path,
            expected,
            actual: bytes.len() as u64,
        });
    }
    let data = bytes
        .chunks_exact(4)
        .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .collect();
    let cube = SpectralCube::new(sidecar.height, sidecar.width, sidecar.bands, data)?;
    let report = validate_cube(&cube);
    if !report.is_ok() {
        let first = report
            .violations
            .first()
            .map(|v| v.to_string())
            .unwrap_or_default();
        return Err(Error::Validation(format!(
            "{}: {} non-finite samples, first {first}",
            pl_path.display(),
            report.non_finite
        )));
    }
    Ok((
        cube,
        CubeMeta {
            pattern: sidecar.pattern,
            wavelengths_nm: sidecar.wavelengths_nm,
        },
    ))
}

pub fn read_cube(path: &Path) -> Result<SpectralCube> {
    read_cube_with_meta(path).map(|(c, _)| c)
}

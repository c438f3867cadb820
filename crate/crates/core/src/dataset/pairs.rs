use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::manifest::{path_string, read_manifest, relative_path, write_manifest, PairRecord};
use super::{augment_cube, patch_origins_2d};
use crate::cube::{MosaicImage, PatchOrigin, SpectralCube};
use crate::demosaic::wb_bilinear;
use crate::error::{Error, Result};
use crate::freqsel::{judge_pair, CountSummary, FreqParams, PatchVerdict, SelectionParams};
use crate::geometry::{crop_aligned, D4};
use crate::io::{cube_stem, read_cube, read_cube_with_meta, write_cube_with_meta, CubeMeta};
use crate::metrics::{evaluate_pair, ImageMetrics, MetricReport};
use crate::pattern::SfaPattern;
use crate::sfa::remosaic;

pub const CUBE_DIR: &str = "cubes";
pub const MOSAIC_DIR: &str = "mosaics";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PairConfig {
    /// Patch height and width; `None` keeps each (augmented) cube whole.
    pub patch: Option<(usize, usize)>,
    /// Defaults to the patch size (non-overlapping tiles).
    pub stride: Option<usize>,
    pub augment: bool,
}

#[derive(Debug, Clone)]
pub struct PairOutput {
    pub manifest_path: PathBuf,
    pub records: Vec<PairRecord>,
    pub warnings: Vec<String>,
}

fn source_id(path: &Path) -> String {
    cube_stem(path)
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "cube".into())
}

/// Picks the first error in input order so failures are reported deterministically.
fn first_error<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

fn pair_one_cube(
    path: &Path,
    source: &str,
    pattern: &SfaPattern,
    config: &PairConfig,
    out_dir: &Path,
) -> Result<(Vec<PairRecord>, Option<String>)> {
    let (cube, meta) = read_cube_with_meta(path)?;
    if cube.bands() != pattern.bands() {
        return Err(Error::Shape(format!(
            "{} has {} bands, pattern needs {}",
            path.display(),
            cube.bands(),
            pattern.bands()
        )));
    }
    let (variants, warning) = if config.augment {
        let a = augment_cube(&cube);
        (a.variants, a.warning)
    } else {
        (vec![(D4::Identity, cube)], None)
    };
    let n = pattern.period();
    let patch_meta = CubeMeta {
        pattern: Some(pattern.clone()),
        wavelengths_nm: meta.wavelengths_nm,
    };
    let mosaic_meta = CubeMeta::with_pattern(pattern);

    let per_variant = variants
        .par_iter()
        .map(|(op, c)| -> Result<Vec<PairRecord>> {
            let origins = match config.patch {
                Some((ph, pw)) => {
                    let (sr, sc) = config.stride.map_or((ph, pw), |s| (s, s));
                    patch_origins_2d(c.height(), c.width(), ph, pw, sr, sc, n)?
                }
                None => vec![PatchOrigin::new(0, 0, c.height(), c.width())],
            };
            origins
                .into_iter()
                .map(|o| {
                    let patch = crop_aligned(c, o, n)?;
                    let mosaic = remosaic(&patch, pattern)?;
                    let name = format!("{source}__{}__{:05}_{:05}", op.name(), o.row, o.col);
                    let cube_rel = Path::new(CUBE_DIR).join(&name);
                    let mosaic_rel = Path::new(MOSAIC_DIR).join(&name);
                    write_cube_with_meta(&patch, &out_dir.join(&cube_rel), &patch_meta)?;
                    write_cube_with_meta(&mosaic.to_cube(), &out_dir.join(&mosaic_rel), &mosaic_meta)?;
                    Ok(PairRecord {
                        mosaic: path_string(&mosaic_rel),
                        cube: path_string(&cube_rel),
                        source: source.to_string(),
                        origin: [o.row, o.col],
                        aug: op.name().to_string(),
                        hard: None,
                        count: None,
                    })
                })
                .collect()
        })
        .collect::<Vec<_>>();
    let records = first_error(per_variant)?.into_iter().flatten().collect();
    Ok((records, warning))
}

/// Builds the pseudo-paired dataset: every input cube is optionally
/// augmented, cut into pattern-aligned patches, and each patch is stored
/// next to its remosaiced frame. Writes `<out_dir>/manifest.jsonl`.
pub fn make_pseudo_pairs(
    inputs: &[PathBuf],
    pattern: &SfaPattern,
    config: &PairConfig,
    out_dir: &Path,
) -> Result<PairOutput> {
    let mut seen = HashSet::new();
    let sources: Vec<String> = inputs.iter().map(|p| source_id(p)).collect();
    for (i, s) in sources.iter().enumerate() {
        if !seen.insert(s.as_str()) {
            return Err(Error::Param(format!("duplicate source name '{s}'")).at_record(i));
        }
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let results = inputs
        .par_iter()
        .zip(&sources)
        .enumerate()
        .map(|(i, (path, source))| {
            pair_one_cube(path, source, pattern, config, out_dir).map_err(|e| e.at_record(i))
        })
        .collect::<Vec<_>>();
    let mut records = Vec::new();
    let mut warnings = Vec::new();
    for (recs, warn) in first_error(results)? {
        records.extend(recs);
        warnings.extend(warn);
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let manifest_path = out_dir.join(super::MANIFEST_FILE);
    write_manifest(&manifest_path, &records)?;
    Ok(PairOutput {
        manifest_path,
        records,
        warnings,
    })
}

/// Where the second cube of a comparison pair comes from.
#[derive(Debug, Clone, Default, PartialEq)]
pub enum ComparisonPolicy {
    /// Bilinear reconstruction of the record's mosaic.
    #[default]
    WbBaseline,
    /// A cube with the same file name as the record's label cube, found in
    /// this directory (e.g. outputs of an external model).
    ExternalDir(PathBuf),
}

fn mosaic_with_pattern(path: &Path, fallback: Option<SfaPattern>) -> Result<(MosaicImage, SfaPattern)> {
    let (c, meta) = read_cube_with_meta(path)?;
    let pattern = meta.pattern.or(fallback).ok_or_else(|| {
        Error::Format {
            path: path.to_path_buf(),
            msg: "no SFA pattern in mosaic or cube sidecar".into(),
        }
    })?;
    Ok((MosaicImage::from_cube(c)?, pattern))
}

/// Loads (label cube, comparison cube) for one record.
pub fn load_comparison_pair(
    record: &PairRecord,
    base: &Path,
    policy: &ComparisonPolicy,
) -> Result<(SpectralCube, SpectralCube)> {
    let (label, meta) = read_cube_with_meta(&record.cube_path(base))?;
    let other = match policy {
        ComparisonPolicy::WbBaseline => {
            let (m, pattern) = mosaic_with_pattern(&record.mosaic_path(base), meta.pattern)?;
            wb_bilinear(&m, &pattern)?
        }
        ComparisonPolicy::ExternalDir(dir) => {
            let name = Path::new(&record.cube)
                .file_name()
                .ok_or_else(|| Error::Param(format!("record cube path '{}' has no file name", record.cube)))?;
            read_cube(&dir.join(name))?
        }
    };
    if !label.same_dims(&other) {
        return Err(Error::Shape(format!(
            "label {:?} and comparison {:?} differ",
            label.dims(),
            other.dims()
        )));
    }
    Ok((label, other))
}

fn manifest_dir(path: &Path) -> PathBuf {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    }
}

fn absolute_dir(dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    dir.canonicalize().map_err(|e| Error::io(dir, e))
}

fn rebase(record: &PairRecord, from: &Path, to: &Path) -> PairRecord {
    let fix = |p: &str| {
        if from == to {
            p.to_string()
        } else {
            path_string(&relative_path(&from.join(p), to))
        }
    };
    PairRecord {
        mosaic: fix(&record.mosaic),
        cube: fix(&record.cube),
        ..record.clone()
    }
}

/// Sidecar listing every input record with its verdict.
pub fn verdicts_path(out_manifest: &Path) -> PathBuf {
    let stem = out_manifest
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "selection".into());
    out_manifest.with_file_name(format!("{stem}.verdicts.jsonl"))
}

#[derive(Debug, Clone)]
pub struct FilterOutcome {
    /// Every input record with `hard` and `count` filled, input order.
    pub all: Vec<PairRecord>,
    /// The hard subset, input order.
    pub hard: Vec<PairRecord>,
    pub verdicts: Vec<PatchVerdict>,
    pub summary: Option<CountSummary>,
    pub verdicts_path: PathBuf,
}

/// Judges every record of a manifest and writes the hard subset to
/// `out_manifest` (paths rebased to its directory) plus a verdict sidecar.
pub fn filter_hard(
    manifest: &Path,
    policy: &ComparisonPolicy,
    fparams: &FreqParams,
    sparams: &SelectionParams,
    out_manifest: &Path,
) -> Result<FilterOutcome> {
    fparams.validate()?;
    sparams.validate()?;
    let records = read_manifest(manifest)?;
    let in_dir = absolute_dir(&manifest_dir(manifest))?;
    let out_dir = absolute_dir(&manifest_dir(out_manifest))?;

    let results = records
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            load_comparison_pair(r, &in_dir, policy)
                .and_then(|(a, b)| judge_pair(&a, &b, fparams, sparams))
                .map_err(|e| e.at_record(i))
        })
        .collect::<Vec<_>>();
    let verdicts = first_error(results)?;

    let all: Vec<PairRecord> = records
        .iter()
        .zip(&verdicts)
        .map(|(r, v)| PairRecord {
            hard: Some(v.is_hard),
            count: Some(v.count),
            ..rebase(r, &in_dir, &out_dir)
        })
        .collect();
    let hard: Vec<PairRecord> = all.iter().filter(|r| r.hard == Some(true)).cloned().collect();

    let vpath = verdicts_path(out_manifest);
    write_manifest(out_manifest, &hard)?;
    write_manifest(&vpath, &all)?;
    let counts: Vec<usize> = verdicts.iter().map(|v| v.count).collect();
    Ok(FilterOutcome {
        all,
        hard,
        summary: CountSummary::from_counts(&counts),
        verdicts,
        verdicts_path: vpath,
    })
}

/// Scores every record: the comparison cube (per `policy`) is the
/// reconstruction, the record's label cube the reference.
pub fn evaluate_manifest(
    manifest: &Path,
    policy: &ComparisonPolicy,
    peak: f64,
    clamp: bool,
) -> Result<MetricReport> {
    let records = read_manifest(manifest)?;
    let base = manifest_dir(manifest);
    let results = records
        .par_iter()
        .enumerate()
        .map(|(i, r)| {
            load_comparison_pair(r, &base, policy)
                .and_then(|(label, recon)| {
                    let recon = if clamp { recon.map(|x| x.clamp(0.0, 1.0)) } else { recon };
                    evaluate_pair(&recon, &label, peak)
                })
                .map(|m| ImageMetrics {
                    index: i,
                    name: Some(r.cube.clone()),
                    ..m
                })
                .map_err(|e| e.at_record(i))
        })
        .collect::<Vec<_>>();
    MetricReport::from_images(first_error(results)?, peak)
}

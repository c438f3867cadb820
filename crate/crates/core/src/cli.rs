//! Batch command-line front end.
//!
//! Exit status: 0 on success, 2 on usage errors, 1 on processing errors
//! (the failing record index, when there is one, is printed on stderr).

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Deserialize;

use crate::cube::MosaicImage;
use crate::dataset::{
    evaluate_manifest, filter_hard, make_pseudo_pairs, patchify, ComparisonPolicy, PairConfig,
};
use crate::demosaic::wb_bilinear;
use crate::error::{Error, Result};
use crate::freqsel::{frequency_variation_map, FreqParams, SelectionParams};
use crate::io::{
    read_cube, read_cube_with_meta, read_pgm16, write_cube, write_cube_with_meta, write_pgm8,
    CubeMeta,
};
use crate::metrics::{evaluate_pair, ImageMetrics, MetricReport, DEFAULT_PEAK};
use crate::parallel::{threads_from_env, with_pool};
use crate::pattern::SfaPattern;
use crate::sfa::mosaic;

#[derive(Debug, Parser)]
#[command(name = "specmosaic", version, about = "Spectral filter array dataset and artifact-mining toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct FreqArgs {
    /// Inner annulus radius, fraction of min(H, W)/2 [default: 0.08]
    #[arg(long)]
    pub r_low: Option<f64>,
    /// Outer annulus radius, fraction of min(H, W)/2 [default: 0.5]
    #[arg(long)]
    pub r_high: Option<f64>,
    /// Gaussian blur sigma in bins [default: 1.5]
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Gaussian blur half-width in bins [default: 5]
    #[arg(long)]
    pub radius: Option<usize>,
    /// Guard added to spectrum magnitudes before the logarithm [default: 1e-8]
    #[arg(long)]
    pub eps: Option<f64>,
}

impl FreqArgs {
    pub fn params(&self) -> FreqParams {
        let d = FreqParams::default();
        FreqParams {
            epsilon: self.eps.unwrap_or(d.epsilon),
            blur_sigma: self.sigma.unwrap_or(d.blur_sigma),
            blur_radius: self.radius.unwrap_or(d.blur_radius),
            r_low: self.r_low.unwrap_or(d.r_low),
            r_high: self.r_high.unwrap_or(d.r_high),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a cube through the SFA into a single-band mosaic cube file
    Mosaic {
        cube: PathBuf,
        /// `NxN` (row-major layout) or a JSON pattern file
        #[arg(long)]
        pattern: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Per-band bilinear reconstruction of a mosaic (cube file or 16-bit PGM)
    Demosaic {
        mosaic: PathBuf,
        /// Falls back to the pattern stored in the mosaic sidecar
        #[arg(long)]
        pattern: Option<String>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Build the pseudo-paired dataset from a directory of label cubes
    Pairs {
        cube_dir: PathBuf,
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        augment: bool,
        #[arg(long, num_args = 2, value_names = ["H", "W"])]
        patch: Option<Vec<usize>>,
        #[arg(long)]
        stride: Option<usize>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Keep only records whose frequency variation map marks them hard
    SelectHard {
        manifest: PathBuf,
        /// Map intensity threshold [default: 1.0]
        #[arg(long)]
        t_var: Option<f64>,
        /// Bin count threshold [default: 4]
        #[arg(long)]
        t_cnt: Option<usize>,
        #[command(flatten)]
        freq: FreqArgs,
        /// Compare labels against cubes in this directory instead of the bilinear baseline
        #[arg(long)]
        compare_dir: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Frequency variation map of two cubes
    Fvmap {
        cube_a: PathBuf,
        cube_b: PathBuf,
        #[command(flatten)]
        freq: FreqArgs,
        #[arg(short, long)]
        output: PathBuf,
        /// Also write an 8-bit PGM scaled by the map maximum
        #[arg(long)]
        pgm: Option<PathBuf>,
    },
    /// PSNR / SSIM / SAM over a manifest or a pair list
    Metrics {
        input: PathBuf,
        /// Clamp reconstructions to [0, 1] before scoring
        #[arg(long)]
        clamp: bool,
        #[arg(long, default_value_t = DEFAULT_PEAK)]
        peak: f64,
        /// For manifests: reconstructions come from this directory instead of the bilinear baseline
        #[arg(long)]
        recon_dir: Option<PathBuf>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Cut a cube into pattern-aligned patches
    Patchify {
        cube: PathBuf,
        #[arg(long, num_args = 2, value_names = ["H", "W"], required = true)]
        patch: Vec<usize>,
        #[arg(long)]
        stride: Option<usize>,
        #[arg(long)]
        pattern: String,
        #[arg(short, long)]
        output: PathBuf,
    },
}

/// `NxN` or a path to a JSON pattern file.
pub fn parse_pattern(spec: &str) -> Result<SfaPattern> {
    if let Some(p) = SfaPattern::parse_square(spec) {
        return p;
    }
    let path = Path::new(spec);
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
}

fn read_mosaic(path: &Path) -> Result<(MosaicImage, Option<SfaPattern>)> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) {
        return Ok((read_pgm16(path)?, None));
    }
    let (c, meta) = read_cube_with_meta(path)?;
    Ok((MosaicImage::from_cube(c)?, meta.pattern))
}

fn sources_in(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json") && p.with_extension("bsq").is_file())
        .map(|p| p.with_extension(""))
        .collect();
    out.sort();
    if out.is_empty() {
        return Err(Error::Param(format!("no cube files found in {}", dir.display())));
    }
    Ok(out)
}

#[derive(Deserialize)]
struct PairLine {
    reconstruction: String,
    reference: String,
}

fn is_manifest(path: &Path) -> Result<bool> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let v: serde_json::Value =
        serde_json::from_str(first).map_err(|e| Error::format(path, e.to_string()))?;
    Ok(v.get("mosaic").is_some())
}

fn evaluate_pair_list(path: &Path, peak: f64, clamp: bool) -> Result<MetricReport> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let lines: Vec<PairLine> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::format(path, format!("line {}: {e}", i + 1))))
        .collect::<Result<_>>()?;
    let results: Vec<Result<ImageMetrics>> = lines
        .par_iter()
        .enumerate()
        .map(|(i, l)| {
            let recon = read_cube(&base.join(&l.reconstruction))?;
            let recon = if clamp { recon.map(|x| x.clamp(0.0, 1.0)) } else { recon };
            let reference = read_cube(&base.join(&l.reference))?;
            evaluate_pair(&recon, &reference, peak).map(|m| ImageMetrics {
                index: i,
                name: Some(l.reconstruction.clone()),
                ..m
            })
        })
        .enumerate()
        .map(|(i, r)| r.map_err(|e| e.at_record(i)))
        .collect();
    MetricReport::from_images(results.into_iter().collect::<Result<_>>()?, peak)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    crate::io::write_atomic(path, text.as_bytes())
}

fn patch_dims(v: &[usize]) -> (usize, usize) {
    (v[0], v[1])
}

pub fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Mosaic { cube, pattern, output } => {
            let pattern = parse_pattern(&pattern)?;
            let (c, _) = read_cube_with_meta(&cube)?;
            let m = mosaic(&c, &pattern)?;
            write_cube_with_meta(&m.to_cube(), &output, &CubeMeta::with_pattern(&pattern))
        }
        Command::Demosaic { mosaic, pattern, output } => {
            let (m, stored) = read_mosaic(&mosaic)?;
            let pattern = match pattern {
                Some(s) => parse_pattern(&s)?,
                None => stored.ok_or_else(|| {
                    Error::Param("no --pattern given and the mosaic carries none".into())
                })?,
            };
            let c = wb_bilinear(&m, &pattern)?;
            write_cube_with_meta(&c, &output, &CubeMeta::with_pattern(&pattern))
        }
        Command::Pairs { cube_dir, pattern, augment, patch, stride, output } => {
            let pattern = parse_pattern(&pattern)?;
            let inputs = sources_in(&cube_dir)?;
            let config = PairConfig {
                patch: patch.as_deref().map(patch_dims),
                stride,
                augment,
            };
            let out = make_pseudo_pairs(&inputs, &pattern, &config, &output)?;
            eprintln!(
                "wrote {} records from {} cubes to {}",
                out.records.len(),
                inputs.len(),
                out.manifest_path.display()
            );
            Ok(())
        }
        Command::SelectHard { manifest, t_var, t_cnt, freq, compare_dir, output } => {
            let d = SelectionParams::default();
            let sparams = SelectionParams {
                t_var: t_var.unwrap_or(d.t_var),
                t_cnt: t_cnt.unwrap_or(d.t_cnt),
            };
            let policy = compare_dir.map_or(ComparisonPolicy::WbBaseline, ComparisonPolicy::ExternalDir);
            let out = filter_hard(&manifest, &policy, &freq.params(), &sparams, &output)?;
            eprintln!("selected {} of {} records", out.hard.len(), out.all.len());
            if let Some(s) = out.summary {
                let pct: Vec<String> = s.percentiles.iter().map(|(p, v)| format!("p{p}={v}")).collect();
                eprintln!(
                    "count distribution: min={} {} max={} mean={:.2}",
                    s.min,
                    pct.join(" "),
                    s.max,
                    s.mean
                );
            }
            Ok(())
        }
        Command::Fvmap { cube_a, cube_b, freq, output, pgm } => {
            let a = read_cube(&cube_a)?;
            let b = read_cube(&cube_b)?;
            let map = frequency_variation_map(&a, &b, &freq.params())?;
            write_cube(&map.to_cube(), &output)?;
            if let Some(p) = pgm {
                write_pgm8(&p, map.height(), map.width(), &map.to_gray8())?;
            }
            Ok(())
        }
        Command::Metrics { input, clamp, peak, recon_dir, output } => {
            let report = if is_manifest(&input)? {
                let policy = recon_dir.map_or(ComparisonPolicy::WbBaseline, ComparisonPolicy::ExternalDir);
                evaluate_manifest(&input, &policy, peak, clamp)?
            } else {
                evaluate_pair_list(&input, peak, clamp)?
            };
            let mut json = report.to_json();
            json.push('\n');
            write_text(&output, &json)
        }
        Command::Patchify { cube, patch, stride, pattern, output } => {
            let pattern = parse_pattern(&pattern)?;
            let (c, meta) = read_cube_with_meta(&cube)?;
            let (ph, pw) = patch_dims(&patch);
            let stride = stride.unwrap_or(ph);
            let stem = crate::io::cube_stem(&cube);
            let name = stem.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let patches = patchify(&c, ph, pw, stride, pattern.period())?;
            fs::create_dir_all(&output).map_err(|e| Error::io(&output, e))?;
            patches
                .par_iter()
                .enumerate()
                .map(|(i, (o, p))| {
                    let path = output.join(format!("{name}__{:05}_{:05}", o.row, o.col));
                    write_cube_with_meta(p, &path, &meta).map_err(|e| e.at_record(i))
                })
                .collect::<Vec<_>>()
                .into_iter()
                .collect()
        }
    }
}

/// Parses `argv`, runs the command in a pool sized by `SPECMOSAIC_THREADS`,
/// and returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let threads = match threads_from_env() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match with_pool(threads, || execute(cli.command)).and_then(|r| r) {
        Ok(()) => 0,
        Err(e) => {
            if let Some(i) = e.record_index() {
                eprintln!("error: record {i} failed");
            }
            eprintln!("error: {e}");
            1
        }
    }
}

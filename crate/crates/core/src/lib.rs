//! Toolkit for spectral filter array (SFA) demosaicing experiments.
//!
//! * [`cube`], [`pattern`], [`geometry`]: value types and phase-aware geometry.
//! * [`sfa`]: mosaicing, remosaicing and sparse expansion.
//! * [`demosaic`]: the per-band bilinear baseline.
//! * [`freqsel`]: frequency variation maps and hard patch selection.
//! * [`metrics`]: PSNR, SSIM, SAM and dataset averaging.
//! * [`dataset`]: pseudo-pair generation, augmentation and hard subset filtering.
//! * [`io`]: on-disk formats (BSQ + JSON sidecar cubes, 16-bit PGM, manifests).

pub mod cli;
pub mod cube;
pub mod dataset;
pub mod demosaic;
pub mod error;
pub mod freqsel;
pub mod geometry;
pub mod io;
pub mod metrics;
pub mod parallel;
pub mod pattern;
pub mod sfa;

pub use cube::{validate_cube, MosaicImage, PatchOrigin, SpectralCube, ValidationReport};
pub use error::{Error, Result};
pub use geometry::{crop_aligned, transform_d4, D4};
pub use pattern::SfaPattern;

/// Written into every report so that output files are reproducible byte for byte.
pub const TOOL_VERSION: &str = concat!("specmosaic ", env!("CARGO_PKG_VERSION"));

//! Pseudo-paired dataset construction and hard subset mining.

mod manifest;
mod pairs;

pub use manifest::{
    partition, read_manifest, relative_path, write_manifest, PairRecord, MANIFEST_FILE,
};
pub use pairs::{
    evaluate_manifest, filter_hard, load_comparison_pair, make_pseudo_pairs, verdicts_path,
    ComparisonPolicy, FilterOutcome, PairConfig, PairOutput, CUBE_DIR, MOSAIC_DIR,
};

use crate::cube::{PatchOrigin, SpectralCube};
use crate::error::{Error, Result};
use crate::geometry::{crop_aligned, transform_d4, D4};

/// Window origins for a regular tiling, row-major. Only windows that fit
/// entirely inside an h×w image are produced.
pub fn patch_origins(
    h: usize,
    w: usize,
    patch_h: usize,
    patch_w: usize,
    stride: usize,
    period: usize,
) -> Result<Vec<PatchOrigin>> {
    patch_origins_2d(h, w, patch_h, patch_w, stride, stride, period)
}

pub(crate) fn patch_origins_2d(
    h: usize,
    w: usize,
    patch_h: usize,
    patch_w: usize,
    stride_r: usize,
    stride_c: usize,
    period: usize,
) -> Result<Vec<PatchOrigin>> {
    if period == 0 || stride_r == 0 || stride_c == 0 || patch_h == 0 || patch_w == 0 {
        return Err(Error::Param(
            "patch size, stride and period must be positive".into(),
        ));
    }
    for (name, x) in [
        ("patch height", patch_h),
        ("patch width", patch_w),
        ("stride", stride_r),
        ("stride", stride_c),
    ] {
        if x % period != 0 {
            return Err(Error::Alignment(format!(
                "{name} {x} is not a multiple of period {period}"
            )));
        }
    }
    if patch_h > h || patch_w > w {
        return Err(Error::Bounds(format!(
            "{patch_h}x{patch_w} patch does not fit in {h}x{w}"
        )));
    }
    let rows = (h - patch_h) / stride_r + 1;
    let cols = (w - patch_w) / stride_c + 1;
    let mut out = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            out.push(PatchOrigin::new(r * stride_r, c * stride_c, patch_h, patch_w));
        }
    }
    Ok(out)
}

pub fn patchify(
    cube: &SpectralCube,
    patch_h: usize,
    patch_w: usize,
    stride: usize,
    period: usize,
) -> Result<Vec<(PatchOrigin, SpectralCube)>> {
    patch_origins(cube.height(), cube.width(), patch_h, patch_w, stride, period)?
        .into_iter()
        .map(|o| crop_aligned(cube, o, period).map(|p| (o, p)))
        .collect()
}

/// Augmented copies of a cube together with the op that produced each.
#[derive(Debug, Clone)]
pub struct Augmented {
    pub variants: Vec<(D4, SpectralCube)>,
    pub warning: Option<String>,
}

/// Group ops applicable to an h×w image: all eight when square, otherwise
/// only those that keep the shape.
pub fn augmentation_ops(h: usize, w: usize) -> &'static [D4] {
    if h == w {
        &D4::ALL
    } else {
        &D4::SHAPE_PRESERVING
    }
}

pub fn augment_cube(cube: &SpectralCube) -> Augmented {
    let (h, w, _) = cube.dims();
    let ops = augmentation_ops(h, w);
    let warning = (h != w).then(|| {
        format!("{h}x{w} cube is not square; emitting {} shape-preserving variants", ops.len())
    });
    Augmented {
        variants: ops.iter().map(|&op| (op, transform_d4(cube, op))).collect(),
        warning,
    }
}

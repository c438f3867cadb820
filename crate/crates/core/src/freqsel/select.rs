use rayon::prelude::*;
use serde::Serialize;

use super::variation::{frequency_variation_map, FreqParams, FrequencyVariationMap};
use crate::cube::SpectralCube;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelectionParams {
    /// A bin counts when its map value is strictly above this.
    pub t_var: f64,
    /// A patch is hard when strictly more than this many bins count.
    pub t_cnt: usize,
}

// A single real-valued periodic artifact shows up as one conjugate pair of
// spectral lines; with the default blur each line core contributes about
// four bins above t_var = 1, so t_cnt = 4 admits one full pair.
impl Default for SelectionParams {
    fn default() -> Self {
        Self {
            t_var: 1.0,
            t_cnt: 4,
        }
    }
}

impl SelectionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_var >= 0.0 && self.t_var.is_finite()) {
            return Err(Error::Param(format!("t_var must be >= 0, got {}", self.t_var)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PatchVerdict {
    pub count: usize,
    pub is_hard: bool,
    pub params: SelectionParams,
}

pub fn classify_patch(map: &FrequencyVariationMap, params: &SelectionParams) -> PatchVerdict {
    let count = map.values.iter().filter(|&&x| x > params.t_var).count();
    PatchVerdict {
        count,
        is_hard: count > params.t_cnt,
        params: *params,
    }
}

/// Variation map and verdict for one (reference, comparison) pair.
pub fn judge_pair(
    reference: &SpectralCube,
    comparison: &SpectralCube,
    fparams: &FreqParams,
    sparams: &SelectionParams,
) -> Result<PatchVerdict> {
    let map = frequency_variation_map(reference, comparison, fparams)?;
    Ok(classify_patch(&map, sparams))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionReport {
    /// One verdict per input pair, in input order.
    pub verdicts: Vec<PatchVerdict>,
    /// Indices of hard pairs, ascending.
    pub hard: Vec<usize>,
}

pub fn select_hard(
    pairs: &[(SpectralCube, SpectralCube)],
    fparams: &FreqParams,
    sparams: &SelectionParams,
) -> Result<SelectionReport> {
    fparams.validate()?;
    sparams.validate()?;
    let verdicts = pairs
        .par_iter()
        .enumerate()
        .map(|(i, (a, b))| judge_pair(a, b, fparams, sparams).map_err(|e| e.at_record(i)))
        .collect::<Result<Vec<_>>>()?;
    let hard = verdicts
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.is_hard.then_some(i))
        .collect();
    Ok(SelectionReport { verdicts, hard })
}

/// Distribution of supra-threshold counts over a dataset, for picking `t_cnt`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountSummary {
    pub n: usize,
    pub min: usize,
    pub max: usize,
    pub mean: f64,
    /// (percentile, nearest-rank value)
    pub percentiles: Vec<(u32, usize)>,
}

impl CountSummary {
    pub const PERCENTILES: [u32; 6] = [10, 25, 50, 75, 90, 99];

    pub fn from_counts(counts: &[usize]) -> Option<Self> {
        if counts.is_empty() {
            return None;
        }
        let mut sorted = counts.to_vec();
        sorted.sort_unstable();
        let n = sorted.len();
        let rank = |p: u32| {
            let r = (p as usize * n).div_ceil(100).max(1);
            sorted[r - 1]
        };
        Some(Self {
            n,
            min: sorted[0],
            max: sorted[n - 1],
            mean: sorted.iter().map(|&c| c as f64).sum::<f64>() / n as f64,
            percentiles: Self::PERCENTILES.iter().map(|&p| (p, rank(p))).collect(),
        })
    }
}

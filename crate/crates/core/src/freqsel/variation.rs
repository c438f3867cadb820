use ndarray::{Array2, Zip};
use rayon::prelude::*;

use super::blur::gaussian_blur;
use super::spectrum::{dc_bin, SpectrumPlan};
use crate::cube::SpectralCube;
use crate::error::{Error, Result};

/// Parameters of the variation map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqParams {
    /// Guard added to the spectrum modulus before the logarithm.
    pub epsilon: f64,
    pub blur_sigma: f64,
    pub blur_radius: usize,
    /// Inner annulus radius as a fraction of min(H, W) / 2.
    pub r_low: f64,
    /// Outer annulus radius as a fraction of min(H, W) / 2.
    pub r_high: f64,
}

impl Default for FreqParams {
    fn default() -> Self {
        Self {
            epsilon: 1e-8,
            blur_sigma: 1.5,
            blur_radius: 5,
            r_low: 0.08,
            r_high: 0.5,
        }
    }
}

impl FreqParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Param(format!("epsilon must be > 0, got {}", self.epsilon)));
        }
        if !(self.blur_sigma > 0.0 && self.blur_sigma.is_finite()) {
            return Err(Error::Param(format!(
                "blur sigma must be > 0, got {}",
                self.blur_sigma
            )));
        }
        if self.blur_radius == 0 {
            return Err(Error::Param("blur radius must be at least 1".into()));
        }
        if !(0.0 <= self.r_low && self.r_low < self.r_high && self.r_high <= 1.0) {
            return Err(Error::Param(format!(
                "need 0 <= r_low < r_high <= 1, got r_low={} r_high={}",
                self.r_low, self.r_high
            )));
        }
        Ok(())
    }
}

/// Non-negative map over centered frequency bins.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyVariationMap {
    pub values: Array2<f64>,
    pub dc_row: usize,
    pub dc_col: usize,
}

impl FrequencyVariationMap {
    pub fn height(&self) -> usize {
        self.values.nrows()
    }

    pub fn width(&self) -> usize {
        self.values.ncols()
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Single-band cube holding the map (for writing to disk).
    pub fn to_cube(&self) -> SpectralCube {
        let (h, w) = self.values.dim();
        SpectralCube::new(h, w, 1, self.values.iter().map(|&x| x as f32).collect())
            .expect("map dims are positive")
    }

    /// 8-bit rendering scaled by the map maximum; an all-zero map renders black.
    pub fn to_gray8(&self) -> Vec<u8> {
        let max = self.max();
        if max <= 0.0 {
            return vec![0; self.values.len()];
        }
        self.values
            .iter()
            .map(|&x| (x / max * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect()
    }
}

fn band_plane(cube: &SpectralCube, k: usize) -> impl Iterator<Item = f64> + '_ {
    cube.band(k).iter().map(|&x| x as f64)
}

/// Blurred absolute log-magnitude difference for every band, in band order.
pub fn channel_variations(
    c1: &SpectralCube,
    c2: &SpectralCube,
    params: &FreqParams,
) -> Result<Vec<Array2<f64>>> {
    params.validate()?;
    if !c1.same_dims(c2) {
        return Err(Error::Shape(format!(
            "cannot compare {:?} with {:?}",
            c1.dims(),
            c2.dims()
        )));
    }
    let (h, w, c) = c1.dims();
    let plan = SpectrumPlan::new(h, w);
    let eps = params.epsilon;
    Ok((0..c)
        .into_par_iter()
        .map(|k| {
            let s1 = plan.centered(band_plane(c1, k));
            let s2 = plan.centered(band_plane(c2, k));
            let mut diff = Array2::<f64>::zeros((h, w));
            Zip::from(&mut diff).and(&s1).and(&s2).for_each(|d, a, b| {
                *d = ((a.norm() + eps).ln() - (b.norm() + eps).ln()).abs();
            });
            gaussian_blur(&diff, params.blur_sigma, params.blur_radius)
        })
        .collect())
}

/// Zeroes every bin outside the annulus r_low·R ≤ d ≤ r_high·R around DC,
/// with R = min(H, W) / 2.
pub fn bandpass(map: &Array2<f64>, r_low: f64, r_high: f64) -> Array2<f64> {
    let (h, w) = map.dim();
    let (dr, dc) = dc_bin(h, w);
    let r_max = h.min(w) as f64 / 2.0;
    let (lo, hi) = (r_low * r_max, r_high * r_max);
    let mut out = map.clone();
    for ((u, v), x) in out.indexed_iter_mut() {
        let du = u as f64 - dr as f64;
        let dv = v as f64 - dc as f64;
        let d = (du * du + dv * dv).sqrt();
        if d < lo || d > hi {
            *x = 0.0;
        }
    }
    out
}

pub fn frequency_variation_map(
    c1: &SpectralCube,
    c2: &SpectralCube,
    params: &FreqParams,
) -> Result<FrequencyVariationMap> {
    let per_band = channel_variations(c1, c2, params)?;
    let (h, w) = (c1.height(), c1.width());
    let mut d = Array2::<f64>::zeros((h, w));
    for r in &per_band {
        Zip::from(&mut d).and(r).for_each(|m, &x| *m = m.max(x));
    }
    let (dc_row, dc_col) = dc_bin(h, w);
    Ok(FrequencyVariationMap {
        values: bandpass(&d, params.r_low, params.r_high),
        dc_row,
        dc_col,
    })
}

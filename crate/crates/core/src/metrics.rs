//! PSNR, SSIM and SAM for spectral cubes, plus dataset averaging.

use serde::{Serialize, Serializer};

use crate::cube::SpectralCube;
use crate::error::{Error, Result};
use crate::TOOL_VERSION;

pub const DEFAULT_PEAK: f64 = 1.0;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;
pub const SSIM_RANGE: f64 = 1.0;

/// Pixels whose spectral vector norm is below this are left out of SAM.
pub const SAM_NORM_GUARD: f64 = 1e-12;

fn check_same(a: &SpectralCube, b: &SpectralCube) -> Result<()> {
    if !a.same_dims(b) {
        return Err(Error::Shape(format!(
            "metric inputs differ in shape: {:?} vs {:?}",
            a.dims(),
            b.dims()
        )));
    }
    Ok(())
}

pub fn mse(a: &SpectralCube, b: &SpectralCube) -> Result<f64> {
    check_same(a, b)?;
    let sum: f64 = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum();
    Ok(sum / a.as_slice().len() as f64)
}

/// 10·log10(peak² / MSE) over all samples; identical inputs give +∞.
pub fn psnr(a: &SpectralCube, b: &SpectralCube, peak: f64) -> Result<f64> {
    if !(peak > 0.0 && peak.is_finite()) {
        return Err(Error::Param(format!("peak must be > 0, got {peak}")));
    }
    let e = mse(a, b)?;
    if e == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (peak * peak / e).log10())
}

fn ssim_weights() -> Vec<f64> {
    crate::freqsel::gaussian_kernel(SSIM_SIGMA, SSIM_WINDOW / 2)
}

/// Valid-region separable filtering of a row-major plane.
fn filter_valid(plane: &[f64], h: usize, w: usize, g: &[f64]) -> Vec<f64> {
    let n = g.len();
    let (oh, ow) = (h - n + 1, w - n + 1);
    let mut rows = vec![0.0; h * ow];
    for u in 0..h {
        let src = &plane[u * w..(u + 1) * w];
        for v in 0..ow {
            rows[u * ow + v] = g.iter().zip(&src[v..v + n]).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for u in 0..oh {
        let dst = &mut out[u * ow..(u + 1) * ow];
        for (t, gt) in g.iter().enumerate() {
            let src = &rows[(u + t) * ow..(u + t + 1) * ow];
            for (d, x) in dst.iter_mut().zip(src) {
                *d += gt * x;
            }
        }
    }
    out
}

fn ssim_plane(a: &[f32], b: &[f32], h: usize, w: usize, g: &[f64]) -> f64 {
    let c1 = (SSIM_K1 * SSIM_RANGE).powi(2);
    let c2 = (SSIM_K2 * SSIM_RANGE).powi(2);
    let a: Vec<f64> = a.iter().map(|&x| x as f64).collect();
    let b: Vec<f64> = b.iter().map(|&x| x as f64).collect();
    let aa: Vec<f64> = a.iter().map(|x| x * x).collect();
    let bb: Vec<f64> = b.iter().map(|x| x * x).collect();
    let ab: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();

    let mu_a = filter_valid(&a, h, w, g);
    let mu_b = filter_valid(&b, h, w, g);
    let e_aa = filter_valid(&aa, h, w, g);
    let e_bb = filter_valid(&bb, h, w, g);
    let e_ab = filter_valid(&ab, h, w, g);

    let mut sum = 0.0;
    for i in 0..mu_a.len() {
        let (ma, mb) = (mu_a[i], mu_b[i]);
        let va = e_aa[i] - ma * ma;
        let vb = e_bb[i] - mb * mb;
        let cov = e_ab[i] - ma * mb;
        let num = (2.0 * ma * mb + c1) * (2.0 * cov + c2);
        let den = (ma * ma + mb * mb + c1) * (va + vb + c2);
        sum += num / den;
    }
    sum / mu_a.len() as f64
}

/// Mean SSIM per band (11×11 Gaussian window, σ = 1.5, no padding),
/// averaged over bands.
pub fn ssim(a: &SpectralCube, b: &SpectralCube) -> Result<f64> {
    check_same(a, b)?;
    let (h, w, c) = a.dims();
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(Error::Shape(format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {h}x{w}"
        )));
    }
    let g = ssim_weights();
    let total: f64 = (0..c).map(|k| ssim_plane(a.band(k), b.band(k), h, w, &g)).sum();
    Ok(total / c as f64)
}

/// Mean spectral angle in degrees over pixels where both vectors are non-zero.
pub fn sam(a: &SpectralCube, b: &SpectralCube) -> Result<f64> {
    check_same(a, b)?;
    let (h, w, c) = a.dims();
    let n = h * w;
    let (pa, pb) = (a.as_slice(), b.as_slice());
    let mut total = 0.0;
    let mut used = 0usize;
    for i in 0..n {
        let (mut dot, mut na, mut nb) = (0.0f64, 0.0f64, 0.0f64);
        for k in 0..c {
            let x = pa[k * n + i] as f64;
            let y = pb[k * n + i] as f64;
            dot += x * y;
            na += x * x;
            nb += y * y;
        }
        if na.sqrt() < SAM_NORM_GUARD || nb.sqrt() < SAM_NORM_GUARD {
            continue;
        }
        let cos = (dot / (na * nb).sqrt()).clamp(-1.0, 1.0);
        total += cos.acos();
        used += 1;
    }
    if used == 0 {
        return Err(Error::Degenerate(
            "every pixel has a zero spectral vector; SAM is undefined".into(),
        ));
    }
    Ok((total / used as f64).to_degrees())
}

fn ser_db<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_infinite() && *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImageMetrics {
    pub index: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(serialize_with = "ser_db")]
    pub psnr: f64,
    pub ssim: f64,
    pub sam: f64,
}

pub fn evaluate_pair(
    reconstruction: &SpectralCube,
    reference: &SpectralCube,
    peak: f64,
) -> Result<ImageMetrics> {
    Ok(ImageMetrics {
        index: 0,
        name: None,
        psnr: psnr(reconstruction, reference, peak)?,
        ssim: ssim(reconstruction, reference)?,
        sam: sam(reconstruction, reference)?,
    })
}

/// Dataset-level report. Serializes to the JSON report document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub per_image: Vec<ImageMetrics>,
    #[serde(serialize_with = "ser_db")]
    pub mean_psnr: f64,
    pub mean_ssim: f64,
    pub mean_sam: f64,
    pub peak: f64,
    pub tool_version: String,
}

impl MetricReport {
    /// Arithmetic means taken sequentially in the given order.
    pub fn from_images(per_image: Vec<ImageMetrics>, peak: f64) -> Result<Self> {
        if per_image.is_empty() {
            return Err(Error::Degenerate("no images to evaluate".into()));
        }
        let n = per_image.len() as f64;
        let mean = |f: fn(&ImageMetrics) -> f64| per_image.iter().map(f).sum::<f64>() / n;
        Ok(Self {
            mean_psnr: mean(|m| m.psnr),
            mean_ssim: mean(|m| m.ssim),
            mean_sam: mean(|m| m.sam),
            per_image,
            peak,
            tool_version: TOOL_VERSION.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Scores each (reconstruction, reference) pair and averages in input order.
pub fn evaluate_dataset(pairs: &[(SpectralCube, SpectralCube)], peak: f64) -> Result<MetricReport> {
    if pairs.is_empty() {
        return Err(Error::Degenerate("no images to evaluate".into()));
    }
    let per_image = pairs
        .iter()
        .enumerate()
        .map(|(i, (r, t))| {
            evaluate_pair(r, t, peak)
                .map(|m| ImageMetrics { index: i, ..m })
                .map_err(|e| e.at_record(i))
        })
        .collect::<Result<Vec<_>>>()?;
    MetricReport::from_images(per_image, peak)
}

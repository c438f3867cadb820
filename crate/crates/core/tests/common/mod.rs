//! Fixtures and brute-force oracles shared by the integration tests. The
//! oracles follow the textbook definitions directly and share no code with
//! the library paths they check.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use specmosaic::io::write_cube_with_meta;
use specmosaic::io::CubeMeta;
use specmosaic::{MosaicImage, SfaPattern, SpectralCube};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_cube(rng: &mut impl Rng, h: usize, w: usize, c: usize) -> SpectralCube {
    SpectralCube::from_fn(h, w, c, |_, _, _| rng.gen::<f32>()).unwrap()
}

pub fn random_mosaic(rng: &mut impl Rng, h: usize, w: usize) -> MosaicImage {
    MosaicImage::from_fn(h, w, |_, _| rng.gen::<f32>()).unwrap()
}

pub fn random_pattern(rng: &mut impl Rng, period: usize) -> SfaPattern {
    let mut cells: Vec<usize> = (0..period * period).collect();
    for i in (1..cells.len()).rev() {
        let j = rng.gen_range(0..=i);
        cells.swap(i, j);
    }
    SfaPattern::new(period, cells).unwrap()
}

// ---------------------------------------------------------------- oracles

/// Direct O(N⁴) DFT, re-indexed so that frequency (0, 0) sits at (H/2, W/2).
pub fn brute_dft_centered(plane: &[f64], h: usize, w: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); h * w];
    for p in 0..h {
        for q in 0..w {
            let mut acc = Complex64::new(0.0, 0.0);
            for u in 0..h {
                for v in 0..w {
                    let phase = -2.0 * PI * ((p * u) as f64 / h as f64 + (q * v) as f64 / w as f64);
                    acc += plane[u * w + v] * Complex64::from_polar(1.0, phase);
                }
            }
            let r = (p + h / 2) % h;
            let c = (q + w / 2) % w;
            out[r * w + c] = acc;
        }
    }
    out
}

/// Dense 2D Gaussian convolution with border clamping.
pub fn dense_blur(map: &[f64], h: usize, w: usize, sigma: f64, radius: usize) -> Vec<f64> {
    let r = radius as i64;
    let mut weights = Vec::new();
    let mut total = 0.0;
    for a in -r..=r {
        for b in -r..=r {
            let g = (-((a * a + b * b) as f64) / (2.0 * sigma * sigma)).exp();
            weights.push((a, b, g));
            total += g;
        }
    }
    let mut out = vec![0.0; h * w];
    for u in 0..h as i64 {
        for v in 0..w as i64 {
            let mut acc = 0.0;
            for &(a, b, g) in &weights {
                let su = (u + a).clamp(0, h as i64 - 1) as usize;
                let sv = (v + b).clamp(0, w as i64 - 1) as usize;
                acc += g / total * map[su * w + sv];
            }
            out[u as usize * w + v as usize] = acc;
        }
    }
    out
}

pub fn psnr_oracle(a: &SpectralCube, b: &SpectralCube, peak: f64) -> f64 {
    let (h, w, c) = a.dims();
    let mut se = 0.0;
    for k in 0..c {
        for u in 0..h {
            for v in 0..w {
                let d = a.get(u, v, k) as f64 - b.get(u, v, k) as f64;
                se += d * d;
            }
        }
    }
    let mse = se / (h * w * c) as f64;
    10.0 * (peak * peak / mse).log10()
}

/// Windowed SSIM straight from the definition: per window, weighted means,
/// variances and covariance with an 11×11 Gaussian (σ = 1.5).
pub fn ssim_oracle(a: &SpectralCube, b: &SpectralCube) -> f64 {
    let (h, w, c) = a.dims();
    let n = 11usize;
    let mut g = vec![0.0; n * n];
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (di, dj) = (i as f64 - 5.0, j as f64 - 5.0);
            g[i * n + j] = (-(di * di + dj * dj) / (2.0 * 1.5 * 1.5)).exp();
            total += g[i * n + j];
        }
    }
    g.iter_mut().for_each(|x| *x /= total);
    let c1 = 0.01f64.powi(2);
    let c2 = 0.03f64.powi(2);
    let mut band_sum = 0.0;
    for k in 0..c {
        let mut s = 0.0;
        let mut count = 0;
        for u0 in 0..=h - n {
            for v0 in 0..=w - n {
                let (mut ma, mut mb) = (0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        ma += g[i * n + j] * a.get(u0 + i, v0 + j, k) as f64;
                        mb += g[i * n + j] * b.get(u0 + i, v0 + j, k) as f64;
                    }
                }
                let (mut va, mut vb, mut cov) = (0.0, 0.0, 0.0);
                for i in 0..n {
                    for j in 0..n {
                        let x = a.get(u0 + i, v0 + j, k) as f64 - ma;
                        let y = b.get(u0 + i, v0 + j, k) as f64 - mb;
                        va += g[i * n + j] * x * x;
                        vb += g[i * n + j] * y * y;
                        cov += g[i * n + j] * x * y;
                    }
                }
                s += ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
                    / ((ma * ma + mb * mb + c1) * (va + vb + c2));
                count += 1;
            }
        }
        band_sum += s / count as f64;
    }
    band_sum / c as f64
}

pub fn sam_oracle(a: &SpectralCube, b: &SpectralCube) -> f64 {
    let (h, w, _) = a.dims();
    let mut total = 0.0;
    let mut n = 0;
    for u in 0..h {
        for v in 0..w {
            let x: Vec<f64> = a.pixel(u, v).iter().map(|&t| t as f64).collect();
            let y: Vec<f64> = b.pixel(u, v).iter().map(|&t| t as f64).collect();
            let dot: f64 = x.iter().zip(&y).map(|(p, q)| p * q).sum();
            let nx = x.iter().map(|p| p * p).sum::<f64>().sqrt();
            let ny = y.iter().map(|p| p * p).sum::<f64>().sqrt();
            if nx < 1e-12 || ny < 1e-12 {
                continue;
            }
            total += (dot / (nx * ny)).clamp(-1.0, 1.0).acos() * 180.0 / PI;
            n += 1;
        }
    }
    total / n as f64
}

/// Mosaic by explicit mask sum over every band.
pub fn mosaic_oracle(cube: &SpectralCube, pattern: &SfaPattern) -> Vec<f64> {
    let (h, w, c) = cube.dims();
    let n = pattern.period();
    let mut out = vec![0.0; h * w];
    for u in 0..h {
        for v in 0..w {
            for k in 0..c {
                let (i, j) = cell_of(pattern, k);
                let m = if u % n == i && v % n == j { 1.0 } else { 0.0 };
                out[u * w + v] += cube.get(u, v, k) as f64 * m;
            }
        }
    }
    out
}

fn cell_of(pattern: &SfaPattern, band: usize) -> (usize, usize) {
    let n = pattern.period();
    let idx = pattern.band_at_cells().iter().position(|&b| b == band).unwrap();
    (idx / n, idx % n)
}

/// Bilinear per-band interpolation by searching the nearest lattice
/// positions around each pixel; lattice ends are replicated.
pub fn wb_oracle(m: &MosaicImage, pattern: &SfaPattern) -> SpectralCube {
    let (h, w) = (m.height(), m.width());
    let n = pattern.period();
    let mut out = SpectralCube::zeros(h, w, n * n).unwrap();
    for k in 0..n * n {
        let (i, j) = cell_of(pattern, k);
        let rows: Vec<usize> = (0..h).filter(|u| u % n == i).collect();
        let cols: Vec<usize> = (0..w).filter(|v| v % n == j).collect();
        let around = |sites: &[usize], x: usize| -> (usize, usize, f64) {
            let below = sites.iter().rev().find(|&&s| s <= x).copied();
            let above = sites.iter().find(|&&s| s >= x).copied();
            match (below, above) {
                (Some(a), Some(b)) if a == b => (a, b, 0.0),
                (Some(a), Some(b)) => (a, b, (x - a) as f64 / (b - a) as f64),
                (None, Some(b)) => (b, b, 0.0),
                (Some(a), None) => (a, a, 0.0),
                (None, None) => unreachable!(),
            }
        };
        for u in 0..h {
            let (r0, r1, fy) = around(&rows, u);
            for v in 0..w {
                let (c0, c1, fx) = around(&cols, v);
                let val = (1.0 - fy) * (1.0 - fx) * m.get(r0, c0) as f64
                    + (1.0 - fy) * fx * m.get(r0, c1) as f64
                    + fy * (1.0 - fx) * m.get(r1, c0) as f64
                    + fy * fx * m.get(r1, c1) as f64;
                out.set(u, v, k, val as f32);
            }
        }
    }
    out
}

// --------------------------------------------------------------- fixtures

pub const FIXTURE_PATCHES: usize = 20;
pub const SINUSOID_INDEX: usize = 7;
pub const SHIFT_INDEX: usize = 13;
pub const SINUSOID_BAND: usize = 5;

/// Label cube with one constant per band.
pub fn flat_cube(rng: &mut impl Rng, h: usize, w: usize, c: usize) -> SpectralCube {
    let levels: Vec<f32> = (0..c).map(|_| rng.gen_range(0.2f32..0.7)).collect();
    SpectralCube::from_fn(h, w, c, |_, _, k| levels[k]).unwrap()
}

/// Adds 0.2·sin(2π·0.25·u) to one band.
pub fn add_sinusoid(cube: &SpectralCube, band: usize) -> SpectralCube {
    let (h, w, c) = cube.dims();
    SpectralCube::from_fn(h, w, c, |u, v, k| {
        let x = cube.get(u, v, k);
        if k == band {
            (x as f64 + 0.2 * (2.0 * PI * 0.25 * u as f64).sin()) as f32
        } else {
            x
        }
    })
    .unwrap()
}

pub fn add_offset(cube: &SpectralCube, offset: f32) -> SpectralCube {
    cube.map(|x| x + offset)
}

/// The twenty 128×128×16 label patches: flat scenes, one with an injected
/// mid-frequency sinusoid and one with a global brightness shift.
pub fn hard_patch_cubes() -> Vec<SpectralCube> {
    let mut r = rng(0x5eed_0003);
    (0..FIXTURE_PATCHES)
        .map(|i| {
            let base = flat_cube(&mut r, 128, 128, 16);
            match i {
                SINUSOID_INDEX => add_sinusoid(&base, SINUSOID_BAND),
                SHIFT_INDEX => add_offset(&base, 0.2),
                _ => base,
            }
        })
        .collect()
}

pub fn fixture_name(i: usize) -> String {
    format!("patch{i:02}")
}

pub fn write_cube_dir(dir: &Path, cubes: &[SpectralCube]) {
    std::fs::create_dir_all(dir).unwrap();
    for (i, c) in cubes.iter().enumerate() {
        write_cube_with_meta(c, &dir.join(fixture_name(i)), &CubeMeta::default()).unwrap();
    }
}

/// Smooth synthetic scene with a few oriented gratings per band.
pub fn synthetic_scene(rng: &mut impl Rng, h: usize, w: usize, c: usize) -> SpectralCube {
    let comps: Vec<[f64; 4]> = (0..3)
        .map(|_| {
            [
                rng.gen_range(0.0..0.15),
                rng.gen_range(0.0..0.15),
                rng.gen_range(0.0..2.0 * PI),
                rng.gen_range(0.05..0.15),
            ]
        })
        .collect();
    let tilt: Vec<f64> = (0..c).map(|_| rng.gen_range(0.7..1.3)).collect();
    SpectralCube::from_fn(h, w, c, |u, v, k| {
        let mut x = 0.45;
        for [fu, fv, ph, amp] in &comps {
            x += amp * tilt[k] * (2.0 * PI * (fu * u as f64 + fv * v as f64) + ph).sin();
        }
        x.clamp(0.0, 1.0) as f32
    })
    .unwrap()
}

// -------------------------------------------------------------------- cli

pub fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_specmosaic"))
}

pub fn run_cli(args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("SPECMOSAIC_THREADS", t.to_string()),
        None => cmd.env_remove("SPECMOSAIC_THREADS"),
    };
    cmd.output().expect("spawn specmosaic")
}

pub fn run_ok(args: &[&str], threads: Option<usize>) -> Output {
    let out = run_cli(args, threads);
    assert!(
        out.status.success(),
        "specmosaic {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

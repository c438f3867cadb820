use std::sync::Arc;

use ndarray::Array2;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Location of the DC bin after centering: (floor(H/2), floor(W/2)).
#[inline]
pub fn dc_bin(h: usize, w: usize) -> (usize, usize) {
    (h / 2, w / 2)
}

/// Reusable row/column FFT plans for one map size.
pub struct SpectrumPlan {
    h: usize,
    w: usize,
    rows: Arc<dyn Fft<f64>>,
    cols: Arc<dyn Fft<f64>>,
}

impl SpectrumPlan {
    pub fn new(h: usize, w: usize) -> Self {
        assert!(h > 0 && w > 0, "spectrum of an empty map");
        let mut planner = FftPlanner::new();
        Self {
            h,
            w,
            rows: planner.plan_fft_forward(w),
            cols: planner.plan_fft_forward(h),
        }
    }

    /// Unnormalized forward 2D DFT of a row-major plane, DC moved to the center.
    pub fn centered(&self, plane: impl Iterator<Item = f64>) -> Array2<Complex64> {
        let (h, w) = (self.h, self.w);
        let mut buf: Vec<Complex64> = plane.map(|x| Complex64::new(x, 0.0)).collect();
        assert_eq!(buf.len(), h * w, "plane size does not match plan");

        // rows are contiguous; columns become contiguous after a transpose
        self.rows.process(&mut buf);
        let mut cols = vec![Complex64::new(0.0, 0.0); h * w];
        for u in 0..h {
            for v in 0..w {
                cols[v * h + u] = buf[u * w + v];
            }
        }
        self.cols.process(&mut cols);

        let (dr, dc) = dc_bin(h, w);
        for u in 0..h {
            let su = (u + dr) % h;
            for v in 0..w {
                buf[su * w + (v + dc) % w] = cols[v * h + u];
            }
        }
        Array2::from_shape_vec((h, w), buf).expect("plan dims match buffer")
    }
}

pub fn centered_spectrum(band: &Array2<f64>) -> Array2<Complex64> {
    let (h, w) = band.dim();
    SpectrumPlan::new(h, w).centered(band.iter().copied())
}

/// Elementwise ln(|S| + epsilon).
pub fn log_magnitude(spectrum: &Array2<Complex64>, epsilon: f64) -> Array2<f64> {
    spectrum.mapv(|s| (s.norm() + epsilon).ln())
}

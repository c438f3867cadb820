use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Periodic N×N spectral filter layout. Each cell of one period holds a
/// distinct band index, so a pattern with period N samples N² bands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PatternRepr", into = "PatternRepr")]
pub struct SfaPattern {
    period: usize,
    band_at: Vec<usize>,
    // inverse of band_at: band -> cell index
    cell_of: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PatternRepr {
    period: usize,
    band_at: Vec<usize>,
}

impl TryFrom<PatternRepr> for SfaPattern {
    type Error = Error;

    fn try_from(r: PatternRepr) -> Result<Self> {
        SfaPattern::new(r.period, r.band_at)
    }
}

impl From<SfaPattern> for PatternRepr {
    fn from(p: SfaPattern) -> Self {
        PatternRepr {
            period: p.period,
            band_at: p.band_at,
        }
    }
}

impl SfaPattern {
    /// `band_at` lists band indices for the period×period cells in row-major order.
    pub fn new(period: usize, band_at: Vec<usize>) -> Result<Self> {
        if period == 0 {
            return Err(Error::Pattern("period must be at least 1".into()));
        }
        let n = period * period;
        if band_at.len() != n {
            return Err(Error::Pattern(format!(
                "period {period} needs {n} cells, got {}",
                band_at.len()
            )));
        }
        let mut cell_of = vec![usize::MAX; n];
        for (cell, &band) in band_at.iter().enumerate() {
            if band >= n {
                return Err(Error::Pattern(format!(
                    "band {band} at cell {cell} is out of range 0..{n}"
                )));
            }
            if cell_of[band] != usize::MAX {
                return Err(Error::Pattern(format!(
                    "band {band} appears more than once"
                )));
            }
            cell_of[band] = cell;
        }
        Ok(Self {
            period,
            band_at,
            cell_of,
        })
    }

    /// Default layout: band k sits at cell (k / N, k % N).
    pub fn row_major(period: usize) -> Result<Self> {
        Self::new(period, (0..period * period).collect())
    }

    #[inline]
    pub fn period(&self) -> usize {
        self.period
    }

    #[inline]
    pub fn bands(&self) -> usize {
        self.period * self.period
    }

    pub fn band_at_cells(&self) -> &[usize] {
        &self.band_at
    }

    /// Band assigned to period cell (i, j).
    #[inline]
    pub fn band_at(&self, i: usize, j: usize) -> usize {
        self.band_at[i * self.period + j]
    }

    /// Period cell (i, j) holding `band`.
    #[inline]
    pub fn cell_of(&self, band: usize) -> (usize, usize) {
        let c = self.cell_of[band];
        (c / self.period, c % self.period)
    }

    /// Parses `NxN` (row-major layout).
    pub fn parse_square(spec: &str) -> Option<Result<Self>> {
        let (a, b) = spec.split_once(['x', 'X'])?;
        let a: usize = a.trim().parse().ok()?;
        let b: usize = b.trim().parse().ok()?;
        if a != b {
            return Some(Err(Error::Pattern(format!(
                "pattern must be square, got {a}x{b}"
            ))));
        }
        Some(Self::row_major(a))
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{FuzzyError, Result};
use crate::TAU_ORD;

/// Closed interval `[lo, hi]`, one factor of a level set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) {
            return Err(FuzzyError::NonFinite { cell: 0, level: 0 });
        }
        if lo > hi + TAU_ORD {
            return Err(FuzzyError::OrderViolation(format!(
                "interval lower end {lo} exceeds upper end {hi}"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(x: f64) -> Self {
        Self { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            lo: self.lo + other.lo,
            hi: self.hi + other.hi,
        }
    }

    pub fn scale(&self, k: f64) -> Self {
        if k >= 0.0 {
            Self {
                lo: k * self.lo,
                hi: k * self.hi,
            }
        } else {
            Self {
                lo: k * self.hi,
                hi: k * self.lo,
            }
        }
    }
}

/// Generalized Hukuhara difference of two intervals.
///
/// The result `w` satisfies `a = b + w` or `b = a + (-1) w`.
pub fn gh_diff_interval(a: &Interval, b: &Interval) -> Interval {
    let dl = a.lo - b.lo;
    let dh = a.hi - b.hi;
    Interval {
        lo: dl.min(dh),
        hi: dl.max(dh),
    }
}

/// One r-level set: a product of `n` closed intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelBox {
    pub cells: Vec<Interval>,
}

impl LevelBox {
    pub fn new(cells: Vec<Interval>) -> Self {
        Self { cells }
    }

    pub fn dim(&self) -> usize {
        self.cells.len()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self, other)?;
        Ok(Self {
            cells: self
                .cells
                .iter()
                .zip(&other.cells)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            cells: self.cells.iter().map(|c| c.scale(k)).collect(),
        }
    }
}

fn check_dims(a: &LevelBox, b: &LevelBox) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(FuzzyError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// Box metric: largest absolute deviation over all `2n` endpoints.
pub fn d_l(a: &LevelBox, b: &LevelBox) -> Result<f64> {
    check_dims(a, b)?;
    Ok(a.cells
        .iter()
        .zip(&b.cells)
        .map(|(x, y)| (x.lo - y.lo).abs().max((x.hi - y.hi).abs()))
        .fold(0.0, f64::max))
}

use std::sync::Arc;

use serde::ser::{Serialize, SerializeStruct, Serializer};

use super::grid::{same_grid, LevelGrid};
use super::interval::{Interval, LevelBox};
use crate::error::{FuzzyError, Result};
use crate::TAU_ORD;

/// Which endpoint of a level interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

/// Location and size of a level-set defect found during validation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Defect {
    pub cell: usize,
    pub level: usize,
    pub side: Side,
    pub excess: f64,
}

/// A fuzzy n-cell number sampled on a level grid.
///
/// Cell `i` at level index `k` is the interval `[lower(i,k), upper(i,k)]`.
/// Lower endpoints are nondecreasing in `k`, upper endpoints nonincreasing,
/// and the top level is a nonempty interval.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyNCell {
    grid: Arc<LevelGrid>,
    n: usize,
    // cell-major: index i * L + k
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl FuzzyNCell {
    /// Builds a number from per-cell endpoint curves.
    ///
    /// Monotonicity defects no larger than `TAU_ORD` are repaired by a running
    /// max/min; anything larger is rejected with `InvalidLevelSets`.
    pub fn from_endpoints(
        grid: Arc<LevelGrid>,
        lower: Vec<Vec<f64>>,
        upper: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(FuzzyError::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        let len = grid.len();
        for row in lower.iter().chain(&upper) {
            if row.len() != len {
                return Err(FuzzyError::DimensionMismatch {
                    expected: len,
                    found: row.len(),
                });
            }
        }
        let n = lower.len();
        let lo = lower.into_iter().flatten().collect();
        let hi = upper.into_iter().flatten().collect();
        Self::from_flat(grid, n, lo, hi).map_err(invalid_level_sets)
    }

    /// Builds a number by sampling `f(cell, r) -> (lower, upper)` at every level.
    pub fn from_fn(
        grid: Arc<LevelGrid>,
        n: usize,
        mut f: impl FnMut(usize, f64) -> (f64, f64),
    ) -> Result<Self> {
        let len = grid.len();
        let mut lo = Vec::with_capacity(n * len);
        let mut hi = Vec::with_capacity(n * len);
        for i in 0..n {
            for &r in grid.levels() {
                let (a, b) = f(i, r);
                lo.push(a);
                hi.push(b);
            }
        }
        Self::from_flat(grid, n, lo, hi).map_err(invalid_level_sets)
    }

    pub(crate) fn from_flat(
        grid: Arc<LevelGrid>,
        n: usize,
        mut lo: Vec<f64>,
        mut hi: Vec<f64>,
    ) -> std::result::Result<Self, RawDefect> {
        let len = grid.len();
        debug_assert_eq!(lo.len(), n * len);
        debug_assert_eq!(hi.len(), n * len);
        for (idx, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(RawDefect::NonFinite {
                    cell: idx / len,
                    level: idx % len,
                });
            }
        }
        repair(n, len, &mut lo, &mut hi).map_err(RawDefect::Level)?;
        Ok(Self { grid, n, lo, hi })
    }

    /// Crisp embedding of a real vector: every level is the point `a`.
    pub fn crisp(a: &[f64], grid: Arc<LevelGrid>) -> Self {
        let len = grid.len();
        let lo: Vec<f64> = a
            .iter()
            .flat_map(|&x| std::iter::repeat_n(x, len))
            .collect();
        Self {
            grid,
            n: a.len(),
            hi: lo.clone(),
            lo,
        }
    }

    pub fn zero(n: usize, grid: Arc<LevelGrid>) -> Self {
        Self::crisp(&vec![0.0; n], grid)
    }

    /// Triangular 1-cell number `(l, c, u)`: levels `[l + (c-l) r, u - (u-c) r]`.
    pub fn triangular(l: f64, c: f64, u: f64, grid: Arc<LevelGrid>) -> Result<Self> {
        if !(l <= c && c <= u) {
            return Err(FuzzyError::OrderViolation(format!(
                "triangular number needs l <= c <= u, got ({l}, {c}, {u})"
            )));
        }
        Self::from_fn(grid, 1, |_, r| (l + (c - l) * r, u - (u - c) * r))
    }

    /// Rectangular 1-cell number: the same interval at every level.
    pub fn rectangular(lo: f64, hi: f64, grid: Arc<LevelGrid>) -> Result<Self> {
        Interval::new(lo, hi)?;
        Self::from_fn(grid, 1, |_, _| (lo, hi))
    }

    pub fn grid(&self) -> &Arc<LevelGrid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> usize {
        self.grid.len()
    }

    pub fn lower(&self, i: usize, k: usize) -> f64 {
        self.lo[i * self.grid.len() + k]
    }

    pub fn upper(&self, i: usize, k: usize) -> f64 {
        self.hi[i * self.grid.len() + k]
    }

    pub fn endpoint(&self, i: usize, k: usize, side: Side) -> f64 {
        match side {
            Side::Lower => self.lower(i, k),
            Side::Upper => self.upper(i, k),
        }
    }

    pub fn lower_curve(&self, i: usize) -> &[f64] {
        let len = self.grid.len();
        &self.lo[i * len..(i + 1) * len]
    }

    pub fn upper_curve(&self, i: usize) -> &[f64] {
        let len = self.grid.len();
        &self.hi[i * len..(i + 1) * len]
    }

    pub(crate) fn raw(&self) -> (&[f64], &[f64]) {
        (&self.lo, &self.hi)
    }

    pub fn level_box(&self, k: usize) -> LevelBox {
        LevelBox::new(
            (0..self.n)
                .map(|i| Interval {
                    lo: self.lower(i, k),
                    hi: self.upper(i, k),
                })
                .collect(),
        )
    }

    /// Width `u_i^+(r_k) - u_i^-(r_k)` of cell `i` at level index `k`.
    pub fn level_length(&self, i: usize, k: usize) -> Result<f64> {
        if i >= self.n {
            return Err(FuzzyError::IndexOutOfRange {
                what: "cell",
                index: i,
                limit: self.n,
            });
        }
        if k >= self.grid.len() {
            return Err(FuzzyError::IndexOutOfRange {
                what: "level",
                index: k,
                limit: self.grid.len(),
            });
        }
        Ok(self.upper(i, k) - self.lower(i, k))
    }

    pub fn is_crisp(&self, tol: f64) -> bool {
        self.lo.iter().zip(&self.hi).all(|(a, b)| (b - a).abs() <= tol)
            && self.lo.chunks(self.grid.len()).all(|c| {
                let first = c[0];
                c.iter().all(|x| (x - first).abs() <= tol)
            })
    }

    /// Re-samples onto another grid by linear interpolation of endpoints.
    pub fn resample(&self, grid: Arc<LevelGrid>) -> Result<Self> {
        let src = &self.grid;
        Self::from_fn(grid, self.n, |i, r| {
            let k = src.bracket(r);
            let (r0, r1) = (src.level(k), src.level(k + 1));
            let w = ((r - r0) / (r1 - r0)).clamp(0.0, 1.0);
            let lerp = |a: f64, b: f64| a + (b - a) * w;
            (
                lerp(self.lower(i, k), self.lower(i, k + 1)),
                lerp(self.upper(i, k), self.upper(i, k + 1)),
            )
        })
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if !same_grid(&self.grid, &other.grid) {
            return Err(FuzzyError::GridMismatch);
        }
        if self.n != other.n {
            return Err(FuzzyError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum RawDefect {
    NonFinite { cell: usize, level: usize },
    Level(Defect),
}

pub(crate) fn invalid_level_sets(d: RawDefect) -> FuzzyError {
    match d {
        RawDefect::NonFinite { cell, level } => FuzzyError::NonFinite { cell, level },
        RawDefect::Level(d) => FuzzyError::InvalidLevelSets {
            cell: d.cell,
            level: d.level,
            side: d.side,
            excess: d.excess,
        },
    }
}

fn repair(n: usize, len: usize, lo: &mut [f64], hi: &mut [f64]) -> std::result::Result<(), Defect> {
    for i in 0..n {
        let base = i * len;
        let mut run = lo[base];
        for k in 1..len {
            let x = lo[base + k];
            if x < run {
                if run - x > TAU_ORD {
                    return Err(Defect {
                        cell: i,
                        level: k,
                        side: Side::Lower,
                        excess: run - x,
                    });
                }
                lo[base + k] = run;
            } else {
                run = x;
            }
        }
        let mut run = hi[base];
        for k in 1..len {
            let x = hi[base + k];
            if x > run {
                if x - run > TAU_ORD {
                    return Err(Defect {
                        cell: i,
                        level: k,
                        side: Side::Upper,
                        excess: x - run,
                    });
                }
                hi[base + k] = run;
            } else {
                run = x;
            }
        }
        let top = base + len - 1;
        if lo[top] > hi[top] + TAU_ORD {
            return Err(Defect {
                cell: i,
                level: len - 1,
                side: Side::Lower,
                excess: lo[top] - hi[top],
            });
        }
    }
    Ok(())
}

impl Serialize for FuzzyNCell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let lower: Vec<&[f64]> = (0..self.n).map(|i| self.lower_curve(i)).collect();
        let upper: Vec<&[f64]> = (0..self.n).map(|i| self.upper_curve(i)).collect();
        let mut st = s.serialize_struct("FuzzyNCell", 4)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("levels", self.grid.levels())?;
        st.serialize_field("lower", &lower)?;
        st.serialize_field("upper", &upper)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid3() -> Arc<LevelGrid> {
        LevelGrid::uniform(3).unwrap()
    }

    #[test]
    fn crisp_is_constant_point() {
        let g = grid3();
        let u = FuzzyNCell::crisp(&[0.0], g.clone());
        for k in 0..3 {
            assert_eq!(u.lower(0, k), 0.0);
            assert_eq!(u.upper(0, k), 0.0);
        }
        let v = FuzzyNCell::crisp(&[2.0, -1.0], LevelGrid::standard());
        for k in 0..101 {
            assert_eq!(v.level_box(k).cells, vec![Interval::point(2.0), Interval::point(-1.0)]);
        }
    }

    #[test]
    fn triangular_half_level() {
        let g = LevelGrid::uniform(11).unwrap();
        let u = FuzzyNCell::triangular(0.0, 4.0, 8.0, g).unwrap();
        assert_eq!(u.lower(0, 5), 2.0);
        assert_eq!(u.upper(0, 5), 6.0);
        assert_eq!(u.level_length(0, 0).unwrap(), 8.0);
        assert_eq!(u.level_length(0, 10).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_triangle_is_crisp() {
        let g = grid3();
        let t = FuzzyNCell::triangular(0.0, 0.0, 0.0, g.clone()).unwrap();
        assert_eq!(t, FuzzyNCell::crisp(&[0.0], g));
    }

    #[test]
    fn symmetric_triangle_matches_formula() {
        let g = LevelGrid::standard();
        let t = FuzzyNCell::triangular(-1.0, 0.0, 1.0, g.clone()).unwrap();
        for (k, &r) in g.levels().iter().enumerate() {
            assert!((t.lower(0, k) - (r - 1.0)).abs() < 1e-15);
            assert!((t.upper(0, k) - (1.0 - r)).abs() < 1e-15);
        }
    }

    #[test]
    fn triangular_rejects_unordered() {
        assert!(matches!(
            FuzzyNCell::triangular(1.0, 0.0, 2.0, grid3()),
            Err(FuzzyError::OrderViolation(_))
        ));
    }

    #[test]
    fn tiny_defects_are_repaired_large_rejected() {
        let g = grid3();
        let ok = FuzzyNCell::from_endpoints(
            g.clone(),
            vec![vec![0.0, 0.5, 0.5 - 1e-12]],
            vec![vec![1.0, 1.0 + 1e-12, 0.8]],
        )
        .unwrap();
        assert_eq!(ok.lower(0, 2), 0.5);
        assert_eq!(ok.upper(0, 1), 1.0);

        let bad = FuzzyNCell::from_endpoints(g.clone(), vec![vec![0.0, 0.5, 0.4]], vec![vec![1.0, 1.0, 1.0]]);
        assert!(matches!(
            bad,
            Err(FuzzyError::InvalidLevelSets { cell: 0, level: 2, side: Side::Lower, .. })
        ));
        let crossed = FuzzyNCell::from_endpoints(g, vec![vec![0.0, 0.5, 0.9]], vec![vec![1.0, 0.8, 0.7]]);
        assert!(matches!(crossed, Err(FuzzyError::InvalidLevelSets { level: 2, .. })));
    }

    #[test]
    fn level_length_index_errors() {
        let u = FuzzyNCell::crisp(&[1.0], grid3());
        assert_eq!(u.level_length(0, 1).unwrap(), 0.0);
        assert!(matches!(u.level_length(1, 0), Err(FuzzyError::IndexOutOfRange { what: "cell", .. })));
        assert!(matches!(u.level_length(0, 3), Err(FuzzyError::IndexOutOfRange { what: "level", .. })));
    }

    #[test]
    fn resample_keeps_linear_numbers() {
        let fine = LevelGrid::standard();
        let coarse = LevelGrid::uniform(5).unwrap();
        let u = FuzzyNCell::triangular(0.0, 4.0, 8.0, coarse).unwrap();
        let v = u.resample(fine.clone()).unwrap();
        let w = FuzzyNCell::triangular(0.0, 4.0, 8.0, fine).unwrap();
        for k in 0..101 {
            assert!((v.lower(0, k) - w.lower(0, k)).abs() < 1e-12);
            assert!((v.upper(0, k) - w.upper(0, k)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_non_finite() {
        let r = FuzzyNCell::from_fn(grid3(), 1, |_, _| (f64::NAN, 0.0));
        assert!(matches!(r, Err(FuzzyError::NonFinite { .. })));
    }
}

use std::sync::Arc;

use super::grid::{same_grid, LevelGrid};
use super::number::{FuzzyNCell, RawDefect};
use crate::error::{FuzzyError, Result};

impl FuzzyNCell {
    /// Levelwise Minkowski sum.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let (al, ah) = self.raw();
        let (bl, bh) = other.raw();
        let lo = al.iter().zip(bl).map(|(a, b)| a + b).collect();
        let hi = ah.iter().zip(bh).map(|(a, b)| a + b).collect();
        FuzzyNCell::from_flat(self.grid().clone(), self.dim(), lo, hi).map_err(not_representable)
    }

    /// Multiplication by a real; endpoints swap when `k < 0`.
    pub fn scale(&self, k: f64) -> Self {
        let (al, ah) = self.raw();
        let (lo, hi): (Vec<f64>, Vec<f64>) = if k >= 0.0 {
            (al.iter().map(|a| k * a).collect(), ah.iter().map(|a| k * a).collect())
        } else {
            (ah.iter().map(|a| k * a).collect(), al.iter().map(|a| k * a).collect())
        };
        FuzzyNCell::from_flat(self.grid().clone(), self.dim(), lo, hi)
            .expect("scaling preserves level-set legality")
    }

    pub fn neg(&self) -> Self {
        self.scale(-1.0)
    }

    /// Levelwise product: each cell is the hull of the four endpoint products.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let (al, ah) = self.raw();
        let (bl, bh) = other.raw();
        let mut lo = Vec::with_capacity(al.len());
        let mut hi = Vec::with_capacity(al.len());
        for idx in 0..al.len() {
            let p = [
                al[idx] * bl[idx],
                al[idx] * bh[idx],
                ah[idx] * bl[idx],
                ah[idx] * bh[idx],
            ];
            lo.push(p.iter().copied().fold(f64::INFINITY, f64::min));
            hi.push(p.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        }
        FuzzyNCell::from_flat(self.grid().clone(), self.dim(), lo, hi).map_err(|d| match d {
            RawDefect::Level(d) => FuzzyError::MonotonicityViolation {
                cell: d.cell,
                level: d.level,
                side: d.side,
                excess: d.excess,
            },
            RawDefect::NonFinite { cell, level } => FuzzyError::NonFinite { cell, level },
        })
    }

    /// Generalized difference `self ⊖_g other`.
    ///
    /// At each level the lower endpoint is the smallest, and the upper the
    /// largest, of the endpoint differences taken over all levels at or
    /// above it. The result is re-validated; a failure means the difference
    /// does not exist as a fuzzy n-cell number.
    pub fn g_diff(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let len = self.levels();
        let n = self.dim();
        let (al, ah) = self.raw();
        let (bl, bh) = other.raw();
        let mut lo = vec![0.0; n * len];
        let mut hi = vec![0.0; n * len];
        for i in 0..n {
            let base = i * len;
            let mut run_min = f64::INFINITY;
            let mut run_max = f64::NEG_INFINITY;
            for k in (0..len).rev() {
                let dl = al[base + k] - bl[base + k];
                let dh = ah[base + k] - bh[base + k];
                run_min = run_min.min(dl.min(dh));
                run_max = run_max.max(dl.max(dh));
                lo[base + k] = run_min;
                hi[base + k] = run_max;
            }
        }
        FuzzyNCell::from_flat(self.grid().clone(), n, lo, hi).map_err(not_representable)
    }
}

pub(crate) fn not_representable(d: RawDefect) -> FuzzyError {
    match d {
        RawDefect::NonFinite { cell, level } => {
            FuzzyError::NotRepresentable(format!("non-finite endpoint at cell {cell}, level {level}"))
        }
        RawDefect::Level(d) => FuzzyError::NotRepresentable(format!(
            "{:?} endpoint of cell {} breaks level-set legality at level {} by {:e}",
            d.side, d.cell, d.level, d.excess
        )),
    }
}

/// An m-tuple of fuzzy n-cell numbers sharing one grid and one `n`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(transparent)]
pub struct FuzzyVector {
    components: Vec<FuzzyNCell>,
}

impl FuzzyVector {
    pub fn new(components: Vec<FuzzyNCell>) -> Result<Self> {
        if let Some(first) = components.first() {
            for c in &components[1..] {
                first.check_compatible(c)?;
            }
        }
        Ok(Self { components })
    }

    pub fn zero(m: usize, n: usize, grid: Arc<LevelGrid>) -> Self {
        Self {
            components: (0..m).map(|_| FuzzyNCell::zero(n, grid.clone())).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[FuzzyNCell] {
        &self.components
    }

    pub fn get(&self, j: usize) -> &FuzzyNCell {
        &self.components[j]
    }

    pub fn into_components(self) -> Vec<FuzzyNCell> {
        self.components
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return Err(FuzzyError::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        let comps = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { components: comps })
    }

    pub fn scale(&self, k: f64) -> Self {
        Self {
            components: self.components.iter().map(|c| c.scale(k)).collect(),
        }
    }

    /// `t · v = Σ_j t_j v_j`.
    pub fn dot_real(&self, t: &[f64]) -> Result<FuzzyNCell> {
        if t.len() != self.len() {
            return Err(FuzzyError::DimensionMismatch {
                expected: self.len(),
                found: t.len(),
            });
        }
        let mut iter = self.components.iter().zip(t);
        let (c0, &t0) = iter.next().ok_or(FuzzyError::DimensionMismatch {
            expected: 1,
            found: 0,
        })?;
        let mut acc = c0.scale(t0);
        for (c, &tj) in iter {
            acc = acc.add(&c.scale(tj))?;
        }
        Ok(acc)
    }

    pub(crate) fn check_against(&self, grid: &Arc<LevelGrid>, n: usize) -> Result<()> {
        for c in &self.components {
            if !same_grid(c.grid(), grid) {
                return Err(FuzzyError::GridMismatch);
            }
            if c.dim() != n {
                return Err(FuzzyError::DimensionMismatch {
                    expected: n,
                    found: c.dim(),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g() -> Arc<LevelGrid> {
        LevelGrid::standard()
    }

    fn curve(g: &Arc<LevelGrid>, f: impl Fn(f64) -> (f64, f64)) -> FuzzyNCell {
        FuzzyNCell::from_fn(g.clone(), 1, |_, r| f(r)).unwrap()
    }

    fn assert_levels(u: &FuzzyNCell, f: impl Fn(f64) -> (f64, f64), tol: f64) {
        for (k, &r) in u.grid().levels().iter().enumerate() {
            let (a, b) = f(r);
            assert!((u.lower(0, k) - a).abs() <= tol, "lower at r={r}: {} vs {a}", u.lower(0, k));
            assert!((u.upper(0, k) - b).abs() <= tol, "upper at r={r}: {} vs {b}", u.upper(0, k));
        }
    }

    #[test]
    fn add_doubles_triangle() {
        let g = g();
        let u = curve(&g, |r| (r - 1.0, 1.0 - r));
        let s = u.add(&u).unwrap();
        assert_levels(&s, |r| (2.0 * r - 2.0, 2.0 - 2.0 * r), 1e-15);
        assert_eq!(u.add(&FuzzyNCell::zero(1, g)).unwrap(), u);
    }

    #[test]
    fn add_rejects_foreign_grid() {
        let u = FuzzyNCell::zero(1, LevelGrid::uniform(5).unwrap());
        let v = FuzzyNCell::zero(1, LevelGrid::uniform(7).unwrap());
        assert!(matches!(u.add(&v), Err(FuzzyError::GridMismatch)));
    }

    #[test]
    fn negative_scale_swaps_endpoints() {
        let g = g();
        let u = curve(&g, |r| (r, 2.0 - r));
        assert_eq!(u.scale(1.0), u);
        assert_levels(&u.scale(-1.0), |r| (r - 2.0, -r), 1e-15);
    }

    #[test]
    fn mul_by_crisp_two() {
        let g = g();
        let u = curve(&g, |r| (r, 2.0 - r));
        let two = FuzzyNCell::crisp(&[2.0], g.clone());
        assert_levels(&u.mul(&two).unwrap(), |r| (2.0 * r, 4.0 - 2.0 * r), 1e-15);
        let zero = FuzzyNCell::zero(1, g);
        assert_eq!(u.mul(&zero).unwrap(), zero);
    }

    #[test]
    fn mul_square_of_symmetric_triangle() {
        let g = g();
        let u = curve(&g, |r| (r - 1.0, 1.0 - r));
        let sq = u.mul(&u).unwrap();
        assert_levels(&sq, |r| (-(1.0 - r) * (1.0 - r), (1.0 - r) * (1.0 - r)), 1e-15);
    }

    #[test]
    fn g_diff_self_is_zero() {
        let g = g();
        let u = curve(&g, |r| (r * r, 3.0 - r));
        assert_eq!(u.g_diff(&u).unwrap(), FuzzyNCell::zero(1, g));
    }

    #[test]
    fn g_diff_kinked_function_example() {
        let g = g();
        for z in [-2.0, -0.5, 0.0, 0.25, 3.0] {
            let a: f64 = z;
            let fz = curve(&g, |r| (r * (a.abs() + 1.0), (2.0 - r) * (a.abs() + 1.0)));
            let f0 = curve(&g, |r| (r, 2.0 - r));
            let d = fz.g_diff(&f0).unwrap();
            assert_levels(&d, |r| (r * a.abs(), (2.0 - r) * a.abs()), 1e-14);
        }
    }

    #[test]
    fn g_diff_uses_suffix_envelope() {
        // differences 0 at r=0, 1 at r=0.5, 0.5 at r=1 on a 3-level grid
        let g = LevelGrid::uniform(3).unwrap();
        let u = FuzzyNCell::from_endpoints(g.clone(), vec![vec![0.0, 1.0, 1.5]], vec![vec![4.0, 4.0, 4.0]]).unwrap();
        let v = FuzzyNCell::from_endpoints(g.clone(), vec![vec![0.0, 0.0, 1.0]], vec![vec![4.0, 3.0, 2.0]]).unwrap();
        let d = u.g_diff(&v).unwrap();
        // lower: suffix min of min(dl, dh): k=2 min(0.5,2)=0.5; k=1 min(1,1)=1 -> 0.5; k=0 min(0,0)=0
        assert_eq!(d.lower_curve(0), &[0.0, 0.5, 0.5]);
        // upper: suffix max of max(dl, dh): k=2 2; k=1 max(1,1)=1 -> 2; k=0 0 -> 2
        assert_eq!(d.upper_curve(0), &[2.0, 2.0, 2.0]);
    }

    #[test]
    fn dot_real_cases() {
        let g = g();
        let u = curve(&g, |r| (r, 2.0 - r));
        let v = FuzzyVector::new(vec![u.clone()]).unwrap();
        assert_levels(&v.dot_real(&[3.0]).unwrap(), |r| (3.0 * r, 6.0 - 3.0 * r), 1e-15);
        assert_eq!(v.dot_real(&[0.0]).unwrap(), FuzzyNCell::zero(1, g.clone()));
        let w = FuzzyVector::new(vec![FuzzyNCell::zero(1, g.clone()), u.clone()]).unwrap();
        assert_eq!(w.dot_real(&[5.0, 1.0]).unwrap(), u);
        assert!(matches!(w.dot_real(&[1.0]), Err(FuzzyError::DimensionMismatch { .. })));
    }

    #[test]
    fn vector_rejects_mixed_dims() {
        let g = g();
        let a = FuzzyNCell::zero(1, g.clone());
        let b = FuzzyNCell::zero(2, g);
        assert!(FuzzyVector::new(vec![a, b]).is_err());
    }
}

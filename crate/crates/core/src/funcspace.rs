//! Fuzzy n-cell number-valued functions `F: M ⊆ ℝ^m → L(Eⁿ)`.
//!
//! A function is described by its endpoint evaluators `F_i^-(r, t)` and
//! `F_i^+(r, t)`, either as parsed expressions or native closures, or by a
//! built-in family (fuzzy quadratic, linear combinations). Every evaluation
//! re-validates the level sets it produces.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{FuzzyError, Result};
use crate::expr::{parse_expr, ExprProgram};
use crate::levelsets::{same_grid, FuzzyNCell, FuzzyVector, LevelGrid};
use crate::TAU_ORD;

/// Smallest eigenvalue accepted for a positive semidefinite end matrix.
pub const PSD_TOL: f64 = 1e-9;

/// Axis-aligned box `∏ [lo_j, hi_j]`; bounds may be infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    bounds: Vec<(f64, f64)>,
}

impl DomainBox {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        for &(lo, hi) in &bounds {
            if lo.is_nan() || hi.is_nan() || lo > hi {
                return Err(FuzzyError::InvariantViolation(format!(
                    "invalid domain bounds [{lo}, {hi}]"
                )));
            }
        }
        Ok(Self { bounds })
    }

    pub fn cube(m: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![(lo, hi); m])
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn is_bounded(&self) -> bool {
        self.bounds.iter().all(|(a, b)| a.is_finite() && b.is_finite())
    }

    pub fn contains(&self, t: &[f64]) -> bool {
        t.len() == self.bounds.len()
            && t
                .iter()
                .zip(&self.bounds)
                .all(|(x, (lo, hi))| *x >= *lo && *x <= *hi)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(FuzzyError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Self::new(
            self.bounds
                .iter()
                .zip(&other.bounds)
                .map(|(a, b)| (a.0.max(b.0), a.1.min(b.1)))
                .collect(),
        )
    }
}

pub type NativeEndpoints = Arc<dyn Fn(usize, f64, &[f64]) -> (f64, f64) + Send + Sync>;

#[derive(Clone)]
enum Source {
    Exprs {
        lower: Vec<ExprProgram>,
        upper: Vec<ExprProgram>,
    },
    Native(NativeEndpoints),
    Constant(FuzzyNCell),
    Quadratic {
        a: FuzzyMatrix,
        b: FuzzyVector,
    },
    Combination(Vec<(f64, FuzzyFunction)>),
}

#[derive(Clone)]
pub struct FuzzyFunction {
    m: usize,
    n: usize,
    grid: Arc<LevelGrid>,
    domain: Option<DomainBox>,
    source: Arc<Source>,
}

impl fmt::Debug for FuzzyFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &*self.source {
            Source::Exprs { lower, upper } => format!(
                "exprs(lower={:?}, upper={:?})",
                lower.iter().map(|e| e.source()).collect::<Vec<_>>(),
                upper.iter().map(|e| e.source()).collect::<Vec<_>>()
            ),
            Source::Native(_) => "native".into(),
            Source::Constant(_) => "constant".into(),
            Source::Quadratic { .. } => "quadratic".into(),
            Source::Combination(parts) => format!("combination({} terms)", parts.len()),
        };
        f.debug_struct("FuzzyFunction")
            .field("m", &self.m)
            .field("n", &self.n)
            .field("levels", &self.grid.len())
            .field("domain", &self.domain)
            .field("kind", &kind)
            .finish()
    }
}

impl FuzzyFunction {
    /// Endpoint expressions over `t1..tm` and `r`, one pair per cell.
    pub fn from_exprs(m: usize, grid: Arc<LevelGrid>, lower: &[&str], upper: &[&str]) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(FuzzyError::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        let parse = |v: &[&str]| v.iter().map(|s| parse_expr(s, m)).collect::<Result<Vec<_>>>();
        Ok(Self {
            m,
            n: lower.len(),
            grid,
            domain: None,
            source: Arc::new(Source::Exprs {
                lower: parse(lower)?,
                upper: parse(upper)?,
            }),
        })
    }

    pub fn from_programs(
        m: usize,
        grid: Arc<LevelGrid>,
        lower: Vec<ExprProgram>,
        upper: Vec<ExprProgram>,
    ) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(FuzzyError::DimensionMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if let Some(p) = lower.iter().chain(&upper).find(|p| p.dim() != m) {
            return Err(FuzzyError::DimensionMismatch {
                expected: m,
                found: p.dim(),
            });
        }
        Ok(Self {
            m,
            n: lower.len(),
            grid,
            domain: None,
            source: Arc::new(Source::Exprs { lower, upper }),
        })
    }

    /// Native evaluator `f(cell, r, t) -> (lower, upper)`.
    pub fn from_fn(
        m: usize,
        n: usize,
        grid: Arc<LevelGrid>,
        f: impl Fn(usize, f64, &[f64]) -> (f64, f64) + Send + Sync + 'static,
    ) -> Self {
        Self {
            m,
            n,
            grid,
            domain: None,
            source: Arc::new(Source::Native(Arc::new(f))),
        }
    }

    pub fn constant(value: FuzzyNCell, m: usize) -> Self {
        Self {
            m,
            n: value.dim(),
            grid: value.grid().clone(),
            domain: None,
            source: Arc::new(Source::Constant(value)),
        }
    }

    /// `F(x) = ½ xᵀAx + bᵀx` on the nonnegative orthant.
    pub fn quadratic(a: FuzzyMatrix, b: FuzzyVector) -> Result<Self> {
        let m = a.dim();
        if b.len() != m {
            return Err(FuzzyError::DimensionMismatch {
                expected: m,
                found: b.len(),
            });
        }
        b.check_against(a.grid(), 1)?;
        Ok(Self {
            m,
            n: 1,
            grid: a.grid().clone(),
            domain: Some(DomainBox::cube(m, 0.0, f64::INFINITY)?),
            source: Arc::new(Source::Quadratic { a, b }),
        })
    }

    /// `Σ_j c_j F_j`; every term must share `m`, `n` and the grid.
    pub fn linear_combination(terms: Vec<(f64, FuzzyFunction)>) -> Result<Self> {
        let first = terms.first().ok_or(FuzzyError::DimensionMismatch {
            expected: 1,
            found: 0,
        })?;
        let (m, n, grid) = (first.1.m, first.1.n, first.1.grid.clone());
        let mut domain: Option<DomainBox> = None;
        for (_, f) in &terms {
            f.check_shape(m, n, &grid)?;
            if let Some(d) = &f.domain {
                domain = Some(match domain {
                    Some(acc) => acc.intersect(d)?,
                    None => d.clone(),
                });
            }
        }
        Ok(Self {
            m,
            n,
            grid,
            domain,
            source: Arc::new(Source::Combination(terms)),
        })
    }

    pub fn scaled(&self, lambda: f64) -> Self {
        Self::linear_combination(vec![(lambda, self.clone())]).expect("single term is consistent")
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        Self::linear_combination(vec![(1.0, self.clone()), (1.0, other.clone())])
    }

    /// Restricts the domain (intersecting with any existing restriction).
    pub fn with_domain(mut self, domain: DomainBox) -> Result<Self> {
        if domain.dim() != self.m {
            return Err(FuzzyError::DimensionMismatch {
                expected: self.m,
                found: domain.dim(),
            });
        }
        self.domain = Some(match &self.domain {
            Some(d) => d.intersect(&domain)?,
            None => domain,
        });
        Ok(self)
    }

    pub fn dim_in(&self) -> usize {
        self.m
    }

    pub fn dim_out(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> &Arc<LevelGrid> {
        &self.grid
    }

    pub fn domain(&self) -> Option<&DomainBox> {
        self.domain.as_ref()
    }

    pub fn in_domain(&self, t: &[f64]) -> bool {
        t.len() == self.m && self.domain.as_ref().is_none_or(|d| d.contains(t))
    }

    pub(crate) fn check_shape(&self, m: usize, n: usize, grid: &Arc<LevelGrid>) -> Result<()> {
        if self.m != m {
            return Err(FuzzyError::DimensionMismatch {
                expected: m,
                found: self.m,
            });
        }
        if self.n != n {
            return Err(FuzzyError::DimensionMismatch {
                expected: n,
                found: self.n,
            });
        }
        if !same_grid(&self.grid, grid) {
            return Err(FuzzyError::GridMismatch);
        }
        Ok(())
    }

    /// Samples `F(t)` at every grid level and validates the result.
    pub fn eval(&self, t: &[f64]) -> Result<FuzzyNCell> {
        if t.len() != self.m {
            return Err(FuzzyError::DimensionMismatch {
                expected: self.m,
                found: t.len(),
            });
        }
        if !self.in_domain(t) {
            return Err(FuzzyError::DomainViolation { point: t.to_vec() });
        }
        self.eval_unchecked(t)
    }

    fn eval_unchecked(&self, t: &[f64]) -> Result<FuzzyNCell> {
        match &*self.source {
            Source::Exprs { lower, upper } => FuzzyNCell::from_fn(self.grid.clone(), self.n, |i, r| {
                (lower[i].eval(r, t), upper[i].eval(r, t))
            }),
            Source::Native(f) => FuzzyNCell::from_fn(self.grid.clone(), self.n, |i, r| f(i, r, t)),
            Source::Constant(u) => Ok(u.clone()),
            Source::Quadratic { a, b } => {
                let mut acc = FuzzyNCell::zero(1, self.grid.clone());
                for k in 0..self.m {
                    for j in 0..self.m {
                        let w = 0.5 * t[k] * t[j];
                        if w != 0.0 {
                            acc = acc.add(&a.entry(k, j).scale(w))?;
                        }
                    }
                }
                acc.add(&b.dot_real(t)?)
            }
            Source::Combination(terms) => {
                let mut acc = FuzzyNCell::zero(self.n, self.grid.clone());
                for (c, f) in terms {
                    acc = acc.add(&f.eval(t)?.scale(*c))?;
                }
                Ok(acc)
            }
        }
    }
}

/// Square matrix of 1-cell fuzzy numbers, symmetric with positive
/// semidefinite end matrices `A^-(r)` and `A^+(r)` at every level.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyMatrix {
    dim: usize,
    entries: Vec<FuzzyNCell>,
}

impl FuzzyMatrix {
    pub fn new(rows: Vec<Vec<FuzzyNCell>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(FuzzyError::InvariantViolation("empty matrix".into()));
        }
        let grid = rows[0][0].grid().clone();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(FuzzyError::InvariantViolation(format!(
                    "matrix row has {} entries, expected {dim}",
                    row.len()
                )));
            }
            for e in row {
                if e.dim() != 1 {
                    return Err(FuzzyError::InvariantViolation(
                        "matrix entries must be 1-cell numbers".into(),
                    ));
                }
                if !same_grid(e.grid(), &grid) {
                    return Err(FuzzyError::GridMismatch);
                }
                entries.push(e);
            }
        }
        let a = Self { dim, entries };
        a.validate()?;
        Ok(a)
    }

    pub fn diagonal(diag: Vec<FuzzyNCell>) -> Result<Self> {
        let dim = diag.len();
        let grid = diag
            .first()
            .ok_or_else(|| FuzzyError::InvariantViolation("empty matrix".into()))?
            .grid()
            .clone();
        let mut rows = vec![vec![FuzzyNCell::zero(1, grid); dim]; dim];
        for (k, d) in diag.into_iter().enumerate() {
            rows[k][k] = d;
        }
        Self::new(rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> &Arc<LevelGrid> {
        self.entries[0].grid()
    }

    pub fn entry(&self, k: usize, j: usize) -> &FuzzyNCell {
        &self.entries[k * self.dim + j]
    }

    /// End matrix at level index `level`: lower endpoints if `upper` is false.
    pub fn end_matrix(&self, level: usize, upper: bool) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |k, j| {
            let e = self.entry(k, j);
            if upper {
                e.upper(0, level)
            } else {
                e.lower(0, level)
            }
        })
    }

    fn validate(&self) -> Result<()> {
        for k in 0..self.dim {
            for j in (k + 1)..self.dim {
                let (a, b) = (self.entry(k, j), self.entry(j, k));
                let asym = a
                    .raw()
                    .0
                    .iter()
                    .zip(b.raw().0)
                    .chain(a.raw().1.iter().zip(b.raw().1))
                    .any(|(x, y)| (x - y).abs() > TAU_ORD);
                if asym {
                    return Err(FuzzyError::InvariantViolation(format!(
                        "matrix is not symmetric at ({k}, {j})"
                    )));
                }
            }
        }
        for level in 0..self.grid().len() {
            for upper in [false, true] {
                let eig = SymmetricEigen::new(self.end_matrix(level, upper));
                let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
                if min < -PSD_TOL {
                    return Err(FuzzyError::InvariantViolation(format!(
                        "{} end matrix at level {} has eigenvalue {min:e}",
                        if upper { "upper" } else { "lower" },
                        self.grid().level(level)
                    )));
                }
            }
        }
        Ok(())
    }
}

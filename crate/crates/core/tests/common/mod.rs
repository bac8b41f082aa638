#![allow(dead_code)]

use std::sync::Arc;

use fno_core::funcspace::{DomainBox, FuzzyFunction};
use fno_core::levelsets::{FuzzyNCell, LevelGrid};
use proptest::prelude::*;

pub const LEVELS: usize = 21;

pub fn grid() -> Arc<LevelGrid> {
    LevelGrid::uniform(LEVELS).unwrap()
}

/// Unit draws needed for one cell.
pub const CELL_DRAWS: usize = 2 * LEVELS + 1;

/// Builds one cell from draws in `[0, 1)`: a core `[c, c + w]` and lower
/// (upper) curves descending (ascending) from it by random increments.
pub fn cell_from_unit(u: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let c = -5.0 + 10.0 * u[0];
    let w = 2.0 * u[1];
    let mut lo = vec![0.0; LEVELS];
    let mut hi = vec![0.0; LEVELS];
    lo[LEVELS - 1] = c;
    hi[LEVELS - 1] = c + w;
    for k in (0..LEVELS - 1).rev() {
        lo[k] = lo[k + 1] - 0.4 * u[2 + k];
        hi[k] = hi[k + 1] + 0.4 * u[2 + LEVELS - 1 + k];
    }
    (lo, hi)
}

pub fn number_from_unit(u: &[f64], n: usize) -> FuzzyNCell {
    let (lo, hi): (Vec<_>, Vec<_>) = u.chunks(CELL_DRAWS).take(n).map(cell_from_unit).unzip();
    FuzzyNCell::from_endpoints(grid(), lo, hi).unwrap()
}

pub fn number(n: usize) -> impl Strategy<Value = FuzzyNCell> {
    prop::collection::vec(0.0..1.0f64, n * CELL_DRAWS).prop_map(move |u| number_from_unit(&u, n))
}

/// A number whose endpoints are all `>= 0`.
pub fn nonneg_number(n: usize) -> impl Strategy<Value = FuzzyNCell> {
    number(n).prop_map(|u| {
        let shift: Vec<f64> = (0..u.dim()).map(|i| -u.lower(i, 0)).collect();
        u.add(&FuzzyNCell::crisp(&shift, u.grid().clone())).unwrap()
    })
}

/// Convex scalar profiles `φ(t)` for the family `F = a(r)·φ(t) + b(r)`,
/// given as expressions with their derivative.
pub type Profile = (&'static str, fn(f64) -> f64);

pub const SMOOTH_CONVEX: [Profile; 4] = [
    ("t1^2", |t| 2.0 * t),
    ("exp(t1)", f64::exp),
    ("(1+t1^2)^0.5", |t| t / (1.0 + t * t).sqrt()),
    ("exp(-t1) + 0.5*t1^2", |t| -(-t).exp() + t),
];

// Endpoint as an expression linear in r through the values at r = 0 and r = 1.
fn poly(u: &FuzzyNCell, i: usize, lower: bool) -> String {
    let k = u.levels() - 1;
    let (a, b) = if lower {
        (u.lower(i, 0), u.lower(i, k))
    } else {
        (u.upper(i, 0), u.upper(i, k))
    };
    format!("({a} + ({b} - ({a}))*r)")
}

/// `a(r)·φ(t) + b(r)` with `a >= 0`, endpoints linear in `r`.
pub fn family(a: &FuzzyNCell, b: &FuzzyNCell, phi: &str, m: usize) -> FuzzyFunction {
    let lower = format!("{}*({phi}) + {}", poly(a, 0, true), poly(b, 0, true));
    let upper = format!("{}*({phi}) + {}", poly(a, 0, false), poly(b, 0, false));
    FuzzyFunction::from_exprs(m, grid(), &[&lower], &[&upper]).unwrap()
}

/// Linear-in-r version of `u` (what [`family`] actually uses).
pub fn linearized(u: &FuzzyNCell) -> FuzzyNCell {
    let k = u.levels() - 1;
    let (l0, l1, h0, h1) = (u.lower(0, 0), u.lower(0, k), u.upper(0, 0), u.upper(0, k));
    FuzzyNCell::from_fn(u.grid().clone(), 1, |_, r| (l0 + (l1 - l0) * r, h0 + (h1 - h0) * r)).unwrap()
}

pub fn unit_box(m: usize) -> DomainBox {
    DomainBox::cube(m, -2.0, 2.0).unwrap()
}

//! Directional and partial derivatives of fuzzy functions.
//!
//! Endpoint derivatives are one-sided difference quotients on the step
//! schedule `h_j = h0 * 2^-j`, extrapolated with a Richardson tableau. The
//! fuzzy derivative is then assembled levelwise: the lower endpoint at level
//! `r_k` is the smallest endpoint derivative over all levels `>= r_k`, the
//! upper endpoint the largest.

use serde::Serialize;

use crate::certificate::{Certificate, Witness};
use crate::error::{FuzzyError, Result};
use crate::funcspace::FuzzyFunction;
use crate::levelsets::{big_d_l, first_le_violation, not_representable, FuzzyNCell, FuzzyVector, Side};
use crate::sampling::Triple;
use crate::{DELTA_CONV, TAU_ORD};

const MAX_COLUMNS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivSide {
    Right,
    Left,
    TwoSided,
}

impl DerivSide {
    fn sign(self) -> f64 {
        match self {
            DerivSide::Left => -1.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivOptions {
    pub h0: f64,
    pub steps: usize,
    pub delta_conv: f64,
}

impl Default for DerivOptions {
    fn default() -> Self {
        Self {
            h0: 1e-2,
            steps: 13,
            delta_conv: DELTA_CONV,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub h: f64,
    /// Largest change of the extrapolated estimate against the previous step.
    pub change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub value: FuzzyNCell,
    pub converged: bool,
    pub step_history: Vec<StepRecord>,
    pub side: DerivSide,
}

struct Extrapolated {
    estimates: Vec<f64>,
    history: Vec<StepRecord>,
}

fn probe(t0: &[f64], d: &[f64], s: f64) -> Vec<f64> {
    t0.iter().zip(d).map(|(x, y)| x + s * y).collect()
}

/// Richardson-extrapolated one-sided quotients for every endpoint of `F`.
/// `select` restricts the convergence test to one flat endpoint index.
fn extrapolate(
    f: &FuzzyFunction,
    t0: &[f64],
    d: &[f64],
    side: DerivSide,
    opts: &DerivOptions,
    select: Option<usize>,
) -> Result<Extrapolated> {
    if d.len() != f.dim_in() {
        return Err(FuzzyError::DimensionMismatch {
            expected: f.dim_in(),
            found: d.len(),
        });
    }
    let base = f.eval(t0)?;
    let sign = side.sign();
    let steps: Vec<f64> = (0..opts.steps)
        .map(|j| opts.h0 * 2f64.powi(-(j as i32)))
        .skip_while(|&h| !f.in_domain(&probe(t0, d, sign * h)))
        .collect();
    if steps.len() < 3 {
        let h = opts.h0 * 2f64.powi(1 - opts.steps as i32);
        return Err(FuzzyError::DomainViolation {
            point: probe(t0, d, sign * h),
        });
    }
    let (b_lo, b_hi) = base.raw();
    let width = b_lo.len() + b_hi.len();
    let mut prev: Vec<Vec<f64>> = Vec::new();
    let mut prev_est: Option<Vec<f64>> = None;
    let mut history = Vec::with_capacity(steps.len());
    let mut small_run = 0;
    let mut last_change = f64::INFINITY;
    for (j, &h) in steps.iter().enumerate() {
        let fz = f.eval(&probe(t0, d, sign * h))?;
        let (z_lo, z_hi) = fz.raw();
        let denom = sign * h;
        let q: Vec<f64> = z_lo
            .iter()
            .chain(z_hi)
            .zip(b_lo.iter().chain(b_hi))
            .map(|(a, b)| (a - b) / denom)
            .collect();
        let cols = j.min(MAX_COLUMNS);
        let mut row = vec![q];
        for c in 1..=cols {
            let factor = 2f64.powi(c as i32) - 1.0;
            let next: Vec<f64> = (0..width)
                .map(|e| row[c - 1][e] + (row[c - 1][e] - prev[c - 1][e]) / factor)
                .collect();
            row.push(next);
        }
        let est = row[cols].clone();
        let change = prev_est.as_ref().map(|p: &Vec<f64>| match select {
            Some(e) => (est[e] - p[e]).abs(),
            None => est
                .iter()
                .zip(p)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        });
        history.push(StepRecord { h, change });
        if let Some(c) = change {
            last_change = c;
            if c < opts.delta_conv {
                small_run += 1;
                if small_run >= 2 {
                    return Ok(Extrapolated {
                        estimates: est,
                        history,
                    });
                }
            } else {
                small_run = 0;
            }
        }
        prev = row;
        prev_est = Some(est);
    }
    Err(FuzzyError::NoConvergence { last_change })
}

fn assemble(f: &FuzzyFunction, est: &[f64]) -> Result<FuzzyNCell> {
    let len = f.grid().len();
    let n = f.dim_out();
    let half = n * len;
    let (q_lo, q_hi) = est.split_at(half);
    let mut lo = vec![0.0; half];
    let mut hi = vec![0.0; half];
    for i in 0..n {
        let base = i * len;
        let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in (0..len).rev() {
            let (a, b) = (q_lo[base + k], q_hi[base + k]);
            mn = mn.min(a.min(b));
            mx = mx.max(a.max(b));
            lo[base + k] = mn;
            hi[base + k] = mx;
        }
    }
    FuzzyNCell::from_flat(f.grid().clone(), n, lo, hi).map_err(not_representable)
}

/// Derivative of the single endpoint `F_i^{side}(r_k, ·)` at `t0` along `d`;
/// `Left` gives the quotient limit `(f(t0 - h d) - f(t0)) / (-h)`.
pub fn endpoint_dir_derivative(
    f: &FuzzyFunction,
    t0: &[f64],
    d: &[f64],
    cell: usize,
    level: usize,
    endpoint: Side,
    side: DerivSide,
) -> Result<f64> {
    let len = f.grid().len();
    if cell >= f.dim_out() {
        return Err(FuzzyError::IndexOutOfRange {
            what: "cell",
            index: cell,
            limit: f.dim_out(),
        });
    }
    if level >= len {
        return Err(FuzzyError::IndexOutOfRange {
            what: "level",
            index: level,
            limit: len,
        });
    }
    let idx = match endpoint {
        Side::Lower => cell * len + level,
        Side::Upper => f.dim_out() * len + cell * len + level,
    };
    let side = if side == DerivSide::TwoSided { DerivSide::Right } else { side };
    let ex = extrapolate(f, t0, d, side, &DerivOptions::default(), Some(idx))?;
    Ok(ex.estimates[idx])
}

pub fn directional_derivative(f: &FuzzyFunction, t0: &[f64], d: &[f64]) -> Result<DerivativeReport> {
    directional_derivative_with(f, t0, d, DerivSide::Right, &DerivOptions::default())
}

/// One-sided directional derivative; `TwoSided` is treated as `Right`.
pub fn directional_derivative_with(
    f: &FuzzyFunction,
    t0: &[f64],
    d: &[f64],
    side: DerivSide,
    opts: &DerivOptions,
) -> Result<DerivativeReport> {
    let side = if side == DerivSide::TwoSided { DerivSide::Right } else { side };
    let ex = extrapolate(f, t0, d, side, opts, None)?;
    Ok(DerivativeReport {
        value: assemble(f, &ex.estimates)?,
        converged: true,
        step_history: ex.history,
        side,
    })
}

pub fn partial_derivative(f: &FuzzyFunction, t0: &[f64], j: usize) -> Result<DerivativeReport> {
    partial_derivative_with(f, t0, j, &DerivOptions::default())
}

/// Two-sided partial derivative along `e_j`. When one side has no probe
/// inside the domain (a boundary point), the other side is returned alone.
pub fn partial_derivative_with(
    f: &FuzzyFunction,
    t0: &[f64],
    j: usize,
    opts: &DerivOptions,
) -> Result<DerivativeReport> {
    let m = f.dim_in();
    if j >= m {
        return Err(FuzzyError::IndexOutOfRange {
            what: "coordinate",
            index: j,
            limit: m,
        });
    }
    if t0.len() != m {
        return Err(FuzzyError::DimensionMismatch {
            expected: m,
            found: t0.len(),
        });
    }
    let mut e = vec![0.0; m];
    e[j] = 1.0;
    let right = directional_derivative_with(f, t0, &e, DerivSide::Right, opts);
    let left = directional_derivative_with(f, t0, &e, DerivSide::Left, opts);
    let (right, left) = match (right, left) {
        (Ok(r), Ok(l)) => (r, l),
        (Ok(r), Err(FuzzyError::DomainViolation { .. })) => return Ok(r),
        (Err(FuzzyError::DomainViolation { .. }), Ok(l)) => return Ok(l),
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };
    let distance = big_d_l(&right.value, &left.value)?;
    if distance >= opts.delta_conv {
        return Err(FuzzyError::NotDifferentiable {
            coordinate: j,
            distance,
            right: Box::new(right.value),
            left: Box::new(left.value),
        });
    }
    let mut history = right.step_history;
    history.extend(left.step_history);
    Ok(DerivativeReport {
        value: right.value.add(&left.value)?.scale(0.5),
        converged: true,
        step_history: history,
        side: DerivSide::TwoSided,
    })
}

pub fn gradient(f: &FuzzyFunction, t0: &[f64]) -> Result<FuzzyVector> {
    gradient_with(f, t0, &DerivOptions::default())
}

pub fn gradient_with(f: &FuzzyFunction, t0: &[f64], opts: &DerivOptions) -> Result<FuzzyVector> {
    let parts = (0..f.dim_in())
        .map(|j| partial_derivative_with(f, t0, j, opts).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    FuzzyVector::new(parts)
}

/// Checks `F(λx + (1-λ)y) <= λF(x) + (1-λ)F(y)` at each triple.
pub fn convexity_certificate(f: &FuzzyFunction, triples: &[Triple]) -> Result<Certificate> {
    for (used, (x, y, lambda)) in triples.iter().enumerate() {
        let mid: Vec<f64> = x
            .iter()
            .zip(y)
            .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
            .collect();
        let lhs = f.eval(&mid)?;
        let rhs = f.eval(x)?.scale(*lambda).add(&f.eval(y)?.scale(1.0 - lambda))?;
        if let Some(w) = first_le_violation(&lhs, &rhs, TAU_ORD)? {
            let witness = Witness {
                point: x.clone(),
                other: Some(y.clone()),
                lambda: Some(*lambda),
                violation: Some(w),
            };
            return Ok(Certificate::refuted(witness, used + 1));
        }
    }
    Ok(Certificate::verified(triples.len()))
}

/// Compares `F'(t; d)` with `∇F(t)·d`; verified when `D_L < 10 δ_conv`.
pub fn check_gradient_identity(f: &FuzzyFunction, t: &[f64], d: &[f64]) -> Result<Certificate> {
    let lhs = directional_derivative(f, t, d)?.value;
    let rhs = gradient(f, t)?.dot_real(d)?;
    let distance = big_d_l(&lhs, &rhs)?;
    let note = format!("D_L = {distance:e}");
    if distance < 10.0 * DELTA_CONV {
        Ok(Certificate::verified(1).with_note(note))
    } else {
        Ok(Certificate::refuted(Witness::at(t.to_vec()), 1).with_note(note))
    }
}

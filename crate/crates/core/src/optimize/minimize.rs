use serde::Serialize;

use super::{verify_global_min, GlobalMinReport, Scalarization};
use crate::error::{FuzzyError, Result};
use crate::funcspace::{DomainBox, FuzzyFunction};
use crate::sampling::default_samples;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOptions {
    pub initial_step: f64,
    /// Stop once the search radius falls below this.
    pub min_step: f64,
    /// Cap on coordinate sweeps.
    pub max_sweeps: usize,
    pub scalarization: Scalarization,
    /// Box for the certificate samples; defaults to the function's domain.
    pub sample_box: Option<DomainBox>,
    pub seed: u64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            initial_step: 1.0,
            min_step: 1e-6,
            max_sweeps: 10_000,
            scalarization: Scalarization::Mean,
            sample_box: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizeOutcome {
    pub x_best: Vec<f64>,
    pub scalar: f64,
    pub sweeps: usize,
    pub report: GlobalMinReport,
}

fn golden(mut a: f64, mut b: f64, mut f: impl FnMut(f64) -> Result<f64>) -> Result<(f64, f64)> {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > 1e-12 * (1.0 + a.abs().max(b.abs())) {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let (fa, fb) = (f(a)?, f(b)?);
    let mut best = (c, fc);
    for cand in [(d, fd), (a, fa), (b, fb)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    Ok(best)
}

/// Coordinate descent with golden-section line searches on
/// `[x_i - s, x_i + s]` clipped to the domain. A move is taken only on
/// strict improvement; the radius halves after any sweep that does not hit
/// the edge of its window. The result is certified on a fresh sample set.
pub fn minimize_scalarized(f: &FuzzyFunction, x_init: &[f64], opts: &MinimizeOptions) -> Result<MinimizeOutcome> {
    let m = f.dim_in();
    if x_init.len() != m {
        return Err(FuzzyError::DimensionMismatch {
            expected: m,
            found: x_init.len(),
        });
    }
    if !f.in_domain(x_init) {
        return Err(FuzzyError::DomainViolation { point: x_init.to_vec() });
    }
    let bounds: Vec<(f64, f64)> = match f.domain() {
        Some(d) => d.bounds().to_vec(),
        None => vec![(f64::NEG_INFINITY, f64::INFINITY); m],
    };
    let s_of = |x: &[f64]| -> Result<f64> { opts.scalarization.apply(&f.eval(x)?) };
    let mut x = x_init.to_vec();
    let mut fx = s_of(&x)?;
    let mut step = opts.initial_step;
    let mut sweeps = 0;
    while step >= opts.min_step {
        if sweeps == opts.max_sweeps {
            return Err(FuzzyError::MaxIterations(sweeps));
        }
        sweeps += 1;
        let mut at_edge = false;
        for i in 0..m {
            let lo = (x[i] - step).max(bounds[i].0);
            let hi = (x[i] + step).min(bounds[i].1);
            let mut probe = x.clone();
            let (xi, fi) = golden(lo, hi, |v| {
                probe[i] = v;
                s_of(&probe)
            })?;
            if fi < fx - 1e-15 * (1.0 + fx.abs()) {
                at_edge |= (xi - (x[i] - step)).abs() < 1e-9 * step || (xi - (x[i] + step)).abs() < 1e-9 * step;
                x[i] = xi;
                fx = fi;
            }
        }
        if !at_edge {
            step *= 0.5;
        }
    }
    let sample_box = match (&opts.sample_box, f.domain()) {
        (Some(b), _) => b.clone(),
        (None, Some(d)) if d.is_bounded() => d.clone(),
        _ => return Err(FuzzyError::MissingDomain("certificate samples need a bounded box")),
    };
    let samples: Vec<Vec<f64>> = default_samples(&x, &sample_box, opts.seed)?
        .into_iter()
        .filter(|p| f.in_domain(p))
        .collect();
    let report = verify_global_min(f, &x, &samples)?;
    Ok(MinimizeOutcome {
        x_best: x,
        scalar: fx,
        sweeps,
        report,
    })
}

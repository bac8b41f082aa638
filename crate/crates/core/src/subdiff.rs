//! Subgradient verification and one-dimensional subdifferential boxes.
//!
//! `v` is a subgradient of `F` at `t` on a sample set `Z` when
//! `F(z) ⊖_g F(t) >= v·(z - t)` holds for every `z` in `Z`.

use std::io::Write;
use std::sync::Arc;

use serde::Serialize;

use crate::certificate::{Certificate, Status, Witness};
use crate::error::{FuzzyError, Result};
use crate::funcspace::FuzzyFunction;
use crate::levelsets::{first_le_violation, FuzzyNCell, FuzzyVector, LevelGrid};
use crate::TAU_ORD;

pub fn verify_subgradient(f: &FuzzyFunction, t: &[f64], v: &FuzzyVector, z: &[Vec<f64>]) -> Result<Certificate> {
    verify_subgradient_tol(f, t, v, z, TAU_ORD)
}

/// Scans `z` in order. The first violated inequality refutes; a probe
/// where the g-difference does not exist makes the result inconclusive
/// unless a later probe refutes.
pub fn verify_subgradient_tol(
    f: &FuzzyFunction,
    t: &[f64],
    v: &FuzzyVector,
    z: &[Vec<f64>],
    tol: f64,
) -> Result<Certificate> {
    if z.is_empty() {
        return Err(FuzzyError::EmptySampleSet);
    }
    if v.len() != f.dim_in() {
        return Err(FuzzyError::DimensionMismatch {
            expected: f.dim_in(),
            found: v.len(),
        });
    }
    v.check_against(f.grid(), f.dim_out())?;
    let ft = f.eval(t)?;
    let mut undecided: Option<(Witness, String)> = None;
    for (used, p) in z.iter().enumerate() {
        let fz = f.eval(p)?;
        let diff = match fz.g_diff(&ft) {
            Ok(d) => d,
            Err(FuzzyError::NotRepresentable(msg)) => {
                undecided.get_or_insert((Witness::at(p.clone()), msg));
                continue;
            }
            Err(e) => return Err(e),
        };
        let step: Vec<f64> = p.iter().zip(t).map(|(a, b)| a - b).collect();
        let rhs = v.dot_real(&step)?;
        if let Some(w) = first_le_violation(&rhs, &diff, tol)? {
            return Ok(Certificate::refuted(Witness::at(p.clone()).with_violation(w), used + 1));
        }
    }
    Ok(match undecided {
        Some((w, msg)) => Certificate::inconclusive(w, z.len(), msg),
        None => Certificate::verified(z.len()),
    })
}

/// Per-level bounds on the endpoints of 1-D subgradients, stored
/// cell-major like [`FuzzyNCell`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubdiffBox1D {
    #[serde(skip)]
    grid: Arc<LevelGrid>,
    pub n: usize,
    pub levels: Vec<f64>,
    pub vlo_min: Vec<f64>,
    pub vlo_max: Vec<f64>,
    pub vhi_min: Vec<f64>,
    pub vhi_max: Vec<f64>,
    /// Some lower bound exceeds its upper bound.
    pub empty: bool,
    /// All samples lie on one side of `t`; the open side is unbounded.
    pub half_bounded: bool,
    /// A legal fuzzy number fits inside the bounds.
    pub has_legal_member: bool,
    pub samples_used: usize,
}

pub const BOX_CSV_HEADER: [&str; 6] = ["r", "cell", "vlo_min", "vlo_max", "vhi_min", "vhi_max"];

/// Bounds from the samples on each side of `t`. For `s = z - t > 0` the
/// inequality gives `v^- <= D^-/s` and `v^+ <= D^+/s`; for `s < 0` it gives
/// `v^- >= D^+/s` and `v^+ >= D^-/s`, where `D = F(z) ⊖_g F(t)`.
pub fn subdiff_box_1d(f: &FuzzyFunction, t: f64, z: &[f64]) -> Result<SubdiffBox1D> {
    if f.dim_in() != 1 {
        return Err(FuzzyError::Precondition(format!(
            "subdifferential boxes need a one-dimensional domain, got m = {}",
            f.dim_in()
        )));
    }
    if z.is_empty() {
        return Err(FuzzyError::EmptySampleSet);
    }
    let len = f.grid().len();
    let n = f.dim_out();
    let size = n * len;
    let mut vlo_min = vec![f64::NEG_INFINITY; size];
    let mut vlo_max = vec![f64::INFINITY; size];
    let mut vhi_min = vec![f64::NEG_INFINITY; size];
    let mut vhi_max = vec![f64::INFINITY; size];
    let ft = f.eval(&[t])?;
    let (mut right, mut left) = (false, false);
    for &p in z {
        let s = p - t;
        if s == 0.0 {
            continue;
        }
        let d = f.eval(&[p])?.g_diff(&ft)?;
        let (dl, dh) = d.raw();
        for e in 0..size {
            if s > 0.0 {
                vlo_max[e] = vlo_max[e].min(dl[e] / s);
                vhi_max[e] = vhi_max[e].min(dh[e] / s);
            } else {
                vlo_min[e] = vlo_min[e].max(dh[e] / s);
                vhi_min[e] = vhi_min[e].max(dl[e] / s);
            }
        }
        if s > 0.0 {
            right = true;
        } else {
            left = true;
        }
    }
    let mut b = SubdiffBox1D {
        grid: f.grid().clone(),
        n,
        levels: f.grid().levels().to_vec(),
        vlo_min,
        vlo_max,
        vhi_min,
        vhi_max,
        empty: false,
        half_bounded: !(right && left),
        has_legal_member: false,
        samples_used: z.len(),
    };
    b.empty = (0..size).any(|e| b.vlo_min[e] > b.vlo_max[e] + TAU_ORD || b.vhi_min[e] > b.vhi_max[e] + TAU_ORD);
    b.has_legal_member = !b.empty && b.extreme_curves().is_some();
    Ok(b)
}

struct Extremes {
    lo_min: Vec<f64>,
    lo_max: Vec<f64>,
    hi_min: Vec<f64>,
    hi_max: Vec<f64>,
}

impl SubdiffBox1D {
    pub fn grid(&self) -> &Arc<LevelGrid> {
        &self.grid
    }

    /// Tightest monotone envelopes inside the bounds: the smallest
    /// nondecreasing `v^-`, the largest nondecreasing `v^-`, and likewise
    /// for the nonincreasing `v^+`. `None` when no legal member exists.
    fn extreme_curves(&self) -> Option<Extremes> {
        let len = self.levels.len();
        let size = self.n * len;
        let mut ex = Extremes {
            lo_min: vec![0.0; size],
            lo_max: vec![0.0; size],
            hi_min: vec![0.0; size],
            hi_max: vec![0.0; size],
        };
        for i in 0..self.n {
            let base = i * len;
            let mut run = f64::NEG_INFINITY;
            for k in 0..len {
                run = run.max(self.vlo_min[base + k]);
                ex.lo_min[base + k] = run;
            }
            let mut run = f64::INFINITY;
            for k in 0..len {
                run = run.min(self.vhi_max[base + k]);
                ex.hi_max[base + k] = run;
            }
            let mut run = f64::INFINITY;
            for k in (0..len).rev() {
                run = run.min(self.vlo_max[base + k]);
                ex.lo_max[base + k] = run;
            }
            let mut run = f64::NEG_INFINITY;
            for k in (0..len).rev() {
                run = run.max(self.vhi_min[base + k]);
                ex.hi_min[base + k] = run;
            }
            for k in 0..len {
                let e = base + k;
                if ex.lo_min[e] > self.vlo_max[e] + TAU_ORD || ex.hi_max[e] < self.vhi_min[e] - TAU_ORD {
                    return None;
                }
                if !ex.lo_min[e].is_finite() || !ex.hi_max[e].is_finite() {
                    return None;
                }
            }
            if ex.lo_min[base + len - 1] > ex.hi_max[base + len - 1] + TAU_ORD {
                return None;
            }
        }
        Some(ex)
    }

    /// Member with `v^- = (1-a)·lowest + a·highest` and
    /// `v^+ = (1-b)·highest + b·lowest` legal curves.
    /// Errors when the box has no legal member or the blend is illegal.
    pub fn member(&self, a: f64, b: f64) -> Result<FuzzyVector> {
        let ex = self.extreme_curves().ok_or_else(|| {
            FuzzyError::Precondition("subdifferential box has no legal member".into())
        })?;
        let blend = |x: &[f64], y: &[f64], w: f64| -> Vec<f64> {
            x.iter()
                .zip(y)
                .map(|(p, q)| if w == 0.0 { *p } else { (1.0 - w) * p + w * q })
                .collect()
        };
        let lo = blend(&ex.lo_min, &ex.lo_max, a);
        let hi = blend(&ex.hi_max, &ex.hi_min, b);
        if lo.iter().chain(&hi).any(|x| !x.is_finite()) {
            return Err(FuzzyError::Precondition("blend reaches an unbounded side".into()));
        }
        let u = FuzzyNCell::from_flat(self.grid.clone(), self.n, lo, hi)
            .map_err(crate::levelsets::not_representable)?;
        FuzzyVector::new(vec![u])
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(BOX_CSV_HEADER)?;
        let len = self.levels.len();
        for k in 0..len {
            for i in 0..self.n {
                let e = i * len + k;
                w.write_record(&[
                    self.levels[k].to_string(),
                    i.to_string(),
                    fmt(self.vlo_min[e]),
                    fmt(self.vlo_max[e]),
                    fmt(self.vhi_min[e]),
                    fmt(self.vhi_max[e]),
                ])?;
            }
        }
        w.flush().map_err(|e| FuzzyError::Csv(e.to_string()))?;
        Ok(())
    }
}

// Adding 0.0 turns -0 into 0.
fn fmt(x: f64) -> String {
    (x + 0.0).to_string()
}

fn require_verified(cert: &Certificate, what: &str) -> Result<()> {
    if cert.status == Status::Verified {
        Ok(())
    } else {
        Err(FuzzyError::Precondition(format!("{what} is not a verified subgradient on the sample set")))
    }
}

/// Checks `λv ∈ ∂(λF)(t)` for a verified `v ∈ ∂F(t)` and `λ > 0`.
pub fn subdiff_scale_check(
    f: &FuzzyFunction,
    t: &[f64],
    v: &FuzzyVector,
    lambda: f64,
    z: &[Vec<f64>],
) -> Result<Certificate> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(FuzzyError::Precondition(format!("scale factor must be positive, got {lambda}")));
    }
    require_verified(&verify_subgradient(f, t, v, z)?, "v")?;
    verify_subgradient(&f.scaled(lambda), t, &v.scale(lambda), z)
}

/// Checks `vF + vG ∈ ∂(F+G)(t)`. A refutation at a probe where the level
/// lengths of `F` and `G` change in opposite directions is reported as
/// inconclusive, since the difference of the sum need not split there.
pub fn subdiff_sum_check(
    f: &FuzzyFunction,
    g: &FuzzyFunction,
    t: &[f64],
    vf: &FuzzyVector,
    vg: &FuzzyVector,
    z: &[Vec<f64>],
) -> Result<Certificate> {
    require_verified(&verify_subgradient(f, t, vf, z)?, "vF")?;
    require_verified(&verify_subgradient(g, t, vg, z)?, "vG")?;
    let sum = f.plus(g)?;
    let cert = verify_subgradient(&sum, t, &vf.add(vg)?, z)?;
    if cert.status != Status::Refuted {
        return Ok(cert);
    }
    let w = cert.witness.clone().expect("refuted certificates carry a witness");
    if lengths_split(f, g, t, &w.point)? {
        Ok(cert)
    } else {
        Ok(Certificate::inconclusive(
            w,
            cert.samples_used,
            "level lengths of F and G change in opposite directions at the witness",
        ))
    }
}

/// True when, for every cell, the level lengths of both functions grow
/// from `t` to `z` at all levels, or both shrink at all levels.
fn lengths_split(f: &FuzzyFunction, g: &FuzzyFunction, t: &[f64], z: &[f64]) -> Result<bool> {
    let (ft, fz, gt, gz) = (f.eval(t)?, f.eval(z)?, g.eval(t)?, g.eval(z)?);
    let len = f.grid().len();
    for i in 0..f.dim_out() {
        let mut grow = true;
        let mut shrink = true;
        for k in 0..len {
            let df = fz.level_length(i, k)? - ft.level_length(i, k)?;
            let dg = gz.level_length(i, k)? - gt.level_length(i, k)?;
            grow &= df >= -TAU_ORD && dg >= -TAU_ORD;
            shrink &= df <= TAU_ORD && dg <= TAU_ORD;
        }
        if !grow && !shrink {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks `λv1 + (1-λ)v2 ∈ ∂F(t)` for verified `v1`, `v2` and `λ ∈ [0, 1]`.
pub fn subdiff_convexity_check(
    f: &FuzzyFunction,
    t: &[f64],
    v1: &FuzzyVector,
    v2: &FuzzyVector,
    lambda: f64,
    z: &[Vec<f64>],
) -> Result<Certificate> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(FuzzyError::Precondition(format!("λ must lie in [0, 1], got {lambda}")));
    }
    require_verified(&verify_subgradient(f, t, v1, z)?, "v1")?;
    require_verified(&verify_subgradient(f, t, v2, z)?, "v2")?;
    let mix = v1.scale(lambda).add(&v2.scale(1.0 - lambda))?;
    verify_subgradient(f, t, &mix, z)
}

use serde::Serialize;

use super::Problem;
use crate::certificate::{Certificate, Status};
use crate::error::{FuzzyError, Result};
use crate::levelsets::{big_d_l, order, FuzzyNCell, FuzzyVector, OrderResult};
use crate::subdiff::verify_subgradient;
use crate::{SLATER_MARGIN, TAU_KKT, TAU_ORD};

#[derive(Debug, Clone, PartialEq)]
pub struct KktOptions {
    pub tau_kkt: f64,
    /// Fail with `InfeasiblePoint` instead of reporting infeasibility.
    pub enforce_feasibility: bool,
}

impl Default for KktOptions {
    fn default() -> Self {
        Self {
            tau_kkt: TAU_KKT,
            enforce_feasibility: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KktReport {
    pub multipliers: Vec<f64>,
    /// `D_L(λ_j G_j(x*), 0̂)` per constraint.
    pub complementarity: Vec<f64>,
    pub complementarity_ok: bool,
    /// `0̂ ∈ ∂(F + Σ λ_j G_j)(x*)` on the samples.
    pub stationarity: Certificate,
    /// `G_j(x*)` compared with `0̂`.
    pub feasibility: Vec<OrderResult>,
    pub feasible: bool,
    /// A sample where every constraint is below `0̂` by the strict margin.
    pub slater_witness: Option<Vec<f64>>,
}

impl KktReport {
    pub fn verified(&self) -> bool {
        self.complementarity_ok && self.stationarity.status == Status::Verified
    }

    fn score(&self, tau: f64) -> f64 {
        let comp: f64 = self.complementarity.iter().map(|d| (d - tau).max(0.0)).sum();
        let stat = match (&self.stationarity.status, &self.stationarity.witness) {
            (Status::Verified, _) => 0.0,
            (_, Some(w)) => w.violation.map_or(1.0, |v| v.excess),
            (_, None) => 1.0,
        };
        comp + stat
    }

    fn failing_condition(&self) -> &'static str {
        match (self.complementarity_ok, self.stationarity.status) {
            (false, Status::Verified) => "complementarity",
            (true, _) => "stationarity",
            (false, _) => "complementarity and stationarity",
        }
    }
}

pub fn kkt_verify(p: &Problem, xstar: &[f64], lambda: &[f64], z: &[Vec<f64>], opts: &KktOptions) -> Result<KktReport> {
    p.check_multipliers(lambda)?;
    p.check_point(xstar)?;
    let zero = FuzzyNCell::zero(p.objective.dim_out(), p.objective.grid().clone());
    let mut feasibility = Vec::with_capacity(lambda.len());
    let mut complementarity = Vec::with_capacity(lambda.len());
    for (j, (g, l)) in p.constraints.iter().zip(lambda).enumerate() {
        let gx = g.eval(xstar)?;
        let rel = order(&gx, &zero, TAU_ORD)?;
        if opts.enforce_feasibility && !rel.is_le() {
            return Err(FuzzyError::InfeasiblePoint { constraint: j });
        }
        feasibility.push(rel);
        complementarity.push(big_d_l(&gx.scale(*l), &zero)?);
    }
    let h = p.aggregate(lambda)?;
    let stationarity = verify_subgradient(
        &h,
        xstar,
        &FuzzyVector::zero(p.objective.dim_in(), p.objective.dim_out(), p.objective.grid().clone()),
        z,
    )?;
    let slater_witness = find_slater(p, z)?;
    Ok(KktReport {
        multipliers: lambda.to_vec(),
        complementarity_ok: complementarity.iter().all(|d| *d <= opts.tau_kkt),
        complementarity,
        stationarity,
        feasible: feasibility.iter().all(|r| r.is_le()),
        feasibility,
        slater_witness,
    })
}

fn find_slater(p: &Problem, z: &[Vec<f64>]) -> Result<Option<Vec<f64>>> {
    if p.constraints.is_empty() {
        return Ok(None);
    }
    for x in z {
        let mut strict = true;
        for g in &p.constraints {
            let gx = g.eval(x)?;
            let (lo, hi) = gx.raw();
            if lo.iter().chain(hi).any(|e| *e > -SLATER_MARGIN) {
                strict = false;
                break;
            }
        }
        if strict {
            return Ok(Some(x.clone()));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome")]
pub enum KktSearchOutcome {
    Found {
        lambda: Vec<f64>,
        report: KktReport,
    },
    NotFound {
        best_lambda: Vec<f64>,
        best_report: KktReport,
        failing: String,
    },
}

/// `{0, 0.25, ..., 4}` for every constraint.
pub fn default_lambda_grid(k: usize) -> Vec<Vec<f64>> {
    vec![(0..=16).map(|i| i as f64 * 0.25).collect(); k]
}

/// Scans the product grid with the last multiplier varying fastest and
/// returns the first fully verified `λ`.
pub fn kkt_search(
    p: &Problem,
    xstar: &[f64],
    grid: &[Vec<f64>],
    z: &[Vec<f64>],
    opts: &KktOptions,
) -> Result<KktSearchOutcome> {
    let k = p.constraints.len();
    if grid.len() != k {
        return Err(FuzzyError::DimensionMismatch {
            expected: k,
            found: grid.len(),
        });
    }
    if grid.iter().any(|g| g.is_empty()) {
        return Err(FuzzyError::Precondition("every multiplier needs at least one candidate".into()));
    }
    let mut idx = vec![0usize; k];
    let mut best: Option<(f64, KktReport)> = None;
    loop {
        let lambda: Vec<f64> = idx.iter().zip(grid).map(|(i, g)| g[*i]).collect();
        let report = kkt_verify(p, xstar, &lambda, z, opts)?;
        if report.verified() {
            return Ok(KktSearchOutcome::Found { lambda, report });
        }
        let score = report.score(opts.tau_kkt);
        if best.as_ref().is_none_or(|(s, _)| score < *s) {
            best = Some((score, report));
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                let (_, best_report) = best.expect("at least one candidate was scored");
                return Ok(KktSearchOutcome::NotFound {
                    best_lambda: best_report.multipliers.clone(),
                    failing: best_report.failing_condition().to_string(),
                    best_report,
                });
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < grid[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

//! Optimality checks for fuzzy-valued problems
//! `min F(x)` subject to `G_j(x) <= 0̂`, `x` in a box.

mod kkt;
mod minimize;

pub use kkt::{default_lambda_grid, kkt_search, kkt_verify, KktOptions, KktReport, KktSearchOutcome};
pub use minimize::{minimize_scalarized, MinimizeOptions, MinimizeOutcome};

use serde::Serialize;

use crate::calculus::gradient;
use crate::certificate::{Certificate, Status, Witness};
use crate::error::{FuzzyError, Result};
use crate::funcspace::{DomainBox, FuzzyFunction};
use crate::levelsets::{first_le_violation, FuzzyNCell, FuzzyVector};
use crate::subdiff::verify_subgradient;
use crate::TAU_ORD;

#[derive(Debug, Clone)]
pub struct Problem {
    objective: FuzzyFunction,
    constraints: Vec<FuzzyFunction>,
    domain: DomainBox,
}

impl Problem {
    pub fn new(objective: FuzzyFunction, constraints: Vec<FuzzyFunction>, domain: DomainBox) -> Result<Self> {
        let (m, n) = (objective.dim_in(), objective.dim_out());
        for g in &constraints {
            g.check_shape(m, n, objective.grid())?;
        }
        if domain.dim() != m {
            return Err(FuzzyError::DimensionMismatch {
                expected: m,
                found: domain.dim(),
            });
        }
        Ok(Self {
            objective,
            constraints,
            domain,
        })
    }

    pub fn objective(&self) -> &FuzzyFunction {
        &self.objective
    }

    pub fn constraints(&self) -> &[FuzzyFunction] {
        &self.constraints
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if !self.domain.contains(x) {
            return Err(FuzzyError::DomainViolation { point: x.to_vec() });
        }
        Ok(())
    }

    fn check_multipliers(&self, lambda: &[f64]) -> Result<()> {
        if lambda.len() != self.constraints.len() {
            return Err(FuzzyError::DimensionMismatch {
                expected: self.constraints.len(),
                found: lambda.len(),
            });
        }
        if let Some((index, &value)) = lambda.iter().enumerate().find(|(_, l)| l.is_nan() || **l < 0.0) {
            return Err(FuzzyError::NegativeMultiplier { index, value });
        }
        Ok(())
    }

    /// `H = F + Σ λ_j G_j` restricted to the problem box; zero terms are dropped.
    pub fn aggregate(&self, lambda: &[f64]) -> Result<FuzzyFunction> {
        self.check_multipliers(lambda)?;
        let mut terms = vec![(1.0, self.objective.clone())];
        terms.extend(
            lambda
                .iter()
                .zip(&self.constraints)
                .filter(|(l, _)| **l != 0.0)
                .map(|(l, g)| (*l, g.clone())),
        );
        FuzzyFunction::linear_combination(terms)?.with_domain(self.domain.clone())
    }
}

/// Both branches of the global-minimum check and their conjunction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalMinReport {
    pub certificate: Certificate,
    /// `F(x) >= F(x0)` at every sample.
    pub order_branch: Certificate,
    /// `0̂` is a subgradient at `x0` on the samples.
    pub subgradient_branch: Certificate,
}

pub fn verify_global_min(f: &FuzzyFunction, x0: &[f64], x: &[Vec<f64>]) -> Result<GlobalMinReport> {
    if x.is_empty() {
        return Err(FuzzyError::EmptySampleSet);
    }
    let f0 = f.eval(x0)?;
    let mut order_branch = Certificate::verified(x.len());
    for (used, p) in x.iter().enumerate() {
        if let Some(w) = first_le_violation(&f0, &f.eval(p)?, TAU_ORD)? {
            order_branch = Certificate::refuted(Witness::at(p.clone()).with_violation(w), used + 1);
            break;
        }
    }
    let zero = FuzzyVector::zero(f.dim_in(), f.dim_out(), f.grid().clone());
    let subgradient_branch = verify_subgradient(f, x0, &zero, x)?;
    let certificate = match (order_branch.status, subgradient_branch.status) {
        (Status::Verified, Status::Verified) => Certificate::verified(x.len()),
        (Status::Refuted, _) => order_branch.clone(),
        (_, Status::Refuted) => subgradient_branch.clone(),
        _ => subgradient_branch.clone(),
    };
    Ok(GlobalMinReport {
        certificate,
        order_branch,
        subgradient_branch,
    })
}

/// `L(x, λ) = F(x) + Σ λ_j G_j(x)`.
pub fn lagrangian(p: &Problem, x: &[f64], lambda: &[f64]) -> Result<FuzzyNCell> {
    p.check_multipliers(lambda)?;
    p.check_point(x)?;
    p.aggregate(lambda)?.eval(x)
}

/// Real summary of a fuzzy number used to rank candidates.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Scalarization {
    /// Mean of all endpoint samples over cells and levels.
    #[default]
    Mean,
    /// Weighted mean over levels of the cell-averaged endpoint midpoints.
    LevelWeights(Vec<f64>),
}

impl Scalarization {
    pub fn apply(&self, u: &FuzzyNCell) -> Result<f64> {
        let (lo, hi) = u.raw();
        match self {
            Scalarization::Mean => Ok(lo.iter().chain(hi).sum::<f64>() / (2 * lo.len()) as f64),
            Scalarization::LevelWeights(w) => {
                let len = u.levels();
                if w.len() != len {
                    return Err(FuzzyError::DimensionMismatch {
                        expected: len,
                        found: w.len(),
                    });
                }
                let total: f64 = w.iter().sum();
                if w.iter().any(|x| *x < 0.0) || total <= 0.0 {
                    return Err(FuzzyError::Precondition("level weights must be nonnegative with positive sum".into()));
                }
                let mut acc = 0.0;
                for i in 0..u.dim() {
                    for (k, wk) in w.iter().enumerate() {
                        acc += wk * 0.5 * (u.lower(i, k) + u.upper(i, k));
                    }
                }
                Ok(acc / (total * u.dim() as f64))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualValue {
    pub x_min: Vec<f64>,
    pub value: FuzzyNCell,
    pub scalar: f64,
    /// Always true: the minimum is taken in the scalarization, not in the
    /// partial order, which need not have a least element.
    pub scalarized: bool,
}

/// Scalarized `d(λ) = min_{x ∈ X} L(x, λ)`; ties keep the first sample.
pub fn dual_eval(p: &Problem, lambda: &[f64], x: &[Vec<f64>], s: &Scalarization) -> Result<DualValue> {
    if x.is_empty() {
        return Err(FuzzyError::EmptySampleSet);
    }
    let h = p.aggregate(lambda)?;
    let mut best: Option<DualValue> = None;
    for pt in x {
        p.check_point(pt)?;
        let value = h.eval(pt)?;
        let scalar = s.apply(&value)?;
        if best.as_ref().is_none_or(|b| scalar < b.scalar) {
            best = Some(DualValue {
                x_min: pt.clone(),
                value,
                scalar,
                scalarized: true,
            });
        }
    }
    Ok(best.expect("sample set is nonempty"))
}

/// Checks `-∇F(x*) ∈ ∂G(x*)` on the samples.
pub fn composite_check(f: &FuzzyFunction, g: &FuzzyFunction, xstar: &[f64], z: &[Vec<f64>]) -> Result<Certificate> {
    let v = gradient(f, xstar)?.scale(-1.0);
    verify_subgradient(g, xstar, &v, z)
}

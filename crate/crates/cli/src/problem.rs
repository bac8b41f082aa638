//! Problem files, schema `fno/1`.

use std::path::Path;
use std::sync::Arc;

use fno_core::expr::parse_expr;
use fno_core::funcspace::DomainBox;
use fno_core::optimize::{Problem, Scalarization};
use fno_core::{FuzzyFunction, FuzzyMatrix, FuzzyNCell, FuzzyVector, LevelGrid, DELTA_CONV, TAU_KKT, TAU_ORD};
use serde::Deserialize;

use crate::report::Failure;

pub const SCHEMA: &str = "fno/1";

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub schema: String,
    pub grid_levels: usize,
    pub domain_dim: usize,
    pub cell_dim: usize,
    pub domain_box: Vec<[f64; 2]>,
    pub objective: FunctionSpec,
    #[serde(default)]
    pub constraints: Vec<FunctionSpec>,
    /// Second function for `composite-check`.
    #[serde(default)]
    pub composite: Option<FunctionSpec>,
    #[serde(default)]
    pub options: Options,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Endpoints {
        lower: Vec<String>,
        upper: Vec<String>,
    },
    Quadratic {
        #[serde(rename = "A")]
        a: Vec<Vec<NumberSpec>>,
        #[serde(default)]
        b: Option<Vec<NumberSpec>>,
    },
}

/// A fuzzy number as written in files and on the command line.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum NumberSpec {
    Crisp(f64),
    /// `[l, c, u]`, a triangular 1-cell.
    Triangular([f64; 3]),
    /// One triangular triple per cell.
    Cells(Vec<[f64; 3]>),
    /// Endpoint expressions in `r`, one per cell.
    Levels { lower: Vec<String>, upper: Vec<String> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarSpec {
    Mean,
    LevelWeights(Vec<f64>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    pub seed: u64,
    pub tau_ord: f64,
    pub delta_conv: f64,
    pub tau_kkt: f64,
    pub samples: Samples,
    pub convexity_probes: usize,
    pub lambda_grid: Option<Vec<Vec<f64>>>,
    pub scalarization: ScalarSpec,
    pub max_sweeps: usize,
    pub require_feasible: bool,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            seed: 0,
            tau_ord: TAU_ORD,
            delta_conv: DELTA_CONV,
            tau_kkt: TAU_KKT,
            samples: Samples::default(),
            convexity_probes: 200,
            lambda_grid: None,
            scalarization: ScalarSpec::Mean,
            max_sweeps: 10_000,
            require_feasible: false,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Samples {
    pub uniform: usize,
    pub cluster: usize,
}

impl Default for Samples {
    fn default() -> Self {
        Self { uniform: 64, cluster: 16 }
    }
}

/// A validated problem file with its functions built.
pub struct Loaded {
    pub grid: Arc<LevelGrid>,
    pub m: usize,
    pub n: usize,
    pub domain: DomainBox,
    pub objective: FuzzyFunction,
    pub constraints: Vec<FuzzyFunction>,
    pub composite: Option<FuzzyFunction>,
    pub options: Options,
}

impl Loaded {
    pub fn problem(&self) -> Result<Problem, Failure> {
        Ok(Problem::new(self.objective.clone(), self.constraints.clone(), self.domain.clone())?)
    }

    pub fn scalarization(&self) -> Scalarization {
        match &self.options.scalarization {
            ScalarSpec::Mean => Scalarization::Mean,
            ScalarSpec::LevelWeights(w) => Scalarization::LevelWeights(w.clone()),
        }
    }

    pub fn number(&self, spec: &NumberSpec) -> Result<FuzzyNCell, Failure> {
        build_number(spec, self.n, &self.grid)
    }

    /// Parses a JSON array of `m` numbers.
    pub fn vector(&self, text: &str) -> Result<FuzzyVector, Failure> {
        let specs: Vec<NumberSpec> =
            serde_json::from_str(text).map_err(|e| Failure::input("Parse", format!("candidate: {e}")))?;
        if specs.len() != self.m {
            return Err(Failure::input(
                "DimensionMismatch",
                format!("candidate has {} components, expected {}", specs.len(), self.m),
            ));
        }
        let parts = specs.iter().map(|s| self.number(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(FuzzyVector::new(parts)?)
    }

    pub fn center(&self) -> Vec<f64> {
        self.domain.bounds().iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
    }
}

pub fn load(path: &Path) -> Result<Loaded, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input("Io", format!("cannot read {}: {e}", path.display())))?;
    let file: ProblemFile = serde_json::from_str(&text).map_err(|e| Failure::input("Schema", e.to_string()))?;
    build(file)
}

pub fn build(file: ProblemFile) -> Result<Loaded, Failure> {
    if file.schema != SCHEMA {
        return Err(Failure::input(
            "Schema",
            format!("unsupported schema `{}`, expected `{SCHEMA}`", file.schema),
        ));
    }
    let (m, n) = (file.domain_dim, file.cell_dim);
    if m == 0 || n == 0 {
        return Err(Failure::input("Schema", "domain_dim and cell_dim must be positive".into()));
    }
    if file.domain_box.len() != m {
        return Err(Failure::input(
            "DimensionMismatch",
            format!("domain_box has {} entries, expected {m}", file.domain_box.len()),
        ));
    }
    let grid = LevelGrid::uniform(file.grid_levels)?;
    let domain = DomainBox::new(file.domain_box.iter().map(|b| (b[0], b[1])).collect())?;
    let func = |spec: &FunctionSpec| build_function(spec, m, n, &grid, &domain);
    let objective = func(&file.objective)?;
    let constraints = file.constraints.iter().map(func).collect::<Result<Vec<_>, _>>()?;
    let composite = file.composite.as_ref().map(func).transpose()?;
    Ok(Loaded {
        grid,
        m,
        n,
        domain,
        objective,
        constraints,
        composite,
        options: file.options,
    })
}

fn build_function(
    spec: &FunctionSpec,
    m: usize,
    n: usize,
    grid: &Arc<LevelGrid>,
    domain: &DomainBox,
) -> Result<FuzzyFunction, Failure> {
    let f = match spec {
        FunctionSpec::Endpoints { lower, upper } => {
            if lower.len() != n || upper.len() != n {
                return Err(Failure::input(
                    "DimensionMismatch",
                    format!("expected {n} lower and upper expressions, got {} and {}", lower.len(), upper.len()),
                ));
            }
            let lo: Vec<&str> = lower.iter().map(String::as_str).collect();
            let hi: Vec<&str> = upper.iter().map(String::as_str).collect();
            FuzzyFunction::from_exprs(m, grid.clone(), &lo, &hi)?
        }
        FunctionSpec::Quadratic { a, b } => {
            if n != 1 {
                return Err(Failure::input("Schema", "quadratic objectives need cell_dim 1".into()));
            }
            if a.len() != m || a.iter().any(|row| row.len() != m) {
                return Err(Failure::input("DimensionMismatch", format!("A must be {m}x{m}")));
            }
            let rows = a
                .iter()
                .map(|row| row.iter().map(|e| build_number(e, 1, grid)).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()?;
            let b = match b {
                Some(b) if b.len() != m => {
                    return Err(Failure::input("DimensionMismatch", format!("b must have {m} entries")));
                }
                Some(b) => FuzzyVector::new(b.iter().map(|e| build_number(e, 1, grid)).collect::<Result<_, _>>()?)?,
                None => FuzzyVector::zero(m, 1, grid.clone()),
            };
            FuzzyFunction::quadratic(FuzzyMatrix::new(rows)?, b)?
        }
    };
    Ok(f.with_domain(domain.clone())?)
}

fn build_number(spec: &NumberSpec, n: usize, grid: &Arc<LevelGrid>) -> Result<FuzzyNCell, Failure> {
    let cells = |k: usize| -> Result<(), Failure> {
        if k == n {
            Ok(())
        } else {
            Err(Failure::input(
                "DimensionMismatch",
                format!("number has {k} cells, expected {n}"),
            ))
        }
    };
    match spec {
        NumberSpec::Crisp(c) => Ok(FuzzyNCell::crisp(&vec![*c; n], grid.clone())),
        NumberSpec::Triangular([l, c, u]) => {
            cells(1)?;
            Ok(FuzzyNCell::triangular(*l, *c, *u, grid.clone())?)
        }
        NumberSpec::Cells(tris) => {
            cells(tris.len())?;
            let parts = tris
                .iter()
                .map(|[l, c, u]| FuzzyNCell::triangular(*l, *c, *u, grid.clone()))
                .collect::<Result<Vec<_>, _>>()?;
            let lower = parts.iter().map(|p| p.lower_curve(0).to_vec()).collect();
            let upper = parts.iter().map(|p| p.upper_curve(0).to_vec()).collect();
            Ok(FuzzyNCell::from_endpoints(grid.clone(), lower, upper)?)
        }
        NumberSpec::Levels { lower, upper } => {
            cells(lower.len())?;
            cells(upper.len())?;
            let lo = lower.iter().map(|s| parse_expr(s, 0)).collect::<Result<Vec<_>, _>>()?;
            let hi = upper.iter().map(|s| parse_expr(s, 0)).collect::<Result<Vec<_>, _>>()?;
            Ok(FuzzyNCell::from_fn(grid.clone(), n, |i, r| (lo[i].eval(r, &[]), hi[i].eval(r, &[])))?)
        }
    }
}

mod problem;
mod report;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fno_core::calculus::{
    convexity_certificate, directional_derivative_with, gradient_with, DerivOptions, DerivSide,
};
use fno_core::levelsets::{big_d_l, write_csv};
use fno_core::optimize::{
    composite_check, default_lambda_grid, dual_eval, kkt_search, kkt_verify, minimize_scalarized, KktOptions,
    KktSearchOutcome, MinimizeOptions,
};
use fno_core::sampling::{convexity_triples, halton, samples_with_budget};
use fno_core::subdiff::{subdiff_box_1d, verify_subgradient_tol};
use fno_core::{FuzzyNCell, FuzzyVector, Status};

use problem::Loaded;
use report::{Failure, Outcome, Report};

#[derive(Parser)]
#[command(name = "fno", version, about = "Calculus and optimality checks for fuzzy n-cell valued functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Problem file (JSON, schema "fno/1").
    problem: PathBuf,
    /// Also write level-set rows to this CSV file.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Overrides `options.seed` from the problem file.
    #[arg(long)]
    seed: Option<u64>,
}

/// Comma-separated real vector, e.g. `0.5,-1`.
#[derive(Clone, Debug)]
struct Point(Vec<f64>);

impl FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(Point)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Right,
    Left,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the objective at a point.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        at: Point,
    },
    /// g-difference F(at) minus F(minus-at).
    Gdiff {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        at: Point,
        #[arg(long, allow_hyphen_values = true)]
        minus_at: Point,
    },
    /// D_L distance between F(at) and F(to).
    Metric {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        at: Point,
        #[arg(long, allow_hyphen_values = true)]
        to: Point,
    },
    /// One-sided directional derivative.
    Dderiv {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        at: Point,
        #[arg(long, allow_hyphen_values = true)]
        dir: Point,
        #[arg(long, value_enum, default_value = "right")]
        side: SideArg,
    },
    /// Gradient from two-sided partial derivatives.
    Grad {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        at: Point,
    },
    /// Sampled convexity inequality over the domain box.
    ConvexCheck {
        #[command(flatten)]
        common: Common,
    },
    /// Check a candidate subgradient, given as a JSON array of numbers.
    SubgradVerify {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        at: Point,
        #[arg(long)]
        candidate: String,
    },
    /// Endpoint bounds of the subdifferential of a 1-D function.
    Subdiff1d {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        at: f64,
    },
    /// Coordinate descent on the scalarized objective, then certify.
    Minimize {
        #[command(flatten)]
        common: Common,
        /// Start point; defaults to the center of the domain box.
        #[arg(long, allow_hyphen_values = true)]
        from: Option<Point>,
    },
    /// KKT conditions at a point for given multipliers.
    KktVerify {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        at: Point,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Point,
        /// Fail when the point violates a constraint.
        #[arg(long)]
        require_feasible: bool,
    },
    /// Search the multiplier grid for a KKT certificate.
    KktSearch {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        at: Point,
        #[arg(long)]
        require_feasible: bool,
    },
    /// Scalarized Lagrangian dual value over quasi-uniform samples.
    Dual {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Point,
    },
    /// Check that minus the objective gradient is a subgradient of `composite`.
    CompositeCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        at: Point,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Eval { .. } => "eval",
            Command::Gdiff { .. } => "gdiff",
            Command::Metric { .. } => "metric",
            Command::Dderiv { .. } => "dderiv",
            Command::Grad { .. } => "grad",
            Command::ConvexCheck { .. } => "convex-check",
            Command::SubgradVerify { .. } => "subgrad-verify",
            Command::Subdiff1d { .. } => "subdiff1d",
            Command::Minimize { .. } => "minimize",
            Command::KktVerify { .. } => "kkt-verify",
            Command::KktSearch { .. } => "kkt-search",
            Command::Dual { .. } => "dual",
            Command::CompositeCheck { .. } => "composite-check",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Eval { common, .. }
            | Command::Gdiff { common, .. }
            | Command::Metric { common, .. }
            | Command::Dderiv { common, .. }
            | Command::Grad { common, .. }
            | Command::ConvexCheck { common }
            | Command::SubgradVerify { common, .. }
            | Command::Subdiff1d { common, .. }
            | Command::Minimize { common, .. }
            | Command::KktVerify { common, .. }
            | Command::KktSearch { common, .. }
            | Command::Dual { common, .. }
            | Command::CompositeCheck { common, .. } => common,
        }
    }
}

/// What `--csv` should receive.
enum Levels {
    None,
    Cell(FuzzyNCell),
    Box(fno_core::subdiff::SubdiffBox1D),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let mut seed = cli.command.common().seed.unwrap_or(0);
    let report = match problem::load(&cli.command.common().problem) {
        Ok(mut loaded) => {
            if let Some(s) = cli.command.common().seed {
                loaded.options.seed = s;
            }
            seed = loaded.options.seed;
            run(&cli.command, &loaded).and_then(|(report, levels)| {
                if report.status.exit_code() < 2 {
                    if let Some(path) = &cli.command.common().csv {
                        write_levels(path, &levels)?;
                    }
                }
                Ok(report)
            })
        }
        Err(e) => Err(e),
    }
    .unwrap_or_else(|f| f.into_report(name, seed));
    println!("{}", serde_json::to_string_pretty(&report).expect("reports serialize"));
    ExitCode::from(report.status.exit_code() as u8)
}

fn write_levels(path: &Path, levels: &Levels) -> Result<(), Failure> {
    let open = || {
        File::create(path)
            .map(BufWriter::new)
            .map_err(|e| Failure::input("Io", format!("cannot write {}: {e}", path.display())))
    };
    match levels {
        Levels::None => Err(Failure::input("Csv", "this command has no level sets to export".into())),
        Levels::Cell(u) => Ok(write_csv(u, open()?)?),
        Levels::Box(b) => Ok(b.write_csv(open()?)?),
    }
}

/// Stacks the components of a vector into one number, cell index `j * n + i`.
fn stack(v: &FuzzyVector) -> Result<FuzzyNCell, Failure> {
    let parts = v.components();
    let grid = parts[0].grid().clone();
    let lower = parts.iter().flat_map(|p| (0..p.dim()).map(|i| p.lower_curve(i).to_vec())).collect();
    let upper = parts.iter().flat_map(|p| (0..p.dim()).map(|i| p.upper_curve(i).to_vec())).collect();
    Ok(FuzzyNCell::from_endpoints(grid, lower, upper)?)
}

fn samples_at(p: &Loaded, at: &[f64]) -> Result<Vec<Vec<f64>>, Failure> {
    let s = p.options.samples;
    Ok(samples_with_budget(at, &p.domain, s.uniform, s.cluster, p.options.seed)?)
}

fn run(cmd: &Command, p: &Loaded) -> Result<(Report, Levels), Failure> {
    let name = cmd.name();
    let seed = p.options.seed;
    let f = &p.objective;
    let ok = |status: Outcome| Report::new(name, status, seed);
    Ok(match cmd {
        Command::Eval { at, .. } => {
            let u = f.eval(&at.0)?;
            (ok(Outcome::Ok).value(&u), Levels::Cell(u))
        }
        Command::Gdiff { at, minus_at, .. } => {
            let u = f.eval(&at.0)?.g_diff(&f.eval(&minus_at.0)?)?;
            (ok(Outcome::Ok).value(&u), Levels::Cell(u))
        }
        Command::Metric { at, to, .. } => {
            let d = big_d_l(&f.eval(&at.0)?, &f.eval(&to.0)?)?;
            (ok(Outcome::Ok).value(d), Levels::None)
        }
        Command::Dderiv { at, dir, side, .. } => {
            let side = match side {
                SideArg::Right => DerivSide::Right,
                SideArg::Left => DerivSide::Left,
            };
            let opts = DerivOptions {
                delta_conv: p.options.delta_conv,
                ..DerivOptions::default()
            };
            let rep = directional_derivative_with(f, &at.0, &dir.0, side, &opts)?;
            let r = ok(Outcome::Ok)
                .value(&rep.value)
                .diag("side", rep.side)
                .diag("converged", rep.converged)
                .diag("step_history", &rep.step_history);
            (r, Levels::Cell(rep.value))
        }
        Command::Grad { at, .. } => {
            let opts = DerivOptions {
                delta_conv: p.options.delta_conv,
                ..DerivOptions::default()
            };
            let g = gradient_with(f, &at.0, &opts)?;
            (ok(Outcome::Ok).value(&g), Levels::Cell(stack(&g)?))
        }
        Command::ConvexCheck { .. } => {
            let triples = convexity_triples(&p.domain, p.options.convexity_probes, seed)?;
            let cert = convexity_certificate(f, &triples)?;
            (ok(cert.status.into()).certificate(&cert), Levels::None)
        }
        Command::SubgradVerify { at, candidate, .. } => {
            let v = p.vector(candidate)?;
            let z = samples_at(p, &at.0)?;
            let cert = verify_subgradient_tol(f, &at.0, &v, &z, p.options.tau_ord)?;
            (ok(cert.status.into()).certificate(&cert), Levels::Cell(stack(&v)?))
        }
        Command::Subdiff1d { at, .. } => {
            let z: Vec<f64> = samples_at(p, &[*at])?.into_iter().map(|x| x[0]).collect();
            let bx = subdiff_box_1d(f, *at, &z)?;
            let status = if bx.has_legal_member { Outcome::Ok } else { Outcome::Empty };
            (ok(status).value(&bx), Levels::Box(bx))
        }
        Command::Minimize { from, .. } => {
            let start = from.as_ref().map_or_else(|| p.center(), |x| x.0.clone());
            let opts = MinimizeOptions {
                max_sweeps: p.options.max_sweeps,
                scalarization: p.scalarization(),
                sample_box: Some(p.domain.clone()),
                seed,
                ..MinimizeOptions::default()
            };
            let out = minimize_scalarized(f, &start, &opts)?;
            let fx = f.eval(&out.x_best)?;
            let r = ok(out.report.certificate.status.into())
                .value(serde_json::json!({
                    "x_best": out.x_best,
                    "scalar": out.scalar,
                    "sweeps": out.sweeps,
                    "objective": fx,
                }))
                .certificate(&out.report.certificate)
                .diag("order_branch", &out.report.order_branch)
                .diag("subgradient_branch", &out.report.subgradient_branch);
            (r, Levels::Cell(fx))
        }
        Command::KktVerify {
            at,
            lambda,
            require_feasible,
            ..
        } => {
            let opts = kkt_options(p, *require_feasible);
            let z = samples_at(p, &at.0)?;
            let rep = kkt_verify(&p.problem()?, &at.0, &lambda.0, &z, &opts)?;
            let status = if rep.verified() {
                Outcome::Verified
            } else if rep.complementarity_ok && rep.stationarity.status == Status::Inconclusive {
                Outcome::Inconclusive
            } else {
                Outcome::Refuted
            };
            let r = ok(status).certificate(&rep.stationarity).value(&rep);
            (r, Levels::None)
        }
        Command::KktSearch {
            at, require_feasible, ..
        } => {
            let opts = kkt_options(p, *require_feasible);
            let grid = p
                .options
                .lambda_grid
                .clone()
                .unwrap_or_else(|| default_lambda_grid(p.constraints.len()));
            let z = samples_at(p, &at.0)?;
            let outcome = kkt_search(&p.problem()?, &at.0, &grid, &z, &opts)?;
            let r = match &outcome {
                KktSearchOutcome::Found { lambda, report } => ok(Outcome::Found)
                    .diag("lambda", lambda)
                    .certificate(&report.stationarity),
                KktSearchOutcome::NotFound {
                    best_lambda, failing, ..
                } => ok(Outcome::NotFound).diag("best_lambda", best_lambda).diag("failing", failing),
            };
            (r.value(&outcome), Levels::None)
        }
        Command::Dual { lambda, .. } => {
            let x = halton(&p.domain, p.options.samples.uniform, seed)?;
            let d = dual_eval(&p.problem()?, &lambda.0, &x, &p.scalarization())?;
            let value = d.value.clone();
            (ok(Outcome::Ok).value(&d).diag("samples", x.len()), Levels::Cell(value))
        }
        Command::CompositeCheck { at, .. } => {
            let g = p
                .composite
                .as_ref()
                .ok_or_else(|| Failure::input("Schema", "problem file has no `composite` function".into()))?;
            let z = samples_at(p, &at.0)?;
            let cert = composite_check(f, g, &at.0, &z)?;
            (ok(cert.status.into()).certificate(&cert), Levels::None)
        }
    })
}

fn kkt_options(p: &Loaded, require_feasible: bool) -> KktOptions {
    KktOptions {
        tau_kkt: p.options.tau_kkt,
        enforce_feasibility: require_feasible || p.options.require_feasible,
    }
}

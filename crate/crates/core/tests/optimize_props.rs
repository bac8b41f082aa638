mod common;

use common::{family, grid, nonneg_number, number, unit_box, SMOOTH_CONVEX};
use fno_core::funcspace::{DomainBox, FuzzyFunction};
use fno_core::levelsets::{order, FuzzyNCell};
use fno_core::optimize::{
    default_lambda_grid, dual_eval, kkt_search, kkt_verify, minimize_scalarized, verify_global_min, KktOptions,
    KktSearchOutcome, MinimizeOptions, Problem, Scalarization,
};
use fno_core::sampling::{cluster, default_samples, halton};
use fno_core::{Status, TAU_ORD};
use proptest::prelude::*;

fn bowl(c: &[f64]) -> String {
    c.iter()
        .enumerate()
        .map(|(i, ci)| format!("(t{} - ({ci}))^2", i + 1))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn is_positive(u: &FuzzyNCell) -> bool {
    let k = u.levels() - 1;
    u.upper(0, k) - u.lower(0, k) > 1e-3 || u.upper(0, 0) > 1e-3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn local_minima_are_global(a in nonneg_number(1), b in number(1), c in prop::collection::vec(-1.0..1.0f64, 2), off in prop::collection::vec(0.3..0.8f64, 2)) {
        let f = family(&a, &b, &bowl(&c), 2);
        let near = cluster(&c, &unit_box(2), 16, 3);
        let far = halton(&unit_box(2), 64, 3).unwrap();
        let local = verify_global_min(&f, &c, &near).unwrap();
        prop_assert!(local.certificate.is_verified());
        prop_assert!(verify_global_min(&f, &c, &far).unwrap().certificate.is_verified());
        if is_positive(&a) {
            let x0: Vec<f64> = c.iter().zip(&off).map(|(x, o)| x + o).collect();
            let moved = verify_global_min(&f, &x0, &default_samples(&x0, &unit_box(2), 3).unwrap()).unwrap();
            prop_assert!(moved.certificate.is_refuted());
        }
    }

    #[test]
    fn order_and_subgradient_branches_agree(a in nonneg_number(1), b in number(1), which in 0..5usize, t in -1.8..1.8f64, seed in 0..100u64) {
        let phi = if which < 4 { SMOOTH_CONVEX[which].0 } else { "abs(t1 - 0.3)" };
        let f = family(&a, &b, phi, 1);
        let z = default_samples(&[t], &unit_box(1), seed).unwrap();
        let rep = verify_global_min(&f, &[t], &z).unwrap();
        prop_assert_eq!(rep.order_branch.status, rep.subgradient_branch.status);
        prop_assert_eq!(rep.certificate.status, rep.order_branch.status);
    }

    #[test]
    fn kkt_points_are_constrained_minima(step in 1..=16usize, d in 0.1..1.0f64, b in number(1)) {
        // min a t^2 + b  s.t.  d - t <= 0, with a chosen so that the
        // multiplier 2 a d lies on the default grid.
        let lambda = step as f64 * 0.25;
        let a = lambda / (2.0 * d);
        let f = family(&FuzzyNCell::crisp(&[a], grid()), &b, "t1^2", 1);
        let con = format!("{d} - t1");
        let g = FuzzyFunction::from_exprs(1, grid(), &[&con], &[&con]).unwrap();
        let dom = unit_box(1);
        let p = Problem::new(f.clone(), vec![g.clone()], dom.clone()).unwrap();
        let z = default_samples(&[d], &dom, 0).unwrap();
        let opts = KktOptions::default();
        let rep = kkt_verify(&p, &[d], &[lambda], &z, &opts).unwrap();
        prop_assert!(rep.verified());
        prop_assert!(rep.feasible);
        let zero = FuzzyNCell::zero(1, grid());
        let fstar = f.eval(&[d]).unwrap();
        for x in &z {
            if order(&g.eval(x).unwrap(), &zero, TAU_ORD).unwrap().is_le() {
                prop_assert!(order(&fstar, &f.eval(x).unwrap(), TAU_ORD).unwrap().is_le());
            }
        }
        let found = kkt_search(&p, &[d], &default_lambda_grid(1), &z, &opts).unwrap();
        let is_found = matches!(found, KktSearchOutcome::Found { .. });
        prop_assert!(is_found);
    }

    #[test]
    fn zero_multipliers_have_exact_complementarity(a in nonneg_number(1), b in number(1), t in -1.5..1.5f64) {
        let f = family(&a, &b, "t1^2", 1);
        let g = FuzzyFunction::from_exprs(1, grid(), &["t1 - 3 + r"], &["t1 - 1 - r"]).unwrap();
        let p = Problem::new(f, vec![g], unit_box(1)).unwrap();
        let z = default_samples(&[t], &unit_box(1), 0).unwrap();
        let rep = kkt_verify(&p, &[t], &[0.0], &z, &KktOptions::default()).unwrap();
        prop_assert_eq!(rep.complementarity, vec![0.0]);
        prop_assert!(rep.complementarity_ok);
    }

    #[test]
    fn dual_is_monotone_and_weak(a in nonneg_number(1), b in number(1), lambda in 0.0..4.0f64, extra in prop::collection::vec(-2.0..2.0f64, 1..30)) {
        let f = family(&a, &b, "t1^2", 1);
        let g = FuzzyFunction::from_exprs(1, grid(), &["0.5 - t1 - 1 + r"], &["0.5 - t1 + 1 - r"]).unwrap();
        let p = Problem::new(f.clone(), vec![g.clone()], unit_box(1)).unwrap();
        let coarse = halton(&unit_box(1), 16, 0).unwrap();
        let mut fine = coarse.clone();
        fine.extend(extra.into_iter().map(|x| vec![x]));
        let s = Scalarization::Mean;
        let d_coarse = dual_eval(&p, &[lambda], &coarse, &s).unwrap();
        let d_fine = dual_eval(&p, &[lambda], &fine, &s).unwrap();
        prop_assert!(d_fine.scalar <= d_coarse.scalar);
        let zero = FuzzyNCell::zero(1, grid());
        for x in &fine {
            if order(&g.eval(x).unwrap(), &zero, 0.0).unwrap().is_le() {
                prop_assert!(d_fine.scalar <= s.apply(&f.eval(x).unwrap()).unwrap() + 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn minimizer_finds_certified_bowl_bottom(a in nonneg_number(1), b in number(1), c in prop::collection::vec(-1.0..1.0f64, 2), start in prop::collection::vec(-2.0..2.0f64, 2)) {
        prop_assume!(is_positive(&a));
        let f = family(&a, &b, &bowl(&c), 2).with_domain(unit_box(2)).unwrap();
        let out = minimize_scalarized(&f, &start, &MinimizeOptions::default()).unwrap();
        for (x, ci) in out.x_best.iter().zip(&c) {
            prop_assert!((x - ci).abs() < 1e-4, "{:?} vs {:?}", out.x_best, c);
        }
        prop_assert_eq!(out.report.certificate.status, Status::Verified);
    }
}

#[test]
fn minimizer_respects_the_domain() {
    let f = FuzzyFunction::from_exprs(1, grid(), &["t1 - 1 + r"], &["t1 + 1 - r"])
        .unwrap()
        .with_domain(DomainBox::cube(1, 0.5, 2.0).unwrap())
        .unwrap();
    let out = minimize_scalarized(&f, &[1.5], &MinimizeOptions::default()).unwrap();
    assert!((out.x_best[0] - 0.5).abs() < 1e-6);
}

mod common;

use common::{family, grid, nonneg_number, number, unit_box, SMOOTH_CONVEX};
use fno_core::calculus::{
    check_gradient_identity, convexity_certificate, directional_derivative, endpoint_dir_derivative, gradient,
    DerivSide,
};
use fno_core::funcspace::{DomainBox, FuzzyFunction, FuzzyMatrix};
use fno_core::levelsets::{big_d_l, order, FuzzyNCell, FuzzyVector, Side};
use fno_core::sampling::convexity_triples;
use proptest::prelude::*;

/// Fuzzy quadratic with nonnegative diagonally dominant end matrices.
fn quadratic(m: usize) -> impl Strategy<Value = FuzzyFunction> {
    (
        prop::collection::vec(nonneg_number(1), m * m),
        prop::collection::vec(number(1), m),
    )
        .prop_map(move |(raw, b)| {
            let g = grid();
            let mut rows = vec![vec![FuzzyNCell::zero(1, g.clone()); m]; m];
            for k in 0..m {
                for j in 0..m {
                    rows[k][j] = if k < j {
                        raw[k * m + j].scale(0.1)
                    } else if k > j {
                        raw[j * m + k].scale(0.1)
                    } else {
                        raw[k * m + k].add(&FuzzyNCell::crisp(&[m as f64 * 2.0], g.clone())).unwrap()
                    };
                }
            }
            FuzzyFunction::quadratic(FuzzyMatrix::new(rows).unwrap(), FuzzyVector::new(b).unwrap()).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn directional_derivative_matches_gradient_dot(
        f in quadratic(2),
        x in prop::collection::vec(0.2..1.8f64, 2),
        d in prop::collection::vec(0.0..1.0f64, 2),
    ) {
        let lhs = directional_derivative(&f, &x, &d).unwrap().value;
        let rhs = gradient(&f, &x).unwrap().dot_real(&d).unwrap();
        prop_assert!(big_d_l(&lhs, &rhs).unwrap() < 1e-5);
        prop_assert!(check_gradient_identity(&f, &x, &d).unwrap().is_verified());
    }

    #[test]
    fn one_dimensional_identity_for_any_direction(
        a in nonneg_number(1),
        b in number(1),
        which in 0..4usize,
        t in -1.5..1.5f64,
        d in -2.0..2.0f64,
    ) {
        let f = family(&a, &b, SMOOTH_CONVEX[which].0, 1);
        prop_assert!(check_gradient_identity(&f, &[t], &[d]).unwrap().is_verified());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn convex_difference_dominates_derivative(
        a in nonneg_number(1),
        b in number(1),
        which in 0..4usize,
        t in -1.8..1.8f64,
        y in -1.8..1.8f64,
    ) {
        let f = family(&a, &b, SMOOTH_CONVEX[which].0, 1);
        let diff = f.eval(&[y]).unwrap().g_diff(&f.eval(&[t]).unwrap()).unwrap();
        let dd = directional_derivative(&f, &[t], &[y - t]).unwrap().value;
        prop_assert!(order(&diff, &dd, 1e-6).unwrap().is_ge());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn convex_difference_dominates_derivative_in_two_dimensions(
        a in nonneg_number(1),
        b in number(1),
        t in prop::collection::vec(-1.5..1.5f64, 2),
        y in prop::collection::vec(-1.5..1.5f64, 2),
    ) {
        let f = family(&a, &b, "exp(t1 - t2) + t1^2 + t1*t2 + t2^2", 2);
        let d: Vec<f64> = y.iter().zip(&t).map(|(p, q)| p - q).collect();
        let diff = f.eval(&y).unwrap().g_diff(&f.eval(&t).unwrap()).unwrap();
        let dd = directional_derivative(&f, &t, &d).unwrap().value;
        prop_assert!(order(&diff, &dd, 1e-6).unwrap().is_ge());
    }

    #[test]
    fn opposite_directions_are_negatives(
        a in nonneg_number(1),
        b in number(1),
        which in 0..4usize,
        t in -1.5..1.5f64,
        d in 0.1..2.0f64,
    ) {
        let f = family(&a, &b, SMOOTH_CONVEX[which].0, 1);
        let fwd = directional_derivative(&f, &[t], &[d]).unwrap().value;
        let back = directional_derivative(&f, &[t], &[-d]).unwrap().value;
        prop_assert!(big_d_l(&fwd, &back.neg()).unwrap() < 1e-6);
    }

    #[test]
    fn convex_endpoints_pass_the_sampled_inequality(a in nonneg_number(1), b in number(1), which in 0..4usize, seed in 0..1000u64) {
        let f = family(&a, &b, SMOOTH_CONVEX[which].0, 1);
        let triples = convexity_triples(&unit_box(1), 20, seed).unwrap();
        prop_assert!(convexity_certificate(&f, &triples).unwrap().is_verified());
    }

    #[test]
    fn quadratic_values_are_legal(f in quadratic(3), x in prop::collection::vec(0.0..3.0f64, 3)) {
        prop_assert!(f.eval(&x).is_ok());
    }
}

type Analytic = fn(f64, f64) -> f64;

/// Endpoint expressions in `t1` and `r` with their analytic `t`-derivative,
/// tagged with the side on which their monotonicity in `r` is legal.
const CORPUS: [(&str, Side, Analytic); 10] = [
    ("t1^2 - 1 + r", Side::Lower, |t, _| 2.0 * t),
    ("(1 - r)*(abs(t1) + 1)", Side::Upper, |t, r| (1.0 - r) * t.signum()),
    ("3*t1^3 - 2*t1", Side::Lower, |t, _| 9.0 * t * t - 2.0),
    ("r*t1^4", Side::Lower, |t, r| 4.0 * r * t.powi(3)),
    ("abs(t1 - 0.5)*(2 - r)", Side::Upper, |t, r| (2.0 - r) * (t - 0.5).signum()),
    ("(t1 + r)^2 - 2*r*t1", Side::Lower, |t, _| 2.0 * t),
    ("t1^5 - t1^3 + t1", Side::Upper, |t, _| 5.0 * t.powi(4) - 3.0 * t * t + 1.0),
    ("abs(t1)^3", Side::Lower, |t, _| 3.0 * t * t.abs()),
    ("(1 + r)*t1^2 - abs(t1 + 1)", Side::Lower, |t, r| 2.0 * (1.0 + r) * t - (t + 1.0).signum()),
    ("exp(t1)*r", Side::Lower, |t, r| t.exp() * r),
];

#[test]
fn endpoint_derivatives_match_analytic_corpus() {
    let g = grid();
    let points = [-1.3, -0.4, 0.35, 0.9, 1.7];
    for (expr, side, df) in CORPUS {
        let (lo, hi) = match side {
            Side::Lower => (expr, "1000"),
            Side::Upper => ("-1000", expr),
        };
        let f = FuzzyFunction::from_exprs(1, g.clone(), &[lo], &[hi]).unwrap();
        for t in points {
            for k in [0, 7, 20] {
                let got = endpoint_dir_derivative(&f, &[t], &[1.0], 0, k, side, DerivSide::Right).unwrap();
                let want = df(t, g.level(k));
                assert!((got - want).abs() < 1e-6, "{expr} at t={t}, k={k}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn boundary_partials_fall_back_to_the_open_side() {
    let f = FuzzyFunction::from_exprs(1, grid(), &["t1^2"], &["t1^2 + 1"])
        .unwrap()
        .with_domain(DomainBox::cube(1, 0.0, 1.0).unwrap())
        .unwrap();
    let at_lo = gradient(&f, &[0.0]).unwrap();
    let at_hi = gradient(&f, &[1.0]).unwrap();
    assert!(big_d_l(at_lo.get(0), &FuzzyNCell::zero(1, grid())).unwrap() < 1e-9);
    assert!(big_d_l(at_hi.get(0), &FuzzyNCell::crisp(&[2.0], grid())).unwrap() < 1e-9);
}

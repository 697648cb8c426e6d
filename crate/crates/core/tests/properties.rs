use neumann_core::bounds::{remainder_action, remainder_scalar};
use neumann_core::coeffs::{coefficients, coefficients_with, krylov_matrix, solve_row_system, KrylovScaling};
use neumann_core::expm::{expm, expm_action_e1};
use neumann_core::exprlang::{parse, Params};
use neumann_core::series::MAX_ORDER;
use neumann_core::{DenseMatrix, HessenbergOperator, TaylorJet};
use proptest::prelude::*;

fn params(alpha: f64) -> Params {
    let mut p = Params::new();
    p.insert("alpha".into(), alpha);
    p
}

fn jet_strategy(order: usize) -> impl Strategy<Value = TaylorJet> {
    prop::collection::vec(-1.0..1.0f64, order).prop_map(|c| TaylorJet::from_coeffs(c).unwrap())
}

fn jet_triple() -> impl Strategy<Value = (TaylorJet, TaylorJet, TaylorJet)> {
    (1usize..40).prop_flat_map(|m| (jet_strategy(m), jet_strategy(m), jet_strategy(m)))
}

/// Coefficients of the product of `|a|` and `|b|`: the scale of each product coefficient.
fn abs_product(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len()).map(|k| (0..=k).map(|i| (a[i] * b[k - i]).abs()).sum()).collect()
}

/// Entire functions of `s` built from `s`, `alpha` and small constants.
fn entire_expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("s".to_string()),
        Just("alpha".to_string()),
        (-2.0..2.0f64).prop_map(|c| format!("({c:.3})")),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} + {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} - {b})")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a} * {b})")),
            inner.clone().prop_map(|a| format!("exp({a})")),
            inner.clone().prop_map(|a| format!("sin({a})")),
            inner.clone().prop_map(|a| format!("cos({a})")),
            inner.clone().prop_map(|a| format!("-{a}")),
            inner.clone().prop_map(|a| format!("({a})^2")),
            inner.prop_map(|a| format!("({a}) / (2 + cos(s))")),
        ]
    })
}

/// Any grammatical expression, not necessarily analytic anywhere useful.
fn any_expr() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("s".to_string()),
        Just("alpha".to_string()),
        (0.0..100.0f64).prop_map(|c| format!("{c}")),
        (0.0..1e-3f64).prop_map(|c| format!("{c:e}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}+{b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}-{b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}*{b}")),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a}/({b})")),
            (inner.clone(), 0u32..5).prop_map(|(a, k)| format!("({a})^{k}")),
            inner.clone().prop_map(|a| format!("-{a}")),
            inner.clone().prop_map(|a| format!("log({a})")),
            inner.clone().prop_map(|a| format!("sqrt({a})")),
            inner.prop_map(|a| format!("exp({a})")),
        ]
    })
}

fn hessenberg(n: usize, raw: &[f64], target: f64) -> DenseMatrix {
    let a = DenseMatrix::from_fn(n, |i, j| if i <= j + 1 { raw[i * n + j] } else { 0.0 });
    let norm = a.norm_one();
    if norm > 0.0 {
        a.scaled(target / norm)
    } else {
        a
    }
}

/// Upper Hessenberg matrices with dimension in `dims` and `‖A‖₁ = target ∈ (0, max_norm]`.
fn hessenberg_strategy(dims: core::ops::RangeInclusive<usize>, max_norm: f64) -> impl Strategy<Value = DenseMatrix> {
    dims.prop_flat_map(move |n| {
        (prop::collection::vec(-1.0..1.0f64, n * n), 1e-3..max_norm).prop_map(move |(raw, t)| hessenberg(n, &raw, t))
    })
}

fn builtins() -> Vec<HessenbergOperator> {
    vec![
        HessenbergOperator::jordan(),
        HessenbergOperator::bessel(),
        HessenbergOperator::modified_bessel(),
        HessenbergOperator::shifted_bessel(0.5).unwrap(),
    ]
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// `‖ ε |G| |K⁻¹| ‖₂` for the unscaled system: what rounding the derivatives
/// `g^(ℓ)(0)` to double alone moves the solution by. At `n` near 25 this
/// exceeds `1e-8` of `‖W‖₂` for Bessel-type operators.
fn unscaled_rhs_floor(h: &DenseMatrix, g: &[f64]) -> f64 {
    let k = krylov_matrix(h, KrylovScaling::Unscaled).unwrap();
    let n = g.len();
    let mut delta = vec![0.0; n];
    for (i, gi) in g.iter().enumerate() {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        let row = solve_row_system(&k, &e).unwrap();
        for (d, r) in delta.iter_mut().zip(&row) {
            *d += f64::EPSILON * gi.abs() * r.abs();
        }
    }
    norm2(&delta)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|m| m as f64).product()
}

proptest! {
    #[test]
    fn jet_product_commutes((a, b, _) in jet_triple()) {
        let ab = a.mul(&b).unwrap();
        let ba = b.mul(&a).unwrap();
        let scale = abs_product(a.coeffs(), b.coeffs());
        for k in 0..ab.order() {
            prop_assert!((ab.coeffs()[k] - ba.coeffs()[k]).abs() <= 1e-14 * scale[k]);
        }
    }

    #[test]
    fn jet_product_associates((a, b, c) in jet_triple()) {
        let left = a.mul(&b).unwrap().mul(&c).unwrap();
        let right = a.mul(&b.mul(&c).unwrap()).unwrap();
        let abs = |j: &TaylorJet| j.coeffs().iter().map(|x| x.abs()).collect::<Vec<_>>();
        let scale = abs_product(&abs_product(&abs(&a), &abs(&b)), &abs(&c));
        for k in 0..left.order() {
            prop_assert!((left.coeffs()[k] - right.coeffs()[k]).abs() <= 1e-14 * scale[k]);
        }
    }

    #[test]
    fn exp_chain_rule(u in (2usize..40).prop_flat_map(jet_strategy)) {
        let e = u.exp();
        let lhs = e.differentiate();
        let rhs = u.differentiate().mul(&e).unwrap();
        let du: Vec<f64> = u.differentiate().coeffs().iter().map(|x| x.abs()).collect();
        let ae: Vec<f64> = e.coeffs().iter().map(|x| x.abs()).collect();
        let scale = abs_product(&du, &ae);
        // the last coefficient of the derivative is truncated on both sides differently
        for k in 0..u.order() - 1 {
            prop_assert!(
                (lhs.coeffs()[k] - rhs.coeffs()[k]).abs() <= 1e-13 * scale[k].max(1e-300),
                "k = {}: {} vs {}", k, lhs.coeffs()[k], rhs.coeffs()[k]
            );
        }
    }

    #[test]
    fn jet_sum_matches_pointwise(text in entire_expr(), alpha in -1.0..1.0f64, s in -1.0..1.0f64) {
        let e = parse(&text).unwrap();
        let p = params(alpha);
        let jet = e.eval_jet(60, &p).unwrap();
        let point = e.eval_point(s, &p).unwrap();
        let sum = jet.eval_polynomial(s);
        let scale: f64 = jet.coeffs().iter().rev().fold(0.0, |acc, c| acc * s.abs() + c.abs());
        // only where 60 terms already hold the series to working accuracy
        let long = e.eval_jet(MAX_ORDER, &p).map(|j| j.eval_polynomial(s));
        prop_assume!(matches!(long, Ok(v) if (v - sum).abs() <= 1e-14 * scale));
        prop_assert!(
            (sum - point).abs() <= 1e-12 * point.abs().max(scale),
            "{}: jet {} point {}", text, sum, point
        );
    }

    #[test]
    fn print_parse_round_trip(text in any_expr()) {
        let e = parse(&text).unwrap();
        let printed = e.to_string();
        let again = parse(&printed).unwrap();
        prop_assert_eq!(&again, &e);
        prop_assert_eq!(again.to_string(), printed);
    }

    #[test]
    fn exp_times_exp_of_negative_is_identity(a in hessenberg_strategy(1..=50, 4.0)) {
        let mut prod = expm(&a).unwrap().matmul(&expm(&a.scaled(-1.0)).unwrap());
        prod.add_identity(-1.0);
        prop_assert!(prod.norm_one() <= 1e-12, "deviation {}", prod.norm_one());
    }

    #[test]
    fn exponential_semigroup(a in hessenberg_strategy(1..=30, 2.0), t in -2.0..2.0f64, u in -2.0..2.0f64) {
        let lhs = expm(&a.scaled(t + u)).unwrap();
        let rhs = expm(&a.scaled(t)).unwrap().matmul(&expm(&a.scaled(u)).unwrap());
        let mut diff = lhs.clone();
        diff.add_scaled(-1.0, &rhs);
        prop_assert!(diff.norm_one() <= 1e-11 * lhs.norm_one().max(1.0), "deviation {}", diff.norm_one());
    }

    #[test]
    fn jordan_action_is_taylor(n in 1usize..=30, t in -10.0..10.0f64) {
        let h = HessenbergOperator::jordan().truncate(n).unwrap();
        let v = expm_action_e1(&h, t).unwrap();
        for (l, x) in v.iter().enumerate() {
            let y = t.powi(l as i32) / factorial(l);
            prop_assert!((x - y).abs() <= 1e-13 * y.abs().max(1.0), "l = {}: {} vs {}", l, x, y);
        }
    }

    #[test]
    fn moment_matching(text in entire_expr(), alpha in -1.0..1.0f64, n in 1usize..=25, k in 0usize..4) {
        let op = &builtins()[k];
        let g = parse(&text).unwrap();
        let jet = g.eval_jet(n, &params(alpha)).unwrap();
        let h = op.truncate(n).unwrap();
        let w = coefficients(&jet, &h).unwrap();
        let derivs = jet.derivatives_row(n).unwrap();
        let mut v = vec![0.0; n];
        v[0] = 1.0;
        for (l, d) in derivs.iter().enumerate() {
            let lhs: f64 = w.values.iter().zip(&v).map(|(a, b)| a * b).sum();
            let scale: f64 = w.values.iter().zip(&v).map(|(a, b)| (a * b).abs()).sum();
            prop_assert!(
                (lhs - d).abs() <= 1e-9 * d.abs().max(scale).max(1e-300),
                "{} with {}: l = {}: {} vs {}", text, op, l, lhs, d
            );
            v = h.matvec(&v);
        }
    }

    #[test]
    fn coefficients_nest(text in entire_expr(), n in 2usize..=30, k in 0usize..4) {
        let op = &builtins()[k];
        let g = parse(&text).unwrap();
        let p = params(0.3);
        let big = coefficients(&g.eval_jet(n, &p).unwrap(), &op.truncate(n).unwrap()).unwrap();
        let small = coefficients(&g.eval_jet(n - 1, &p).unwrap(), &op.truncate(n - 1).unwrap()).unwrap();
        prop_assert_eq!(&big.values[..n - 1], &small.values[..]);
    }

    #[test]
    fn scaled_and_unscaled_solves_agree(text in entire_expr(), n in 1usize..=25, k in 0usize..4) {
        let op = &builtins()[k];
        let jet = parse(&text).unwrap().eval_jet(n, &params(-0.4)).unwrap();
        let h = op.truncate(n).unwrap();
        let a = coefficients_with(&jet, &h, KrylovScaling::Factorial).unwrap();
        let b = coefficients_with(&jet, &h, KrylovScaling::Unscaled).unwrap();
        let diff: Vec<f64> = a.values.iter().zip(&b.values).map(|(x, y)| x - y).collect();
        let wn = norm2(&a.values);
        prop_assume!(wn > 0.0);
        let rel = norm2(&diff) / wn;
        let floor = unscaled_rhs_floor(&h, &jet.derivatives_row(n).unwrap()) / wn;
        prop_assert!(rel <= 1e-8_f64.max(floor), "normwise relative {:e}, floor {:e}", rel, floor);
    }

    #[test]
    fn truncations_are_nested_hessenberg(n in 1usize..=200, m in 1usize..=200, k in 0usize..4) {
        let op = &builtins()[k];
        let (m, n) = (m.min(n), m.max(n));
        let big = op.truncate(n).unwrap();
        prop_assert_eq!(big.leading_block(m), op.truncate(m).unwrap());
        prop_assert!(big.below_subdiagonal_max().map_or(true, |(_, _, v)| v == 0.0));
    }

    #[test]
    fn remainder_is_monotone(z in 0.0..50.0f64, n in 0usize..100) {
        prop_assert!(remainder_scalar(z, n + 1) <= remainder_scalar(z, n));
    }

    #[test]
    fn remainder_action_is_dominated(h in hessenberg_strategy(1..=30, 3.0), s in -3.0..3.0f64, n in 0usize..=20) {
        let r = remainder_action(&h, s, n).unwrap();
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        let h2 = h.spectral_norm_estimate(500);
        prop_assert!(norm <= remainder_scalar(s.abs() * h2, n) * (1.0 + 1e-10) + 1e-300);
    }
}

#[test]
fn builtin_spectral_norms_respect_c() {
    for op in builtins() {
        for n in [1, 2, 5, 20, 50, 100, 200] {
            let est = op.truncate(n).unwrap().spectral_norm_estimate(300);
            assert!(est <= op.norm_bound() + 1e-12, "{op} at n = {n}: {est}");
        }
    }
}

/// Central differences with fourth-order stencils.
fn finite_difference(f: impl Fn(f64) -> f64, order: usize, h: f64) -> f64 {
    let (offsets, weights, power): (&[f64], &[f64], i32) = match order {
        0 => (&[0.0], &[1.0], 0),
        1 => (&[-2.0, -1.0, 1.0, 2.0], &[1.0 / 12.0, -2.0 / 3.0, 2.0 / 3.0, -1.0 / 12.0], 1),
        2 => (&[-2.0, -1.0, 0.0, 1.0, 2.0], &[-1.0 / 12.0, 4.0 / 3.0, -2.5, 4.0 / 3.0, -1.0 / 12.0], 2),
        3 => (&[-3.0, -2.0, -1.0, 1.0, 2.0, 3.0], &[0.125, -1.0, 1.625, -1.625, 1.0, -0.125], 3),
        4 => (
            &[-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0],
            &[-1.0 / 6.0, 2.0, -6.5, 28.0 / 3.0, -6.5, 2.0, -1.0 / 6.0],
            4,
        ),
        _ => unreachable!(),
    };
    offsets.iter().zip(weights).map(|(o, w)| w * f(o * h)).sum::<f64>() / h.powi(power)
}

#[test]
fn derivatives_match_finite_differences() {
    let cases = [
        "exp(alpha*s)*(sin(s/3)+cos(s))",
        "cos(s)",
        "exp(s)/(2+sin(s))",
        "log(1+s/2)",
        "sqrt(4+s)*s^3",
    ];
    for text in cases {
        let e = parse(text).unwrap();
        let p = params(0.5);
        let row = e.eval_jet(5, &p).unwrap().derivatives_row(5).unwrap();
        for (k, d) in row.iter().enumerate() {
            let fd = finite_difference(|s| e.eval_point(s, &p).unwrap(), k, 0.02);
            assert!((fd - d).abs() <= 1e-5 * d.abs().max(1.0), "{text}: order {k}: {d} vs {fd}");
        }
    }
}

#[test]
fn unscaled_floor_exceeds_tolerance_for_bessel_cos_25() {
    let jet = parse("cos(s)").unwrap().eval_jet(25, &Params::new()).unwrap();
    let h = HessenbergOperator::bessel().truncate(25).unwrap();
    let a = coefficients_with(&jet, &h, KrylovScaling::Factorial).unwrap();
    let b = coefficients_with(&jet, &h, KrylovScaling::Unscaled).unwrap();
    let exact: Vec<f64> = (0..25).map(|l| if l == 0 { 1.0 } else { [2.0, 0.0, -2.0, 0.0][l % 4] }).collect();
    let err = |w: &[f64]| norm2(&w.iter().zip(&exact).map(|(x, y)| x - y).collect::<Vec<_>>()) / norm2(&exact);
    let floor = unscaled_rhs_floor(&h, &jet.derivatives_row(25).unwrap()) / norm2(&exact);
    assert!(err(&a.values) < 1e-9, "scaled {:e}", err(&a.values));
    assert!(err(&b.values) > 1e-8 && err(&b.values) <= floor, "unscaled {:e}, floor {:e}", err(&b.values), floor);
}

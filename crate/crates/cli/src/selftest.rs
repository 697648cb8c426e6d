//! Identity suites run by `neumann selftest`.

use neumann_core::basis::{bessel_i_ref, bessel_j_ref};
use neumann_core::bounds::{remainder_action, remainder_scalar};
use neumann_core::coeffs::coefficients;
use neumann_core::expm::expm;
use neumann_core::exprlang::{parse, Params};
use neumann_core::pipeline::{run_expansion, RunOptions};
use neumann_core::{DenseMatrix, HessenbergOperator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Check {
    pub suite: &'static str,
    pub identity: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(suite: &'static str, identity: impl Into<String>, err: f64, tol: f64) -> Self {
        Self {
            suite,
            identity: identity.into(),
            passed: err <= tol,
            detail: format!("max error {err:.3e}, tolerance {tol:.0e}"),
        }
    }

    fn failed(suite: &'static str, identity: impl Into<String>, detail: impl ToString) -> Self {
        Self { suite, identity: identity.into(), passed: false, detail: detail.to_string() }
    }
}

pub fn run_all() -> Vec<Check> {
    let mut checks = Vec::new();
    checks.extend(taylor());
    checks.extend(jacobi_anger());
    checks.extend(modified_bessel());
    checks.extend(matrix_exponential());
    checks.extend(remainders());
    checks
}

fn max_dev(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn coefficient_check(
    suite: &'static str,
    identity: &str,
    expr: &str,
    op: &HessenbergOperator,
    expect: &[f64],
    tol: f64,
) -> Check {
    let result = parse(expr)
        .and_then(|g| g.eval_jet(expect.len(), &Params::new()))
        .and_then(|jet| coefficients(&jet, &op.truncate(expect.len())?));
    match result {
        Ok(w) => Check::new(suite, identity, max_dev(&w.values, expect), tol),
        Err(e) => Check::failed(suite, identity, e),
    }
}

fn sample_points() -> impl Iterator<Item = f64> {
    (0..20).map(|k| -9.5 + k as f64)
}

fn taylor() -> Vec<Check> {
    const SUITE: &str = "Jordan/Taylor";
    let jordan = HessenbergOperator::jordan();
    let mut out = vec![coefficient_check(SUITE, "w_l = g^(l)(0) for g = exp", "exp(s)", &jordan, &[1.0; 20], 1e-12)];
    let g = parse("exp(s)").unwrap();
    let identity = "sum_{l<20} phi_l(1) = e";
    out.push(match run_expansion(&g, &Params::new(), &jordan, 20, 1.0, &RunOptions::default()) {
        Ok(run) => Check::new(SUITE, identity, run.records[19].rel_error, 1e-12),
        Err(e) => Check::failed(SUITE, identity, e),
    });
    out
}

fn jacobi_anger() -> Vec<Check> {
    const SUITE: &str = "Jacobi-Anger";
    let bessel = HessenbergOperator::bessel();
    let cos_w: Vec<f64> = (0..12).map(cos_w_full).collect();
    let sin_w: Vec<f64> = (0..12).map(|l| [0.0, 2.0, 0.0, -2.0][l % 4]).collect();
    let mut out = vec![
        coefficient_check(SUITE, "cos = J_0 + 2 sum (-1)^k J_2k (coefficients)", "cos(s)", &bessel, &cos_w, 1e-8),
        coefficient_check(SUITE, "sin = 2 sum (-1)^k J_2k+1 (coefficients)", "sin(s)", &bessel, &sin_w, 1e-8),
    ];
    // both sides at sample points, with the series reference for J_l
    let mut err: f64 = 0.0;
    for t in sample_points() {
        let (mut c, mut s) = (0.0, 0.0);
        for l in 0..60 {
            let j = bessel_j_ref(l, t).unwrap_or(f64::NAN);
            c += cos_w_full(l) * j;
            s += sin_w[l % 4] * j;
        }
        err = err.max((c - t.cos()).abs()).max((s - t.sin()).abs());
    }
    out.push(Check::new(SUITE, "cos, sin = Bessel sums at 20 points", err, 1e-10));
    out
}

fn cos_w_full(l: usize) -> f64 {
    match l {
        0 => 1.0,
        l if l % 2 == 1 => 0.0,
        l if l % 4 == 0 => 2.0,
        _ => -2.0,
    }
}

fn modified_bessel() -> Vec<Check> {
    const SUITE: &str = "modified-Bessel/exp";
    let op = HessenbergOperator::modified_bessel();
    let expect: Vec<f64> = (0..10).map(|l| if l == 0 { 1.0 } else { 2.0 }).collect();
    let mut out = vec![coefficient_check(SUITE, "exp = I_0 + 2 sum I_k (coefficients)", "exp(s)", &op, &expect, 1e-8)];
    let mut err: f64 = 0.0;
    for t in sample_points() {
        let sum: f64 = (0..80).map(|l| if l == 0 { 1.0 } else { 2.0 } * bessel_i_ref(l, t).unwrap_or(f64::NAN)).sum();
        err = err.max((sum - t.exp()).abs() / t.abs().exp());
    }
    out.push(Check::new(SUITE, "exp = I_0 + 2 sum I_k at 20 points (relative to e^|t|)", err, 1e-12));
    out
}

fn matrix_exponential() -> Vec<Check> {
    const SUITE: &str = "matrix exponential";
    let mut out = Vec::new();
    for t in [1.0, 5.0, 10.0] {
        let identity = format!("exp(t J_10) columns = t^l/l! at t = {t}");
        let a = match HessenbergOperator::jordan().truncate(10) {
            Ok(j) => j.scaled(t),
            Err(e) => {
                out.push(Check::failed(SUITE, identity, e));
                continue;
            }
        };
        match expm(&a) {
            Ok(e) => {
                let mut err: f64 = 0.0;
                for i in 0..10 {
                    for j in 0..10 {
                        let y = if i >= j { t.powi((i - j) as i32) / factorial(i - j) } else { 0.0 };
                        err = err.max((e[(i, j)] - y).abs() / y.abs().max(1.0));
                    }
                }
                out.push(Check::new(SUITE, identity, err, 1e-13));
            }
            Err(e) => out.push(Check::failed(SUITE, identity, e)),
        }
    }

    let identity = "exp(A) exp(-A) = I for 100 random Hessenberg A, n <= 50, |A|_1 <= 4";
    let mut rng = ChaCha8Rng::seed_from_u64(0x6e65_756d);
    let mut err: f64 = 0.0;
    for _ in 0..100 {
        let a = random_hessenberg(&mut rng);
        match expm(&a).and_then(|p| Ok(p.matmul(&expm(&a.scaled(-1.0))?))) {
            Ok(mut prod) => {
                prod.add_identity(-1.0);
                err = err.max(prod.norm_one());
            }
            Err(e) => {
                out.push(Check::failed(SUITE, identity, e));
                return out;
            }
        }
    }
    out.push(Check::new(SUITE, identity, err, 1e-12));
    out
}

/// Random upper Hessenberg matrix, dimension 1..=50, `‖A‖₁ ∈ (0, 4]`.
pub fn random_hessenberg(rng: &mut impl Rng) -> DenseMatrix {
    let n = rng.gen_range(1..=50);
    let a = DenseMatrix::from_fn(n, |i, j| if i <= j + 1 { rng.gen_range(-1.0..1.0) } else { 0.0 });
    let target = rng.gen_range(0.0..4.0_f64).max(1e-3);
    let norm = a.norm_one();
    if norm > 0.0 {
        a.scaled(target / norm)
    } else {
        a
    }
}

fn remainders() -> Vec<Check> {
    const SUITE: &str = "remainder";
    let e = std::f64::consts::E;
    let mut out = vec![
        Check::new(SUITE, "R_1(1) = e - 1", (remainder_scalar(1.0, 1) - (e - 1.0)).abs(), 1e-12),
        Check::new(SUITE, "R_3(2) = e^2 - 5", (remainder_scalar(2.0, 3) - (e * e - 5.0)).abs(), 1e-12),
    ];
    let identity = "R_2(J_6) e_1 = (0, 0, 1/2, 1/6, 1/24, 1/120)";
    let expect = [0.0, 0.0, 0.5, 1.0 / 6.0, 1.0 / 24.0, 1.0 / 120.0];
    out.push(match HessenbergOperator::jordan().truncate(6).and_then(|h| remainder_action(&h, 1.0, 2)) {
        Ok(v) => Check::new(SUITE, identity, max_dev(&v, &expect), 1e-15),
        Err(e) => Check::failed(SUITE, identity, e),
    });
    out
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|m| m as f64).product()
}

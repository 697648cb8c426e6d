//! Dense matrix exponential by scaling and squaring with diagonal Padé
//! approximants of degree 3, 5, 7, 9 or 13.
//!
//! The degree is the smallest whose θ threshold exceeds `‖A‖₁`; above θ₁₃ the
//! matrix is scaled by `2^-s` so that `‖A‖₁/2^s ≤ θ₁₃` and the result is
//! squared `s` times.
//!
//! Triangular input (upper or lower) is scaled to `‖A‖₁ ≤ 1`, solved by
//! substitution, and its diagonal and first off-diagonal are recomputed
//! exactly after every squaring.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::{lu_solve, DenseMatrix};

const THETA: [(usize, f64); 5] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
    (13, 5.371920351148152e0),
];

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Padé degree and number of squarings chosen for a matrix of 1-norm `norm`.
pub fn pade_parameters(norm: f64) -> (usize, u32) {
    for &(m, theta) in &THETA[..4] {
        if norm <= theta {
            return (m, 0);
        }
    }
    let theta13 = THETA[4].1;
    let s = if norm > theta13 { math::ceil(math::log2(norm / theta13)).max(0.0) as u32 } else { 0 };
    (13, s)
}

/// `exp(A)`.
pub fn expm(a: &DenseMatrix) -> Result<DenseMatrix> {
    if !a.is_finite() {
        return Err(Error::Overflow);
    }
    let n = a.dim();
    if n == 0 {
        return Ok(DenseMatrix::zeros(0));
    }
    let shape = triangle(a);
    let norm = a.norm_one();
    let (degree, squarings) = match shape {
        // Cancellation inside the Padé solve grows like e^‖A‖ for nilpotent
        // parts with mixed signs; squaring triangular factors is benign.
        Some(_) if norm > 1.0 => (13, math::ceil(math::log2(norm)) as u32),
        _ => pade_parameters(norm),
    };
    let scaled = if squarings > 0 { a.scaled(math::ldexp(1.0, -(squarings as i32))) } else { a.clone() };

    let (u, v) = match degree {
        3 => odd_even_parts(&scaled, &B3),
        5 => odd_even_parts(&scaled, &B5),
        7 => odd_even_parts(&scaled, &B7),
        9 => odd_even_parts(&scaled, &B9),
        _ => degree13_parts(&scaled),
    };

    // r(A) = (V - U)^{-1} (V + U)
    let mut num = v.clone();
    num.add_scaled(1.0, &u);
    let mut den = v;
    den.add_scaled(-1.0, &u);
    let mut result = match shape {
        Some(lower) => triangular_solve(&den, &num, lower)?,
        None => lu_solve(&den, &num)?,
    };

    for k in 0..=squarings {
        if k > 0 {
            result = result.matmul(&result);
        }
        if !result.is_finite() {
            return Err(Error::Overflow);
        }
        if let Some(lower) = shape {
            fix_triangular_band(&mut result, a, math::ldexp(1.0, k as i32 - squarings as i32), lower);
        }
    }
    if !result.is_finite() {
        return Err(Error::Overflow);
    }
    Ok(result)
}

/// `Some(true)` for lower triangular, `Some(false)` for upper (diagonal
/// counts as upper), `None` otherwise.
fn triangle(a: &DenseMatrix) -> Option<bool> {
    let n = a.dim();
    let upper = (1..n).all(|i| (0..i).all(|j| a[(i, j)] == 0.0));
    if upper {
        return Some(false);
    }
    let lower = (0..n).all(|i| (i + 1..n).all(|j| a[(i, j)] == 0.0));
    lower.then_some(true)
}

fn triangular_solve(t: &DenseMatrix, b: &DenseMatrix, lower: bool) -> Result<DenseMatrix> {
    let n = t.dim();
    let tol = n as f64 * f64::EPSILON * t.norm_one();
    let mut x = b.clone();
    let rows: Vec<usize> = if lower { (0..n).collect() } else { (0..n).rev().collect() };
    for (k, &i) in rows.iter().enumerate() {
        let pivot = t[(i, i)];
        if !(pivot.abs() > tol) {
            return Err(Error::Singular { pivot: i });
        }
        for col in 0..n {
            let mut acc = x[(i, col)];
            for &j in &rows[..k] {
                acc -= t[(i, j)] * x[(j, col)];
            }
            x[(i, col)] = acc / pivot;
        }
    }
    Ok(x)
}

/// Overwrites the diagonal and first off-diagonal of `f ≈ exp(c A)` with
/// their exact values for triangular `A`.
fn fix_triangular_band(f: &mut DenseMatrix, a: &DenseMatrix, c: f64, lower: bool) {
    let n = a.dim();
    for i in 0..n {
        f[(i, i)] = math::exp(c * a[(i, i)]);
    }
    for i in 0..n.saturating_sub(1) {
        let (x, y) = (c * a[(i, i)], c * a[(i + 1, i + 1)]);
        let (r, col) = if lower { (i + 1, i) } else { (i, i + 1) };
        let off = c * a[(r, col)];
        let half = 0.5 * (y - x);
        // divided difference (e^y - e^x)/(y - x) without cancellation
        let dd = if half == 0.0 { math::exp(x) } else { math::exp(0.5 * (x + y)) * math::sinh(half) / half };
        f[(r, col)] = off * dd;
    }
}

/// `U = A Σ b_{2k+1} A^{2k}`, `V = Σ b_{2k} A^{2k}` for degrees up to 9.
fn odd_even_parts(a: &DenseMatrix, b: &[f64]) -> (DenseMatrix, DenseMatrix) {
    let n = a.dim();
    let half = b.len() / 2;
    // even powers I, A², A⁴, …
    let mut powers: Vec<DenseMatrix> = Vec::with_capacity(half);
    powers.push(DenseMatrix::identity(n));
    if half > 1 {
        let a2 = a.matmul(a);
        powers.push(a2);
        for k in 2..half {
            let next = powers[k - 1].matmul(&powers[1]);
            powers.push(next);
        }
    }
    let mut odd = DenseMatrix::zeros(n);
    let mut even = DenseMatrix::zeros(n);
    for (k, p) in powers.iter().enumerate() {
        odd.add_scaled(b[2 * k + 1], p);
        even.add_scaled(b[2 * k], p);
    }
    (a.matmul(&odd), even)
}

fn degree13_parts(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let n = a.dim();
    let b = &B13;
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a2.matmul(&a4);

    let mut w1 = a6.scaled(b[13]);
    w1.add_scaled(b[11], &a4);
    w1.add_scaled(b[9], &a2);
    let mut w = a6.matmul(&w1);
    w.add_scaled(b[7], &a6);
    w.add_scaled(b[5], &a4);
    w.add_scaled(b[3], &a2);
    w.add_identity(b[1]);
    let u = a.matmul(&w);

    let mut z1 = a6.scaled(b[12]);
    z1.add_scaled(b[10], &a4);
    z1.add_scaled(b[8], &a2);
    let mut v = a6.matmul(&z1);
    v.add_scaled(b[6], &a6);
    v.add_scaled(b[4], &a4);
    v.add_scaled(b[2], &a2);
    v.add_identity(b[0]);
    debug_assert_eq!(v.dim(), n);
    (u, v)
}

/// First column of `exp(tA)`, i.e. the solution at time `t` of `x' = Ax`,
/// `x(0) = e_1`.
pub fn expm_action_e1(a: &DenseMatrix, t: f64) -> Result<Vec<f64>> {
    if t == 0.0 {
        let mut e1 = alloc::vec![0.0; a.dim()];
        if let Some(first) = e1.first_mut() {
            *first = 1.0;
        }
        return Ok(e1);
    }
    Ok(expm(&a.scaled(t))?.column(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gives_identity() {
        assert_eq!(expm(&DenseMatrix::zeros(3)).unwrap(), DenseMatrix::identity(3));
    }

    #[test]
    fn nilpotent_two_by_two() {
        let a = DenseMatrix::from_row_slice(2, &[0.0, 0.0, 1.0, 0.0]).unwrap();
        let e = expm(&a).unwrap();
        let expect = [1.0, 0.0, 1.0, 1.0];
        for (k, v) in expect.iter().enumerate() {
            assert!((e[(k / 2, k % 2)] - v).abs() < 1e-15);
        }
    }

    #[test]
    fn closed_form_when_square_is_scalar() {
        // A² = -I/2, so exp(A) = cos(1/√2) I + √2 sin(1/√2) A
        let a = DenseMatrix::from_row_slice(2, &[0.0, -1.0, 0.5, 0.0]).unwrap();
        let e = expm(&a).unwrap();
        let w = 1.0 / libm::sqrt(2.0);
        let c = libm::cos(w);
        let s = libm::sqrt(2.0) * libm::sin(w);
        assert!((e[(0, 0)] - c).abs() < 1e-15);
        assert!((e[(1, 1)] - c).abs() < 1e-15);
        assert!((e[(0, 1)] + s).abs() < 1e-15);
        assert!((e[(1, 0)] - 0.5 * s).abs() < 1e-15);
        assert!((e[(0, 0)] - 0.760245).abs() < 1e-6);
        assert!((e[(1, 0)] - 0.459363).abs() < 1e-6);
    }

    #[test]
    fn scalar_exponential_across_degrees() {
        for x in [1e-3, 0.1, 0.5, 1.5, 4.0, 30.0, -12.0] {
            let a = DenseMatrix::from_row_slice(1, &[x]).unwrap();
            let e = expm(&a).unwrap()[(0, 0)];
            assert!((e - libm::exp(x)).abs() <= 1e-13 * libm::exp(x), "x = {x}: {e} vs {}", libm::exp(x));
        }
    }

    #[test]
    fn triangular_band_is_exact() {
        let j = DenseMatrix::from_fn(10, |i, k| if i == k + 1 { 10.0 } else { 0.0 });
        let e = expm(&j).unwrap();
        for i in 0..10 {
            assert_eq!(e[(i, i)], 1.0);
        }
        assert_eq!(e[(1, 0)], 10.0);
        let u = DenseMatrix::from_row_slice(2, &[1.0, 3.0, 0.0, 1.0 + 1e-12]).unwrap();
        let e = expm(&u).unwrap();
        assert!((e[(0, 1)] - 3.0 * libm::exp(1.0 + 5e-13)).abs() < 1e-14);
        assert!((e[(1, 1)] - libm::exp(1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn triangular_and_general_paths_agree() {
        let lower = DenseMatrix::from_fn(6, |i, k| if i >= k { 0.3 * (i + 2 * k) as f64 - 1.0 } else { 0.0 });
        let mut bumped = lower.clone();
        bumped[(0, 5)] = 1e-300;
        let a = expm(&lower).unwrap();
        let b = expm(&bumped).unwrap();
        for i in 0..6 {
            for k in 0..6 {
                assert!((a[(i, k)] - b[(i, k)]).abs() <= 1e-13 * a[(i, k)].abs().max(1.0));
            }
        }
    }

    #[test]
    fn parameter_selection() {
        assert_eq!(pade_parameters(0.01), (3, 0));
        assert_eq!(pade_parameters(0.2), (5, 0));
        assert_eq!(pade_parameters(2.0), (9, 0));
        assert_eq!(pade_parameters(5.0), (13, 0));
        assert_eq!(pade_parameters(10.0), (13, 1));
        assert_eq!(pade_parameters(100.0), (13, 5));
    }

    #[test]
    fn action_examples() {
        let jordan = DenseMatrix::from_fn(4, |i, j| if i == j + 1 { 1.0 } else { 0.0 });
        let v = expm_action_e1(&jordan, 2.0).unwrap();
        for (x, y) in v.iter().zip([1.0, 2.0, 2.0, 4.0 / 3.0]) {
            assert!((x - y).abs() < 1e-15);
        }
        assert_eq!(expm_action_e1(&jordan, 0.0).unwrap(), alloc::vec![1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn overflow_detected() {
        let a = DenseMatrix::from_row_slice(1, &[800.0]).unwrap();
        assert_eq!(expm(&a), Err(Error::Overflow));
        let bad = DenseMatrix::from_row_slice(1, &[f64::NAN]).unwrap();
        assert_eq!(expm(&bad), Err(Error::Overflow));
    }
}

//! Expansion coefficients from derivatives at the origin.
//!
//! With `K_n = [e_1, H e_1, …, H^{n-1} e_1]` (upper triangular because `H` is
//! Hessenberg) and `G_n = [g(0), g'(0), …, g^{(n-1)}(0)]`, the coefficients
//! satisfy the row system `W_n K_n = G_n`. The default solve uses the
//! factorial-scaled columns `H^ℓ e_1/ℓ!` against the jet coefficients
//! `c_ℓ = g^{(ℓ)}(0)/ℓ!`, which is the same system right-multiplied by
//! `diag(1/ℓ!)` and avoids factorial magnitudes.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::matrix::DenseMatrix;
use crate::series::TaylorJet;

/// Entries below the subdiagonal larger than this reject the input.
pub const HESSENBERG_TOL: f64 = 1e-14;

/// Condition estimates above this are reported as ill-conditioned.
pub const CONDITION_WARNING: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KrylovScaling {
    /// Columns `H^ℓ e_1`.
    Unscaled,
    /// Columns `H^ℓ e_1 / ℓ!`.
    Factorial,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    pub values: Vec<f64>,
    /// `‖W K − G‖∞` of the system that was actually solved.
    pub residual: f64,
    /// 1-norm condition estimate of the Krylov factor with unit diagonal.
    pub condition_estimate: f64,
}

impl CoefficientVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_ill_conditioned(&self) -> bool {
        !(self.condition_estimate <= CONDITION_WARNING)
    }
}

fn check_hessenberg(h: &DenseMatrix) -> Result<()> {
    match h.below_subdiagonal_max() {
        Some((i, j, v)) if v.abs() > HESSENBERG_TOL => {
            Err(Error::NotHessenberg { row: i + 1, col: j + 1, value: v })
        }
        _ => Ok(()),
    }
}

/// Krylov matrix `K_n(H, e_1)`, optionally with factorial-scaled columns.
///
/// Entries below the diagonal are exactly zero. Scaled columns are formed as
/// `H^ℓ e_1` (kept in range by exact power-of-two rescaling) divided once by
/// `ℓ!`, so each entry carries only a few roundings.
pub fn krylov_matrix(h: &DenseMatrix, scaling: KrylovScaling) -> Result<DenseMatrix> {
    check_hessenberg(h)?;
    let n = h.dim();
    let mut k = DenseMatrix::zeros(n);
    if n == 0 {
        return Ok(k);
    }
    let mut v = vec![0.0; n];
    v[0] = 1.0;
    // v holds H^col e_1 · 2^-exponent
    let mut exponent = 0i32;
    let mut fact = 1.0;
    for col in 0..n {
        if col > 0 {
            // v has support in its first `col` entries
            let mut next = vec![0.0; n];
            for (i, out) in next.iter_mut().enumerate().take(col + 1) {
                let row = h.row(i);
                let start = i.saturating_sub(1);
                *out = (start..col).map(|j| row[j] * v[j]).sum();
            }
            v = next;
            fact *= col as f64;
            let big = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if big > RESCALE_ABOVE {
                v.iter_mut().for_each(|x| *x = math::ldexp(*x, -RESCALE_STEP));
                exponent += RESCALE_STEP;
            }
        }
        for (i, &x) in v.iter().enumerate().take(col + 1) {
            k[(i, col)] = match scaling {
                KrylovScaling::Unscaled => math::ldexp(x, exponent),
                KrylovScaling::Factorial => math::ldexp(x / fact, exponent),
            };
        }
    }
    Ok(k)
}

const RESCALE_ABOVE: f64 = 1e150;
const RESCALE_STEP: i32 = 500;

/// Coefficients `W_n` for the truncation `H` (dimension `n`) using the
/// factorial-scaled system.
pub fn coefficients(g: &TaylorJet, h: &DenseMatrix) -> Result<CoefficientVector> {
    coefficients_with(g, h, KrylovScaling::Factorial)
}

/// Coefficients with an explicit choice of column scaling. The unscaled
/// variant overflows once `(n-1)!`-sized derivatives appear and is kept for
/// cross-checks at small `n`.
pub fn coefficients_with(g: &TaylorJet, h: &DenseMatrix, scaling: KrylovScaling) -> Result<CoefficientVector> {
    let n = h.dim();
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    if g.order() < n {
        return Err(Error::OrderTooSmall { required: n, available: g.order() });
    }
    for i in 1..n {
        if h[(i, i - 1)] == 0.0 {
            return Err(Error::ZeroSubdiagonal { index: i });
        }
    }
    let k = krylov_matrix(h, scaling)?;
    let rhs = match scaling {
        KrylovScaling::Factorial => g.coeffs()[..n].to_vec(),
        KrylovScaling::Unscaled => g.derivatives_row(n)?,
    };
    let values = solve_row_system(&k, &rhs)?;
    let residual = row_residual(&k, &values, &rhs);
    let condition_estimate = unit_diagonal_condition(&k);
    Ok(CoefficientVector { values, residual, condition_estimate })
}

/// Solves `w K = rhs` for upper-triangular `K`, with compensated dot products.
///
/// Column `j` reads `Σ_{i≤j} w_i K_ij = rhs_j`, so `w_j` depends only on
/// earlier entries and every prefix of `w` solves the leading subsystem.
pub fn solve_row_system(k: &DenseMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = k.dim();
    if rhs.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rhs.len() });
    }
    let mut w = vec![0.0; n];
    for j in 0..n {
        let diag = k[(j, j)];
        if diag == 0.0 || !diag.is_finite() {
            return Err(Error::Singular { pivot: j });
        }
        // rhs_j nearly cancels the sum, so it joins the compensated dot product
        let gap = math::dot2(core::iter::once((rhs[j], 1.0)).chain((0..j).map(|i| (-w[i], k[(i, j)]))));
        w[j] = gap / diag;
        if !w[j].is_finite() {
            return Err(Error::Overflow);
        }
    }
    Ok(w)
}

fn row_residual(k: &DenseMatrix, w: &[f64], rhs: &[f64]) -> f64 {
    (0..k.dim())
        .map(|j| ((0..=j).map(|i| w[i] * k[(i, j)]).sum::<f64>() - rhs[j]).abs())
        .fold(0.0, f64::max)
}

/// `κ₁` of `K diag(1/K_jj)`. Column scaling leaves the row system's solution
/// unchanged, so only the unit-diagonal factor governs its sensitivity.
fn unit_diagonal_condition(k: &DenseMatrix) -> f64 {
    let n = k.dim();
    let t = DenseMatrix::from_fn(n, |i, j| if i <= j { k[(i, j)] / k[(j, j)] } else { 0.0 });
    t.norm_one() * triangular_inverse_norm_one(&t)
}

/// Lower-bound estimate of `‖T⁻¹‖₁` for upper-triangular `T` (power-style
/// 1-norm estimator plus an alternating-sign test vector).
pub fn triangular_inverse_norm_one(t: &DenseMatrix) -> f64 {
    let n = t.dim();
    if n == 0 {
        return 0.0;
    }
    let solve = |b: &[f64]| -> Vec<f64> {
        let mut x = b.to_vec();
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| t[(i, j)] * x[j]).sum();
            x[i] = (x[i] - s) / t[(i, i)];
        }
        x
    };
    let solve_transpose = |b: &[f64]| -> Vec<f64> {
        let mut x = b.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| t[(j, i)] * x[j]).sum();
            x[i] = (x[i] - s) / t[(i, i)];
        }
        x
    };
    let one_norm = |v: &[f64]| v.iter().map(|x| x.abs()).sum::<f64>();

    let mut x = vec![1.0 / n as f64; n];
    let mut estimate = 0.0;
    let mut last_index = usize::MAX;
    for _ in 0..5 {
        let y = solve(&x);
        estimate = one_norm(&y);
        let sign: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
        let z = solve_transpose(&sign);
        let (j, zmax) = z
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |best, (i, v)| if v.abs() > best.1 { (i, v.abs()) } else { best });
        let ztx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
        if zmax <= ztx || j == last_index {
            break;
        }
        last_index = j;
        x = vec![0.0; n];
        x[j] = 1.0;
    }
    let alt: Vec<f64> = (0..n)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * (1.0 + if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 })
        })
        .collect();
    let alt_est = 2.0 * one_norm(&solve(&alt)) / (3.0 * n as f64);
    estimate.max(alt_est)
}

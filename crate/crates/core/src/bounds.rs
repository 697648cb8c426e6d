//! Truncation-error bounds for `e_n = g(s) − Σ_{ℓ<n} w_ℓ φ_ℓ(s)`.
//!
//! All bounds are built on the exponential tail `R_n(z) = Σ_{ℓ≥n} z^ℓ/ℓ!`:
//!
//! - simple: `|e_n| ≤ ‖W‖₁ R_n(|s| C)`;
//! - weighted: `|e_n| ≤ d_0 ‖R_n(s D H D⁻¹) e_1‖₂` when `|w_i| ≤ d_i`;
//! - element sums: `|e_n| ≤ Σ_{j≥n} |w_j| |(exp(sH) e_1)_j|`.
//!
//! The infinite operator is replaced by a leading `N×N` truncation, and the
//! weighted bound is re-evaluated at `N + 20` to flag an unconverged `N`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expm::expm_action_e1;
use crate::math;
use crate::matrix::DenseMatrix;
use crate::operator::HessenbergOperator;

/// Extra dimension used to check that a truncated bound has converged.
pub const CONVERGENCE_STEP: usize = 20;
/// Relative change above which a truncated bound is reported as unconverged.
pub const CONVERGENCE_TOL: f64 = 1e-8;

/// A positive bounding sequence `d_0, d_1, …`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSequence {
    /// `d_k = 1`
    Ones,
    /// `d_k = r^k`
    Geometric(f64),
    /// `d_k = k!`
    Factorial,
}

impl WeightSequence {
    pub fn geometric(r: f64) -> Result<Self> {
        if r > 0.0 && r.is_finite() {
            Ok(WeightSequence::Geometric(r))
        } else {
            Err(Error::OutOfRange { what: "geometric ratio", value: r })
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            WeightSequence::Ones => "ones",
            WeightSequence::Geometric(_) => "geometric",
            WeightSequence::Factorial => "factorial",
        }
    }

    /// `d_{k+1} / d_k`.
    pub fn ratio(&self, k: usize) -> f64 {
        match *self {
            WeightSequence::Ones => 1.0,
            WeightSequence::Geometric(r) => r,
            WeightSequence::Factorial => (k + 1) as f64,
        }
    }

    /// `ln d_k`.
    pub fn ln_weight(&self, k: usize) -> f64 {
        match *self {
            WeightSequence::Ones => 0.0,
            WeightSequence::Geometric(r) => k as f64 * math::log(r),
            WeightSequence::Factorial => math::ln_factorial(k),
        }
    }

    pub fn weight(&self, k: usize) -> f64 {
        math::exp(self.ln_weight(k))
    }

    /// `max_i |w_i| / d_i` over the given coefficients.
    pub fn domination_ratio(&self, w: &[f64]) -> f64 {
        w.iter()
            .enumerate()
            .map(|(i, x)| x.abs() * math::exp(-self.ln_weight(i)))
            .fold(0.0, f64::max)
    }

    /// Leading block of `D H D⁻¹`.
    pub fn scaled_truncation(&self, op: &HessenbergOperator, n: usize) -> Result<DenseMatrix> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(op.truncate_with(n, |k| self.ratio(k)))
    }
}

/// `R_n(z) = Σ_{ℓ≥n} z^ℓ/ℓ!` for `z ≥ 0`, summed forward from `ℓ = n`.
pub fn remainder_scalar(z: f64, n: usize) -> f64 {
    let z = z.abs();
    if z == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let mut term = (1..=n).fold(1.0, |acc, m| acc * (z / m as f64));
    let mut sum = term;
    let mut l = n;
    loop {
        l += 1;
        term *= z / l as f64;
        sum += term;
        if term == 0.0 || (l as f64 > z && term < 1e-18 * sum) {
            return sum;
        }
    }
}

/// `R_n(sH) e_1 = Σ_{ℓ≥n} (sH)^ℓ e_1 / ℓ!`, accumulated by matrix–vector
/// products. At most `10·N + 4⌈|s|‖H‖⌉ + 100` tail terms are summed.
pub fn remainder_action(h: &DenseMatrix, s: f64, n: usize) -> Result<Vec<f64>> {
    let dim = h.dim();
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let norm = h.norm_two_upper() * s.abs();
    let mut term = vec![0.0; dim];
    term[0] = 1.0;
    for l in 1..=n {
        term = h.matvec(&term);
        term.iter_mut().for_each(|x| *x *= s / l as f64);
    }
    let mut sum = term.clone();
    let max_terms = 10 * dim + 4 * math::ceil(norm) as usize + 100;
    let mut l = n;
    for _ in 0..max_terms {
        l += 1;
        term = h.matvec(&term);
        term.iter_mut().for_each(|x| *x *= s / l as f64);
        for (acc, t) in sum.iter_mut().zip(&term) {
            *acc += t;
        }
        let tn = math::norm2(&term);
        if !tn.is_finite() {
            return Err(Error::Overflow);
        }
        if tn == 0.0 || (l as f64 > 2.0 * norm && tn < 1e-18 * math::norm2(&sum)) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence { terms: max_terms })
}

/// A bound evaluated on an `N×N` truncation of the operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedBound {
    pub value: f64,
    /// Dimension `N` the value was computed at.
    pub dimension: usize,
    /// False when re-evaluating at `N + 20` moved the value by more than `1e-8` relative.
    pub converged: bool,
}

/// `d_0 ‖R_n(s D H_N D⁻¹) e_1‖₂`, valid for coefficients with `|w_i| ≤ d_i`.
pub fn theorem1_bound(
    op: &HessenbergOperator,
    weights: &WeightSequence,
    s: f64,
    n: usize,
    dim: usize,
) -> Result<TruncatedBound> {
    if dim < n.max(1) {
        return Err(Error::DimensionMismatch { expected: n.max(1), found: dim });
    }
    let eval = |size: usize| -> Result<f64> {
        let h = weights.scaled_truncation(op, size)?;
        let r = remainder_action(&h, s, n)?;
        Ok(weights.weight(0) * math::norm2(&r))
    };
    let value = eval(dim)?;
    let refined = eval(dim + CONVERGENCE_STEP)?;
    Ok(TruncatedBound { value, dimension: dim, converged: relative_change(value, refined) <= CONVERGENCE_TOL })
}

/// [`theorem1_bound`] for every `n` in `0..=n_max` at a single dimension.
///
/// The terms `(sH)^ℓ e_1/ℓ!` are shared by all `n`, so the tails are
/// accumulated once, backwards from the smallest term.
pub fn theorem1_profile(
    op: &HessenbergOperator,
    weights: &WeightSequence,
    s: f64,
    n_max: usize,
    dim: usize,
) -> Result<Vec<TruncatedBound>> {
    if dim < n_max.max(1) {
        return Err(Error::DimensionMismatch { expected: n_max.max(1), found: dim });
    }
    let d0 = weights.weight(0);
    let eval = |size: usize| -> Result<Vec<f64>> {
        let h = weights.scaled_truncation(op, size)?;
        Ok(remainder_tail_norms(&h, s, n_max)?.into_iter().map(|r| d0 * r).collect())
    };
    let values = eval(dim)?;
    let refined = eval(dim + CONVERGENCE_STEP)?;
    Ok(values
        .iter()
        .zip(&refined)
        .map(|(&value, &r)| TruncatedBound {
            value,
            dimension: dim,
            converged: relative_change(value, r) <= CONVERGENCE_TOL,
        })
        .collect())
}

/// `‖R_n(sH) e_1‖₂` for `n = 0..=n_max`.
fn remainder_tail_norms(h: &DenseMatrix, s: f64, n_max: usize) -> Result<Vec<f64>> {
    let dim = h.dim();
    let norm = h.norm_two_upper() * s.abs();
    let mut terms: Vec<Vec<f64>> = Vec::new();
    let mut term = vec![0.0; dim];
    term[0] = 1.0;
    let mut deep_tail = vec![0.0; dim];
    let max_terms = n_max + 1 + 10 * dim;
    let mut l = 0usize;
    loop {
        if l >= n_max {
            for (acc, t) in deep_tail.iter_mut().zip(&term) {
                *acc += t;
            }
        }
        let tn = math::norm2(&term);
        if !tn.is_finite() {
            return Err(Error::Overflow);
        }
        terms.push(term);
        let done = l > n_max && (tn == 0.0 || (l as f64 > 2.0 * norm && tn < 1e-18 * math::norm2(&deep_tail)));
        if done {
            break;
        }
        if terms.len() >= max_terms {
            return Err(Error::NonConvergence { terms: max_terms });
        }
        l += 1;
        let mut next = h.matvec(terms.last().expect("non-empty"));
        next.iter_mut().for_each(|x| *x *= s / l as f64);
        term = next;
    }
    let mut norms = vec![0.0; n_max + 1];
    let mut acc = vec![0.0; dim];
    for (ell, t) in terms.iter().enumerate().rev() {
        for (a, x) in acc.iter_mut().zip(t) {
            *a += x;
        }
        if ell <= n_max {
            norms[ell] = math::norm2(&acc);
        }
    }
    Ok(norms)
}

fn relative_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// How the element tail sum is weighted.
#[derive(Debug, Clone, Copy)]
pub enum TailWeighting<'a> {
    /// Plain `exp(sH)`, factor 1.
    Unweighted,
    /// `exp(s D H D⁻¹)`, factor `d_0`.
    Weighted(&'a WeightSequence),
    /// Plain `exp(sH)`, factor `sup_j |w_j|` over the supplied coefficients.
    Coefficients(&'a [f64]),
}

/// `factor · Σ_{j=n}^{N-1} |(exp(s H̃_N) e_1)_j|` (0-based `j`, i.e. the
/// entries belonging to `φ_n, φ_{n+1}, …`).
pub fn element_tail_sum(
    op: &HessenbergOperator,
    weighting: TailWeighting<'_>,
    s: f64,
    n: usize,
    dim: usize,
) -> Result<f64> {
    if n >= dim {
        return Ok(0.0);
    }
    Ok(element_tail_profile(op, weighting, s, n, dim)?[n])
}

/// [`element_tail_sum`] for every `n = 0..=n_max` from one exponential.
pub fn element_tail_profile(
    op: &HessenbergOperator,
    weighting: TailWeighting<'_>,
    s: f64,
    n_max: usize,
    dim: usize,
) -> Result<Vec<f64>> {
    let (h, factor) = match weighting {
        TailWeighting::Unweighted => (op.truncate(dim)?, 1.0),
        TailWeighting::Weighted(d) => (d.scaled_truncation(op, dim)?, d.weight(0)),
        TailWeighting::Coefficients(w) => (op.truncate(dim)?, w.iter().fold(0.0, |m: f64, x| m.max(x.abs()))),
    };
    let v = expm_action_e1(&h, s)?;
    let mut out = vec![0.0; n_max + 1];
    let mut acc = 0.0;
    for j in (0..dim).rev() {
        acc += v[j].abs();
        if j <= n_max {
            out[j] = factor * acc;
        }
    }
    Ok(out)
}

/// `‖W‖₁ R_n(|s| C)`.
pub fn simple_bound(w: &[f64], c: f64, s: f64, n: usize) -> f64 {
    let w1: f64 = w.iter().map(|x| x.abs()).sum();
    w1 * remainder_scalar(s.abs() * c, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::E;

    #[test]
    fn scalar_remainders() {
        assert!((remainder_scalar(1.0, 1) - (E - 1.0)).abs() < 1e-15);
        assert!((remainder_scalar(2.0, 3) - (libm::exp(2.0) - 5.0)).abs() < 1e-14);
        assert!((remainder_scalar(3.0, 0) - libm::exp(3.0)).abs() < 1e-13);
        assert_eq!(remainder_scalar(0.0, 0), 1.0);
        assert_eq!(remainder_scalar(0.0, 4), 0.0);
        // deep tail without cancellation: R_30(1) ≈ 1/30! (1 + 1/31 + …)
        let r = remainder_scalar(1.0, 30);
        assert!(r > 0.0 && r < 1.1 / 2.6525285981219107e32);
    }

    #[test]
    fn monomial_tail() {
        let h = HessenbergOperator::jordan().truncate(6).unwrap();
        let r = remainder_action(&h, 1.0, 2).unwrap();
        let expect = [0.0, 0.0, 0.5, 1.0 / 6.0, 1.0 / 24.0, 1.0 / 120.0];
        for (x, y) in r.iter().zip(expect) {
            assert!((x - y).abs() <= 1e-15);
        }
    }

    #[test]
    fn remainder_zero_is_exponential_action() {
        let h = HessenbergOperator::bessel().truncate(12).unwrap();
        let r = remainder_action(&h, 1.3, 0).unwrap();
        let e = expm_action_e1(&h, 1.3).unwrap();
        for (x, y) in r.iter().zip(&e) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn remainder_term_budget_scales_with_norm() {
        let h = DenseMatrix::from_row_slice(1, &[1.0]).unwrap();
        let r = remainder_action(&h, 10.0, 0).unwrap();
        assert!((r[0] - 10f64.exp()).abs() < 1e-12 * 10f64.exp());
    }

    #[test]
    fn theorem1_special_cases() {
        let op = HessenbergOperator::bessel();
        let b = theorem1_bound(&op, &WeightSequence::Ones, 0.0, 3, 20).unwrap();
        assert_eq!(b.value, 0.0);
        assert!(b.converged);
        let b = theorem1_bound(&op, &WeightSequence::Ones, 1.0, 10, 80).unwrap();
        assert!(b.value <= remainder_scalar(2.0, 10));
        assert!((remainder_scalar(2.0, 10) - 3.43576884794848e-4).abs() < 1e-17);
        assert!(b.converged);
        assert_eq!(b.dimension, 80);
    }

    #[test]
    fn theorem1_scaling_identity() {
        // ‖D R_n(sH) e_1‖₂ = d_0 ‖R_n(s D H D⁻¹) e_1‖₂
        let op = HessenbergOperator::modified_bessel();
        let d = WeightSequence::Geometric(0.6);
        let (s, n, dim) = (1.7, 4, 30);
        let plain = remainder_action(&op.truncate(dim).unwrap(), s, n).unwrap();
        let lhs = math::norm2(&plain.iter().enumerate().map(|(i, x)| d.weight(i) * x).collect::<Vec<_>>());
        let rhs = theorem1_bound(&op, &d, s, n, dim).unwrap().value;
        assert!((lhs - rhs).abs() < 1e-13 * lhs);
    }

    #[test]
    fn profile_matches_single_evaluations() {
        let op = HessenbergOperator::shifted_bessel(0.5).unwrap();
        let profile = theorem1_profile(&op, &WeightSequence::Ones, 3.0, 25, 60).unwrap();
        assert_eq!(profile.len(), 26);
        for n in [0, 1, 7, 25] {
            let single = theorem1_bound(&op, &WeightSequence::Ones, 3.0, n, 60).unwrap();
            assert!((profile[n].value - single.value).abs() <= 1e-12 * single.value, "n = {n}");
            assert_eq!(profile[n].converged, single.converged);
        }
    }

    #[test]
    fn tail_profile_matches_single_sums() {
        let op = HessenbergOperator::bessel();
        let w = [0.5, -3.0, 1.0];
        let profile = element_tail_profile(&op, TailWeighting::Coefficients(&w), 4.0, 45, 40).unwrap();
        assert_eq!(profile.len(), 46);
        for n in [0, 3, 39] {
            let single = element_tail_sum(&op, TailWeighting::Coefficients(&w), 4.0, n, 40).unwrap();
            assert!((profile[n] - single).abs() <= 1e-15 * single);
        }
        assert_eq!(profile[40], 0.0);
        assert_eq!(profile[45], 0.0);
    }

    #[test]
    fn factorial_weights_flag_nonconvergence() {
        let op = HessenbergOperator::bessel();
        let b = theorem1_bound(&op, &WeightSequence::Factorial, 3.0, 2, 20);
        match b {
            Ok(b) => assert!(!b.converged),
            Err(e) => assert!(matches!(e, Error::NonConvergence { .. } | Error::Overflow)),
        }
    }

    #[test]
    fn element_sums() {
        let op = HessenbergOperator::jordan();
        assert_eq!(element_tail_sum(&op, TailWeighting::Unweighted, 1.0, 30, 30).unwrap(), 0.0);
        let t = element_tail_sum(&op, TailWeighting::Unweighted, 1.0, 5, 30).unwrap();
        assert!((t - remainder_scalar(1.0, 5)).abs() < 1e-14);
        let w = [0.5, -3.0, 1.0];
        let tw = element_tail_sum(&op, TailWeighting::Coefficients(&w), 1.0, 5, 30).unwrap();
        assert!((tw - 3.0 * t).abs() < 1e-14);
    }

    #[test]
    fn bessel_element_sum_decreases() {
        let op = HessenbergOperator::bessel();
        let mut prev = f64::INFINITY;
        for n in 20..40 {
            let v = element_tail_sum(&op, TailWeighting::Unweighted, 10.0, n, 120).unwrap();
            assert!(v > 0.0 && v < prev, "n = {n}: {v} vs {prev}");
            prev = v;
        }
    }

    #[test]
    fn weights() {
        assert!((WeightSequence::Factorial.weight(5) - 120.0).abs() < 1e-10);
        assert!((WeightSequence::Geometric(0.5).weight(3) - 0.125).abs() < 1e-16);
        assert!(WeightSequence::geometric(-1.0).is_err());
        assert_eq!(WeightSequence::Ones.domination_ratio(&[0.5, -2.0]), 2.0);
    }
}

//! Basis functions `φ_0 … φ_{n-1}` at `t`, approximated by the first `n`
//! entries of `exp(t H_N) e_1` with `N = n + pad`.
//!
//! The truncation error of `exp(t H_n) e_1` is at most `2 (tC)^n e^{tC} / n!`.
//! Padding evaluates at a larger dimension and keeps only the leading
//! entries, which pushes that error below a tolerance.
//!
//! Also provides reference values of `J_ℓ` and `I_ℓ` from their ascending
//! power series, summed in double-double arithmetic.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::expm::expm_action_e1;
use crate::math;
use crate::operator::HessenbergOperator;

/// Target for the default padding rule.
pub const DEFAULT_PAD_TOLERANCE: f64 = 1e-13;

/// Largest padding the default rule will choose.
pub const MAX_PAD: usize = 200;

/// First `n` entries of `exp(t H_{n+pad}) e_1`.
pub fn eval_basis(op: &HessenbergOperator, n: usize, t: f64, pad: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let h = op.truncate(n + pad)?;
    let mut v = expm_action_e1(&h, t)?;
    v.truncate(n);
    Ok(v)
}

/// [`eval_basis`] with the padding from [`default_pad`]. Returns the values
/// and the padding used.
pub fn eval_basis_auto(op: &HessenbergOperator, n: usize, t: f64) -> Result<(Vec<f64>, usize)> {
    let pad = default_pad(op.norm_bound(), t, n);
    Ok((eval_basis(op, n, t, pad)?, pad))
}

/// `2 (|t|C)^n e^{|t|C} / n!`, evaluated in log space.
pub fn basis_error_bound(c: f64, t: f64, n: usize) -> f64 {
    let z = t.abs() * c;
    if z == 0.0 {
        return if n == 0 { 2.0 } else { 0.0 };
    }
    math::exp(core::f64::consts::LN_2 + n as f64 * math::log(z) + z - math::ln_factorial(n))
}

/// Smallest `p ≤ MAX_PAD` with `basis_error_bound(c, t, n + p) ≤ tol`, or
/// `MAX_PAD` when none qualifies.
pub fn pad_for_tolerance(c: f64, t: f64, n: usize, tol: f64) -> usize {
    (0..=MAX_PAD).find(|&p| basis_error_bound(c, t, n + p) <= tol).unwrap_or(MAX_PAD)
}

pub fn default_pad(c: f64, t: f64, n: usize) -> usize {
    pad_for_tolerance(c, t, n, DEFAULT_PAD_TOLERANCE)
}

/// Largest argument accepted by the reference routines.
pub const REF_MAX_ARG: f64 = 50.0;
/// Largest order accepted by the reference routines.
pub const REF_MAX_ORDER: usize = 200;

/// Bessel function of the first kind `J_ℓ(t)` from its power series.
pub fn bessel_j_ref(order: usize, t: f64) -> Result<f64> {
    bessel_series(order, t, -1.0)
}

/// Modified Bessel function of the first kind `I_ℓ(t)` from its power series.
pub fn bessel_i_ref(order: usize, t: f64) -> Result<f64> {
    bessel_series(order, t, 1.0)
}

/// `Σ_k sign^k (t/2)^{2k+ℓ} / (k! (k+ℓ)!)`
fn bessel_series(order: usize, t: f64, sign: f64) -> Result<f64> {
    if order > REF_MAX_ORDER {
        return Err(Error::OutOfRange { what: "order", value: order as f64 });
    }
    if !(t.abs() <= REF_MAX_ARG) {
        return Err(Error::OutOfRange { what: "argument", value: t });
    }
    let x = 0.5 * t;
    // (t/2)^ℓ / ℓ! as a running product keeps intermediates in range
    let mut term = Dd::ONE;
    for m in 1..=order {
        term = term.mul_f64(x).div_f64(m as f64);
    }
    let step = Dd::two_prod(x, x).mul_f64(sign);
    let mut sum = term;
    let mut k = 0usize;
    loop {
        k += 1;
        term = term.mul(step).div_f64((k * (k + order)) as f64);
        sum = sum.add(term);
        let past_peak = (k * (k + order)) as f64 > x * x;
        if term.hi == 0.0 || (past_peak && term.hi.abs() < 1e-18 * sum.hi.abs()) {
            break;
        }
        if k > 1000 {
            return Err(Error::NonConvergence { terms: k });
        }
    }
    Ok(sum.hi + sum.lo)
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
    }

    fn quick_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }

    fn two_prod(a: f64, b: f64) -> Dd {
        let p = a * b;
        Dd { hi: p, lo: libm::fma(a, b, -p) }
    }

    fn add(self, other: Dd) -> Dd {
        let s = Self::two_sum(self.hi, other.hi);
        let t = Self::two_sum(self.lo, other.lo);
        let u = Self::quick_two_sum(s.hi, s.lo + t.hi);
        Self::quick_two_sum(u.hi, u.lo + t.lo)
    }

    fn mul(self, other: Dd) -> Dd {
        let p = Self::two_prod(self.hi, other.hi);
        Self::quick_two_sum(p.hi, p.lo + (self.hi * other.lo + self.lo * other.hi))
    }

    fn mul_f64(self, b: f64) -> Dd {
        let p = Self::two_prod(self.hi, b);
        Self::quick_two_sum(p.hi, p.lo + self.lo * b)
    }

    fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        // remainder self - q1*b, exact up to lo's contribution
        let p = Self::two_prod(q1, b);
        let r = Self::two_sum(self.hi, -p.hi);
        let q2 = (r.hi + (r.lo - p.lo + self.lo)) / b;
        Self::quick_two_sum(q1, q2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jordan_basis_is_scaled_monomials() {
        let v = eval_basis(&HessenbergOperator::jordan(), 3, 2.0, 0).unwrap();
        for (x, y) in v.iter().zip([1.0, 2.0, 2.0]) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn padded_first_entries_match_references() {
        let j0 = eval_basis(&HessenbergOperator::bessel(), 1, 1.0, 40).unwrap()[0];
        assert!((j0 - 0.7651976865579666).abs() < 1e-12);
        let i0 = eval_basis(&HessenbergOperator::modified_bessel(), 1, 1.0, 40).unwrap()[0];
        assert!((i0 - 1.2660658777520084).abs() < 1e-12);
    }

    #[test]
    fn bound_values() {
        let expect = 2.0 * 32.0 / 120.0 * libm::exp(2.0);
        assert!((basis_error_bound(2.0, 1.0, 5) - expect).abs() < 1e-13 * expect);
        assert!((basis_error_bound(2.0, 1.0, 5) - 3.9408).abs() < 1e-4);
        assert_eq!(basis_error_bound(2.0, 0.0, 3), 0.0);
        assert!((basis_error_bound(2.0, 1.5, 0) - 2.0 * libm::exp(3.0)).abs() < 1e-13);
        // no overflow for large arguments
        assert!(basis_error_bound(2.5, 10.0, 300).is_finite());
    }

    #[test]
    fn default_pad_rule() {
        let p = default_pad(2.0, 1.0, 10);
        assert!(basis_error_bound(2.0, 1.0, 10 + p) <= 1e-13);
        assert!(p == 0 || basis_error_bound(2.0, 1.0, 10 + p - 1) > 1e-13);
        assert_eq!(default_pad(1e6, 50.0, 1), MAX_PAD);
    }

    #[test]
    fn reference_values_at_zero() {
        assert_eq!(bessel_j_ref(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j_ref(3, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_i_ref(0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn reference_known_values() {
        assert!((bessel_j_ref(0, 1.0).unwrap() - 0.7651976865579666).abs() < 1e-16);
        assert!((bessel_i_ref(0, 1.0).unwrap() - 1.2660658777520084).abs() < 2e-16);
        // J_1(10) and I_2(10)
        assert!((bessel_j_ref(1, 10.0).unwrap() - 0.04347274616886144).abs() < 1e-15);
        assert!((bessel_i_ref(2, 10.0).unwrap() - 2281.518967726004).abs() < 1e-10);
    }

    #[test]
    fn reference_box() {
        assert!(bessel_j_ref(201, 1.0).is_err());
        assert!(bessel_j_ref(0, 50.5).is_err());
        assert!(bessel_i_ref(0, f64::NAN).is_err());
        assert!(bessel_j_ref(200, 50.0).unwrap().is_finite());
    }

    #[test]
    fn negative_argument_parity() {
        for l in 0..6 {
            let sign = if l % 2 == 0 { 1.0 } else { -1.0 };
            let a = bessel_j_ref(l, -3.7).unwrap();
            let b = bessel_j_ref(l, 3.7).unwrap();
            assert!((a - sign * b).abs() < 1e-16);
        }
    }
}

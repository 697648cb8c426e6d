//! Truncated Taylor series ("jets") at the origin.
//!
//! Convention: `c[k] = g^(k)(0) / k!`. Factorials only appear when derivatives
//! are extracted with [`TaylorJet::derivatives_row`].

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Largest supported order: `(MAX_ORDER-1)!` and all smaller factorials are finite.
pub const MAX_ORDER: usize = 170;

/// Elementary functions with jet propagation rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    Exp,
    Sin,
    Cos,
    Log,
    Recip,
    Sqrt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorJet {
    coeffs: Vec<f64>,
}

fn check_order(order: usize) -> Result<()> {
    if order == 0 {
        Err(Error::ZeroDimension)
    } else if order > MAX_ORDER {
        Err(Error::OrderTooLarge { requested: order, max: MAX_ORDER })
    } else {
        Ok(())
    }
}

impl TaylorJet {
    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        check_order(coeffs.len())?;
        Ok(Self { coeffs })
    }

    pub fn constant(value: f64, order: usize) -> Result<Self> {
        check_order(order)?;
        let mut coeffs = vec![0.0; order];
        coeffs[0] = value;
        Ok(Self { coeffs })
    }

    pub fn zero(order: usize) -> Result<Self> {
        Self::constant(0.0, order)
    }

    /// The independent variable `s`.
    pub fn variable(order: usize) -> Result<Self> {
        let mut jet = Self::zero(order)?;
        if order > 1 {
            jet.coeffs[1] = 1.0;
        }
        Ok(jet)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Value at the origin.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `g^(k)(0)` for `k < order`.
    pub fn derivative(&self, k: usize) -> Result<f64> {
        let c = self
            .coeffs
            .get(k)
            .ok_or(Error::OrderTooSmall { required: k + 1, available: self.order() })?;
        Ok(c * math::factorial(k))
    }

    /// `(g(0), g'(0), …, g^(n-1)(0))`.
    pub fn derivatives_row(&self, n: usize) -> Result<Vec<f64>> {
        if n > self.order() {
            return Err(Error::OrderTooSmall { required: n, available: self.order() });
        }
        let mut fact = 1.0;
        Ok(self
            .coeffs
            .iter()
            .take(n)
            .enumerate()
            .map(|(k, c)| {
                if k > 0 {
                    fact *= k as f64;
                }
                c * fact
            })
            .collect())
    }

    /// Evaluates the truncated polynomial at `s` (Horner).
    pub fn eval_polynomial(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.order() == other.order() {
            Ok(())
        } else {
            Err(Error::OrderMismatch { left: self.order(), right: other.order() })
        }
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|&c| f(c)).collect() }
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect() })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map(|c| c * factor)
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c)
    }

    /// Adds a constant to the value term.
    pub fn add_constant(&self, value: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += value;
        out
    }

    /// Cauchy product truncated to the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let (a, b) = (&self.coeffs, &other.coeffs);
        let coeffs = (0..a.len()).map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum()).collect();
        Ok(Self { coeffs })
    }

    /// `c[k] = (a[k] - Σ_{j=1}^{k} b[j] c[k-j]) / b[0]`
    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let b = &other.coeffs;
        if b[0] == 0.0 {
            return Err(Error::Domain { function: "division", value: b[0] });
        }
        let mut c = vec![0.0; self.order()];
        for k in 0..c.len() {
            let sum: f64 = (1..=k).map(|j| b[j] * c[k - j]).sum();
            c[k] = (self.coeffs[k] - sum) / b[0];
        }
        Ok(Self { coeffs: c })
    }

    pub fn recip(&self) -> Result<Self> {
        if self.coeffs[0] == 0.0 {
            return Err(Error::Domain { function: "recip", value: 0.0 });
        }
        Self::constant(1.0, self.order())?.div(self)
    }

    /// `c[k] = (1/k) Σ_{j=1}^{k} j a[j] c[k-j]`
    pub fn exp(&self) -> Self {
        let a = &self.coeffs;
        let mut c = vec![0.0; a.len()];
        c[0] = math::exp(a[0]);
        for k in 1..c.len() {
            let sum: f64 = (1..=k).map(|j| j as f64 * a[j] * c[k - j]).sum();
            c[k] = sum / k as f64;
        }
        Self { coeffs: c }
    }

    /// `c[k] = (a[k] - (1/k) Σ_{j=1}^{k-1} j c[j] a[k-j]) / a[0]`
    pub fn ln(&self) -> Result<Self> {
        let a = &self.coeffs;
        if !(a[0] > 0.0) {
            return Err(Error::Domain { function: "log", value: a[0] });
        }
        let mut c = vec![0.0; a.len()];
        c[0] = math::log(a[0]);
        for k in 1..c.len() {
            let sum: f64 = (1..k).map(|j| j as f64 * c[j] * a[k - j]).sum();
            c[k] = (a[k] - sum / k as f64) / a[0];
        }
        Ok(Self { coeffs: c })
    }

    /// `c[k] = (a[k] - Σ_{j=1}^{k-1} c[j] c[k-j]) / (2 c[0])`
    pub fn sqrt(&self) -> Result<Self> {
        let a = &self.coeffs;
        if !(a[0] > 0.0) {
            return Err(Error::Domain { function: "sqrt", value: a[0] });
        }
        let mut c = vec![0.0; a.len()];
        c[0] = math::sqrt(a[0]);
        for k in 1..c.len() {
            let sum: f64 = (1..k).map(|j| c[j] * c[k - j]).sum();
            c[k] = (a[k] - sum) / (2.0 * c[0]);
        }
        Ok(Self { coeffs: c })
    }

    /// `(sin u, cos u)` by the coupled recurrences
    /// `s[k] = (1/k) Σ j a[j] c[k-j]`, `c[k] = -(1/k) Σ j a[j] s[k-j]`.
    pub fn sin_cos(&self) -> (Self, Self) {
        let a = &self.coeffs;
        let m = a.len();
        let mut s = vec![0.0; m];
        let mut c = vec![0.0; m];
        s[0] = math::sin(a[0]);
        c[0] = math::cos(a[0]);
        for k in 1..m {
            let mut ss = 0.0;
            let mut cc = 0.0;
            for j in 1..=k {
                let ja = j as f64 * a[j];
                ss += ja * c[k - j];
                cc += ja * s[k - j];
            }
            s[k] = ss / k as f64;
            c[k] = -cc / k as f64;
        }
        (Self { coeffs: s }, Self { coeffs: c })
    }

    /// `u^k` by binary powering.
    pub fn powi(&self, mut k: u32) -> Self {
        let mut result = Self::constant(1.0, self.order()).expect("order already validated");
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base).expect("same order");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).expect("same order");
            }
        }
        result
    }

    /// Applies an elementary function to the jet.
    pub fn elementary(&self, f: Elementary) -> Result<Self> {
        match f {
            Elementary::Exp => Ok(self.exp()),
            Elementary::Sin => Ok(self.sin_cos().0),
            Elementary::Cos => Ok(self.sin_cos().1),
            Elementary::Log => self.ln(),
            Elementary::Recip => self.recip(),
            Elementary::Sqrt => self.sqrt(),
        }
    }

    /// Term-by-term derivative, zero-padded back to the same order.
    pub fn differentiate(&self) -> Self {
        let m = self.order();
        let coeffs = (0..m)
            .map(|k| if k + 1 < m { (k + 1) as f64 * self.coeffs[k + 1] } else { 0.0 })
            .collect();
        Self { coeffs }
    }
}

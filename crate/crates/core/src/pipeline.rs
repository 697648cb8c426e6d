//! End-to-end expansion runs.
//!
//! One run computes `W_{n_max}` and `φ̄_{n_max}(s)` once and reads every
//! truncation `n = 1..=n_max` off the nested prefixes. The true error is
//! measured against a direct pointwise evaluation of `g`.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::basis::{self, eval_basis};
use crate::bounds::{self, WeightSequence};
use crate::coeffs::{coefficients, CoefficientVector};
use crate::error::{Error, Result};
use crate::exprlang::{Expr, Params};
use crate::operator::HessenbergOperator;
use crate::series::MAX_ORDER;

/// Extra dimension beyond `n` for the weighted bound (`N = n_max + margin`).
pub const DEFAULT_BOUND_MARGIN: usize = 80;

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// Basis padding; `None` picks [`basis::pad_for_tolerance`] at `pad_tolerance`.
    pub pad: Option<usize>,
    pub pad_tolerance: f64,
    pub weights: WeightSequence,
    pub bound_margin: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            pad: None,
            pad_tolerance: basis::DEFAULT_PAD_TOLERANCE,
            weights: WeightSequence::Ones,
            bound_margin: DEFAULT_BOUND_MARGIN,
        }
    }
}

/// Error and bounds for one truncation `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRecord {
    pub n: usize,
    pub partial_sum: f64,
    pub abs_error: f64,
    /// `abs_error / |g(s)|`, or `abs_error` when `g(s) = 0`.
    pub rel_error: f64,
    /// `‖W_{n_max}‖₁ R_n(|s| C)`
    pub bound_simple: f64,
    /// `max_i |w_i|/d_i · d_0 ‖R_n(s D H_N D⁻¹) e_1‖₂`
    pub bound_theorem1: f64,
    pub theorem1_converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionRun {
    pub operator: String,
    pub s: f64,
    pub n_values: Vec<usize>,
    pub records: Vec<ErrorRecord>,
    pub g_reference: f64,
    pub coefficients: CoefficientVector,
    /// `φ_0(s) … φ_{n_max-1}(s)`
    pub basis_values: Vec<f64>,
    pub pad_used: usize,
    /// Dimension used for the weighted bound.
    pub bound_dimension: usize,
}

impl ExpansionRun {
    pub fn record(&self, n: usize) -> Option<&ErrorRecord> {
        self.records.get(n.checked_sub(1)?)
    }
}

/// Default truncation: the smallest multiple of ten, at least 40, with
/// `R_n(|s|) ≤ 1e-16`, capped at the maximum jet order.
pub fn default_n_max(s: f64) -> usize {
    let mut n = 40;
    while n < MAX_ORDER && bounds::remainder_scalar(s.abs(), n) > 1e-16 {
        n += 10;
    }
    n.min(MAX_ORDER)
}

/// Expands `g` in the basis of `op` and measures the truncation error at `s`
/// for every `n = 1..=n_max`.
pub fn run_expansion(
    g: &Expr,
    params: &Params,
    op: &HessenbergOperator,
    n_max: usize,
    s: f64,
    options: &RunOptions,
) -> Result<ExpansionRun> {
    if n_max == 0 {
        return Err(Error::ZeroDimension);
    }
    let jet = g.eval_jet(n_max, params)?;
    let h = op.truncate(n_max)?;
    let coeffs = coefficients(&jet, &h)?;

    let c = op.norm_bound();
    let pad = options.pad.unwrap_or_else(|| basis::pad_for_tolerance(c, s, n_max, options.pad_tolerance));
    let phi = eval_basis(op, n_max, s, pad)?;
    let g_reference = g.eval_point(s, params)?;

    let bound_dimension = n_max + options.bound_margin;
    let theorem1 = bounds::theorem1_profile(op, &options.weights, s, n_max, bound_dimension)?;
    let domination = options.weights.domination_ratio(&coeffs.values);

    let mut records = Vec::with_capacity(n_max);
    let mut sum = Neumaier::default();
    for n in 1..=n_max {
        sum.add(coeffs.values[n - 1] * phi[n - 1]);
        let partial_sum = sum.value();
        let abs_error = (g_reference - partial_sum).abs();
        let rel_error = if g_reference != 0.0 { abs_error / g_reference.abs() } else { abs_error };
        records.push(ErrorRecord {
            n,
            partial_sum,
            abs_error,
            rel_error,
            bound_simple: bounds::simple_bound(&coeffs.values, c, s, n),
            bound_theorem1: domination * theorem1[n].value,
            theorem1_converged: theorem1[n].converged,
        });
    }

    Ok(ExpansionRun {
        operator: op.to_string(),
        s,
        n_values: (1..=n_max).collect(),
        records,
        g_reference,
        coefficients: coeffs,
        basis_values: phi,
        pad_used: pad,
        bound_dimension,
    })
}

/// One cell of a sweep; failures stay local to their cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub operator_index: usize,
    pub operator: String,
    pub s: f64,
    pub n_max: usize,
    pub result: Result<ExpansionRun>,
}

/// Runs every `(operator, s)` pair, operator-major. `n_max = None` uses
/// [`default_n_max`] per `s`.
pub fn convergence_sweep(
    g: &Expr,
    params: &Params,
    operators: &[HessenbergOperator],
    s_values: &[f64],
    n_max: Option<usize>,
    options: &RunOptions,
) -> Vec<SweepCell> {
    let mut cells = Vec::with_capacity(operators.len() * s_values.len());
    for (operator_index, op) in operators.iter().enumerate() {
        for &s in s_values {
            let n = n_max.unwrap_or_else(|| default_n_max(s));
            cells.push(SweepCell {
                operator_index,
                operator: op.to_string(),
                s,
                n_max: n,
                result: run_expansion(g, params, op, n, s, options),
            });
        }
    }
    cells
}

/// Compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

//! Infinite upper Hessenberg operators `H_∞` and their leading truncations.
//!
//! Entries are addressed with 1-based `(row, col)` so that `e_1` is the first
//! unit vector. Built-in operators:
//!
//! | kind              | basis `φ_ℓ`      | first row  | rows `ℓ ≥ 2`            | `C`         |
//! |-------------------|------------------|------------|--------------------------|-------------|
//! | `jordan`          | `t^ℓ/ℓ!`         | `0`        | `1` on the subdiagonal   | 2           |
//! | `bessel`          | `J_ℓ(t)`         | `(0, -1)`  | `(1/2, 0, -1/2)`         | 2           |
//! | `modified_bessel` | `I_ℓ(t)`         | `(0, 1)`   | `(1/2, 0, 1/2)`          | 2           |
//! | `shifted_bessel`  | `e^{αt} J_ℓ(t)`  | `bessel + αI`                         || `2 + |α|`   |

use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Built-in operator families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinKind {
    Jordan,
    Bessel,
    ModifiedBessel,
    ShiftedBessel,
}

impl BuiltinKind {
    pub fn name(self) -> &'static str {
        match self {
            BuiltinKind::Jordan => "jordan",
            BuiltinKind::Bessel => "bessel",
            BuiltinKind::ModifiedBessel => "modified_bessel",
            BuiltinKind::ShiftedBessel => "shifted_bessel",
        }
    }
}

impl FromStr for BuiltinKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jordan" => Ok(BuiltinKind::Jordan),
            "bessel" => Ok(BuiltinKind::Bessel),
            "modified_bessel" => Ok(BuiltinKind::ModifiedBessel),
            "shifted_bessel" => Ok(BuiltinKind::ShiftedBessel),
            other => Err(Error::UnknownOperatorKind(other.to_string())),
        }
    }
}

/// Values along one diagonal of a custom operator.
///
/// The listed values are used in order and the last one repeats forever, so
/// `[c]` is the constant diagonal `c, c, c, …`. An empty sequence is all zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSequence(Vec<f64>);

impl DiagonalSequence {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn constant(value: f64) -> Self {
        Self(alloc::vec![value])
    }

    /// Element `k` (0-based) of the infinite sequence.
    pub fn get(&self, k: usize) -> f64 {
        match self.0.last() {
            None => 0.0,
            Some(&last) => self.0.get(k).copied().unwrap_or(last),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    Jordan,
    Bessel,
    ModifiedBessel,
    ShiftedBessel { alpha: f64 },
    /// `subdiag[k]` is `h_{k+2,k+1}`; `bands[d][k]` is `h_{k+1,k+1+d}`.
    CustomBanded { subdiag: DiagonalSequence, bands: Vec<DiagonalSequence> },
}

/// An infinite upper Hessenberg matrix with non-zero subdiagonal and a
/// caller-trusted bound `C ≥ ‖H_∞‖₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct HessenbergOperator {
    kind: OperatorKind,
    norm_bound: f64,
}

impl HessenbergOperator {
    pub fn jordan() -> Self {
        Self { kind: OperatorKind::Jordan, norm_bound: 2.0 }
    }

    pub fn bessel() -> Self {
        Self { kind: OperatorKind::Bessel, norm_bound: 2.0 }
    }

    pub fn modified_bessel() -> Self {
        Self { kind: OperatorKind::ModifiedBessel, norm_bound: 2.0 }
    }

    /// Bessel operator plus `alpha·I`.
    pub fn shifted_bessel(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::OutOfRange { what: "alpha", value: alpha });
        }
        Ok(Self { kind: OperatorKind::ShiftedBessel { alpha }, norm_bound: 2.0 + alpha.abs() })
    }

    /// Builds a built-in operator by name. `alpha` must be given exactly for
    /// `shifted_bessel`.
    pub fn builtin(kind: BuiltinKind, alpha: Option<f64>) -> Result<Self> {
        match (kind, alpha) {
            (BuiltinKind::ShiftedBessel, Some(a)) => Self::shifted_bessel(a),
            (BuiltinKind::ShiftedBessel, None) => {
                Err(Error::AlphaMismatch { kind: kind.name(), supplied: false })
            }
            (_, Some(_)) => Err(Error::AlphaMismatch { kind: kind.name(), supplied: true }),
            (BuiltinKind::Jordan, None) => Ok(Self::jordan()),
            (BuiltinKind::Bessel, None) => Ok(Self::bessel()),
            (BuiltinKind::ModifiedBessel, None) => Ok(Self::modified_bessel()),
        }
    }

    /// [`builtin`](Self::builtin) keyed by the kind's name.
    pub fn from_name(kind: &str, alpha: Option<f64>) -> Result<Self> {
        Self::builtin(kind.parse()?, alpha)
    }

    /// A custom banded operator. `bands[0]` is the main diagonal and
    /// `bands[d]` the `d`-th superdiagonal.
    ///
    /// The bound `c` cannot be certified from finitely many entries, so it is
    /// taken on trust. Only the explicitly listed subdiagonal values are
    /// checked for zeros; the repeated tail is the last listed value.
    pub fn custom(subdiag: DiagonalSequence, bands: Vec<DiagonalSequence>, c: f64) -> Result<Self> {
        if subdiag.values().is_empty() {
            return Err(Error::ZeroSubdiagonal { index: 1 });
        }
        if let Some(k) = subdiag.values().iter().position(|&v| v == 0.0) {
            return Err(Error::ZeroSubdiagonal { index: k + 1 });
        }
        let all_finite = subdiag.values().iter().chain(bands.iter().flat_map(|b| b.values())).all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::Overflow);
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidNormBound(c));
        }
        Ok(Self { kind: OperatorKind::CustomBanded { subdiag, bands }, norm_bound: c })
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    /// Upper bound `C` on `‖H_∞‖₂` (and hence on every `‖H_n‖₂`).
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    /// Number of non-zero superdiagonals.
    pub fn upper_bandwidth(&self) -> usize {
        match &self.kind {
            OperatorKind::Jordan => 0,
            OperatorKind::Bessel | OperatorKind::ModifiedBessel | OperatorKind::ShiftedBessel { .. } => 1,
            OperatorKind::CustomBanded { bands, .. } => bands.len().saturating_sub(1),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            OperatorKind::Jordan => "jordan",
            OperatorKind::Bessel => "bessel",
            OperatorKind::ModifiedBessel => "modified_bessel",
            OperatorKind::ShiftedBessel { .. } => "shifted_bessel",
            OperatorKind::CustomBanded { .. } => "custom",
        }
    }

    /// Entry `h_{ij}` with 1-based indices.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        assert!(i >= 1 && j >= 1, "operator indices are 1-based");
        if i > j + 1 {
            return 0.0;
        }
        match &self.kind {
            OperatorKind::Jordan => {
                if i == j + 1 {
                    1.0
                } else {
                    0.0
                }
            }
            OperatorKind::Bessel => bessel_entry(i, j, -1.0),
            OperatorKind::ModifiedBessel => bessel_entry(i, j, 1.0),
            OperatorKind::ShiftedBessel { alpha } => {
                bessel_entry(i, j, -1.0) + if i == j { *alpha } else { 0.0 }
            }
            OperatorKind::CustomBanded { subdiag, bands } => {
                if i == j + 1 {
                    subdiag.get(j - 1)
                } else {
                    bands.get(j - i).map_or(0.0, |band| band.get(i - 1))
                }
            }
        }
    }

    /// Subdiagonal entry `h_{i+1,i}` (1-based `i`).
    pub fn subdiagonal(&self, i: usize) -> f64 {
        self.entry(i + 1, i)
    }

    /// Leading `n×n` block `H_n`.
    pub fn truncate(&self, n: usize) -> Result<DenseMatrix> {
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        Ok(self.truncate_with(n, |_| 1.0))
    }

    /// Leading block with entries `d_i h_ij / d_j`, where `weight_ratio(k)`
    /// returns `d_{k+1}/d_k` (0-based `k`).
    pub(crate) fn truncate_with(&self, n: usize, weight_ratio: impl Fn(usize) -> f64) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(n);
        let bw = self.upper_bandwidth();
        // ratios[k] = d_k / d_0 would overflow for factorial weights, so the
        // factor d_i/d_j is accumulated along the band only.
        for i in 0..n {
            if i >= 1 {
                // d_i / d_{i-1}
                m[(i, i - 1)] = self.entry(i + 1, i) * weight_ratio(i - 1);
            }
            let mut factor = 1.0;
            for j in i..n.min(i + bw + 1) {
                if j > i {
                    // d_i / d_j = (d_i/d_{j-1}) / (d_j/d_{j-1})
                    factor /= weight_ratio(j - 1);
                }
                m[(i, j)] = self.entry(i + 1, j + 1) * factor;
            }
        }
        m
    }
}

impl fmt::Display for HessenbergOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            OperatorKind::ShiftedBessel { alpha } => write!(f, "shifted_bessel(alpha={alpha})"),
            _ => f.write_str(self.name()),
        }
    }
}

fn bessel_entry(i: usize, j: usize, super_sign: f64) -> f64 {
    if i == j + 1 {
        0.5
    } else if j == i + 1 {
        if i == 1 {
            super_sign
        } else {
            0.5 * super_sign
        }
    } else {
        0.0
    }
}

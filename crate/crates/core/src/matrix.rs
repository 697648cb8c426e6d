//! Square dense matrices of `f64`, stored row-major.
//!
//! Indexing is 0-based `(row, col)`. The operator layer uses 1-based indices
//! and converts at its boundary.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds an `n×n` matrix from `n*n` row-major values.
    pub fn from_row_slice(n: usize, values: &[f64]) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: values.len() });
        }
        Ok(Self { n, data: values.to_vec() })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    /// Leading `m×m` block.
    pub fn leading_block(&self, m: usize) -> Self {
        assert!(m <= self.n, "block larger than matrix");
        Self::from_fn(m, |i, j| self[(i, j)])
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|x| x * factor).collect() }
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, factor: f64, other: &DenseMatrix) {
        assert_eq!(self.n, other.n, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
    }

    /// `self += value * I`.
    pub fn add_identity(&mut self, value: f64) {
        for i in 0..self.n {
            self[(i, i)] += value;
        }
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.n, x.len(), "dimension mismatch");
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Cheap upper bound on the spectral norm, `sqrt(‖A‖₁ ‖A‖∞)`.
    pub fn norm_two_upper(&self) -> f64 {
        math::sqrt(self.norm_one() * self.norm_inf())
    }

    /// Spectral norm estimate by power iteration on `AᵀA`.
    ///
    /// The returned value never exceeds the true norm (up to rounding); it
    /// approaches it from below as `iterations` grows.
    pub fn spectral_norm_estimate(&self, iterations: usize) -> f64 {
        let n = self.n;
        if n == 0 {
            return 0.0;
        }
        let at = self.transpose();
        // deterministic start with every component excited
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) * 1e-3).collect();
        let mut sigma = 0.0;
        for _ in 0..iterations.max(1) {
            let nx = math::norm2(&x);
            if nx == 0.0 {
                return 0.0;
            }
            x.iter_mut().for_each(|v| *v /= nx);
            let y = self.matvec(&x);
            sigma = math::norm2(&y);
            x = at.matvec(&y);
        }
        sigma
    }

    /// Max absolute entry below the first subdiagonal, with its position.
    pub fn below_subdiagonal_max(&self) -> Option<(usize, usize, f64)> {
        let mut worst: Option<(usize, usize, f64)> = None;
        for i in 2..self.n {
            for j in 0..i - 1 {
                let v = self[(i, j)];
                if worst.map_or(v.abs() > 0.0, |w| v.abs() > w.2.abs()) {
                    worst = Some((i, j, v));
                }
            }
        }
        worst
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// Solves `A X = B` by LU with partial pivoting.
///
/// Fails with [`Error::Singular`] when a pivot is below `n·ε·‖A‖₁`.
pub fn lu_solve(a: &DenseMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: b.dim() });
    }
    let tol = n as f64 * f64::EPSILON * a.norm_one();
    let mut lu = a.clone();
    let mut x = b.clone();

    for col in 0..n {
        let (piv_row, piv_abs) = (col..n)
            .map(|r| (r, lu[(r, col)].abs()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if !(piv_abs > tol) {
            return Err(Error::Singular { pivot: col });
        }
        if piv_row != col {
            for j in 0..n {
                lu.data.swap(col * n + j, piv_row * n + j);
                x.data.swap(col * n + j, piv_row * n + j);
            }
        }
        let pivot = lu[(col, col)];
        for r in col + 1..n {
            let factor = lu[(r, col)] / pivot;
            if factor == 0.0 {
                continue;
            }
            lu[(r, col)] = 0.0;
            for j in col + 1..n {
                let v = lu[(col, j)];
                lu[(r, j)] -= factor * v;
            }
            for j in 0..n {
                let v = x[(col, j)];
                x[(r, j)] -= factor * v;
            }
        }
    }

    for col in (0..n).rev() {
        let pivot = lu[(col, col)];
        for j in 0..n {
            let mut sum = x[(col, j)];
            for k in col + 1..n {
                sum -= lu[(col, k)] * x[(k, j)];
            }
            x[(col, j)] = sum / pivot;
        }
    }
    Ok(x)
}

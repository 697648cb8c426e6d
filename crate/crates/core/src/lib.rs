//! Generalized Bessel–Neumann expansions.
//!
//! A function `g` analytic at the origin is expanded as `g(s) = Σ w_ℓ φ_ℓ(s)`
//! where the basis functions solve the infinite linear ODE `φ' = H φ`,
//! `φ(0) = e_1`, for an upper Hessenberg operator `H`. Monomials, Bessel
//! functions `J_ℓ` and modified Bessel functions `I_ℓ` are special cases.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. The
//! `neumann-cli` crate carries configuration, CSV and plotting.
//!
//! Module map:
//! - [`operator`]: infinite Hessenberg operators and their truncations.
//! - [`series`]: truncated Taylor jets at the origin.
//! - [`exprlang`]: expression parser, jet and pointwise evaluation.
//! - [`expm`]: dense matrix exponential (scaling and squaring, Padé).
//! - [`coeffs`]: Krylov matrices and expansion coefficients.
//! - [`basis`]: basis evaluation, its error bound and Bessel oracles.
//! - [`bounds`]: truncation-error bounds for the expansion.
//! - [`pipeline`]: full expansion runs and convergence sweeps.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
pub(crate) mod math;

pub mod basis;
pub mod bounds;
pub mod coeffs;
pub mod expm;
pub mod exprlang;
pub mod matrix;
pub mod operator;
pub mod pipeline;
pub mod series;

pub use error::{Error, Result};
pub use matrix::DenseMatrix;
pub use operator::{HessenbergOperator, OperatorKind};
pub use series::TaylorJet;

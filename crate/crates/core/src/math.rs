// Scalar helpers that `core` does not provide for f64.

pub(crate) use libm::{cos, exp, lgamma, log, log2, sin, sinh, sqrt};

#[inline]
pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

/// `x * 2^k`, exact barring over/underflow.
#[inline]
pub(crate) fn ldexp(x: f64, k: i32) -> f64 {
    libm::scalbn(x, k)
}

/// `ln(n!)`.
#[inline]
pub(crate) fn ln_factorial(n: usize) -> f64 {
    lgamma(n as f64 + 1.0)
}

/// Euclidean norm of a slice, scaled to avoid spurious overflow.
pub(crate) fn norm2(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let ssq: f64 = v.iter().map(|x| (x / scale) * (x / scale)).sum();
    scale * sqrt(ssq)
}

/// `n!` as f64 for `n <= 170`.
pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// `Σ x_i y_i` evaluated as if in twice the working precision (error-free products via fma).
pub(crate) fn dot2(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (mut s, mut c) = (0.0, 0.0);
    for (x, y) in pairs {
        let p = x * y;
        let pe = libm::fma(x, y, -p);
        let t = s + p;
        let z = t - s;
        c += (s - (t - z)) + (p - z) + pe;
        s = t;
    }
    s + c
}

//! Small dense helpers on top of `faer` used throughout the crate.

use faer::linalg::matmul::matmul;
use faer::traits::Conjugate;
use faer::{Accum, Mat, MatRef, Par};

pub use faer::c64;

/// Dense complex matrix.
pub type CMat = Mat<c64>;

pub const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
pub const ONE: c64 = c64 { re: 1.0, im: 0.0 };

pub fn identity(n: usize) -> CMat {
    Mat::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

pub fn diag(values: &[c64]) -> CMat {
    let n = values.len();
    Mat::from_fn(n, n, |i, j| if i == j { values[i] } else { ZERO })
}

/// `a * b`, sequential.
pub fn mul<L, R>(a: MatRef<'_, L>, b: MatRef<'_, R>) -> CMat
where
    L: Conjugate<Canonical = c64>,
    R: Conjugate<Canonical = c64>,
{
    let mut out = Mat::zeros(a.nrows(), b.ncols());
    matmul(out.as_mut(), Accum::Replace, a, b, ONE, Par::Seq);
    out
}

/// Kronecker product with row-major composite index `i * b.nrows() + k`.
pub fn kron(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> CMat {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |row, col| {
        a[(row / br, col / bc)] * b[(row % br, col % bc)]
    })
}

pub fn max_abs(a: MatRef<'_, c64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn max_abs_diff(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    assert_eq!((a.nrows(), a.ncols()), (b.nrows(), b.ncols()));
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    m
}

fn norm_one(a: MatRef<'_, c64>) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
///
/// The argument is scaled until its 1-norm is below 1/2; the series is then
/// summed until the next term no longer changes the result in double precision.
pub fn expm(a: MatRef<'_, c64>) -> CMat {
    assert_eq!(a.nrows(), a.ncols());
    let n = a.nrows();
    let norm = norm_one(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = c64::new(0.5f64.powi(squarings as i32), 0.0);
    let scaled = Mat::from_fn(n, n, |i, j| a[(i, j)] * scale);

    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=40 {
        let next = mul(term.as_ref(), scaled.as_ref());
        let inv_k = c64::new(1.0 / k as f64, 0.0);
        term = Mat::from_fn(n, n, |i, j| next[(i, j)] * inv_k);
        for j in 0..n {
            for i in 0..n {
                result[(i, j)] += term[(i, j)];
            }
        }
        if max_abs(term.as_ref()) <= f64::EPSILON * 1e-2 * max_abs(result.as_ref()) {
            break;
        }
    }
    for _ in 0..squarings {
        result = mul(result.as_ref(), result.as_ref());
    }
    result
}

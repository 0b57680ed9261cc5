//! Small complex linear-algebra helpers shared across the crate.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

/// Hermitian part `(M + M^H) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigenvalues of the Hermitian matrix `m`, ascending.
///
/// `m` is symmetrized first so callers may pass values that are Hermitian
/// only up to rounding.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    let h = hermitian_part(m);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Singular values of `m`, descending.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    let sv = m.clone().singular_values();
    let mut s: Vec<f64> = sv.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// Sum of singular values.
pub fn nuclear_norm(m: &CMat) -> f64 {
    singular_values(m).iter().sum()
}

pub fn frobenius_norm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Squared Frobenius norm.
pub fn frobenius_norm_sq(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>()
}

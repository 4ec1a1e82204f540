//! Small dense complex matrix helpers.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

/// Pauli X, Y, Z.
pub fn pauli() -> [CMat; 3] {
    [
        CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO]),
        CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO]),
        CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE]),
    ]
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &CMat) -> f64 {
    let h = (m + m.adjoint()).scale(0.5);
    h.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `m^{-1/2}` for a Hermitian positive definite `m`.
pub fn inv_sqrt_psd(m: &CMat) -> CMat {
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut scaled = eig.eigenvectors.clone();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        let f = 1.0 / lam.max(1e-300).sqrt();
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= f;
        }
    }
    &scaled * eig.eigenvectors.adjoint()
}

pub fn outer(psi: &[Complex64]) -> CMat {
    let n = psi.len();
    CMat::from_fn(n, n, |i, j| psi[i] * psi[j].conj())
}

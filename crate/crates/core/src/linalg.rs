//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// Largest entry modulus.
pub fn max_modulus(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// `(M + M†)/2`, removing rounding asymmetry before an eigensolve.
pub fn hermitian_part(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Eigenvalues (ascending) and matching eigenvector columns of a Hermitian matrix.
pub fn hermitian_eigen(m: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    assert_eq!(m.nrows(), m.ncols(), "hermitian_eigen needs a square matrix");
    if m.nrows() == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Eigenvalues (ascending) without eigenvectors.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    assert_eq!(m.nrows(), m.ncols(), "hermitian_eigenvalues needs a square matrix");
    let mut values: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// `max |U†U − I|`.
pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let n = u.nrows();
    max_modulus(&(u.adjoint() * u - DMatrix::identity(n, n)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_pauli_y() {
        let i = Complex64::new(0.0, 1.0);
        let m = DMatrix::from_row_slice(2, 2, &[Complex64::default(), -i, i, Complex64::default()]);
        let vals = hermitian_eigenvalues(&m);
        assert!((vals[0] + 1.0).abs() < 1e-14);
        assert!((vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigenvectors_diagonalize() {
        let c = |re, im| Complex64::new(re, im);
        let m = DMatrix::from_row_slice(
            3,
            3,
            &[c(2.0, 0.0), c(0.5, 0.5), c(0.0, 0.0), c(0.5, -0.5), c(1.0, 0.0), c(0.0, 0.3), c(0.0, 0.0), c(0.0, -0.3), c(-1.0, 0.0)],
        );
        let (vals, vecs) = hermitian_eigen(&m);
        let d = vecs.adjoint() * &m * &vecs;
        for r in 0..3 {
            for k in 0..3 {
                let expected = if r == k { vals[r] } else { 0.0 };
                assert!((d[(r, k)] - c(expected, 0.0)).norm() < 1e-12);
            }
        }
        assert!(unitarity_defect(&vecs) < 1e-12);
    }
}

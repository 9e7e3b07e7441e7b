//! Helpers shared by the integration tests.

#![allow(dead_code)]

use schatten_maps::linalg::c;
use schatten_maps::{CMatrix, SchattenIndex, C64};

pub fn diag(v: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(v.len(), v.iter().map(|&x| c(x))))
}

pub fn real(rows: usize, cols: usize, v: &[f64]) -> CMatrix {
    CMatrix::from_row_iterator(rows, cols, v.iter().map(|&x| c(x)))
}

pub fn pauli_z() -> CMatrix {
    diag(&[1.0, -1.0])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), c(0.0)])
}

pub fn hadamard() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    real(2, 2, &[s, s, s, -s])
}

pub fn idx(s: &str) -> SchattenIndex {
    s.parse().expect("valid index")
}

/// `d^{1/p − 1/q}`, the norm of the identity and depolarizing channels for `q ≥ p`.
pub fn dimension_factor(d: usize, q: SchattenIndex, p: SchattenIndex) -> f64 {
    (d as f64).powf(p.reciprocal() - q.reciprocal())
}

pub fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    assert!((got - want).abs() <= tol * want.abs().max(1.0), "{what}: got {got}, want {want} (tol {tol})");
}

/// Singular values by the square roots of the eigenvalues of the smaller Gram matrix
/// (`X*X` or `XX*`), computed independently of the library's SVD path.
pub fn singular_values_via_gram(x: &CMatrix) -> Vec<f64> {
    let g = if x.nrows() >= x.ncols() { x.adjoint() * x } else { x * x.adjoint() };
    let h = (&g + g.adjoint()) * c(0.5);
    let mut v: Vec<f64> = h.symmetric_eigenvalues().iter().map(|&e| e.max(0.0).sqrt()).collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

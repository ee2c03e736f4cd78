//! Dense Hermitian helpers on top of nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Largest entrywise deviation `|Q_ij − conj(Q_ji)|`.
pub fn hermitian_defect(q: &CMatrix) -> f64 {
    let n = q.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((q[(i, j)] - q[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(Q + Q*)/2`, Hermitian to the last bit.
pub fn hermitian_part(q: &CMatrix) -> CMatrix {
    let n = q.nrows();
    let mut out = q.clone();
    for i in 0..n {
        out[(i, i)] = Complex64::new(q[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let v = (q[(i, j)] + q[(j, i)].conj()) * 0.5;
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
    }
    out
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(h: &CMatrix) -> f64 {
    SymmetricEigen::new(h.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Frobenius-nearest positive semidefinite matrix: clamp negative eigenvalues.
pub fn project_psd(h: &CMatrix) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    let n = h.nrows();
    let mut out = CMatrix::zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda <= 0.0 {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        for i in 0..n {
            let vi = v[i] * lambda;
            for j in 0..n {
                out[(i, j)] += vi * v[j].conj();
            }
        }
    }
    out
}

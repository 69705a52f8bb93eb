//! Dense symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! All operator matrices here are tiny ((n+1)d̃ ≤ 24), and the contracts
//! downstream demand reconstruction at rounding level even for clustered
//! spectra. Jacobi delivers ‖QΛQᵀ − A‖ ≈ n·ε·‖A‖ unconditionally, which
//! the general-purpose tridiagonalization path does not guarantee on the
//! structured matrices produced by these models.

use nalgebra::{DMatrix, DVector};

/// Eigendecomposition of a symmetric matrix: eigenvalues ascending with an
/// orthogonal matrix of column eigenvectors. The input is symmetrized
/// first; the result is deterministic.
pub fn sym_eigen(mat: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = mat.nrows();
    assert_eq!(n, mat.ncols(), "sym_eigen needs a square matrix");
    let mut a = (mat + mat.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);

    let scale = a.norm().max(f64::MIN_POSITIVE);
    let tol = f64::EPSILON * scale;
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if (2.0 * off).sqrt() <= tol {
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::EPSILON * tol {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                let app = a[(p, p)];
                let aqq = a[(q, q)];
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for i in 0..n {
                    if i != p && i != q {
                        let aip = a[(i, p)];
                        let aiq = a[(i, q)];
                        a[(i, p)] = c * aip - s * aiq;
                        a[(p, i)] = a[(i, p)];
                        a[(i, q)] = s * aip + c * aiq;
                        a[(q, i)] = a[(i, q)];
                    }
                }
                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].partial_cmp(&a[(j, j)]).unwrap());
    let mut eigenvalues = DVector::zeros(n);
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (col, &idx) in order.iter().enumerate() {
        eigenvalues[col] = a[(idx, idx)];
        eigenvectors.set_column(col, &v.column(idx));
    }
    (eigenvalues, eigenvectors)
}

/// Eigenvalues only, ascending.
pub fn sym_eigenvalues(mat: &DMatrix<f64>) -> DVector<f64> {
    sym_eigen(mat).0
}

/// Smallest eigenvalue of the symmetrized matrix.
pub fn min_eig(mat: &DMatrix<f64>) -> f64 {
    let vals = sym_eigenvalues(mat);
    vals[0]
}

/// Largest eigenvalue of the symmetrized matrix.
pub fn max_eig(mat: &DMatrix<f64>) -> f64 {
    let vals = sym_eigenvalues(mat);
    vals[vals.len() - 1]
}

/// Spectral (operator 2-) norm of the symmetrized matrix.
pub fn spectral_norm(mat: &DMatrix<f64>) -> f64 {
    let vals = sym_eigenvalues(mat);
    vals[0].abs().max(vals[vals.len() - 1].abs())
}

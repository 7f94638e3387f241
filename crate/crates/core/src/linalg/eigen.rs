//! Jacobi eigensolver for real symmetric matrices, with a real-embedding
//! front end for complex Hermitian input.
//!
//! Classical Jacobi (always rotating away the largest off-diagonal entry) is
//! slow in O-notation but unbeatable for the matrix sizes this crate works
//! with, and its eigenvalues converge to high relative accuracy.

use super::{ComplexMatrix, DEFAULT_EIGEN_TOL};
use crate::error::{Error, Result};

/// Eigendecomposition of a real symmetric matrix. `values` are ascending;
/// `vectors[k]` is the unit eigenvector for `values[k]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Diagonalizes a real symmetric matrix given row-major as `a` (length n*n).
/// Iterates until every off-diagonal entry is at most `tol` in magnitude,
/// with a rotation cap of `10 * n^2`.
pub fn symmetric_eigen(n: usize, a: &[f64], tol: f64) -> Result<SymmetricEigen> {
    assert_eq!(a.len(), n * n, "matrix must be n*n");
    if n == 0 {
        return Err(Error::Shape("empty matrix has no eigenvalues".into()));
    }
    let mut a = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let max_rotations = 10 * n * n;
    let mut rotations = 0usize;
    loop {
        // largest off-diagonal element
        let (mut p, mut q, mut worst) = (0, 0, 0.0f64);
        for i in 0..n {
            for j in (i + 1)..n {
                let m = a[i * n + j].abs();
                if m > worst {
                    worst = m;
                    p = i;
                    q = j;
                }
            }
        }
        if worst <= tol {
            break;
        }
        if rotations >= max_rotations {
            return Err(Error::Numeric(format!(
                "Jacobi eigensolver did not reach tolerance {tol:.1e} within {max_rotations} rotations \
                 (off-diagonal residual {worst:.3e})"
            )));
        }
        rotations += 1;

        let apq = a[p * n + q];
        let app = a[p * n + p];
        let aqq = a[q * n + q];
        let tau = (aqq - app) / (2.0 * apq);
        let t = if tau >= 0.0 {
            1.0 / (tau + (1.0 + tau * tau).sqrt())
        } else {
            1.0 / (tau - (1.0 + tau * tau).sqrt())
        };
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = t * c;

        for k in 0..n {
            if k == p || k == q {
                continue;
            }
            let akp = a[k * n + p];
            let akq = a[k * n + q];
            a[k * n + p] = c * akp - s * akq;
            a[p * n + k] = a[k * n + p];
            a[k * n + q] = s * akp + c * akq;
            a[q * n + k] = a[k * n + q];
        }
        a[p * n + p] = app - t * apq;
        a[q * n + q] = aqq + t * apq;
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;

        for k in 0..n {
            let vkp = v[k * n + p];
            let vkq = v[k * n + q];
            v[k * n + p] = c * vkp - s * vkq;
            v[k * n + q] = s * vkp + c * vkq;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].partial_cmp(&a[j * n + j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| (0..n).map(|row| v[row * n + col]).collect())
        .collect();
    Ok(SymmetricEigen { values, vectors })
}

/// Ascending eigenvalues of a complex Hermitian matrix, with the default
/// convergence threshold. `tol` bounds the acceptable hermiticity residual.
pub fn hermitian_eigenvalues(m: &ComplexMatrix, tol: f64) -> Result<Vec<f64>> {
    hermitian_eigenvalues_with(m, tol, DEFAULT_EIGEN_TOL)
}

/// As [`hermitian_eigenvalues`] but with the convergence threshold exposed.
///
/// The matrix is embedded as the real symmetric `[[Re, -Im], [Im, Re]]`,
/// whose spectrum is that of the input with every eigenvalue doubled; the
/// duplicates are averaged away after sorting.
pub fn hermitian_eigenvalues_with(
    m: &ComplexMatrix,
    tol: f64,
    convergence_tol: f64,
) -> Result<Vec<f64>> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "eigenvalues require a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let residual = m.hermiticity_residual();
    if residual > tol {
        return Err(Error::NotHermitian { residual, tol });
    }
    let n = m.rows();
    // hermitian part makes the embedding exactly symmetric
    let h = m.add(&m.adjoint()).scale_re(0.5);
    let mut s = vec![0.0; (2 * n) * (2 * n)];
    let w = 2 * n;
    for i in 0..n {
        for j in 0..n {
            let e = h.get(i, j);
            s[i * w + j] = e.re;
            s[(i + n) * w + (j + n)] = e.re;
            s[i * w + (j + n)] = -e.im;
            s[(i + n) * w + j] = e.im;
        }
    }
    let eig = symmetric_eigen(w, &s, convergence_tol)?;
    let vals = (0..n)
        .map(|i| 0.5 * (eig.values[2 * i] + eig.values[2 * i + 1]))
        .collect();
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    #[test]
    fn symmetric_three_by_three() {
        // eigenvalues of [[2,1,0],[1,2,1],[0,1,2]] are 2 and 2 +- sqrt(2)
        let a = [2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0];
        let eig = symmetric_eigen(3, &a, 1e-14).unwrap();
        let expect = [2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()];
        for (v, e) in eig.values.iter().zip(expect) {
            assert!((v - e).abs() < 1e-12);
        }
        // residual check: A x = lambda x
        for k in 0..3 {
            for row in 0..3 {
                let ax: f64 = (0..3).map(|col| a[row * 3 + col] * eig.vectors[k][col]).sum();
                assert!((ax - eig.values[k] * eig.vectors[k][row]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn hermitian_with_complex_entries() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2
        let m = ComplexMatrix::new(
            2,
            2,
            vec![c64(1.0, 0.0), c64(0.0, 1.0), c64(0.0, -1.0), c64(1.0, 0.0)],
        );
        let vals = hermitian_eigenvalues(&m, 1e-12).unwrap();
        assert!((vals[0] - 0.0).abs() < 1e-12);
        assert!((vals[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn one_by_one() {
        let m = ComplexMatrix::new(1, 1, vec![c64(0.75, 0.0)]);
        let vals = hermitian_eigenvalues(&m, 1e-12).unwrap();
        assert_eq!(vals, vec![0.75]);
    }
}

//! Dense complex matrix algebra for small operator problems.
//!
//! Row-major storage, `f64` components. Everything here targets matrices of
//! side at most a few dozen (two-qubit work is 4x4), so there is no sparse
//! path and no BLAS: plain loops are exact enough and easy to audit.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

mod eigen;

pub use eigen::{hermitian_eigenvalues, hermitian_eigenvalues_with, symmetric_eigen, SymmetricEigen};

pub type Complex64 = Complex<f64>;

/// Shorthand constructor for a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Guard on composite dimensions produced by Kronecker products.
pub const MAX_COMPOSITE_DIM: usize = 4096;

/// Default tolerance for density-operator validation (hermiticity residual,
/// trace deviation, eigenvalue floor).
pub const DEFAULT_DENSITY_TOL: f64 = 1e-9;

/// Default convergence threshold for the eigensolver.
pub const DEFAULT_EIGEN_TOL: f64 = 1e-12;

/// Which tensor factor of a bipartite operator an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    A,
    B,
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. Panics if the length is wrong;
    /// that is a programming error, not an input condition.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count must be rows*cols");
        Self { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![c64(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, c64(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                entries.push(f(r, c));
            }
        }
        Self { rows, cols, entries }
    }

    pub fn from_real(rows: usize, cols: usize, reals: &[f64]) -> Self {
        assert_eq!(reals.len(), rows * cols, "entry count must be rows*cols");
        Self {
            rows,
            cols,
            entries: reals.iter().map(|&x| c64(x, 0.0)).collect(),
        }
    }

    pub fn diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Outer product `|v><v|`.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace requires a square matrix");
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == c64(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn scale_re(&self, factor: f64) -> Self {
        self.scale(c64(factor, 0.0))
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    /// Largest magnitude of `m[i][j] - conj(m[j][i])`; zero for an exactly
    /// Hermitian matrix.
    pub fn hermiticity_residual(&self) -> f64 {
        assert!(self.is_square(), "hermiticity is defined for square matrices");
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..=i {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn all_finite(&self) -> bool {
        self.entries.iter().all(|e| e.re.is_finite() && e.im.is_finite())
    }
}

impl std::ops::Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, other: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(other)
    }
}

/// `Tr(a * b)` without forming the product.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    assert_eq!(a.cols(), b.rows(), "inner dimensions must agree");
    assert_eq!(a.rows(), b.cols(), "product must be square for a trace");
    let mut acc = c64(0.0, 0.0);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            acc += a.get(i, j) * b.get(j, i);
        }
    }
    acc
}

/// Kronecker product `a (x) b` with the default composite-dimension guard.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_with_max(a, b, MAX_COMPOSITE_DIM)
}

/// Kronecker product with an explicit guard on the output dimensions.
pub fn kron_with_max(a: &ComplexMatrix, b: &ComplexMatrix, max_dim: usize) -> Result<ComplexMatrix> {
    let rows = a.rows().checked_mul(b.rows());
    let cols = a.cols().checked_mul(b.cols());
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) if r <= max_dim && c <= max_dim => (r, c),
        _ => {
            return Err(Error::Size(format!(
                "kron output {}x{} * {}x{} exceeds maximum dimension {}",
                a.rows(),
                a.cols(),
                b.rows(),
                b.cols(),
                max_dim
            )))
        }
    };
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let aij = a.get(i, j);
            for k in 0..b.rows() {
                for l in 0..b.cols() {
                    out.set(i * b.rows() + k, j * b.cols() + l, aij * b.get(k, l));
                }
            }
        }
    }
    Ok(out)
}

fn check_bipartite_square(m: &ComplexMatrix, dim_a: usize, dim_b: usize) -> Result<()> {
    if !m.is_square() || m.rows() != dim_a * dim_b {
        return Err(Error::Shape(format!(
            "expected a square matrix of side {}*{}={}, got {}x{}",
            dim_a,
            dim_b,
            dim_a * dim_b,
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Traces out one party of a bipartite operator on `C^dim_a (x) C^dim_b`.
/// The result has the side of the party that is kept.
pub fn partial_trace(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    traced_party: Party,
) -> Result<ComplexMatrix> {
    check_bipartite_square(m, dim_a, dim_b)?;
    match traced_party {
        Party::B => {
            let mut out = ComplexMatrix::zeros(dim_a, dim_a);
            for i in 0..dim_a {
                for j in 0..dim_a {
                    let mut acc = c64(0.0, 0.0);
                    for k in 0..dim_b {
                        acc += m.get(i * dim_b + k, j * dim_b + k);
                    }
                    out.set(i, j, acc);
                }
            }
            Ok(out)
        }
        Party::A => {
            let mut out = ComplexMatrix::zeros(dim_b, dim_b);
            for i in 0..dim_b {
                for j in 0..dim_b {
                    let mut acc = c64(0.0, 0.0);
                    for k in 0..dim_a {
                        acc += m.get(k * dim_b + i, k * dim_b + j);
                    }
                    out.set(i, j, acc);
                }
            }
            Ok(out)
        }
    }
}

/// Transposes the chosen tensor factor of a bipartite operator. A pure entry
/// permutation: applying it twice restores the input exactly.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    party: Party,
) -> Result<ComplexMatrix> {
    check_bipartite_square(m, dim_a, dim_b)?;
    let n = dim_a * dim_b;
    let mut out = ComplexMatrix::zeros(n, n);
    for ia in 0..dim_a {
        for ib in 0..dim_b {
            for ja in 0..dim_a {
                for jb in 0..dim_b {
                    let v = m.get(ia * dim_b + ib, ja * dim_b + jb);
                    let (r, c) = match party {
                        Party::B => (ia * dim_b + jb, ja * dim_b + ib),
                        Party::A => (ja * dim_b + ib, ia * dim_b + jb),
                    };
                    out.set(r, c, v);
                }
            }
        }
    }
    Ok(out)
}

/// Outcome of density-operator validation. Report-style: never an error,
/// the caller inspects the residuals.
#[derive(Debug, Clone)]
pub struct DensityValidation {
    pub hermiticity_residual: f64,
    pub trace_deviation: f64,
    /// Smallest eigenvalue of the Hermitian part; NaN if the eigensolver
    /// failed to converge (then `pass` is false).
    pub min_eigenvalue: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks that a square matrix is a density operator: Hermitian, unit trace,
/// positive semidefinite, all within `tol` (eigenvalues down to `-tol`).
/// Eigenvalues are computed from the Hermitian part `(m + m^dag)/2`.
pub fn validate_density(m: &ComplexMatrix, tol: f64) -> DensityValidation {
    assert!(m.is_square(), "density validation requires a square matrix");
    let hermiticity_residual = if m.all_finite() {
        m.hermiticity_residual()
    } else {
        f64::INFINITY
    };
    let trace_deviation = (m.trace() - c64(1.0, 0.0)).norm();
    let herm = m.add(&m.adjoint()).scale_re(0.5);
    let min_eigenvalue = match hermitian_eigenvalues(&herm, tol.max(1e-6)) {
        Ok(vals) => vals[0],
        Err(_) => f64::NAN,
    };
    let pass = hermiticity_residual <= tol
        && trace_deviation <= tol
        && min_eigenvalue.is_finite()
        && min_eigenvalue >= -tol;
    DensityValidation {
        hermiticity_residual,
        trace_deviation,
        min_eigenvalue,
        tol,
        pass,
    }
}

/// Unitary matrix assembled from a seeded product of complex Givens
/// rotations, one per index pair. Not Haar-distributed; good enough to
/// spread test bases over the unitary group deterministically.
pub fn random_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    let mut rng = SplitMix64::new(seed);
    let mut u = ComplexMatrix::identity(dim);
    for i in 0..dim {
        for j in (i + 1)..dim {
            let theta = std::f64::consts::TAU * rng.next_f64();
            let phi = std::f64::consts::TAU * rng.next_f64();
            let (c, s) = (theta.cos(), theta.sin());
            let e_pos = c64(phi.cos(), phi.sin());
            // right-multiply by the rotation acting on columns i, j
            for r in 0..dim {
                let ui = u.get(r, i);
                let uj = u.get(r, j);
                u.set(r, i, ui * c - uj * e_pos.conj() * s);
                u.set(r, j, ui * e_pos * s + uj * c);
            }
        }
    }
    u
}

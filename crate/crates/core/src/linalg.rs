//! Dense complex kernels shared by every other module.
//!
//! All transposes and conjugations act entrywise in the fixed computational
//! basis. Matrices are small (dimension well below a few hundred), so every
//! routine works on dense `nalgebra` storage.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::state::DensityMatrix;

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;
pub type RealMatrix = DMatrix<f64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// Kronecker product with `a` as the slow index.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Largest entry magnitude.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest imaginary-part magnitude over all entries.
pub fn max_imag(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.im.abs()))
}

/// Largest entrywise deviation from Hermiticity, `max |m - m^dag|`.
pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `(m + m^dag) / 2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

pub(crate) fn check_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub(crate) fn check_finite(m: &ComplexMatrix) -> Result<()> {
    for (j, col) in m.column_iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

pub(crate) fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().copied().sum()
}

/// Eigendecomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (DVector<f64>, ComplexMatrix) {
    let eig = SymmetricEigen::new(hermitian_part(m));
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Smallest eigenvalue of the Hermitian part of `m`.
pub fn min_eigenvalue(m: &ComplexMatrix) -> f64 {
    let (values, _) = hermitian_eigen(m);
    values.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Largest eigenvalue of the Hermitian part of `m`.
pub fn max_eigenvalue(m: &ComplexMatrix) -> f64 {
    let (values, _) = hermitian_eigen(m);
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `V f(D) V^dag` for the eigendecomposition of a Hermitian matrix.
pub(crate) fn spectral_map(values: &DVector<f64>, vectors: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let mut scaled = vectors.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= Complex64::new(f(values[k]), 0.0);
    }
    scaled * vectors.adjoint()
}

/// Hermitian PSD square root.
///
/// Eigenvalues in `[-tol_psd, 0)` are clipped to zero; anything more negative
/// is rejected. Fails when `m` deviates from Hermiticity by more than `tol_herm`.
pub fn psd_sqrt(m: &ComplexMatrix, tol_herm: f64, tol_psd: f64) -> Result<ComplexMatrix> {
    check_square(m)?;
    let dev = hermitian_deviation(m);
    if dev > tol_herm {
        return Err(Error::NotHermitian(dev));
    }
    let (values, vectors) = hermitian_eigen(m);
    let lowest = values.iter().copied().fold(f64::INFINITY, f64::min);
    if lowest < -tol_psd {
        return Err(Error::NotPositive(lowest));
    }
    Ok(spectral_map(&values, &vectors, |x| x.max(0.0).sqrt()))
}

/// Square root of an already validated PSD matrix; negative round-off is clipped.
pub(crate) fn psd_sqrt_clipped(m: &ComplexMatrix) -> ComplexMatrix {
    let (values, vectors) = hermitian_eigen(m);
    spectral_map(&values, &vectors, |x| x.max(0.0).sqrt())
}

/// Singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> DVector<f64> {
    if m.is_empty() {
        return DVector::zeros(0);
    }
    let mut values = m.clone().svd(false, false).singular_values;
    values
        .as_mut_slice()
        .sort_by(|a, b| b.total_cmp(a));
    values
}

/// Nuclear norm: the sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Root fidelity `tr sqrt(sqrt(rho) sigma sqrt(rho))`, evaluated as the trace
/// norm of `sqrt(rho) sqrt(sigma)` and clamped to `[0, 1]`.
pub fn root_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    let product = psd_sqrt_clipped(rho.as_matrix()) * psd_sqrt_clipped(sigma.as_matrix());
    Ok(trace_norm(&product).clamp(0.0, 1.0))
}

/// Squared root fidelity, `F(rho, sigma)`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    root_fidelity(rho, sigma).map(|f| f * f)
}

/// Bures angle `arccos(root_fidelity)` in radians, within `[0, pi/2]`.
pub fn bures_angle(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    root_fidelity(rho, sigma).map(f64::acos)
}

/// Which factor of a bipartite operator an operation acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

/// Entrywise transpose on one tensor factor of an operator on `C^da (x) C^db`.
pub(crate) fn partial_transpose_matrix(m: &ComplexMatrix, da: usize, db: usize, side: Side) -> ComplexMatrix {
    let n = da * db;
    ComplexMatrix::from_fn(n, n, |r, c| {
        let (a, b) = (r / db, r % db);
        let (a2, b2) = (c / db, c % db);
        match side {
            Side::B => m[(a * db + b2, a2 * db + b)],
            Side::A => m[(a2 * db + b, a * db + b2)],
        }
    })
}

/// Partial trace over the second factor of an operator on `C^da (x) C^db`.
pub fn partial_trace_second(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(da, da, |a, a2| (0..db).map(|b| m[(a * db + b, a2 * db + b)]).sum())
}

/// Partial trace over the first factor of an operator on `C^da (x) C^db`.
pub fn partial_trace_first(m: &ComplexMatrix, da: usize, db: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(db, db, |b, b2| (0..da).map(|a| m[(a * db + b, a * db + b2)]).sum())
}

//! Validated quantum states in the fixed computational basis.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, check_finite, check_square, hermitian_deviation, hermitian_part, max_imag, trace, ComplexMatrix,
    ComplexVector, Side,
};
use crate::tolerance::Tolerances;

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(mat, &Tolerances::DEFAULT)
    }

    /// Validates `mat` and stores its Hermitian part.
    pub fn with_tolerances(mat: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        check_square(&mat)?;
        check_finite(&mat)?;
        let dev = hermitian_deviation(&mat);
        if dev > tol.herm {
            return Err(Error::NotHermitian(dev));
        }
        let tr = trace(&mat);
        if (tr.re - 1.0).abs() > tol.trace || tr.im.abs() > tol.trace {
            return Err(Error::BadTrace(tr.re));
        }
        let mat = hermitian_part(&mat);
        let lowest = linalg::min_eigenvalue(&mat);
        if lowest < -tol.psd {
            return Err(Error::NotPositive(lowest));
        }
        Ok(DensityMatrix { mat })
    }

    /// Wraps a matrix already known to be a density operator up to round-off.
    pub(crate) fn from_matrix_unchecked(mat: ComplexMatrix) -> Self {
        DensityMatrix {
            mat: hermitian_part(&mat),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let w = 1.0 / dim as f64;
        DensityMatrix {
            mat: ComplexMatrix::identity(dim, dim).scale(w),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Entrywise transpose, which for a density matrix equals its complex conjugate.
    pub fn transpose(&self) -> DensityMatrix {
        DensityMatrix {
            mat: self.mat.transpose(),
        }
    }

    /// True when every entry has imaginary part at most `tol` in magnitude.
    pub fn is_real(&self, tol: f64) -> bool {
        max_imag(&self.mat) <= tol
    }

    /// Convex combination `w * self + (1 - w) * other`.
    pub fn mix(&self, w: f64, other: &DensityMatrix) -> Result<DensityMatrix> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::OutOfRange {
                name: "weight",
                value: w,
                range: "[0, 1]",
            });
        }
        Ok(DensityMatrix {
            mat: self.mat.scale(w) + other.mat.scale(1.0 - w),
        })
    }

    /// Returns the pure state when the matrix has rank one within `tol`.
    pub fn as_pure(&self, tol: f64) -> Option<PureState> {
        let (values, vectors) = linalg::hermitian_eigen(&self.mat);
        let n = values.len();
        if n == 0 || (values[n - 1] - 1.0).abs() > tol {
            return None;
        }
        let col: ComplexVector = vectors.column(n - 1).into_owned();
        Some(PureState::from_unit_unchecked(col).with_canonical_phase())
    }
}

/// Unit vector in `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: ComplexVector,
}

impl PureState {
    pub fn new(amps: ComplexVector) -> Result<Self> {
        Self::with_tolerances(amps, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(amps: ComplexVector, tol: &Tolerances) -> Result<Self> {
        for (i, z) in amps.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: 0 });
            }
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > tol.norm {
            return Err(Error::BadNorm(norm));
        }
        Ok(PureState { amps: amps.unscale(norm) })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(amps: ComplexVector) -> Result<Self> {
        let norm = amps.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::BadNorm(norm));
        }
        Ok(PureState { amps: amps.unscale(norm) })
    }

    pub(crate) fn from_unit_unchecked(amps: ComplexVector) -> Self {
        PureState { amps }
    }

    /// Computational basis vector `|k>`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amps = ComplexVector::zeros(dim);
        amps[k] = Complex64::new(1.0, 0.0);
        PureState { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amps
    }

    /// Entrywise complex conjugate `|psi*>`.
    pub fn conj(&self) -> PureState {
        PureState {
            amps: self.amps.conjugate(),
        }
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &PureState) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    /// `sum_k psi_k^2`, the conjugate of the conjugate product `<psi|psi*>`.
    pub fn self_bilinear(&self) -> Complex64 {
        self.amps.iter().map(|z| z * z).sum()
    }

    /// `|psi><psi|`.
    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            mat: &self.amps * self.amps.adjoint(),
        }
    }

    /// Same ray, with global phase chosen so that `sum_k psi_k^2` is real and
    /// nonnegative. The state then splits as `cos(a)|x> + i sin(a)|y>` with
    /// `|x>`, `|y>` real, orthonormal and `a` in `[0, pi/4]`.
    pub fn with_canonical_phase(&self) -> PureState {
        let s = self.self_bilinear();
        if s.norm() <= f64::EPSILON {
            return self.clone();
        }
        let phase = Complex64::from_polar(1.0, -0.5 * s.arg());
        PureState {
            amps: self.amps.map(|z| z * phase),
        }
    }

    pub fn is_real_up_to_phase(&self, tol: f64) -> bool {
        let v = self.with_canonical_phase();
        v.amps.iter().all(|z| z.im.abs() <= tol)
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        psi.projector()
    }
}

/// Density matrix on `C^da (x) C^db`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    dims: (usize, usize),
    state: DensityMatrix,
}

impl BipartiteState {
    pub fn new(state: DensityMatrix, da: usize, db: usize) -> Result<Self> {
        if da * db != state.dim() {
            return Err(Error::DimensionMismatch {
                expected: da * db,
                found: state.dim(),
            });
        }
        Ok(BipartiteState { dims: (da, db), state })
    }

    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Self {
        BipartiteState {
            dims: (a.dim(), b.dim()),
            state: DensityMatrix {
                mat: linalg::tensor(a.as_matrix(), b.as_matrix()),
            },
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    /// Entrywise transpose of one factor. The result is Hermitian with unit
    /// trace but need not be positive, so it is returned as an operator.
    pub fn partial_transpose(&self, side: Side) -> BipartiteOperator {
        let (da, db) = self.dims;
        BipartiteOperator {
            dims: self.dims,
            mat: linalg::partial_transpose_matrix(self.state.as_matrix(), da, db, side),
        }
    }
}

/// Hermitian operator on a bipartite space with no positivity guarantee.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteOperator {
    dims: (usize, usize),
    mat: ComplexMatrix,
}

impl BipartiteOperator {
    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn partial_transpose(&self, side: Side) -> BipartiteOperator {
        let (da, db) = self.dims;
        BipartiteOperator {
            dims: self.dims,
            mat: linalg::partial_transpose_matrix(&self.mat, da, db, side),
        }
    }

    /// Promotes the operator back to a state if it is positive within `tol`.
    pub fn into_state(self, tol: &Tolerances) -> Result<BipartiteState> {
        let (da, db) = self.dims;
        BipartiteState::new(DensityMatrix::with_tolerances(self.mat, tol)?, da, db)
    }
}

#[cfg(test)]
pub(crate) fn real_vector(values: &[f64]) -> ComplexVector {
    ComplexVector::from_iterator(values.len(), values.iter().map(|&x| Complex64::new(x, 0.0)))
}

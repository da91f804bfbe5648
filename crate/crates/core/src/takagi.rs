//! Takagi factorization of complex symmetric matrices.
//!
//! For `S = S^T` we find a unitary `Q` and nonnegative `sigma` with
//! `S = Q diag(sigma) Q^T`. Writing `S = A + iB` and `q = x + iy`, the
//! defining relation `S conj(q) = sigma q` becomes the real symmetric
//! eigenproblem
//!
//! ```text
//! [ A   B ] [x]         [x]
//! [ B  -A ] [y] = sigma [y]
//! ```
//!
//! whose spectrum is `{+sigma_k, -sigma_k}`. The eigenvectors of the `n`
//! largest eigenvalues give the columns of `Q`. Eigenvectors of distinct
//! positive eigenvalues are automatically orthogonal as complex vectors;
//! columns belonging to (numerically) zero singular values are replaced by an
//! orthonormal completion, where any unitary choice is valid.

use alloc::vec::Vec;

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{check_finite, check_square, max_abs, ComplexMatrix, ComplexVector, RealMatrix, ONE, ZERO};
use crate::tolerance::Tolerances;

/// `s = q * diag(sigma) * q^T` with `q` unitary and `sigma` descending.
#[derive(Debug, Clone, PartialEq)]
pub struct TakagiFactorization {
    pub q: ComplexMatrix,
    pub sigma: DVector<f64>,
}

impl TakagiFactorization {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut scaled = self.q.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= Complex64::new(self.sigma[k], 0.0);
        }
        scaled * self.q.transpose()
    }
}

/// Largest entrywise deviation `max |s - s^T|`.
pub fn symmetry_deviation(s: &ComplexMatrix) -> f64 {
    max_abs(&(s - s.transpose()))
}

pub fn takagi(s: &ComplexMatrix) -> Result<TakagiFactorization> {
    takagi_with_tolerances(s, &Tolerances::DEFAULT)
}

pub fn takagi_with_tolerances(s: &ComplexMatrix, tol: &Tolerances) -> Result<TakagiFactorization> {
    let n = check_square(s)?;
    check_finite(s)?;
    let scale = max_abs(s).max(1.0);
    let dev = symmetry_deviation(s);
    if dev > tol.herm * scale {
        return Err(Error::NotSymmetric(dev));
    }
    if n == 0 {
        return Ok(TakagiFactorization {
            q: ComplexMatrix::zeros(0, 0),
            sigma: DVector::zeros(0),
        });
    }
    let sym = (s + s.transpose()).scale(0.5);

    let mut embed = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = sym[(i, j)];
            embed[(i, j)] = z.re;
            embed[(i, n + j)] = z.im;
            embed[(n + i, j)] = z.im;
            embed[(n + i, n + j)] = -z.re;
        }
    }
    let eig = SymmetricEigen::new(embed);
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

    let top = eig.eigenvalues[order[0]].max(0.0);
    let zero_cut = 1e-13 * top;
    let mut sigma = DVector::zeros(n);
    let mut columns: Vec<Option<ComplexVector>> = Vec::with_capacity(n);
    for (k, &idx) in order.iter().take(n).enumerate() {
        let value = eig.eigenvalues[idx].max(0.0);
        sigma[k] = value;
        if value > zero_cut && top > 0.0 {
            let v = eig.eigenvectors.column(idx);
            columns.push(Some(ComplexVector::from_fn(n, |i, _| Complex64::new(v[i], v[n + i]))));
        } else {
            columns.push(None);
        }
    }

    let q = orthonormalize(columns, n);
    let mut q = q;
    for k in 0..n {
        fix_sign(&mut q, k, sigma[k] <= zero_cut);
    }

    let out = TakagiFactorization { q, sigma };
    let residual = max_abs(&(out.reconstruct() - &sym));
    if residual > tol.rec * scale {
        return Err(Error::Reconstruction(residual));
    }
    Ok(out)
}

/// Modified Gram-Schmidt over the provided columns, filling missing or
/// degenerate ones from the computational basis.
fn orthonormalize(columns: Vec<Option<ComplexVector>>, n: usize) -> ComplexMatrix {
    let mut basis: Vec<ComplexVector> = Vec::with_capacity(n);
    let mut slots: Vec<Option<ComplexVector>> = Vec::with_capacity(n);
    for col in columns {
        let accepted = col.and_then(|mut v| {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
            let norm = v.norm();
            (norm > 0.5).then(|| v.unscale(norm))
        });
        if let Some(v) = &accepted {
            basis.push(v.clone());
        }
        slots.push(accepted);
    }
    let mut q = ComplexMatrix::zeros(n, n);
    let mut next_unit = 0;
    for (k, slot) in slots.into_iter().enumerate() {
        let v = match slot {
            Some(v) => v,
            None => loop {
                let mut v = ComplexVector::from_fn(n, |i, _| if i == next_unit { ONE } else { ZERO });
                next_unit += 1;
                for b in &basis {
                    let proj = b.dotc(&v);
                    v -= b * proj;
                }
                let norm = v.norm();
                if norm > 1e-6 {
                    let v = v.unscale(norm);
                    basis.push(v.clone());
                    break v;
                }
            },
        };
        q.set_column(k, &v);
    }
    q
}

/// Columns with a positive singular value only admit a sign flip; free
/// columns take a full phase that makes their largest entry real positive.
fn fix_sign(q: &mut ComplexMatrix, k: usize, free_phase: bool) {
    let col = q.column(k);
    let mut lead = col[0];
    for z in col.iter() {
        if z.norm() > lead.norm() + 1e-12 {
            lead = *z;
        }
    }
    if lead.norm() == 0.0 {
        return;
    }
    let factor = if free_phase {
        lead.conj() / lead.norm()
    } else if lead.re < 0.0 || (lead.re == 0.0 && lead.im < 0.0) {
        Complex64::new(-1.0, 0.0)
    } else {
        return;
    };
    let mut col = q.column_mut(k);
    col *= factor;
}

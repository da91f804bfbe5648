//! Pure-state decompositions that are optimal for geometric imaginarity.
//!
//! Every decomposition of `rho` arises from the sub-normalized eigenvectors
//! `sqrt(p_j)|psi_j>` by a unitary mixing (see [`EnsembleRotation`]). The
//! conjugate-orthogonal decomposition chooses the mixing from the Takagi
//! factorization of the conjugate Gram matrix
//! `A_ij = sqrt(p_i p_j) <psi_i|psi_j*>`, which diagonalizes it.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, max_abs, ComplexMatrix, ComplexVector};
use crate::measures::{geometric_imaginarity, geometric_imaginarity_pure};
use crate::state::{DensityMatrix, PureState};
use crate::takagi::takagi;
use crate::tolerance::Tolerances;

/// Members lighter than this are dropped from constructed ensembles.
pub const PRUNE_WEIGHT: f64 = 1e-12;
/// Allowed deviation of member imaginarity from the target in
/// [`equal_imaginarity_decomposition`].
pub const EQUAL_TOL: f64 = 1e-10;
/// Width of the final bracketing interval for the mixing angle.
pub const ANGLE_TOL: f64 = 1e-12;
pub const MAX_BISECTION_ITER: usize = 200;

/// Weighted pure states `{p_j, |psi_j>}` with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    members: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        Self::with_tolerances(members, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(members: Vec<(f64, PureState)>, tol: &Tolerances) -> Result<Self> {
        let Some(first) = members.first() else {
            return Err(Error::BadTrace(0.0));
        };
        let dim = first.1.dim();
        let mut total = 0.0;
        for (w, psi) in &members {
            if psi.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: psi.dim(),
                });
            }
            if !(*w > 0.0 && *w <= 1.0 + tol.trace) {
                return Err(Error::OutOfRange {
                    name: "weight",
                    value: *w,
                    range: "(0, 1]",
                });
            }
            total += w;
        }
        if (total - 1.0).abs() > tol.trace {
            return Err(Error::BadTrace(total));
        }
        Ok(Ensemble { members })
    }

    /// Builds an ensemble from sub-normalized vectors `sqrt(p) |psi>`.
    pub(crate) fn from_subnormalized(vectors: &[ComplexVector]) -> Ensemble {
        let members = vectors
            .iter()
            .filter_map(|v| {
                let w = v.norm_squared();
                (w >= PRUNE_WEIGHT).then(|| (w, PureState::from_unit_unchecked(v.unscale(w.sqrt()))))
            })
            .collect();
        Ensemble { members }
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.members.first().map_or(0, |m| m.1.dim())
    }

    /// `sum_j p_j |psi_j><psi_j|`.
    pub fn mixture(&self) -> ComplexMatrix {
        let d = self.dim();
        self.members.iter().fold(ComplexMatrix::zeros(d, d), |acc, (w, psi)| {
            let v = psi.amplitudes();
            acc + (v * v.adjoint()).scale(*w)
        })
    }

    /// Largest entrywise deviation between the mixture and `rho`.
    pub fn reconstruction_error(&self, rho: &DensityMatrix) -> f64 {
        if self.dim() != rho.dim() {
            return f64::INFINITY;
        }
        max_abs(&(self.mixture() - rho.as_matrix()))
    }

    /// `sum_j p_j I_g(|psi_j>)`.
    pub fn average_imaginarity(&self) -> f64 {
        self.members
            .iter()
            .map(|(w, psi)| w * geometric_imaginarity_pure(psi))
            .sum()
    }

    pub(crate) fn subnormalized(&self) -> Vec<ComplexVector> {
        self.members
            .iter()
            .map(|(w, psi)| psi.amplitudes().scale(w.sqrt()))
            .collect()
    }
}

/// Conjugate-orthogonal ensemble together with its diagonal `D_j`,
/// `sqrt(l_i l_j) <mu_i|mu_j*> = delta_ij D_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateOrthogonalEnsemble {
    pub ensemble: Ensemble,
    pub diag: Vec<f64>,
}

impl ConjugateOrthogonalEnsemble {
    /// The matrix `sqrt(l_i l_j) <mu_i|mu_j*>`; diagonal for this ensemble.
    pub fn conjugate_gram(&self) -> ComplexMatrix {
        conjugate_gram(&self.ensemble.subnormalized())
    }

    pub fn diag_sum(&self) -> f64 {
        self.diag.iter().sum()
    }
}

fn conjugate_gram(vectors: &[ComplexVector]) -> ComplexMatrix {
    let n = vectors.len();
    ComplexMatrix::from_fn(n, n, |i, j| vectors[i].dotc(&vectors[j].conjugate()))
}

/// Unitary mixing of sub-normalized ensemble members,
/// `sqrt(q_i)|phi_i> = sum_j conj(U_ij) sqrt(p_j)|psi_j>`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleRotation {
    u: ComplexMatrix,
}

impl EnsembleRotation {
    pub fn new(u: ComplexMatrix) -> Result<Self> {
        Self::with_tolerances(u, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(u: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let n = crate::linalg::check_square(&u)?;
        let dev = max_abs(&(u.adjoint() * &u - ComplexMatrix::identity(n, n)));
        if dev > tol.herm {
            return Err(Error::NotHermitian(dev));
        }
        Ok(EnsembleRotation { u })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn apply(&self, e: &Ensemble) -> Result<Ensemble> {
        let n = self.u.nrows();
        if e.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: e.len(),
            });
        }
        let old = e.subnormalized();
        let d = e.dim();
        let new: Vec<ComplexVector> = (0..n)
            .map(|i| {
                (0..n).fold(ComplexVector::zeros(d), |acc, j| acc + old[j].scale(1.0) * self.u[(i, j)].conj())
            })
            .collect();
        Ok(Ensemble::from_subnormalized(&new))
    }
}

/// Decomposition attaining the minimal average imaginarity, with
/// `sum_j D_j = sqrt F(rho, rho^T)`.
pub fn conjugate_orthogonal_decomposition(rho: &DensityMatrix) -> ConjugateOrthogonalEnsemble {
    let (vectors, diag) = conjugate_orthogonal_vectors(rho);
    let kept: Vec<(ComplexVector, f64)> = vectors
        .into_iter()
        .zip(diag)
        .filter(|(v, _)| v.norm_squared() >= PRUNE_WEIGHT)
        .collect();
    let ensemble = Ensemble::from_subnormalized(&kept.iter().map(|(v, _)| v.clone()).collect::<Vec<_>>());
    ConjugateOrthogonalEnsemble {
        ensemble,
        diag: kept.into_iter().map(|(_, d)| d).collect(),
    }
}

fn conjugate_orthogonal_vectors(rho: &DensityMatrix) -> (Vec<ComplexVector>, Vec<f64>) {
    let (values, eigvecs) = hermitian_eigen(rho.as_matrix());
    let d = rho.dim();
    let mut v = eigvecs;
    for (k, mut col) in v.column_iter_mut().enumerate() {
        col *= Complex64::new(values[k].max(0.0).sqrt(), 0.0);
    }
    let a = v.adjoint() * v.conjugate();
    let a = (&a + a.transpose()).scale(0.5);
    // A is symmetric by construction, so only the reconstruction check can fail,
    // and the embedded eigensolver keeps that residual near machine precision.
    let fact = takagi(&a).expect("conjugate Gram matrix admits a Takagi factorization");
    let w = v * &fact.q;
    let vectors = (0..d).map(|k| w.column(k).into_owned()).collect();
    (vectors, fact.sigma.iter().copied().collect())
}

/// `sum_j p_j <psi_j|psi_j*>`.
///
/// For the conjugate-orthogonal ensemble this is real and equals
/// `1 - 2 I_g(rho)`.
pub fn average_conjugate_product(e: &Ensemble) -> Complex64 {
    e.members()
        .iter()
        .map(|(w, psi)| psi.self_bilinear().conj() * *w)
        .sum()
}

fn imaginarity_of(v: &ComplexVector) -> f64 {
    let n2 = v.norm_squared();
    if n2 == 0.0 {
        return 0.0;
    }
    let s: Complex64 = v.iter().map(|z| z * z).sum();
    ((1.0 - s.norm() / n2) * 0.5).clamp(0.0, 0.5)
}

fn rotate(a: &ComplexVector, b: &ComplexVector, angle: f64) -> (ComplexVector, ComplexVector) {
    let (s, c) = angle.sin_cos();
    (a.scale(c) + b.scale(s), b.scale(c) - a.scale(s))
}

/// Decomposition whose members all carry the imaginarity of `rho`.
///
/// Starting from the conjugate-orthogonal decomposition, the members with the
/// largest and smallest imaginarity are mixed by a real rotation whose angle
/// is bisected until the first one hits the target; it is then set aside and
/// the remaining members, still mutually conjugate-orthogonal, are processed
/// the same way.
pub fn equal_imaginarity_decomposition(rho: &DensityMatrix) -> Result<Ensemble> {
    let target = geometric_imaginarity(rho);
    let (vectors, _) = conjugate_orthogonal_vectors(rho);
    let mut pool: Vec<ComplexVector> = vectors.into_iter().filter(|v| v.norm_squared() >= PRUNE_WEIGHT).collect();
    let mut done: Vec<ComplexVector> = Vec::with_capacity(pool.len());

    while pool.len() > 1 {
        let imag: Vec<f64> = pool.iter().map(imaginarity_of).collect();
        let (hi, lo) = extremes(&imag);
        if imag[hi] - target <= EQUAL_TOL && target - imag[lo] <= EQUAL_TOL {
            break;
        }
        let (w1, w2) = (pool[hi].clone(), pool[lo].clone());
        let angle = bisect_mixing_angle(&w1, &w2, target)?;
        let (fixed, rest) = rotate(&w1, &w2, angle);
        let (first, second) = if hi < lo { (hi, lo) } else { (lo, hi) };
        pool.remove(second);
        pool.remove(first);
        pool.push(rest);
        done.push(fixed);
    }
    done.extend(pool);
    Ok(Ensemble::from_subnormalized(&done))
}

fn extremes(values: &[f64]) -> (usize, usize) {
    let mut hi = 0;
    let mut lo = 0;
    for (k, &v) in values.iter().enumerate() {
        if v > values[hi] {
            hi = k;
        }
        if v < values[lo] {
            lo = k;
        }
    }
    (hi, lo)
}

/// Finds `a` in `[0, pi/2]` with `I_g(cos a w1 + sin a w2) = target`, given
/// that `w1` lies above and `w2` below the target.
fn bisect_mixing_angle(w1: &ComplexVector, w2: &ComplexVector, target: f64) -> Result<f64> {
    let h = |angle: f64| imaginarity_of(&rotate(w1, w2, angle).0) - target;
    let (mut lo, mut hi) = (0.0f64, core::f64::consts::FRAC_PI_2);
    let (h_lo, h_hi) = (h(lo), h(hi));
    if h_lo == 0.0 {
        return Ok(lo);
    }
    if h_hi == 0.0 {
        return Ok(hi);
    }
    if h_lo.signum() == h_hi.signum() {
        return Err(Error::Bracketing("mixing pair does not straddle the target imaginarity"));
    }
    for _ in 0..MAX_BISECTION_ITER {
        let mid = 0.5 * (lo + hi);
        let h_mid = h(mid);
        if h_mid == 0.0 {
            return Ok(mid);
        }
        if h_mid.signum() == h_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= ANGLE_TOL {
            return Ok(0.5 * (lo + hi));
        }
    }
    Err(Error::BisectionFailed(MAX_BISECTION_ITER))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::transpose_root_fidelity;
    use crate::testutil::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn real_state_gives_eigen_ensemble() {
        let mut rng = seeded(30);
        let rho = random_real_density(&mut rng, 3);
        let co = conjugate_orthogonal_decomposition(&rho);
        let (values, _) = hermitian_eigen(rho.as_matrix());
        let mut diag = co.diag.clone();
        diag.sort_by(|a, b| a.total_cmp(b));
        for (d, v) in diag.iter().zip(values.iter()) {
            assert_abs_diff_eq!(*d, *v, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(co.diag_sum(), 1.0, epsilon = 1e-12);
        for (_, psi) in co.ensemble.members() {
            assert!(psi.is_real_up_to_phase(1e-9));
        }
    }

    #[test]
    fn pure_state_has_single_member() {
        let mut rng = seeded(31);
        let psi = random_pure(&mut rng, 3);
        let co = conjugate_orthogonal_decomposition(&psi.projector());
        assert_eq!(co.ensemble.len(), 1);
        assert_abs_diff_eq!(co.diag[0], psi.self_bilinear().norm(), epsilon = 1e-12);
        let (w, member) = &co.ensemble.members()[0];
        assert_abs_diff_eq!(*w, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(member.overlap(&psi).norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mixed_qutrit_is_optimal() {
        let mut rng = seeded(32);
        for _ in 0..10 {
            let rho = random_density(&mut rng, 3);
            let co = conjugate_orthogonal_decomposition(&rho);
            assert_abs_diff_eq!(co.diag_sum(), transpose_root_fidelity(&rho), epsilon = 1e-8);
            assert_abs_diff_eq!(co.ensemble.average_imaginarity(), geometric_imaginarity(&rho), epsilon = 1e-8);
            assert!(co.ensemble.reconstruction_error(&rho) < 1e-8);
        }
    }

    #[test]
    fn conjugate_gram_is_diagonal() {
        let mut rng = seeded(33);
        for d in 2..=4 {
            let rho = random_density(&mut rng, d);
            let co = conjugate_orthogonal_decomposition(&rho);
            let g = co.conjugate_gram();
            for i in 0..g.nrows() {
                for j in 0..g.ncols() {
                    if i == j {
                        assert_abs_diff_eq!(g[(i, i)].re, co.diag[i], epsilon = 1e-10);
                        assert!(g[(i, i)].im.abs() < 1e-10);
                    } else {
                        assert!(g[(i, j)].norm() <= 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn rank_deficient_input_prunes_null_members() {
        let mut rng = seeded(34);
        let rho = random_density_rank(&mut rng, 4, 2);
        let co = conjugate_orthogonal_decomposition(&rho);
        assert!(co.ensemble.len() <= 2);
        assert!(co.ensemble.reconstruction_error(&rho) < 1e-8);
        let eq = equal_imaginarity_decomposition(&rho).unwrap();
        assert!(eq.reconstruction_error(&rho) < 1e-8);
    }

    #[test]
    fn average_conjugate_product_values() {
        let mut rng = seeded(35);
        let rho = random_density(&mut rng, 3);
        let co = conjugate_orthogonal_decomposition(&rho);
        let acp = average_conjugate_product(&co.ensemble);
        assert_abs_diff_eq!(acp.re, 1.0 - 2.0 * geometric_imaginarity(&rho), epsilon = 1e-8);
        assert!(acp.im.abs() < 1e-10);

        let real = Ensemble::new(alloc::vec![
            (0.25, PureState::basis(2, 0)),
            (0.75, pure(&[c(0.6, 0.0), c(-0.8, 0.0)])),
        ])
        .unwrap();
        assert_abs_diff_eq!(average_conjugate_product(&real).re, 1.0, epsilon = 1e-15);

        let plus_i = Ensemble::new(alloc::vec![(1.0, pure(&[c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]))]).unwrap();
        assert!(average_conjugate_product(&plus_i).norm() < 1e-15);
    }

    #[test]
    fn equal_imaginarity_edge_cases() {
        let mut rng = seeded(36);
        let psi = random_pure(&mut rng, 3);
        let eq = equal_imaginarity_decomposition(&psi.projector()).unwrap();
        assert_eq!(eq.len(), 1);

        let real = random_real_density(&mut rng, 3);
        let eq = equal_imaginarity_decomposition(&real).unwrap();
        for (_, m) in eq.members() {
            assert!(geometric_imaginarity_pure(m) < 1e-10);
        }
        assert!(eq.reconstruction_error(&real) < 1e-8);
    }

    #[test]
    fn equal_imaginarity_qubits() {
        let mut rng = seeded(37);
        for _ in 0..20 {
            let rho = random_density(&mut rng, 2);
            let g = geometric_imaginarity(&rho);
            let eq = equal_imaginarity_decomposition(&rho).unwrap();
            assert!(eq.len() <= 2);
            for (_, m) in eq.members() {
                assert_abs_diff_eq!(geometric_imaginarity_pure(m), g, epsilon = 1e-8);
            }
            assert!(eq.reconstruction_error(&rho) < 1e-8);
        }
    }

    #[test]
    fn single_rotation_preserves_mixture_and_conjugate_product() {
        let mut rng = seeded(38);
        let rho = random_density(&mut rng, 3);
        let (vectors, _) = conjugate_orthogonal_vectors(&rho);
        let before: Complex64 = vectors.iter().map(|v| v.iter().map(|z| z * z).sum::<Complex64>()).sum();
        let (a, b) = rotate(&vectors[0], &vectors[1], 0.37);
        let after_vecs = [a, b, vectors[2].clone()];
        let after: Complex64 = after_vecs.iter().map(|v| v.iter().map(|z| z * z).sum::<Complex64>()).sum();
        assert!((before - after).norm() < 1e-10);
        let mix = |vs: &[ComplexVector]| vs.iter().fold(ComplexMatrix::zeros(3, 3), |acc, v| acc + v * v.adjoint());
        assert!(max_abs(&(mix(&vectors) - mix(&after_vecs))) < 1e-15);
    }

    #[test]
    fn rotation_validates_unitarity() {
        let mut rng = seeded(39);
        assert!(EnsembleRotation::new(ginibre(&mut rng, 2, 2)).is_err());
        let u = random_unitary(&mut rng, 3);
        let rot = EnsembleRotation::new(u).unwrap();
        let rho = random_density(&mut rng, 3);
        let co = conjugate_orthogonal_decomposition(&rho);
        let moved = rot.apply(&co.ensemble).unwrap();
        assert!(moved.reconstruction_error(&rho) < 1e-12);
    }

    #[test]
    fn ensemble_validation() {
        assert!(Ensemble::new(alloc::vec![]).is_err());
        assert!(Ensemble::new(alloc::vec![(0.5, PureState::basis(2, 0))]).is_err());
        assert!(Ensemble::new(alloc::vec![(0.5, PureState::basis(2, 0)), (0.5, PureState::basis(3, 0))]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn equal_imaginarity_random(seed in any::<u64>(), d in 2usize..=4) {
            let mut rng = seeded(seed);
            let rho = random_density(&mut rng, d);
            let g = geometric_imaginarity(&rho);
            let eq = equal_imaginarity_decomposition(&rho).unwrap();
            for (_, m) in eq.members() {
                prop_assert!((geometric_imaginarity_pure(m) - g).abs() <= 1e-8);
            }
            prop_assert!(eq.reconstruction_error(&rho) <= 1e-8);
        }
    }
}

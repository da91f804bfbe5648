//! Real operations as Kraus sets, and the analytic conversion results for
//! geometric imaginarity.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{check_finite, max_abs, max_eigenvalue, max_imag, tensor, ComplexMatrix, I, ONE, ZERO};
use crate::measures::{geometric_imaginarity, geometric_imaginarity_pure};
use crate::state::{DensityMatrix, PureState};
use crate::tolerance::Tolerances;

/// Largest imaginary entry tolerated by [`KrausSet::is_real`].
pub const REAL_TOL: f64 = 1e-9;
/// Tolerance on the transposition-covariance residual.
pub const COVARIANCE_TOL: f64 = 1e-8;
/// Targets with imaginarity at or below this are treated as real.
pub const REAL_TARGET_TOL: f64 = 1e-12;

/// Kraus representation `{K_j}` of a completely positive map, all
/// `d_out x d_in`, with `sum K_j^dag K_j <= I`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    ops: Vec<ComplexMatrix>,
    trace_preserving: bool,
}

impl KrausSet {
    pub fn new(ops: Vec<ComplexMatrix>, trace_preserving: bool) -> Result<Self> {
        Self::with_tolerances(ops, trace_preserving, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(ops: Vec<ComplexMatrix>, trace_preserving: bool, tol: &Tolerances) -> Result<Self> {
        let first = ops.first().ok_or(Error::EmptyKrausSet)?;
        let (rows, cols) = first.shape();
        for k in &ops {
            if k.shape() != (rows, cols) {
                return Err(Error::ShapeMismatch(rows, cols, k.nrows(), k.ncols()));
            }
            check_finite(k)?;
        }
        let set = KrausSet { ops, trace_preserving };
        let sum = set.kraus_sum();
        let excess = max_eigenvalue(&sum) - 1.0;
        if excess > tol.psd {
            return Err(Error::NotTraceNonIncreasing(excess));
        }
        if trace_preserving {
            let dev = max_abs(&(sum - ComplexMatrix::identity(cols, cols)));
            if dev > tol.psd {
                return Err(Error::NotTracePreserving(dev));
            }
        }
        Ok(set)
    }

    pub(crate) fn from_ops_unchecked(ops: Vec<ComplexMatrix>, trace_preserving: bool) -> Self {
        KrausSet { ops, trace_preserving }
    }

    pub fn identity(d: usize) -> Self {
        KrausSet::from_ops_unchecked(alloc::vec![ComplexMatrix::identity(d, d)], true)
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn into_ops(self) -> Vec<ComplexMatrix> {
        self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    pub fn d_in(&self) -> usize {
        self.ops[0].ncols()
    }

    pub fn d_out(&self) -> usize {
        self.ops[0].nrows()
    }

    /// `sum_j K_j^dag K_j`.
    pub fn kraus_sum(&self) -> ComplexMatrix {
        let d = self.d_in();
        self.ops.iter().fold(ComplexMatrix::zeros(d, d), |acc, k| acc + k.adjoint() * k)
    }

    /// `sum_j K_j X K_j^dag` for any `d_in x d_in` operator `X`.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.shape() != (self.d_in(), self.d_in()) {
            return Err(Error::DimensionMismatch {
                expected: self.d_in(),
                found: x.nrows(),
            });
        }
        let d = self.d_out();
        Ok(self.ops.iter().fold(ComplexMatrix::zeros(d, d), |acc, k| acc + k * x * k.adjoint()))
    }

    /// Unnormalized output `sum_j K_j rho K_j^dag`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        self.apply_matrix(rho.as_matrix())
    }

    /// Output state of a trace-preserving map.
    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply(rho)?;
        DensityMatrix::with_tolerances(out, &Tolerances::uniform(1e-8))
    }

    pub fn max_imag(&self) -> f64 {
        self.ops.iter().map(max_imag).fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.max_imag() <= REAL_TOL
    }

    /// The set `{K_j*}`.
    pub fn conjugate(&self) -> KrausSet {
        KrausSet::from_ops_unchecked(self.ops.iter().map(|k| k.conjugate()).collect(), self.trace_preserving)
    }

    /// Kraus set of the product map `self (x) other`.
    pub fn tensor(&self, other: &KrausSet) -> KrausSet {
        let ops = self
            .ops
            .iter()
            .flat_map(|a| other.ops.iter().map(move |b| tensor(a, b)))
            .collect();
        KrausSet::from_ops_unchecked(ops, self.trace_preserving && other.trace_preserving)
    }

    /// `max_ij max|L(E_ij^T) - L(E_ij)^T|` over the matrix units.
    pub fn covariance_residual(&self) -> f64 {
        let d = self.d_in();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let out = self.apply_matrix(&matrix_unit(d, i, j)).unwrap();
                let out_t = self.apply_matrix(&matrix_unit(d, j, i)).unwrap();
                worst = worst.max(max_abs(&(out_t - out.transpose())));
            }
        }
        worst
    }

    /// Largest entrywise difference of the two actions over the matrix units.
    pub fn action_distance(&self, other: &KrausSet) -> Result<f64> {
        if self.d_in() != other.d_in() || self.d_out() != other.d_out() {
            return Err(Error::ShapeMismatch(self.d_out(), self.d_in(), other.d_out(), other.d_in()));
        }
        let d = self.d_in();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let e = matrix_unit(d, i, j);
                worst = worst.max(max_abs(&(self.apply_matrix(&e)? - other.apply_matrix(&e)?)));
            }
        }
        Ok(worst)
    }
}

pub(crate) fn matrix_unit(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut e = ComplexMatrix::zeros(d, d);
    e[(i, j)] = ONE;
    e
}

/// Kraus set of `(E1 + E2) / 2`, namely `{(P_j + Q_j)/2, i(P_j - Q_j)/2}`,
/// with the shorter list padded by zero operators.
pub fn merge_cp_maps(e1: &KrausSet, e2: &KrausSet) -> Result<KrausSet> {
    if (e1.d_out(), e1.d_in()) != (e2.d_out(), e2.d_in()) {
        return Err(Error::ShapeMismatch(e1.d_out(), e1.d_in(), e2.d_out(), e2.d_in()));
    }
    let n = e1.len().max(e2.len());
    let zero = ComplexMatrix::zeros(e1.d_out(), e1.d_in());
    let mut ops = Vec::with_capacity(2 * n);
    for j in 0..n {
        let p = e1.ops.get(j).unwrap_or(&zero);
        let q = e2.ops.get(j).unwrap_or(&zero);
        ops.push((p + q).scale(0.5));
        ops.push((p - q) * (I * 0.5));
    }
    Ok(KrausSet::from_ops_unchecked(ops, e1.trace_preserving && e2.trace_preserving))
}

fn realified(k: &KrausSet) -> KrausSet {
    let merged = merge_cp_maps(k, &k.conjugate()).expect("conjugate set has the same shape");
    let ops = merged
        .ops
        .into_iter()
        .filter(|m| max_abs(m) > 0.0)
        .map(|m| m.map(|z| z.re).map(|x| ZERO + x))
        .collect::<Vec<_>>();
    let ops = if ops.is_empty() {
        alloc::vec![ComplexMatrix::zeros(k.d_out(), k.d_in())]
    } else {
        ops
    };
    KrausSet::from_ops_unchecked(ops, k.trace_preserving)
}

/// Real Kraus set with the same action as a transposition-covariant map.
pub fn realify_covariant(k: &KrausSet) -> Result<KrausSet> {
    let residual = k.covariance_residual();
    if residual > COVARIANCE_TOL {
        return Err(Error::NotCovariant(residual));
    }
    Ok(realified(k))
}

/// Real Kraus set acting on `rho` like `k`, provided `k` commutes with
/// transposition on `rho`.
pub fn symmetrize_rho_covariant(k: &KrausSet, rho: &DensityMatrix) -> Result<KrausSet> {
    let out = k.apply(rho)?;
    let out_t = k.apply(&rho.transpose())?;
    let residual = max_abs(&(out_t - out.transpose()));
    if residual > COVARIANCE_TOL {
        return Err(Error::NotCovariant(residual));
    }
    Ok(realified(k))
}

pub fn is_covariant(k: &KrausSet) -> bool {
    k.covariance_residual() <= COVARIANCE_TOL
}

/// Optimal probability of converting a pure state into `rho` by real
/// operations, `min(I_g(psi) / I_g(rho), 1)`.
pub fn prob_exact(psi: &PureState, rho: &DensityMatrix) -> f64 {
    ratio_or_one(geometric_imaginarity_pure(psi), geometric_imaginarity(rho))
}

/// Upper bound `min(I_g(sigma) / I_g(rho), 1)` on the probability of
/// converting a mixed source. Attained for pure sources only.
pub fn prob_upper_bound(sigma: &DensityMatrix, rho: &DensityMatrix) -> f64 {
    ratio_or_one(geometric_imaginarity(sigma), geometric_imaginarity(rho))
}

fn ratio_or_one(source: f64, target: f64) -> f64 {
    if target <= REAL_TARGET_TOL {
        1.0
    } else {
        (source / target).min(1.0)
    }
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name,
            value,
            range: "[0, 1]",
        })
    }
}

fn asin_sqrt(x: f64) -> f64 {
    x.max(0.0).sqrt().min(1.0).asin()
}

fn acos_sqrt(x: f64) -> f64 {
    x.max(0.0).sqrt().min(1.0).acos()
}

/// Smallest imaginarity among states with fidelity at least `f` to `rho`,
/// `sin^2(max(asin sqrt I_g(rho) - acos sqrt f, 0))`.
pub fn min_geometric_in_ball(rho: &DensityMatrix, f: f64) -> Result<f64> {
    check_unit_interval("fidelity", f)?;
    let angle = (asin_sqrt(geometric_imaginarity(rho)) - acos_sqrt(f)).max(0.0);
    Ok(angle.sin().powi(2))
}

/// Largest imaginarity among pure states with fidelity at least `f` to
/// `psi`, `sin^2(min(asin sqrt I_g(psi) + acos sqrt f, pi/4))`.
///
/// In dimension one every state is real and the answer is zero.
pub fn max_geometric_in_ball_pure(psi: &PureState, f: f64) -> Result<f64> {
    check_unit_interval("fidelity", f)?;
    if psi.dim() < 2 {
        return Ok(0.0);
    }
    let angle = (asin_sqrt(geometric_imaginarity_pure(psi)) + acos_sqrt(f)).min(core::f64::consts::FRAC_PI_4);
    Ok(angle.sin().powi(2))
}

/// Splits a pure state in canonical phase as `cos a |x> + i sin a |y>` with
/// real orthonormal `x`, `y`. Returns `None` for `y` when the state is real.
fn real_frame(psi: &PureState) -> (f64, crate::linalg::ComplexVector, Option<crate::linalg::ComplexVector>) {
    let canon = psi.with_canonical_phase();
    let amps = canon.amplitudes();
    let x = amps.map(|z| ZERO + z.re);
    let y = amps.map(|z| ZERO + z.im);
    let (nx, ny) = (x.norm(), y.norm());
    let angle = ny.atan2(nx);
    let y = (ny > 1e-14).then(|| y.unscale(ny));
    (angle, x.unscale(nx), y)
}

/// A real unit vector orthogonal to the real unit vector `a`.
fn real_orthogonal(a: &crate::linalg::ComplexVector) -> Option<crate::linalg::ComplexVector> {
    let d = a.len();
    (0..d)
        .map(|k| {
            let mut e = crate::linalg::ComplexVector::zeros(d);
            e[k] = ONE;
            let proj = a.dotc(&e);
            e - a * proj
        })
        .max_by(|u, v| u.norm().total_cmp(&v.norm()))
        .filter(|u| u.norm() > 1e-8)
        .map(|u| {
            let n = u.norm();
            u.unscale(n)
        })
}

fn frame_state(a: &crate::linalg::ComplexVector, b: Option<&crate::linalg::ComplexVector>, angle: f64) -> PureState {
    let (s, c) = angle.sin_cos();
    let v = match b {
        Some(b) if s != 0.0 => a.scale(c) + b * (I * s),
        _ => a.clone(),
    };
    let n = v.norm();
    PureState::from_unit_unchecked(v.unscale(n))
}

/// State attaining [`min_geometric_in_ball`]: each member of an
/// equal-imaginarity decomposition of `rho` is rotated towards its real part.
pub fn min_imaginarity_state(rho: &DensityMatrix, f: f64) -> Result<DensityMatrix> {
    check_unit_interval("fidelity", f)?;
    if f == 1.0 {
        return Ok(rho.clone());
    }
    let k = acos_sqrt(f);
    let ensemble = crate::decompositions::equal_imaginarity_decomposition(rho)?;
    let d = rho.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for (w, psi) in ensemble.members() {
        let (alpha, a, b) = real_frame(psi);
        let phi = frame_state(&a, b.as_ref(), (alpha - k).max(0.0));
        let v = phi.amplitudes();
        out += (v * v.adjoint()).scale(*w);
    }
    let tr: f64 = out.diagonal().iter().map(|z| z.re).sum();
    Ok(DensityMatrix::from_matrix_unchecked(out.unscale(tr)))
}

/// Pure state attaining [`max_geometric_in_ball_pure`].
pub fn max_imaginarity_state(psi: &PureState, f: f64) -> Result<PureState> {
    check_unit_interval("fidelity", f)?;
    if f == 1.0 || psi.dim() < 2 {
        return Ok(psi.clone());
    }
    let k = acos_sqrt(f);
    let (alpha, a, b) = real_frame(psi);
    let b = b.or_else(|| real_orthogonal(&a));
    let gamma = (alpha + k).min(core::f64::consts::FRAC_PI_4);
    Ok(frame_state(&a, b.as_ref(), gamma))
}

/// Angles entering the stochastic-approximate conversion formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxParams {
    /// `asin sqrt I_g(psi)`.
    pub alpha: f64,
    /// `asin sqrt I_g(rho)`.
    pub beta: f64,
    /// `acos sqrt f`.
    pub k: f64,
    /// `alpha - beta + k`; conversion is deterministic when non-negative.
    pub m1: f64,
}

impl ApproxParams {
    fn new(psi: &PureState, rho: &DensityMatrix, f: f64) -> Self {
        let alpha = asin_sqrt(geometric_imaginarity_pure(psi));
        let beta = asin_sqrt(geometric_imaginarity(rho));
        let k = acos_sqrt(f);
        ApproxParams {
            alpha,
            beta,
            k,
            m1: alpha - beta + k,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConversionResult {
    pub probability: f64,
    pub fidelity: f64,
    pub params: ApproxParams,
}

/// Optimal success probability of reaching fidelity `f` with `rho` from the
/// pure state `psi` by real operations.
pub fn approx_prob(psi: &PureState, rho: &DensityMatrix, f: f64) -> Result<ConversionResult> {
    check_unit_interval("fidelity", f)?;
    let params = ApproxParams::new(psi, rho, f);
    let probability = if params.m1 >= 0.0 {
        1.0
    } else {
        let s = (params.beta - params.k).sin();
        (geometric_imaginarity_pure(psi) / (s * s)).min(1.0)
    };
    Ok(ConversionResult {
        probability,
        fidelity: f,
        params,
    })
}

/// Optimal fidelity with `rho` reachable from `psi` with success probability
/// at least `p`.
pub fn approx_fidelity(psi: &PureState, rho: &DensityMatrix, p: f64) -> Result<ConversionResult> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::OutOfRange {
            name: "probability",
            value: p,
            range: "(0, 1]",
        });
    }
    let source = geometric_imaginarity_pure(psi);
    let target = geometric_imaginarity(rho);
    let fidelity = if target <= REAL_TARGET_TOL || p <= source / target {
        1.0
    } else {
        let beta = asin_sqrt(target);
        (beta - asin_sqrt(source / p)).cos().powi(2).clamp(0.0, 1.0)
    };
    Ok(ConversionResult {
        probability: p,
        fidelity,
        params: ApproxParams::new(psi, rho, fidelity),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::fidelity;
    use crate::testutil::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_4, FRAC_PI_8, PI};
    use proptest::prelude::*;

    fn angle_state(alpha: f64) -> PureState {
        pure(&[c(alpha.cos(), 0.0), c(0.0, alpha.sin())])
    }

    #[test]
    fn kraus_validation() {
        assert_eq!(KrausSet::new(alloc::vec![], true), Err(Error::EmptyKrausSet));
        let id = ComplexMatrix::identity(2, 2);
        assert!(KrausSet::new(alloc::vec![id.clone(), ComplexMatrix::identity(3, 3)], false).is_err());
        assert!(matches!(
            KrausSet::new(alloc::vec![id.clone(), id.clone()], false),
            Err(Error::NotTraceNonIncreasing(_))
        ));
        let half = id.scale(0.5);
        assert!(KrausSet::new(alloc::vec![half.clone()], false).is_ok());
        assert!(matches!(KrausSet::new(alloc::vec![half], true), Err(Error::NotTracePreserving(_))));
    }

    #[test]
    fn merge_identity_and_z_dephases() {
        let e1 = KrausSet::identity(2);
        let e2 = KrausSet::new(alloc::vec![pauli_z()], true).unwrap();
        let merged = merge_cp_maps(&e1, &e2).unwrap();
        assert!(merged.trace_preserving());
        for i in 0..2 {
            for j in 0..2 {
                let e = matrix_unit(2, i, j);
                let expected = (&e + pauli_z() * &e * pauli_z()).scale(0.5);
                assert!(max_abs(&(merged.apply_matrix(&e).unwrap() - expected)) < 1e-15);
            }
        }
        let same = merge_cp_maps(&e1, &e1).unwrap();
        assert!(same.action_distance(&e1).unwrap() < 1e-15);
    }

    #[test]
    fn merge_conjugate_pair_is_real() {
        let mut rng = seeded(40);
        let k = random_channel(&mut rng, 3, 3, 2);
        let merged = merge_cp_maps(&k, &k.conjugate()).unwrap();
        assert!(merged.is_real());
    }

    #[test]
    fn merge_pads_shorter_list() {
        let mut rng = seeded(41);
        let a = random_channel(&mut rng, 2, 3, 1);
        let b = random_channel(&mut rng, 2, 3, 3);
        let merged = merge_cp_maps(&a, &b).unwrap();
        assert_eq!(merged.len(), 6);
        let rho = random_density(&mut rng, 2);
        let expected = (a.apply(&rho).unwrap() + b.apply(&rho).unwrap()).scale(0.5);
        assert!(max_abs(&(merged.apply(&rho).unwrap() - expected)) < 1e-12);
        let bad = random_channel(&mut rng, 3, 3, 1);
        assert!(merge_cp_maps(&a, &bad).is_err());
    }

    #[test]
    fn covariance_examples() {
        let mut rng = seeded(42);
        assert!(is_covariant(&random_real_channel(&mut rng, 3, 2, 2)));
        assert!(is_covariant(&KrausSet::identity(3)));
        let phase = ComplexMatrix::from_diagonal(&crate::linalg::ComplexVector::from_vec(alloc::vec![ONE, I]));
        let k = KrausSet::new(alloc::vec![phase], true).unwrap();
        assert!(!is_covariant(&k));
        assert!(matches!(realify_covariant(&k), Err(Error::NotCovariant(_))));
    }

    #[test]
    fn realify_rotation() {
        let u = (ComplexMatrix::identity(2, 2) + pauli_y() * I).scale(FRAC_1_SQRT_2);
        let k = KrausSet::new(alloc::vec![u], true).unwrap();
        let real = realify_covariant(&k).unwrap();
        assert!(real.is_real());
        assert!(real.action_distance(&k).unwrap() < 1e-15);
    }

    #[test]
    fn realify_symmetrized_channels() {
        let mut rng = seeded(43);
        for _ in 0..10 {
            let l = random_channel(&mut rng, 3, 2, 3);
            let cov = merge_cp_maps(&l, &l.conjugate()).unwrap();
            let as_complex = KrausSet::from_ops_unchecked(
                cov.ops().iter().zip(0..).map(|(m, j)| if j % 2 == 0 { m.clone() } else { m * I }).collect(),
                true,
            );
            assert!(!as_complex.is_real());
            assert!(is_covariant(&as_complex));
            let real = realify_covariant(&as_complex).unwrap();
            assert!(real.is_real());
            assert!(real.action_distance(&as_complex).unwrap() < 1e-9);
            assert!(KrausSet::new(real.into_ops(), true).is_ok());
        }
    }

    #[test]
    fn symmetrize_on_single_state() {
        let mut rng = seeded(44);
        let rho = random_real_density(&mut rng, 2);
        let real = random_real_channel(&mut rng, 2, 2, 2);
        let sym = symmetrize_rho_covariant(&real, &rho).unwrap();
        assert!(sym.is_real());
        assert!(max_abs(&(sym.apply(&rho).unwrap() - real.apply(&rho).unwrap())) < 1e-12);

        let src = angle_state(0.3);
        let dst = angle_state(0.3).conj();
        let flip = KrausSet::new(alloc::vec![pauli_z()], true).unwrap();
        let sym = symmetrize_rho_covariant(&flip, &src.projector()).unwrap();
        let out = sym.apply(&src.projector()).unwrap();
        assert!(max_abs(&(out - dst.projector().into_matrix())) < 1e-12);
    }

    #[test]
    fn prob_exact_examples() {
        let mut rng = seeded(45);
        let plus_i = angle_state(FRAC_PI_4);
        let rho = random_density(&mut rng, 2);
        assert_abs_diff_eq!(prob_exact(&plus_i, &rho), 1.0);
        let src = angle_state(FRAC_PI_8);
        assert_abs_diff_eq!(prob_exact(&src, &plus_i.projector()), 1.0 - FRAC_1_SQRT_2, epsilon = 1e-12);
        assert_abs_diff_eq!(prob_exact(&PureState::basis(2, 0), &plus_i.projector()), 0.0);
        assert_abs_diff_eq!(prob_exact(&PureState::basis(2, 0), &random_real_density(&mut rng, 2)), 1.0);
        assert_abs_diff_eq!(prob_upper_bound(&src.projector(), &plus_i.projector()), 1.0 - FRAC_1_SQRT_2, epsilon = 1e-12);
    }

    #[test]
    fn ball_extremes() {
        let plus_i = angle_state(FRAC_PI_4).projector();
        let f = FRAC_PI_8.cos().powi(2);
        assert_abs_diff_eq!(min_geometric_in_ball(&plus_i, f).unwrap(), FRAC_PI_8.sin().powi(2), epsilon = 1e-12);
        assert_abs_diff_eq!(min_geometric_in_ball(&plus_i, 1.0).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(min_geometric_in_ball(&plus_i, 0.5).unwrap(), 0.0, epsilon = 1e-12);
        assert!(min_geometric_in_ball(&plus_i, 1.5).is_err());

        let real = PureState::basis(3, 1);
        assert_abs_diff_eq!(max_geometric_in_ball_pure(&real, f).unwrap(), FRAC_PI_8.sin().powi(2), epsilon = 1e-12);
        assert_abs_diff_eq!(max_geometric_in_ball_pure(&real, 0.0).unwrap(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(max_geometric_in_ball_pure(&real, 1.0).unwrap(), 0.0, epsilon = 1e-12);
        assert_eq!(max_geometric_in_ball_pure(&PureState::basis(1, 0), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn achievers_for_worked_cases() {
        let plus_i = angle_state(FRAC_PI_4);
        let f = FRAC_PI_8.cos().powi(2);
        let rho_min = min_imaginarity_state(&plus_i.projector(), f).unwrap();
        assert_abs_diff_eq!(geometric_imaginarity(&rho_min), FRAC_PI_8.sin().powi(2), epsilon = 1e-9);
        assert!(fidelity(&plus_i.projector(), &rho_min).unwrap() >= f - 1e-9);

        let real = PureState::basis(2, 0);
        let psi_max = max_imaginarity_state(&real, f).unwrap();
        assert_abs_diff_eq!(psi_max.overlap(&real).norm_sqr(), f, epsilon = 1e-12);
        assert_abs_diff_eq!(geometric_imaginarity_pure(&psi_max), FRAC_PI_8.sin().powi(2), epsilon = 1e-12);

        let rho = random_density(&mut seeded(46), 3);
        assert_eq!(min_imaginarity_state(&rho, 1.0).unwrap(), rho);
    }

    #[test]
    fn approx_worked_numbers() {
        let src = angle_state(FRAC_PI_8);
        let dst = angle_state(FRAC_PI_4).projector();
        let r = approx_prob(&src, &dst, FRAC_PI_8.cos().powi(2)).unwrap();
        assert_abs_diff_eq!(r.params.m1, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.probability, 1.0);

        let f = (PI / 16.0).cos().powi(2);
        let r = approx_prob(&src, &dst, f).unwrap();
        let oracle = FRAC_PI_8.sin().powi(2) / (3.0 * PI / 16.0).sin().powi(2);
        assert_abs_diff_eq!(r.probability, oracle, epsilon = 1e-12);
        assert_abs_diff_eq!(r.probability, 0.474462, epsilon = 1e-6);

        assert_abs_diff_eq!(approx_prob(&src, &dst, 1.0).unwrap().probability, prob_exact(&src, &dst), epsilon = 1e-12);

        let r = approx_fidelity(&src, &dst, 1.0).unwrap();
        assert_abs_diff_eq!(r.fidelity, FRAC_PI_8.cos().powi(2), epsilon = 1e-12);
        assert_abs_diff_eq!(approx_fidelity(&src, &dst, 0.2).unwrap().fidelity, 1.0);
        assert!(approx_fidelity(&src, &dst, 0.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn prob_monotone_in_fidelity(seed in any::<u64>(), f1 in 0.0f64..=1.0, f2 in 0.0f64..=1.0) {
            let mut rng = seeded(seed);
            let psi = random_pure(&mut rng, 3);
            let rho = random_density(&mut rng, 3);
            let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
            let p_lo = approx_prob(&psi, &rho, lo).unwrap().probability;
            let p_hi = approx_prob(&psi, &rho, hi).unwrap().probability;
            prop_assert!(p_hi <= p_lo + 1e-12);
            prop_assert!((0.0..=1.0).contains(&p_lo));
        }

        #[test]
        fn fidelity_monotone_and_inverse(seed in any::<u64>(), p1 in 0.01f64..=1.0, p2 in 0.01f64..=1.0) {
            let mut rng = seeded(seed);
            let psi = random_pure(&mut rng, 2);
            let rho = angle_state(0.7).projector();
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            let f_lo = approx_fidelity(&psi, &rho, lo).unwrap();
            let f_hi = approx_fidelity(&psi, &rho, hi).unwrap();
            prop_assert!(f_hi.fidelity <= f_lo.fidelity + 1e-12);
            let back = approx_prob(&psi, &rho, f_hi.fidelity).unwrap().probability;
            prop_assert!(back >= hi - 1e-9);
            if f_hi.fidelity < 1.0 {
                prop_assert!((back - hi).abs() <= 1e-9);
            }
        }

        #[test]
        fn deterministic_when_source_richer(seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let psi = random_pure(&mut rng, 3);
            let rho = random_density(&mut rng, 3);
            if geometric_imaginarity_pure(&psi) >= geometric_imaginarity(&rho) {
                prop_assert_eq!(prob_exact(&psi, &rho), 1.0);
            }
        }

        #[test]
        fn merge_stays_trace_non_increasing(seed in any::<u64>()) {
            let mut rng = seeded(seed);
            let a = random_channel(&mut rng, 2, 3, 2);
            let b = KrausSet::new(random_channel(&mut rng, 2, 3, 3).ops().iter().map(|k| k.scale(0.8)).collect(), false).unwrap();
            let merged = merge_cp_maps(&a, &b).unwrap();
            prop_assert!(KrausSet::new(merged.into_ops(), false).is_ok());
        }

        #[test]
        fn achievers_reach_bounds(seed in any::<u64>(), f in 0.0f64..=1.0, d in 2usize..=3) {
            let mut rng = seeded(seed);
            let rho = random_density(&mut rng, d);
            let rho_min = min_imaginarity_state(&rho, f).unwrap();
            prop_assert!(fidelity(&rho, &rho_min).unwrap() >= f - 1e-9);
            prop_assert!((geometric_imaginarity(&rho_min) - min_geometric_in_ball(&rho, f).unwrap()).abs() <= 1e-8);

            let psi = random_pure(&mut rng, d);
            let psi_max = max_imaginarity_state(&psi, f).unwrap();
            prop_assert!(psi_max.overlap(&psi).norm_sqr() >= f - 1e-9);
            prop_assert!((geometric_imaginarity_pure(&psi_max) - max_geometric_in_ball_pure(&psi, f).unwrap()).abs() <= 1e-8);
        }
    }
}

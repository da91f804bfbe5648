#![allow(dead_code)]

use imkit_core::{ComplexMatrix, ComplexVector, DensityMatrix, KrausSet, PureState, RealMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn ginibre<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

pub fn real_ginibre<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c(rng.sample(StandardNormal), 0.0))
}

fn normalized_gram(g: &ComplexMatrix) -> DensityMatrix {
    let m = g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.unscale(tr)).unwrap()
}

pub fn random_density<R: Rng>(rng: &mut R, d: usize) -> DensityMatrix {
    normalized_gram(&ginibre(rng, d, d))
}

pub fn random_real_density<R: Rng>(rng: &mut R, d: usize) -> DensityMatrix {
    normalized_gram(&real_ginibre(rng, d, d))
}

pub fn random_pure<R: Rng>(rng: &mut R, d: usize) -> PureState {
    PureState::normalized(ginibre(rng, d, 1).column(0).into_owned()).unwrap()
}

fn split_isometry(v: ComplexMatrix, n_ops: usize, d_out: usize) -> Vec<ComplexMatrix> {
    let q = v.qr().q();
    (0..n_ops).map(|k| q.rows(k * d_out, d_out).into_owned()).collect()
}

/// Trace-preserving map from a Haar-like isometry; needs `n_ops * d_out >= d_in`.
pub fn random_channel<R: Rng>(rng: &mut R, d_in: usize, d_out: usize, n_ops: usize) -> KrausSet {
    KrausSet::new(split_isometry(ginibre(rng, n_ops * d_out, d_in), n_ops, d_out), true).unwrap()
}

pub fn random_real_channel<R: Rng>(rng: &mut R, d_in: usize, d_out: usize, n_ops: usize) -> KrausSet {
    KrausSet::new(split_isometry(real_ginibre(rng, n_ops * d_out, d_in), n_ops, d_out), true).unwrap()
}

pub fn matrix_unit(d: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut e = ComplexMatrix::zeros(d, d);
    e[(i, j)] = c(1.0, 0.0);
    e
}

pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Spectral square root of a Hermitian PSD matrix via the real embedding,
/// independent of the library's eigen routines.
pub fn oracle_sqrt(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.nrows();
    let mut e = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            e[(i, j)] = z.re;
            e[(i + n, j + n)] = z.re;
            e[(i, j + n)] = -z.im;
            e[(i + n, j)] = z.im;
        }
    }
    let eig = e.symmetric_eigen();
    let root = &eig.eigenvectors
        * DMatrix::from_diagonal(&eig.eigenvalues.map(|x| x.max(0.0).sqrt()))
        * eig.eigenvectors.transpose();
    ComplexMatrix::from_fn(n, n, |i, j| {
        c(0.5 * (root[(i, j)] + root[(i + n, j + n)]), 0.5 * (root[(i + n, j)] - root[(i, j + n)]))
    })
}

/// `Tr sqrt(sqrt(rho) sigma sqrt(rho))`.
pub fn oracle_root_fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> f64 {
    let s = oracle_sqrt(rho);
    let inner = &s * sigma * &s;
    let inner = (&inner + inner.adjoint()).scale(0.5);
    oracle_sqrt(&inner).trace().re
}

/// `1 - max over real unit phi of |<phi|psi>|^2` for a qubit, by grid search.
pub fn oracle_pure_imaginarity_grid(psi: &ComplexVector, steps: usize) -> f64 {
    let mut best = 0.0f64;
    for k in 0..steps {
        let theta = core::f64::consts::PI * k as f64 / steps as f64;
        let overlap = psi[0] * theta.cos() + psi[1] * theta.sin();
        best = best.max(overlap.norm_sqr());
    }
    1.0 - best
}

/// `sum_j K_j X K_j^dag` computed from raw operators.
pub fn oracle_action(ops: &[ComplexMatrix], x: &ComplexMatrix) -> ComplexMatrix {
    let d = ops[0].nrows();
    ops.iter().fold(ComplexMatrix::zeros(d, d), |acc, k| acc + k * x * k.adjoint())
}

pub fn trace_norm_hermitian(m: &ComplexMatrix) -> f64 {
    let n = m.nrows();
    let mut e = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            e[(i, j)] = z.re;
            e[(i + n, j + n)] = z.re;
            e[(i, j + n)] = -z.im;
            e[(i + n, j)] = z.im;
        }
    }
    0.5 * e.symmetric_eigen().eigenvalues.iter().map(|x| x.abs()).sum::<f64>()
}

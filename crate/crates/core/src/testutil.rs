//! Random sampling helpers shared by the unit tests.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{psd_sqrt_clipped, ComplexMatrix, RealMatrix};
use crate::state::{DensityMatrix, PureState};
use crate::transforms::KrausSet;

pub use core::f64::consts::FRAC_1_SQRT_2;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pure(amps: &[Complex64]) -> PureState {
    PureState::new(DVector::from_column_slice(amps)).unwrap()
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

pub fn ginibre<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

pub fn real_ginibre<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> RealMatrix {
    RealMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn random_hermitian<R: Rng>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = ginibre(rng, d, d);
    (&g + g.adjoint()).scale(0.5)
}

pub fn random_symmetric<R: Rng>(rng: &mut R, d: usize) -> ComplexMatrix {
    let g = ginibre(rng, d, d);
    (&g + g.transpose()).scale(0.5)
}

/// Hilbert-Schmidt distributed density matrix of full rank.
pub fn random_density<R: Rng>(rng: &mut R, d: usize) -> DensityMatrix {
    random_density_rank(rng, d, d)
}

pub fn random_density_rank<R: Rng>(rng: &mut R, d: usize, rank: usize) -> DensityMatrix {
    let g = ginibre(rng, d, rank);
    let m = &g * g.adjoint();
    let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
    DensityMatrix::new(m.unscale(tr)).unwrap()
}

pub fn random_real_density<R: Rng>(rng: &mut R, d: usize) -> DensityMatrix {
    let g = real_ginibre(rng, d, d);
    let m = (&g * g.transpose()).map(|x| c(x, 0.0));
    let tr: f64 = m.diagonal().iter().map(|z| z.re).sum();
    DensityMatrix::new(m.unscale(tr)).unwrap()
}

pub fn random_pure<R: Rng>(rng: &mut R, d: usize) -> PureState {
    let v = ginibre(rng, d, 1).column(0).into_owned();
    PureState::normalized(v).unwrap()
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng>(rng: &mut R, d: usize) -> ComplexMatrix {
    let qr = ginibre(rng, d, d).qr();
    let (q, r) = qr.unpack();
    let mut q = q;
    for k in 0..d {
        let ph = r[(k, k)] / r[(k, k)].norm();
        let mut col = q.column_mut(k);
        col *= ph;
    }
    q
}

fn isometry_blocks(v: &ComplexMatrix, n_ops: usize, d_out: usize) -> alloc::vec::Vec<ComplexMatrix> {
    let gram = v.adjoint() * v;
    let inv_root = psd_sqrt_clipped(&gram).try_inverse().unwrap();
    let w = v * inv_root;
    (0..n_ops).map(|k| w.rows(k * d_out, d_out).into_owned()).collect()
}

/// Random trace-preserving map with real Kraus operators.
pub fn random_real_channel<R: Rng>(rng: &mut R, d_in: usize, d_out: usize, n_ops: usize) -> KrausSet {
    let v = real_ginibre(rng, n_ops * d_out, d_in).map(|x| c(x, 0.0));
    KrausSet::new(isometry_blocks(&v, n_ops, d_out), true).unwrap()
}

/// Random trace-preserving map with complex Kraus operators.
pub fn random_channel<R: Rng>(rng: &mut R, d_in: usize, d_out: usize, n_ops: usize) -> KrausSet {
    let v = ginibre(rng, n_ops * d_out, d_in);
    KrausSet::new(isometry_blocks(&v, n_ops, d_out), true).unwrap()
}

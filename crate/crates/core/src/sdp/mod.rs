//! Choi matrices and the two conversion programs: feasibility of `rho -> sigma`
//! under real trace-preserving maps, and the optimal fidelity of reaching a
//! pure target with a prescribed success probability.

pub mod ipm;

use alloc::vec::Vec;

use num_complex::Complex64;

pub use ipm::{SolverConfig, SolverStatus};

use crate::error::{Error, Result};
use crate::linalg::{
    check_square, hermitian_deviation, max_abs, max_eigenvalue, max_imag, min_eigenvalue, partial_trace_first, partial_trace_second,
    tensor, ComplexMatrix, RealMatrix, ONE, ZERO,
};
use crate::state::{DensityMatrix, PureState};
use crate::tolerance::Tolerances;
use crate::transforms::{matrix_unit, KrausSet};
use ipm::{constraint, Block, BlockProblem};

/// Tolerance on `|alpha - 1|` for declaring a conversion feasible.
pub const ALPHA_TOL: f64 = 1e-6;

/// Unnormalized Choi matrix `sum_ij E_ij (x) L(E_ij)`, input factor first.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    d_in: usize,
    d_out: usize,
    mat: ComplexMatrix,
}

impl ChoiMatrix {
    pub fn new(mat: ComplexMatrix, d_in: usize, d_out: usize) -> Result<Self> {
        Self::with_tolerances(mat, d_in, d_out, &Tolerances::DEFAULT)
    }

    pub fn with_tolerances(mat: ComplexMatrix, d_in: usize, d_out: usize, tol: &Tolerances) -> Result<Self> {
        let n = check_square(&mat)?;
        if n != d_in * d_out {
            return Err(Error::DimensionMismatch {
                expected: d_in * d_out,
                found: n,
            });
        }
        crate::linalg::check_finite(&mat)?;
        let dev = hermitian_deviation(&mat);
        if dev > tol.herm {
            return Err(Error::NotHermitian(dev));
        }
        let lam = min_eigenvalue(&mat);
        if lam < -tol.psd {
            return Err(Error::NotPositive(lam));
        }
        let c = ChoiMatrix { d_in, d_out, mat };
        let excess = max_eigenvalue(&c.input_marginal()) - 1.0;
        if excess > tol.psd {
            return Err(Error::NotTraceNonIncreasing(excess));
        }
        Ok(c)
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// `Tr_out` of the Choi matrix, equal to `(sum K^dag K)^T`.
    pub fn input_marginal(&self) -> ComplexMatrix {
        partial_trace_second(&self.mat, self.d_in, self.d_out)
    }

    pub fn is_real(&self) -> bool {
        max_imag(&self.mat) <= crate::transforms::REAL_TOL && max_abs(&(&self.mat - self.mat.transpose())) <= crate::transforms::REAL_TOL
    }

    pub fn scaled(&self, factor: f64) -> ChoiMatrix {
        ChoiMatrix {
            d_in: self.d_in,
            d_out: self.d_out,
            mat: self.mat.scale(factor),
        }
    }
}

pub fn choi_from_kraus(k: &KrausSet) -> ChoiMatrix {
    let (d_in, d_out) = (k.d_in(), k.d_out());
    let mut mat = ComplexMatrix::zeros(d_in * d_out, d_in * d_out);
    for i in 0..d_in {
        for j in 0..d_in {
            let out = k.apply_matrix(&matrix_unit(d_in, i, j)).expect("matrix unit has the input dimension");
            mat.view_mut((i * d_out, j * d_out), (d_out, d_out)).copy_from(&out);
        }
    }
    ChoiMatrix { d_in, d_out, mat }
}

/// `L(rho) = Tr_in[Sigma (rho^T (x) I)]`.
pub fn apply_choi(c: &ChoiMatrix, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    if rho.dim() != c.d_in {
        return Err(Error::DimensionMismatch {
            expected: c.d_in,
            found: rho.dim(),
        });
    }
    let lifted = tensor(&rho.as_matrix().transpose(), &ComplexMatrix::identity(c.d_out, c.d_out));
    Ok(partial_trace_first(&(&c.mat * lifted), c.d_in, c.d_out))
}

/// `[[Re H, -Im H], [Im H, Re H]]`.
pub fn real_embed(h: &ComplexMatrix) -> RealMatrix {
    let (r, c) = h.shape();
    let mut out = RealMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = h[(i, j)];
            out[(i, j)] = z.re;
            out[(i + r, j + c)] = z.re;
            out[(i, j + c)] = -z.im;
            out[(i + r, j)] = z.im;
        }
    }
    out
}

#[cfg(test)]
/// Hermitian matrix represented by a symmetric `2n x 2n` variable, so that
/// `tr(H Y) = tr(real_embed(H) X) / 2`.
fn unembed(x: &RealMatrix) -> ComplexMatrix {
    let n = x.nrows() / 2;
    ComplexMatrix::from_fn(n, n, |i, j| {
        Complex64::new(
            0.5 * (x[(i, j)] + x[(i + n, j + n)]),
            0.5 * (x[(i + n, j)] - x[(i, j + n)]),
        )
    })
}

fn half_embed(h: &ComplexMatrix) -> Block {
    let e = real_embed(h) * 0.5;
    (&e + e.transpose()) * 0.5
}

fn real_part(h: &ComplexMatrix) -> Block {
    let r = h.map(|z| z.re);
    (&r + r.transpose()) * 0.5
}

/// Basis of the real vector space of `d x d` Hermitian matrices.
fn hermitian_basis(d: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(d * d);
    for k in 0..d {
        for l in k..d {
            let mut h = ComplexMatrix::zeros(d, d);
            h[(k, l)] = ONE;
            h[(l, k)] = ONE;
            out.push(h);
            if l > k {
                let mut h = ComplexMatrix::zeros(d, d);
                h[(k, l)] = Complex64::new(0.0, -1.0);
                h[(l, k)] = Complex64::new(0.0, 1.0);
                out.push(h);
            }
        }
    }
    out
}

fn symmetric_basis(d: usize) -> Vec<Block> {
    let mut out = Vec::with_capacity(d * (d + 1) / 2);
    for k in 0..d {
        for l in k..d {
            let mut s = Block::zeros(d, d);
            s[(k, l)] = 1.0;
            s[(l, k)] = 1.0;
            out.push(s);
        }
    }
    out
}

fn combine(basis: &[ComplexMatrix], coeffs: &[f64]) -> ComplexMatrix {
    let d = basis[0].nrows();
    basis
        .iter()
        .zip(coeffs)
        .fold(ComplexMatrix::zeros(d, d), |acc, (h, &c)| acc + h.scale(c))
}

fn real_trace(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a * b).trace().re
}

/// Outcome of the conversion-feasibility program.
///
/// `alpha = min Tr Z` over Hermitian `Z` with
/// `I (x) Z >= X1 (x) rho + X2 (x) rho^T`, `X1, X2 >= 0` and
/// `Tr(sigma^T X1 + sigma X2) = 1`. A real trace-preserving map taking `rho`
/// to `sigma` exists iff `alpha = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub alpha: f64,
    pub feasible: bool,
    pub z_cert: ComplexMatrix,
    pub x1_cert: ComplexMatrix,
    pub x2_cert: ComplexMatrix,
    pub solver_status: SolverStatus,
}

pub fn feasibility_alpha(rho: &DensityMatrix, sigma: &DensityMatrix) -> FeasibilityReport {
    feasibility_alpha_with(rho, sigma, &SolverConfig::DEFAULT)
}

/// Solves the program through its conic dual: maximize `t` over maps `Y`
/// (output factor first) with `Tr_out Y = I` and
/// `L(rho) >= t sigma`, `L(rho^T) >= t sigma^T`. The multipliers of the three
/// constraints are `-Z`, `X1` and `X2`.
pub fn feasibility_alpha_with(rho: &DensityMatrix, sigma: &DensityMatrix, config: &SolverConfig) -> FeasibilityReport {
    let (da, ds) = (rho.dim(), sigma.dim());
    let n = ds * da;
    let (y_blk, t_blk, s1_blk, s2_blk) = (0, 1, 2, 3);
    let mut p = BlockProblem::new(alloc::vec![2 * n, 1, 2 * ds, 2 * ds]);
    p.cost[t_blk][(0, 0)] = -1.0;

    let id_s = ComplexMatrix::identity(ds, ds);
    let basis_a = hermitian_basis(da);
    let basis_s = hermitian_basis(ds);
    let rho_m = rho.as_matrix();
    let rho_t = rho_m.transpose();
    let sigma_m = sigma.as_matrix();
    let sigma_t = sigma_m.transpose();

    for h in &basis_a {
        let rhs = h.trace().re;
        p.constraints.push(constraint(alloc::vec![(y_blk, half_embed(&tensor(&id_s, h)))], rhs));
    }
    for (state, target, slack) in [(rho_m, &sigma_t, s1_blk), (&rho_t, sigma_m, s2_blk)] {
        for h in &basis_s {
            let t_coef = Block::from_element(1, 1, -real_trace(h, target));
            p.constraints.push(constraint(
                alloc::vec![
                    (y_blk, half_embed(&tensor(h, state))),
                    (t_blk, t_coef),
                    (slack, -half_embed(h)),
                ],
                0.0,
            ));
        }
    }

    let sol = ipm::solve(&p, config);
    let y: Vec<f64> = sol.y.iter().copied().collect();
    let (ya, rest) = y.split_at(basis_a.len());
    let (y1, y2) = rest.split_at(basis_s.len());
    let alpha = sol.x[t_blk][(0, 0)];
    FeasibilityReport {
        alpha,
        feasible: sol.status.is_usable() && (alpha - 1.0).abs() <= ALPHA_TOL,
        z_cert: -combine(&basis_a, ya),
        x1_cert: combine(&basis_s, y1),
        x2_cert: combine(&basis_s, y2),
        solver_status: sol.status,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpSolution {
    pub objective: f64,
    pub choi: ChoiMatrix,
    pub solver_status: SolverStatus,
}

pub fn optimal_fidelity_pure_target(rho: &DensityMatrix, psi: &PureState, p: f64) -> Result<SdpSolution> {
    optimal_fidelity_pure_target_with(rho, psi, p, &SolverConfig::DEFAULT)
}

/// Maximizes `Tr[Sigma (rho^T (x) |psi><psi|)] / p` over real symmetric Choi
/// matrices with `Tr_out Sigma <= I` and `Tr[Sigma (rho^T (x) I)] = p`.
pub fn optimal_fidelity_pure_target_with(rho: &DensityMatrix, psi: &PureState, p: f64, config: &SolverConfig) -> Result<SdpSolution> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::OutOfRange {
            name: "probability",
            value: p,
            range: "(0, 1]",
        });
    }
    let (da, db) = (rho.dim(), psi.dim());
    let (sigma_blk, slack_blk) = (0, 1);
    let mut prob = BlockProblem::new(alloc::vec![da * db, da]);
    let rho_t = rho.as_matrix().transpose();
    let target = psi.projector().into_matrix();
    prob.cost[sigma_blk] = -real_part(&tensor(&rho_t, &target)) / p;

    let id_b = Block::identity(db, db);
    for s in symmetric_basis(da) {
        let rhs = s.trace();
        prob.constraints.push(constraint(
            alloc::vec![(sigma_blk, s.kronecker(&id_b)), (slack_blk, s)],
            rhs,
        ));
    }
    let lifted = real_part(&tensor(&rho_t, &ComplexMatrix::identity(db, db))) / p;
    prob.constraints.push(constraint(alloc::vec![(sigma_blk, lifted)], 1.0));

    let sol = ipm::solve(&prob, config);
    let choi = ChoiMatrix {
        d_in: da,
        d_out: db,
        mat: sol.x[sigma_blk].map(|x| ZERO + x),
    };
    Ok(SdpSolution {
        objective: -sol.primal_objective,
        choi,
        solver_status: sol.status,
    })
}

//! Primal-dual interior-point method for block-diagonal SDPs
//!
//! ```text
//! min <C, X>  s.t.  <A_i, X> = b_i,  X >= 0
//! max b.y     s.t.  S = C - sum_i y_i A_i >= 0
//! ```
//!
//! with infeasible starts, the HKM search direction and Mehrotra
//! predictor-corrector steps.

use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

pub type Block = DMatrix<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverStatus {
    Optimal,
    /// Stopped short of `gap_tol` but within `near_tol`.
    NearOptimal,
    /// Iterates diverged, which indicates primal or dual infeasibility.
    InfeasibleNumeric,
    Failed,
}

impl SolverStatus {
    pub fn is_usable(self) -> bool {
        matches!(self, SolverStatus::Optimal | SolverStatus::NearOptimal)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolverStatus::Optimal => "optimal",
            SolverStatus::NearOptimal => "near_optimal",
            SolverStatus::InfeasibleNumeric => "infeasible_numeric",
            SolverStatus::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Target for relative gap and relative residuals.
    pub gap_tol: f64,
    pub near_tol: f64,
    pub max_iter: usize,
    /// Fraction of the step to the cone boundary.
    pub step_factor: f64,
}

impl SolverConfig {
    pub const DEFAULT: SolverConfig = SolverConfig {
        gap_tol: 1e-8,
        near_tol: 1e-6,
        max_iter: 200,
        step_factor: 0.95,
    };

    pub fn with_gap(gap_tol: f64) -> Self {
        SolverConfig {
            gap_tol,
            near_tol: gap_tol.max(1e-6),
            ..Self::DEFAULT
        }
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// One linear constraint `sum_b <A_b, X_b> = rhs`; blocks not listed are zero.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub terms: Vec<(usize, Block)>,
    pub rhs: f64,
}

#[derive(Debug, Clone)]
pub struct BlockProblem {
    pub sizes: Vec<usize>,
    pub cost: Vec<Block>,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Clone)]
pub struct BlockSolution {
    pub x: Vec<Block>,
    pub y: DVector<f64>,
    pub s: Vec<Block>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// Largest of relative gap, primal and dual residual.
    pub error: f64,
    pub iterations: usize,
    pub status: SolverStatus,
}

const DIVERGENCE: f64 = 1e12;

impl BlockProblem {
    pub fn new(sizes: Vec<usize>) -> Self {
        let cost = sizes.iter().map(|&n| Block::zeros(n, n)).collect();
        BlockProblem {
            sizes,
            cost,
            constraints: Vec::new(),
        }
    }

    fn apply(&self, x: &[Block]) -> DVector<f64> {
        DVector::from_iterator(
            self.constraints.len(),
            self.constraints
                .iter()
                .map(|c| c.terms.iter().map(|(b, a)| a.dot(&x[*b])).sum::<f64>()),
        )
    }

    fn apply_adjoint(&self, y: &DVector<f64>) -> Vec<Block> {
        let mut out = self.zeros();
        for (c, &yi) in self.constraints.iter().zip(y.iter()) {
            for (b, a) in &c.terms {
                out[*b] += a * yi;
            }
        }
        out
    }

    fn zeros(&self) -> Vec<Block> {
        self.sizes.iter().map(|&n| Block::zeros(n, n)).collect()
    }

    fn rhs(&self) -> DVector<f64> {
        DVector::from_iterator(self.constraints.len(), self.constraints.iter().map(|c| c.rhs))
    }

    fn schur(&self, x: &[Block], s_inv: &[Block]) -> DMatrix<f64> {
        let m = self.constraints.len();
        let mut out = DMatrix::zeros(m, m);
        for (j, cj) in self.constraints.iter().enumerate() {
            let g: Vec<(usize, Block)> = cj.terms.iter().map(|(b, a)| (*b, &x[*b] * a * &s_inv[*b])).collect();
            for (i, ci) in self.constraints.iter().enumerate().skip(j) {
                let mut v = 0.0;
                for (bi, ai) in &ci.terms {
                    for (bj, gj) in &g {
                        if bi == bj {
                            v += ai.dot(gj);
                        }
                    }
                }
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }
}

fn inner(a: &[Block], b: &[Block]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p.dot(q)).sum()
}

fn frob(a: &[Block]) -> f64 {
    inner(a, a).sqrt()
}

fn sym(m: Block) -> Block {
    (&m + m.transpose()) * 0.5
}

/// Largest `t` with `x + t dx >= 0`, infinite when `dx` is a recession direction.
fn max_step(x: &[Block], dx: &[Block]) -> Option<f64> {
    let mut best = f64::INFINITY;
    for (xb, db) in x.iter().zip(dx) {
        let l = Cholesky::new(xb.clone())?.unpack();
        let half = l.solve_lower_triangular(db)?;
        let w = l.solve_lower_triangular(&half.transpose())?;
        let lam = sym(w).symmetric_eigen().eigenvalues.min();
        if lam < 0.0 {
            best = best.min(-1.0 / lam);
        }
    }
    Some(best)
}

struct Direction {
    dx: Vec<Block>,
    dy: DVector<f64>,
    ds: Vec<Block>,
}

struct Iterate<'a> {
    problem: &'a BlockProblem,
    x: &'a [Block],
    s_inv: &'a [Block],
    rp: &'a DVector<f64>,
    rd: &'a [Block],
    schur: &'a Cholesky<f64, nalgebra::Dyn>,
}

impl Iterate<'_> {
    fn direction(&self, target_mu: f64, correction: Option<&Direction>) -> Direction {
        let k: Vec<Block> = (0..self.x.len())
            .map(|b| {
                let mut kb = &self.s_inv[b] * target_mu - &self.x[b];
                if let Some(c) = correction {
                    kb -= &c.dx[b] * &c.ds[b] * &self.s_inv[b];
                }
                kb
            })
            .collect();
        let shifted: Vec<Block> = (0..self.x.len())
            .map(|b| &k[b] - &self.x[b] * &self.rd[b] * &self.s_inv[b])
            .collect();
        let rhs = self.rp - self.problem.apply(&shifted);
        let dy = self.schur.solve(&rhs);
        let aty = self.problem.apply_adjoint(&dy);
        let ds: Vec<Block> = self.rd.iter().zip(&aty).map(|(r, a)| r - a).collect();
        let dx = (0..self.x.len())
            .map(|b| sym(&k[b] - &self.x[b] * &ds[b] * &self.s_inv[b]))
            .collect();
        Direction { dx, dy, ds }
    }
}

fn schur_factor(m: DMatrix<f64>) -> Option<Cholesky<f64, nalgebra::Dyn>> {
    let scale = m.diagonal().amax().max(1e-300);
    let mut reg = 0.0;
    for _ in 0..8 {
        let mut shifted = m.clone();
        for i in 0..shifted.nrows() {
            shifted[(i, i)] += reg;
        }
        if let Some(ch) = Cholesky::new(shifted) {
            return Some(ch);
        }
        reg = if reg == 0.0 { scale * 1e-14 } else { reg * 100.0 };
    }
    None
}

pub fn solve(problem: &BlockProblem, config: &SolverConfig) -> BlockSolution {
    let n_total: usize = problem.sizes.iter().sum();
    let b = problem.rhs();
    let b_norm = b.norm();
    let c_norm = frob(&problem.cost);

    let mut xi = 10.0f64.max((n_total as f64).sqrt());
    let mut eta = xi.max(c_norm);
    for c in &problem.constraints {
        let a_norm = c.terms.iter().map(|(_, a)| a.norm_squared()).sum::<f64>().sqrt();
        if a_norm > 0.0 {
            xi = xi.max(n_total as f64 * (1.0 + c.rhs.abs()) / (1.0 + a_norm));
            eta = eta.max(a_norm);
        }
    }
    let mut x: Vec<Block> = problem.sizes.iter().map(|&n| Block::identity(n, n) * xi).collect();
    let mut s: Vec<Block> = problem.sizes.iter().map(|&n| Block::identity(n, n) * eta).collect();
    let mut y = DVector::zeros(problem.constraints.len());

    let mut best: Option<BlockSolution> = None;
    let mut record = |x: &[Block], y: &DVector<f64>, s: &[Block], err: f64, pobj: f64, dobj: f64, it: usize| {
        if best.as_ref().map_or(true, |bs| err < bs.error) {
            best = Some(BlockSolution {
                x: x.to_vec(),
                y: y.clone(),
                s: s.to_vec(),
                primal_objective: pobj,
                dual_objective: dobj,
                error: err,
                iterations: it,
                status: SolverStatus::Failed,
            });
        }
    };

    let mut diverged = false;
    for it in 0..=config.max_iter {
        let rp = &b - problem.apply(&x);
        let aty = problem.apply_adjoint(&y);
        let rd: Vec<Block> = (0..x.len()).map(|k| &problem.cost[k] - &aty[k] - &s[k]).collect();
        let pobj = inner(&problem.cost, &x);
        let dobj = b.dot(&y);
        let comp = inner(&x, &s);
        let err = (comp / (1.0 + pobj.abs() + dobj.abs()))
            .max(rp.norm() / (1.0 + b_norm))
            .max(frob(&rd) / (1.0 + c_norm));
        record(&x, &y, &s, err, pobj, dobj, it);
        if err <= config.gap_tol {
            break;
        }
        if frob(&x) > DIVERGENCE || frob(&s) > DIVERGENCE {
            diverged = true;
            break;
        }
        if it == config.max_iter {
            break;
        }
        let mu = comp / n_total as f64;
        let Some(s_inv) = s
            .iter()
            .map(|sb| Cholesky::new(sb.clone()).map(|c| sym(c.inverse())))
            .collect::<Option<Vec<_>>>()
        else {
            break;
        };
        let Some(schur) = schur_factor(problem.schur(&x, &s_inv)) else {
            break;
        };
        let state = Iterate {
            problem,
            x: &x,
            s_inv: &s_inv,
            rp: &rp,
            rd: &rd,
            schur: &schur,
        };

        let pred = state.direction(0.0, None);
        let (Some(ap), Some(ad)) = (max_step(&x, &pred.dx), max_step(&s, &pred.ds)) else {
            break;
        };
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let x_aff: Vec<Block> = x.iter().zip(&pred.dx).map(|(a, d)| a + d * ap).collect();
        let s_aff: Vec<Block> = s.iter().zip(&pred.ds).map(|(a, d)| a + d * ad).collect();
        let mu_aff = inner(&x_aff, &s_aff) / n_total as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        let corr = state.direction(sigma * mu, Some(&pred));
        let (Some(ap), Some(ad)) = (max_step(&x, &corr.dx), max_step(&s, &corr.ds)) else {
            break;
        };
        let ap = (config.step_factor * ap).min(1.0);
        let ad = (config.step_factor * ad).min(1.0);
        if ap < 1e-12 && ad < 1e-12 {
            break;
        }
        for k in 0..x.len() {
            x[k] += &corr.dx[k] * ap;
            s[k] += &corr.ds[k] * ad;
        }
        y += &corr.dy * ad;
    }

    let mut out = best.expect("at least one iterate is recorded");
    out.status = if out.error <= config.gap_tol {
        SolverStatus::Optimal
    } else if out.error <= config.near_tol {
        SolverStatus::NearOptimal
    } else if diverged {
        SolverStatus::InfeasibleNumeric
    } else {
        SolverStatus::Failed
    };
    out
}

/// Shorthand for building a [`Constraint`].
pub fn constraint(terms: Vec<(usize, Block)>, rhs: f64) -> Constraint {
    Constraint { terms, rhs }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_program_in_diagonal_blocks() {
        // min x1 + 2 x2  s.t.  x1 + x2 = 1
        let mut p = BlockProblem::new(vec![1, 1]);
        p.cost[0][(0, 0)] = 1.0;
        p.cost[1][(0, 0)] = 2.0;
        p.constraints.push(constraint(vec![(0, Block::identity(1, 1)), (1, Block::identity(1, 1))], 1.0));
        let sol = solve(&p, &SolverConfig::DEFAULT);
        assert_eq!(sol.status, SolverStatus::Optimal);
        assert_abs_diff_eq!(sol.primal_objective, 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(sol.x[0][(0, 0)], 1.0, epsilon = 1e-7);
    }

    #[test]
    fn min_eigenvalue_program() {
        // min <C, X> with tr X = 1 gives the smallest eigenvalue of C.
        let c = Block::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 3.0, -1.0, 0.0, -1.0, 1.0]);
        let mut p = BlockProblem::new(vec![3]);
        p.cost[0] = c.clone();
        p.constraints.push(constraint(vec![(0, Block::identity(3, 3))], 1.0));
        let sol = solve(&p, &SolverConfig::DEFAULT);
        assert_eq!(sol.status, SolverStatus::Optimal);
        let lam = c.symmetric_eigen().eigenvalues.min();
        assert_abs_diff_eq!(sol.primal_objective, lam, epsilon = 1e-7);
        assert_abs_diff_eq!(sol.dual_objective, lam, epsilon = 1e-7);
    }

    #[test]
    fn infeasible_program_is_flagged() {
        // tr X = -1 has no PSD solution.
        let mut p = BlockProblem::new(vec![2]);
        p.constraints.push(constraint(vec![(0, Block::identity(2, 2))], -1.0));
        let sol = solve(&p, &SolverConfig::DEFAULT);
        assert!(!sol.status.is_usable());
    }

    #[test]
    fn looser_gap_stops_earlier() {
        let c = Block::from_row_slice(2, 2, &[1.0, 0.5, 0.5, -1.0]);
        let mut p = BlockProblem::new(vec![2]);
        p.cost[0] = c;
        p.constraints.push(constraint(vec![(0, Block::identity(2, 2))], 1.0));
        let tight = solve(&p, &SolverConfig::DEFAULT);
        let loose = solve(&p, &SolverConfig::with_gap(1e-3));
        assert!(loose.iterations <= tight.iterations);
        assert!(loose.status.is_usable());
    }
}

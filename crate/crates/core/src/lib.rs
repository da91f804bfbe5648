//! Geometric imaginarity as a quantum resource.
//!
//! Density matrices, the geometric measure `I_g(rho) = (1 - sqrt F(rho, rho^T)) / 2`
//! and its pure-state decompositions, real (transposition-covariant) operations
//! as Kraus sets, analytic conversion rates between states, and the
//! semidefinite programs that decide or optimize conversions. The crate is
//! `no_std` and needs only `alloc`.
//!
//! ```
//! use imkit_core::{geometric_imaginarity_pure, prob_exact, Complex64, ComplexVector, PureState};
//!
//! let (c, s) = (core::f64::consts::PI / 8.0).sin_cos();
//! let source = PureState::new(ComplexVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(0.0, c)]))?;
//! let h = core::f64::consts::FRAC_1_SQRT_2;
//! let plus_i = PureState::new(ComplexVector::from_vec(vec![Complex64::new(h, 0.0), Complex64::new(0.0, h)]))?;
//!
//! assert!((geometric_imaginarity_pure(&plus_i) - 0.5).abs() < 1e-12);
//! let p = prob_exact(&source, &plus_i.projector());
//! assert!((p - (1.0 - h)).abs() < 1e-12);
//! # Ok::<(), imkit_core::Error>(())
//! ```

#![no_std]

extern crate alloc;

pub mod decompositions;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod sdp;
pub mod state;
pub mod takagi;
pub mod tolerance;
pub mod transforms;

#[cfg(test)]
mod testutil;

pub use decompositions::{
    average_conjugate_product, conjugate_orthogonal_decomposition, equal_imaginarity_decomposition, ConjugateOrthogonalEnsemble,
    Ensemble, EnsembleRotation,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use linalg::{bures_angle, fidelity, root_fidelity, ComplexMatrix, ComplexVector, RealMatrix, Side};
pub use measures::{
    geometric_imaginarity, geometric_imaginarity_pure, is_free, real_entanglement_infidelity, real_entanglement_monotone,
    transpose_root_fidelity,
};
pub use sdp::{
    apply_choi, choi_from_kraus, feasibility_alpha, feasibility_alpha_with, optimal_fidelity_pure_target,
    optimal_fidelity_pure_target_with, real_embed, ChoiMatrix, FeasibilityReport, SdpSolution, SolverConfig, SolverStatus,
};
pub use state::{BipartiteOperator, BipartiteState, DensityMatrix, PureState};
pub use takagi::{takagi, TakagiFactorization};
pub use tolerance::Tolerances;
pub use transforms::{
    approx_fidelity, approx_prob, is_covariant, max_geometric_in_ball_pure, max_imaginarity_state, merge_cp_maps,
    min_geometric_in_ball, min_imaginarity_state, prob_exact, prob_upper_bound, realify_covariant, symmetrize_rho_covariant,
    ApproxParams, ConversionResult, KrausSet,
};

//! Geometric imaginarity and real-entanglement monotones.
//!
//! The trace-distance monotone `||rho - rho^{T_X}||_1` and the Bures angle
//! share a symbol in the literature; here they are
//! [`real_entanglement_monotone`] and [`crate::linalg::bures_angle`].

use crate::linalg::{psd_sqrt_clipped, trace_norm, Side};
use crate::state::{BipartiteState, DensityMatrix, PureState};

/// Entry magnitude below which an imaginary part counts as zero.
pub const REALNESS_TOL: f64 = 1e-9;

/// `(1 - |<psi*|psi>|) / 2`, in `[0, 1/2]`.
pub fn geometric_imaginarity_pure(psi: &PureState) -> f64 {
    ((1.0 - psi.self_bilinear().norm()) * 0.5).clamp(0.0, 0.5)
}

/// Root fidelity between `rho` and its transpose.
///
/// `sqrt(rho) sqrt(rho^T) = sqrt(rho) sqrt(rho)^T` is complex symmetric; its
/// singular values are the diagonal of an optimal conjugate-orthogonal
/// decomposition.
pub fn transpose_root_fidelity(rho: &DensityMatrix) -> f64 {
    let root = psd_sqrt_clipped(rho.as_matrix());
    trace_norm(&(&root * root.transpose())).clamp(0.0, 1.0)
}

/// `(1 - sqrt F(rho, rho^T)) / 2`, in `[0, 1/2]`.
pub fn geometric_imaginarity(rho: &DensityMatrix) -> f64 {
    ((1.0 - transpose_root_fidelity(rho)) * 0.5).clamp(0.0, 0.5)
}

/// `||rho - rho^{T_side}||_1`, reported without normalization (range `[0, 2]`).
pub fn real_entanglement_monotone(s: &BipartiteState, side: Side) -> f64 {
    let flipped = s.partial_transpose(side);
    trace_norm(&(s.state().as_matrix() - flipped.as_matrix()))
}

/// `1 - F(rho, rho^{T_side})`, in `[0, 1]`.
///
/// The partial transpose need not be positive; the root fidelity is then
/// evaluated on its positive part, which is exact whenever it is a state.
pub fn real_entanglement_infidelity(s: &BipartiteState, side: Side) -> f64 {
    let flipped = s.partial_transpose(side);
    let root = psd_sqrt_clipped(s.state().as_matrix());
    let other = psd_sqrt_clipped(flipped.as_matrix());
    let f = trace_norm(&(root * other)).clamp(0.0, 1.0);
    (1.0 - f * f).clamp(0.0, 1.0)
}

/// Whether `rho` is a free (real) state under [`REALNESS_TOL`].
pub fn is_free(rho: &DensityMatrix) -> bool {
    rho.is_real(REALNESS_TOL)
}

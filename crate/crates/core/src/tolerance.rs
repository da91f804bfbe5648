/// Numerical tolerances applied when validating states and factorizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Hermiticity and symmetry deviation (max entrywise).
    pub herm: f64,
    /// Deviation of the trace from one.
    pub trace: f64,
    /// Deviation of a state vector norm from one.
    pub norm: f64,
    /// Most negative eigenvalue tolerated in a PSD check.
    pub psd: f64,
    /// Reconstruction residual of factorizations and decompositions.
    pub rec: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        herm: 1e-9,
        trace: 1e-9,
        norm: 1e-9,
        psd: 1e-8,
        rec: 1e-8,
    };

    /// Sets the Hermiticity, trace and norm tolerances to `tol`, and the PSD and
    /// reconstruction tolerances to `10 * tol`.
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            herm: tol,
            trace: tol,
            norm: tol,
            psd: 10.0 * tol,
            rec: 10.0 * tol,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

//! Numerical tolerances shared by every validity check.

/// Hermiticity slack: max |A_ij - conj(A_ji)|.
pub const TOL_HERM: f64 = 1e-9;
/// Allowed deviation of a state's trace from one.
pub const TOL_TRACE: f64 = 1e-9;
/// Eigenvalues in `[-TOL_PSD, 0)` are treated as zero; anything lower is an error.
pub const TOL_PSD: f64 = 1e-9;
/// Slack for strong subadditivity and similar entropy inequalities.
pub const TOL_SSA: f64 = 1e-9;
/// Slack for CPTP completeness `sum K^dag K = 1`.
pub const TOL_CPTP: f64 = 1e-9;

/// Snapshot of the tolerance set, written into output metadata.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Tolerances {
    pub herm: f64,
    pub trace: f64,
    pub psd: f64,
    pub ssa: f64,
    pub cptp: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: TOL_HERM,
            trace: TOL_TRACE,
            psd: TOL_PSD,
            ssa: TOL_SSA,
            cptp: TOL_CPTP,
        }
    }
}

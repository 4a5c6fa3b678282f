//! Numerical tolerances shared by every module.

/// Tolerance defaults. One record so call sites never hard-code thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Entrywise deviation accepted when checking Hermiticity.
    pub hermitian: f64,
    /// Largest correction allowed when symmetrizing on construction.
    pub symmetrize: f64,
    /// Trace deviation accepted for density matrices.
    pub trace: f64,
    /// Most negative eigenvalue accepted for PSD checks.
    pub psd: f64,
    /// Norm deviation accepted for pure states.
    pub norm: f64,
    /// Relative singular value threshold for linear independence.
    pub rank: f64,
    /// Solver convergence tolerance.
    pub sdp: f64,
    /// Solver iteration cap.
    pub sdp_max_iter: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermitian: 1e-12,
            symmetrize: 1e-8,
            trace: 1e-10,
            psd: 1e-10,
            norm: 1e-12,
            rank: 1e-8,
            sdp: 1e-8,
            sdp_max_iter: 200,
        }
    }
}

/// Environment variable overriding the default solver tolerance.
pub const TOL_ENV: &str = "VCLONE_TOL";

impl Tolerances {
    /// Defaults with `VCLONE_TOL` applied to the solver tolerance when set.
    pub fn from_env() -> Self {
        let mut t = Self::default();
        if let Some(v) = std::env::var(TOL_ENV).ok().and_then(|s| s.parse::<f64>().ok()) {
            if v > 0.0 && v.is_finite() {
                t.sdp = v;
            }
        }
        t
    }
}

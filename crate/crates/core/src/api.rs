//! Public entry points for `E^γ_{α,β}(z)`.

use crate::contour::Tolerances;
use crate::inversion::{ml_lt_with, EvalError, EvalResult, LtOptions};
use crate::scalar::Complex;
use crate::singularity::MLParams;

/// Accepted range for the requested accuracy.
pub const TOL_RANGE: (f64, f64) = (1e-15, 1e-1);

/// `E^γ_{α,β}(z)` to accuracy `tol`.
pub fn mittag_leffler(alpha: f64, beta: f64, gamma: f64, z: Complex, tol: f64) -> Result<Complex, EvalError> {
    let params = MLParams::new(alpha, beta, gamma)?;
    evaluate(&params, z, tol, LtOptions::default()).map(|r| r.value)
}

/// `E^γ_{α,β}(z)`, `1/Γ(β)` at `z = 0`, with the plan and the split into residues and quadrature.
pub fn evaluate(params: &MLParams, z: Complex, tol: f64, opts: LtOptions) -> Result<EvalResult, EvalError> {
    if !(TOL_RANGE.0..=TOL_RANGE.1).contains(&tol) {
        return Err(EvalError::InvalidTolerance(tol));
    }
    ml_lt_with(params, 1.0, z, &Tolerances::with_eps(tol), opts)
}

/// `|reference − approx| / (1 + |reference|)`.
pub fn mixed_error(approx: Complex, reference: Complex) -> f64 {
    (reference - approx).norm() / (1.0 + reference.norm())
}

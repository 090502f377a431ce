//! Inversion of `s^{αγ−β}/(s^α − λ)^γ` on a parabolic contour.
//!
//! `e^γ_{α,β}(t; λ) = t^{β−1} E^γ_{α,β}(t^α λ)` is the sum of the residues at
//! the poles right of the contour and the trapezoidal approximation of the
//! contour integral.

use std::f64::consts::PI;

use crate::contour::{plan_all, plan_region, ContourPlan, NoAdmissibleRegion, Tolerances};
use crate::scalar::{arg_principal, cpow_principal, rgamma_real, Complex, XPAccumulator};
use crate::singularity::{build_chart, MLParams, ParamError, SingularityChart};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    InvalidParameter(#[from] ParamError),
    #[error("tolerance must lie in [1e-15, 1e-1], got {0}")]
    InvalidTolerance(f64),
    #[error("t must be positive and finite, got {0}")]
    InvalidTime(f64),
    #[error("argument must be finite")]
    NonFiniteArgument,
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error(transparent)]
    NoAdmissibleRegion(#[from] NoAdmissibleRegion),
    #[error("region {index} cannot be used: {reason}")]
    ForcedRegion { index: usize, reason: String },
    #[error("result is not representable in double precision")]
    Overflow,
    #[error("pole residues are only available for gamma = 1, got {0}")]
    ResidueWithGamma(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult {
    pub value: Complex,
    pub plan: ContourPlan,
    pub residue_sum: Complex,
    pub quadrature_sum: Complex,
    pub n_integrand_evals: usize,
    pub scaled_tau: f64,
}

/// `g(u) = e^{z t} z^{αγ−β} z′ / (z^α − λ)^γ` with `z = μ(iu+1)²`.
pub fn integrand(u: f64, mu: f64, params: &MLParams, t: f64, lambda: Complex) -> Complex {
    let w = Complex::new(1.0, u);
    let z = mu * w * w;
    let dz = Complex::new(0.0, 2.0 * mu) * w;
    let MLParams { alpha, beta, gamma } = *params;
    let num = (z * t).exp() * cpow_principal(z, alpha * gamma - beta).expect("z(u) is never zero") * dz;
    let base = cpow_principal(z, alpha).expect("z(u) is never zero") - lambda;
    let den = if gamma == 1.0 {
        base
    } else {
        cpow_principal(base, gamma).unwrap_or(Complex::new(0.0, 0.0))
    };
    num / den
}

/// `(h/(2πi)) Σ_{k=−N..N} g(kh)` and the number of integrand evaluations.
///
/// For real `λ` the integrand satisfies `g(−u) = −conj(g(u))`, so only
/// `k ≥ 0` is evaluated and the result is real.
pub fn trapezoid(plan: &ContourPlan, params: &MLParams, t: f64, lambda: Complex) -> (Complex, usize) {
    let n = plan.n as i64;
    let h = plan.h;
    let scale = h / (2.0 * PI);
    if lambda.im == 0.0 {
        let g0 = integrand(0.0, plan.mu, params, t, lambda);
        let mut acc = XPAccumulator::new();
        acc.add(g0.im);
        for k in 1..=n {
            acc.add(2.0 * integrand(k as f64 * h, plan.mu, params, t, lambda).im);
        }
        let re = scale * acc.value();
        let im = -scale * g0.re;
        debug_assert!(im.abs() <= 1e-13 * (1.0 + re.abs()));
        return (Complex::new(re, 0.0), plan.n + 1);
    }
    let mut re = XPAccumulator::new();
    let mut im = XPAccumulator::new();
    for k in -n..=n {
        let g = integrand(k as f64 * h, plan.mu, params, t, lambda);
        re.add(g.re);
        im.add(g.im);
    }
    // (re + i im) / i = im − i re
    (Complex::new(scale * im.value(), -scale * re.value()), 2 * plan.n + 1)
}

/// `Σ (1/α) s^{1−β} e^{st}` over every pole of the selected chart entries.
pub fn residues(
    params: &MLParams,
    chart: &SingularityChart,
    indices: &[usize],
    t: f64,
) -> Result<Complex, EvalError> {
    if indices.is_empty() {
        return Ok(Complex::new(0.0, 0.0));
    }
    if params.gamma != 1.0 {
        return Err(EvalError::ResidueWithGamma(params.gamma));
    }
    let mut re = XPAccumulator::new();
    let mut im = XPAccumulator::new();
    for &j in indices {
        for &s in &chart.entries[j].merged_poles {
            let r = cpow_principal(s, 1.0 - params.beta).expect("poles are nonzero") * (s * t).exp()
                / params.alpha;
            re.add(r.re);
            im.add(r.im);
        }
    }
    Ok(Complex::new(re.value(), im.value()))
}

/// Evaluation options beyond the tolerances.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LtOptions {
    /// Integrate in this region instead of the one with fewest nodes.
    pub force_region: Option<usize>,
}

/// The domain where `γ ≠ 1` is supported: `0 < α < 1` and `|Arg λ| > απ`.
pub fn check_prabhakar_domain(params: &MLParams, lambda: Complex) -> Result<(), EvalError> {
    if params.gamma == 1.0 {
        return Ok(());
    }
    if !(params.alpha < 1.0) {
        return Err(EvalError::Unsupported(format!(
            "gamma != 1 requires 0 < alpha < 1, got alpha = {}",
            params.alpha
        )));
    }
    let theta = arg_principal(lambda);
    if !(theta.abs() > params.alpha * PI) {
        return Err(EvalError::Unsupported(format!(
            "gamma != 1 requires |arg z| > alpha*pi, got |arg z| = {} <= {}",
            theta.abs(),
            params.alpha * PI
        )));
    }
    Ok(())
}

/// `e^γ_{α,β}(t; λ)` with default options.
pub fn ml_lt(params: &MLParams, t: f64, lambda: Complex, tol: &Tolerances) -> Result<EvalResult, EvalError> {
    ml_lt_with(params, t, lambda, tol, LtOptions::default())
}

pub fn ml_lt_with(
    params: &MLParams,
    t: f64,
    lambda: Complex,
    tol: &Tolerances,
    opts: LtOptions,
) -> Result<EvalResult, EvalError> {
    if !(t.is_finite() && t > 0.0) {
        return Err(EvalError::InvalidTime(t));
    }
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(EvalError::NonFiniteArgument);
    }
    let factor = t.powf(params.beta - 1.0);
    if lambda == Complex::new(0.0, 0.0) {
        let value = Complex::new(factor * rgamma_real(params.beta), 0.0);
        let plan = ContourPlan {
            region_index: 0,
            mu: 0.0,
            h: 0.0,
            n: 0,
            n_exact: 0.0,
            branch: crate::contour::Branch::Bounded,
            geometry: None,
            admissible: true,
            rejection: None,
            residue_indices: Vec::new(),
        };
        return Ok(EvalResult {
            value,
            plan,
            residue_sum: value,
            quadrature_sum: Complex::new(0.0, 0.0),
            n_integrand_evals: 0,
            scaled_tau: t,
        });
    }
    check_prabhakar_domain(params, lambda)?;

    // e(t; λ) = t^{β−1} e(1; t^α λ)
    let lam = lambda * t.powf(params.alpha);
    let chart = build_chart(params, lam).map_err(|_| EvalError::NonFiniteArgument)?;
    let plan = match opts.force_region {
        Some(j) if j >= chart.n_regions() => {
            return Err(EvalError::ForcedRegion {
                index: j,
                reason: format!("chart has {} regions", chart.n_regions()),
            })
        }
        Some(j) => {
            let plan = plan_region(&chart, j, 1.0, tol);
            if let Some(why) = plan.rejection {
                return Err(EvalError::ForcedRegion {
                    index: j,
                    reason: why.to_string(),
                });
            }
            plan
        }
        None => plan_all(&chart, 1.0, tol)?.selected_plan().clone(),
    };

    let res = residues(params, &chart, &plan.residue_indices, 1.0)?;
    let (quad, evals) = trapezoid(&plan, params, 1.0, lam);
    let residue_sum = res * factor;
    let quadrature_sum = quad * factor;
    let mut value = (res + quad) * factor;
    if lambda.im == 0.0 {
        value.im = 0.0;
    }
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(EvalError::Overflow);
    }
    Ok(EvalResult {
        value,
        plan,
        residue_sum,
        quadrature_sum,
        n_integrand_evals: evals,
        scaled_tau: t,
    })
}

//! Mittag-Leffler functions `E^γ_{α,β}(z)` by inverting their Laplace
//! transform on optimally placed parabolic contours.
//!
//! ```
//! use mlopc::{mittag_leffler, Complex};
//!
//! let e = mittag_leffler(1.0, 1.0, 1.0, Complex::new(1.0, 0.0), 1e-15).unwrap();
//! assert!((e.re - std::f64::consts::E).abs() < 1e-14);
//! ```

pub mod api;
pub mod contour;
pub mod inversion;
pub mod oracle;
pub mod scalar;
pub mod singularity;

pub use api::{evaluate, mittag_leffler, mixed_error};
pub use contour::{
    plan_all, plan_region, solve_bounded, solve_unbounded, BoundedRegionGeometry, Branch, ContourPlan,
    NoAdmissibleRegion, PlanSet, Rejection, Tolerances,
};
pub use inversion::{integrand, ml_lt, ml_lt_with, residues, trapezoid, EvalError, EvalResult, LtOptions};
pub use oracle::{ml_closed_form, ml_series, ml_series_big, OracleConfig, OracleError, SeriesValue};
pub use scalar::{cpow_principal, erfc_real, gamma_real, rgamma_real, Complex, ScalarError, XPAccumulator};
pub use singularity::{
    build_chart, phi, pole_index_set, poles, ChartError, MLParams, ParamError, Singularity, SingularityChart,
    SingularityKind, Strengths,
};

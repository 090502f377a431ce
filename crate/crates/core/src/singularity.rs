//! Singularities of the Laplace transform `s^{αγ−β} / (s^α − λ)^γ`.
//!
//! The branch point sits at the origin; poles solve `s^α = λ` on the main
//! Riemann sheet. Entries are ordered by `φ(s) = (Re s + |s|)/2`, the value of
//! `μ` for which the parabola `μ(iu+1)²` passes through `s`.

use std::f64::consts::PI;

use crate::scalar::{arg_principal, Complex};

/// Relative tolerance under which two `φ` values are treated as equal.
pub const PHI_MERGE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum ParamError {
    #[error("alpha must be positive and finite, got {0}")]
    Alpha(f64),
    #[error("beta must be finite, got {0}")]
    Beta(f64),
    #[error("gamma must be positive and finite, got {0}")]
    Gamma(f64),
}

/// Parameters `(α, β, γ)` of `E^γ_{α,β}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MLParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl MLParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self, ParamError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(ParamError::Alpha(alpha));
        }
        if !beta.is_finite() {
            return Err(ParamError::Beta(beta));
        }
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(ParamError::Gamma(gamma));
        }
        Ok(Self { alpha, beta, gamma })
    }

    /// Two-parameter function `E_{α,β}`.
    pub fn classical(alpha: f64, beta: f64) -> Result<Self, ParamError> {
        Self::new(alpha, beta, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityKind {
    BranchPoint,
    Pole,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Singularity {
    pub value: Complex,
    pub phi: f64,
    pub kind: SingularityKind,
    /// Every pole with this `φ`. For the origin entry these are poles lying
    /// on the negative real axis; they are never subtracted as residues.
    pub merged_poles: Vec<Complex>,
}

/// Algebraic strength exponents at the two ends of a region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strengths {
    pub p: f64,
    /// `None` for the unbounded last region.
    pub q: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularityChart {
    pub lambda: Complex,
    pub theta: f64,
    pub entries: Vec<Singularity>,
    /// One pair per region; region `j` lies between `entries[j]` and
    /// `entries[j + 1]`.
    pub strengths: Vec<Strengths>,
}

impl SingularityChart {
    pub fn n_regions(&self) -> usize {
        self.entries.len()
    }

    pub fn last_index(&self) -> usize {
        self.entries.len() - 1
    }

    pub fn phis(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.phi).collect()
    }

    pub fn pole_count(&self) -> usize {
        self.entries.iter().map(|e| e.merged_poles.len()).sum()
    }
}

/// Integers `j` with `−α/2 − θ/(2π) < j ≤ α/2 − θ/(2π)`.
pub fn pole_index_set(alpha: f64, theta: f64) -> Vec<i64> {
    let shift = theta / (2.0 * PI);
    let left = -alpha / 2.0 - shift;
    let right = alpha / 2.0 - shift;
    let lo = left.floor() as i64 + 1;
    let hi = right.floor() as i64;
    (lo..=hi).collect()
}

/// Solutions of `s^α = λ` on the main sheet.
pub fn poles(alpha: f64, lambda: Complex) -> Vec<Complex> {
    let theta = arg_principal(lambda);
    let r = lambda.norm().powf(1.0 / alpha);
    pole_index_set(alpha, theta)
        .into_iter()
        .map(|j| {
            let angle = (theta + 2.0 * PI * j as f64) / alpha;
            if angle.abs() == PI {
                Complex::new(-r, 0.0)
            } else {
                Complex::from_polar(r, angle)
            }
        })
        .collect()
}

pub fn phi(s: Complex) -> f64 {
    let v = 0.5 * (s.re + s.norm());
    v.max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum ChartError {
    #[error("lambda = 0 has no singularity chart")]
    ZeroLambda,
    #[error("lambda must be finite")]
    NonFiniteLambda,
}

/// Strength exponent `p` at the origin.
fn origin_strength(params: &MLParams) -> f64 {
    let pivot = params.alpha * params.gamma + 1.0;
    let tie = 1e-12 * pivot.abs().max(params.beta.abs()).max(1.0);
    if (params.beta - pivot).abs() <= tie {
        1.0
    } else if params.beta < pivot {
        0.0
    } else {
        2.0 * (params.beta - pivot)
    }
}

pub fn build_chart(params: &MLParams, lambda: Complex) -> Result<SingularityChart, ChartError> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(ChartError::NonFiniteLambda);
    }
    if lambda == Complex::new(0.0, 0.0) {
        return Err(ChartError::ZeroLambda);
    }
    let theta = arg_principal(lambda);
    let scale = lambda.norm().powf(1.0 / params.alpha);
    let tol = PHI_MERGE_TOL * scale;

    let mut entries = vec![Singularity {
        value: Complex::new(0.0, 0.0),
        phi: 0.0,
        kind: SingularityKind::BranchPoint,
        merged_poles: Vec::new(),
    }];

    let mut found: Vec<(f64, Complex)> = poles(params.alpha, lambda)
        .into_iter()
        .map(|s| (phi(s), s))
        .collect();
    found.sort_by(|a, b| a.0.total_cmp(&b.0));

    for (ph, s) in found {
        let last = entries.last_mut().expect("origin entry present");
        if ph - last.phi <= tol {
            last.merged_poles.push(s);
        } else {
            entries.push(Singularity {
                value: s,
                phi: ph,
                kind: SingularityKind::Pole,
                merged_poles: vec![s],
            });
        }
    }

    let n = entries.len();
    let strengths = (0..n)
        .map(|j| Strengths {
            p: if j == 0 { origin_strength(params) } else { params.gamma },
            q: (j + 1 < n).then_some(params.gamma),
        })
        .collect();

    Ok(SingularityChart {
        lambda,
        theta,
        entries,
        strengths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cpow_principal;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn index_sets() {
        assert!(pole_index_set(0.7, PI).is_empty());
        assert_eq!(pole_index_set(2.0, 0.0), vec![0, 1]);
        assert_eq!(pole_index_set(0.5, PI / 2.0), vec![0]);
    }

    #[test]
    fn pole_locations() {
        let p = poles(0.5, c(0.0, 1.0));
        assert_eq!(p, vec![c(-1.0, 0.0)]);
        let p = poles(2.0, c(1.0, 0.0));
        assert_eq!(p.len(), 2);
        assert!((p[0] - c(1.0, 0.0)).norm() < 1e-15);
        assert_eq!(p[1], c(-1.0, 0.0));
        assert!(poles(0.7, c(-1.0, 0.0)).is_empty());
    }

    #[test]
    fn phi_values() {
        assert_eq!(phi(c(1.0, 0.0)), 1.0);
        assert_eq!(phi(c(0.0, 1.0)), 0.5);
        assert_eq!(phi(c(-2.0, 0.0)), 0.0);
    }

    #[test]
    fn chart_with_on_cut_pole() {
        let params = MLParams::classical(0.5, 1.0).unwrap();
        let chart = build_chart(&params, c(0.0, 1.0)).unwrap();
        assert_eq!(chart.entries.len(), 1);
        assert_eq!(chart.entries[0].kind, SingularityKind::BranchPoint);
        assert_eq!(chart.entries[0].merged_poles, vec![c(-1.0, 0.0)]);
        assert_eq!(chart.strengths, vec![Strengths { p: 0.0, q: None }]);
    }

    #[test]
    fn chart_two_regions() {
        let params = MLParams::classical(2.0, 1.0).unwrap();
        let chart = build_chart(&params, c(1.0, 0.0)).unwrap();
        assert_eq!(chart.phis(), vec![0.0, 1.0]);
        assert_eq!(chart.entries[0].merged_poles, vec![c(-1.0, 0.0)]);
        assert_eq!(chart.strengths[0], Strengths { p: 0.0, q: Some(1.0) });
        assert_eq!(chart.strengths[1], Strengths { p: 1.0, q: None });
    }

    #[test]
    fn chart_without_poles() {
        let params = MLParams::classical(0.7, 1.0).unwrap();
        let chart = build_chart(&params, c(-1.0, 0.0)).unwrap();
        assert_eq!(chart.entries.len(), 1);
        assert!(chart.entries[0].merged_poles.is_empty());
    }

    #[test]
    fn origin_strengths() {
        let s = |a: f64, b: f64, g: f64| origin_strength(&MLParams::new(a, b, g).unwrap());
        assert_eq!(s(0.5, 1.0, 1.0), 0.0);
        assert_eq!(s(0.7, 1.7, 1.0), 1.0);
        assert!((s(0.5, 2.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((s(0.6, 2.0, 1.2) - 2.0 * (2.0 - 1.72)).abs() < 1e-14);
    }

    #[test]
    fn zero_lambda_rejected() {
        let params = MLParams::classical(0.5, 1.0).unwrap();
        assert_eq!(build_chart(&params, c(0.0, 0.0)), Err(ChartError::ZeroLambda));
    }

    #[test]
    fn conjugate_pair_shares_entry() {
        let params = MLParams::classical(3.0, 1.0).unwrap();
        let chart = build_chart(&params, c(2.0, 0.0)).unwrap();
        // s^3 = 2: one real root, one conjugate pair
        assert_eq!(chart.entries.len(), 3);
        let pair = &chart.entries[1].merged_poles;
        assert_eq!(pair.len(), 2);
        assert!((pair[0] - pair[1].conj()).norm() < 1e-15);
    }

    #[test]
    fn invalid_params() {
        assert!(MLParams::new(0.0, 1.0, 1.0).is_err());
        assert!(MLParams::new(1.0, f64::NAN, 1.0).is_err());
        assert!(MLParams::new(1.0, 1.0, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn poles_solve_the_equation(alpha in 0.05f64..6.0, r in 1e-3f64..1e3, theta in -PI..PI) {
            let lambda = Complex::from_polar(r, theta);
            let ps = poles(alpha, lambda);
            prop_assert_eq!(ps.len(), pole_index_set(alpha, arg_principal(lambda)).len());
            for s in ps {
                let back = cpow_principal(s, alpha).unwrap();
                prop_assert!((back - lambda).norm() <= 1e-12 * r, "{s} -> {back} vs {lambda}");
            }
        }

        #[test]
        fn chart_invariants(alpha in 0.05f64..6.0, r in 1e-3f64..1e3, theta in -PI..PI, beta in -2.0f64..3.0) {
            let params = MLParams::classical(alpha, beta).unwrap();
            let lambda = Complex::from_polar(r, theta);
            let chart = build_chart(&params, lambda).unwrap();
            prop_assert_eq!(chart.entries[0].phi, 0.0);
            for w in chart.entries.windows(2) {
                prop_assert!(w[0].phi < w[1].phi);
            }
            prop_assert_eq!(chart.pole_count(), poles(alpha, lambda).len());
            prop_assert_eq!(chart.strengths.len(), chart.entries.len());
            prop_assert!(chart.strengths.last().unwrap().q.is_none());
        }

        #[test]
        fn real_lambda_is_conjugate_closed(alpha in 0.05f64..6.0, r in 1e-3f64..1e3, negative in any::<bool>()) {
            let lambda = Complex::new(if negative { -r } else { r }, 0.0);
            let params = MLParams::classical(alpha, 1.0).unwrap();
            let chart = build_chart(&params, lambda).unwrap();
            for entry in &chart.entries {
                for s in &entry.merged_poles {
                    let partner = entry.merged_poles.iter().any(|t| (*t - s.conj()).norm() <= 1e-12 * r.max(1.0));
                    prop_assert!(partner, "no conjugate for {s}");
                }
            }
        }
    }
}

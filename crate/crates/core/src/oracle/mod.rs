//! Reference values by direct series summation in big-float arithmetic.
//!
//! `E^γ_{α,β}(z) = Σ_k Γ(γ+k) z^k / (k! Γ(γ) Γ(αk+β))`.
//!
//! The parameters are read as the exact decimals they print as, so `α = 0.7`
//! is `7/10`. With `α = a/b` the reciprocal gammas of each residue class
//! `k mod b` follow `1/Γ(x+a) = 1/(Γ(x)·x(x+1)…(x+a−1))`. The working
//! precision is sized from an `f64` estimate of the largest term, so the
//! cancellation in the alternating regime is covered. Nothing here touches
//! the contour code.

pub mod bigfloat;

use num_bigint::BigInt;
use num_traits::One;

use crate::scalar::{erfc_real, rgamma_real, Complex};
use crate::singularity::MLParams;
use bigfloat::{rgamma_rational, BigFloat, Rational};

/// Residue classes above this count use a direct gamma evaluation per term.
const MAX_CLASSES: u64 = 64;
/// Consecutive small terms required before the sum is accepted.
const LOOKAHEAD: usize = 10;
/// Largest working precision the oracle will attempt.
pub const MAX_PRECISION_BITS: u64 = 400_000;
/// Desk-scale guard on `|z|`.
pub const MAX_ABS_Z: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub working_digits: u32,
    pub max_terms: usize,
    pub stop_ratio: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self::with_digits(100)
    }
}

impl OracleConfig {
    pub fn with_digits(working_digits: u32) -> Self {
        Self {
            working_digits,
            max_terms: 10_000,
            stop_ratio: 10f64.powi(-(working_digits as i32)),
        }
    }

    pub fn max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }

    fn validate(&self) -> Result<(), OracleError> {
        if self.working_digits < 30 {
            return Err(OracleError::InvalidConfig("working_digits must be at least 30"));
        }
        if self.max_terms < 100 {
            return Err(OracleError::InvalidConfig("max_terms must be at least 100"));
        }
        if !(self.stop_ratio > 0.0 && self.stop_ratio < 1.0) {
            return Err(OracleError::InvalidConfig("stop_ratio must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("invalid oracle configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("series oracle needs alpha > 0 and gamma > 0")]
    InvalidParameters,
    #[error("|z| = {0} exceeds the series oracle guard of 1e3")]
    ArgumentTooLarge(f64),
    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },
    #[error("series needs about {bits} bits of precision, above the oracle budget")]
    PrecisionBudget { bits: u64 },
}

/// The summed series before rounding to `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesValue {
    pub re: BigFloat,
    pub im: BigFloat,
    pub terms: usize,
    pub precision_bits: u64,
}

impl SeriesValue {
    pub fn to_complex(&self) -> Complex {
        Complex::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// `E^γ_{α,β}(z)` rounded to `f64`.
pub fn ml_series(params: &MLParams, z: Complex, cfg: &OracleConfig) -> Result<Complex, OracleError> {
    ml_series_big(params, z, cfg).map(|v| v.to_complex())
}

/// `E^γ_{α,β}(z)` at full working precision.
pub fn ml_series_big(
    params: &MLParams,
    z: Complex,
    cfg: &OracleConfig,
) -> Result<SeriesValue, OracleError> {
    cfg.validate()?;
    if !(params.alpha > 0.0 && params.gamma > 0.0) {
        return Err(OracleError::InvalidParameters);
    }
    let abs_z = z.norm();
    if !(abs_z <= MAX_ABS_Z) {
        return Err(OracleError::ArgumentTooLarge(abs_z));
    }
    let series = Series::new(params);
    if z == Complex::new(0.0, 0.0) {
        let prec = (cfg.working_digits as f64 * std::f64::consts::LOG2_10).ceil() as u64 + 64;
        return Ok(SeriesValue {
            re: rgamma_rational(&series.beta, prec),
            im: BigFloat::zero(),
            terms: 1,
            precision_bits: prec,
        });
    }
    let digit_bits = cfg.working_digits as f64 * std::f64::consts::LOG2_10;

    let peak_bits = estimate_peak_log(params, abs_z, cfg).max(0.0) / std::f64::consts::LN_2;
    let mut prec = (digit_bits + 64.0 + peak_bits).ceil() as u64 + 64;
    loop {
        if prec > MAX_PRECISION_BITS {
            return Err(OracleError::PrecisionBudget { bits: prec });
        }
        let (value, largest_term) = series.sum(z, cfg, prec)?;
        // Bits lost to cancellation must stay inside the guard band.
        let result_log2 = complex_log2(&value.re, &value.im);
        let lost = largest_term - result_log2;
        if !lost.is_finite() || lost <= prec as f64 - digit_bits - 32.0 {
            return Ok(value);
        }
        prec = (digit_bits + lost + 96.0).ceil() as u64;
    }
}

struct Series {
    alpha: Rational,
    beta: Rational,
    gamma: Rational,
    a: i64,
    b: u64,
}

impl Series {
    fn new(params: &MLParams) -> Self {
        let alpha = Rational::from_f64_decimal(params.alpha);
        let beta = Rational::from_f64_decimal(params.beta);
        let gamma = Rational::from_f64_decimal(params.gamma);
        let a = num_traits::ToPrimitive::to_i64(&alpha.num).unwrap_or(i64::MAX);
        let b = num_traits::ToPrimitive::to_u64(&alpha.den).unwrap_or(u64::MAX);
        Self {
            alpha,
            beta,
            gamma,
            a,
            b,
        }
    }

    fn x(&self, k: usize) -> Rational {
        Rational::new(
            &self.alpha.num * BigInt::from(k) * &self.beta.den + &self.beta.num * &self.alpha.den,
            &self.alpha.den * &self.beta.den,
        )
    }

    /// Returns the sum and `log2` of the largest term modulus.
    fn sum(&self, z: Complex, cfg: &OracleConfig, prec: u64) -> Result<(SeriesValue, f64), OracleError> {
        let zr = BigFloat::from_f64(z.re);
        let zi = BigFloat::from_f64(z.im);
        let use_classes = self.b <= MAX_CLASSES && self.a <= 4096;
        let mut class_rg: Vec<Option<BigFloat>> = vec![None; if use_classes { self.b as usize } else { 0 }];

        let mut pr = BigFloat::one();
        let mut pi = BigFloat::zero();
        let mut coef = BigFloat::one();
        let mut sr = BigFloat::zero();
        let mut si = BigFloat::zero();
        let threshold = cfg.stop_ratio.log2();
        let mut largest = f64::NEG_INFINITY;
        let mut quiet = 0usize;

        for k in 0..cfg.max_terms {
            let rg = if use_classes {
                let slot = k % self.b as usize;
                let next = match &class_rg[slot] {
                    Some(prev) if !prev.is_zero() => {
                        // x_{k} = x_{k-b} + a
                        let base = self.x(k - self.b as usize);
                        let mut num = BigInt::one();
                        for i in 0..self.a {
                            num *= &base.num + BigInt::from(i) * &base.den;
                        }
                        let den = num_traits::pow(base.den.clone(), self.a as usize);
                        prev.mul_ratio(&den, &num, prec)
                    }
                    _ => rgamma_rational(&self.x(k), prec),
                };
                class_rg[slot] = Some(next.clone());
                next
            } else {
                rgamma_rational(&self.x(k), prec)
            };

            let w = coef.mul(&rg, prec);
            let tr = pr.mul(&w, prec);
            let ti = pi.mul(&w, prec);
            sr = sr.add(&tr, prec);
            si = si.add(&ti, prec);

            let term_log2 = complex_log2(&tr, &ti);
            largest = largest.max(term_log2);
            let sum_log2 = complex_log2(&sr, &si);
            if term_log2 == f64::NEG_INFINITY {
                // terms at poles of Γ neither count toward nor reset the run
            } else if term_log2 < sum_log2 + threshold {
                quiet += 1;
                if quiet >= LOOKAHEAD {
                    let value = SeriesValue {
                        re: sr,
                        im: si,
                        terms: k + 1,
                        precision_bits: prec,
                    };
                    return Ok((value, largest));
                }
            } else {
                quiet = 0;
            }

            // z^{k+1} and Γ(γ+k+1)/((k+1)! Γ(γ))
            let nr = pr.mul(&zr, prec).sub(&pi.mul(&zi, prec), prec);
            let ni = pr.mul(&zi, prec).add(&pi.mul(&zr, prec), prec);
            pr = nr;
            pi = ni;
            let g = self.gamma.add_int(k as i64);
            coef = coef.mul_ratio(&g.num, &(&g.den * BigInt::from(k + 1)), prec);
        }
        Err(OracleError::NonConvergence {
            terms: cfg.max_terms,
        })
    }
}

/// `log2 |re + i im|`.
fn complex_log2(re: &BigFloat, im: &BigFloat) -> f64 {
    let a = re.log2_abs();
    let b = im.log2_abs();
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + 0.5 * ((2.0 * (a - m)).exp2() + (2.0 * (b - m)).exp2()).log2()
}

/// `ln |Γ(x)|` to a few digits, `+inf` at the poles.
fn ln_abs_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::INFINITY;
    }
    if x < 0.5 {
        let s = (std::f64::consts::PI * x).sin().abs();
        return std::f64::consts::PI.ln() - s.ln() - ln_abs_gamma(1.0 - x);
    }
    let mut shift = 0.0;
    let mut y = x;
    while y < 15.0 {
        shift += y.ln();
        y += 1.0;
    }
    let stirling = (y - 0.5) * y.ln() - y + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * y)
        - 1.0 / (360.0 * y * y * y)
        + 1.0 / (1260.0 * y.powi(5));
    stirling - shift
}

/// Natural log of the largest term modulus, from host-precision estimates.
fn estimate_peak_log(params: &MLParams, abs_z: f64, cfg: &OracleConfig) -> f64 {
    let ln_z = abs_z.ln();
    let lg_gamma = ln_abs_gamma(params.gamma);
    let cutoff = cfg.working_digits as f64 * std::f64::consts::LN_10 + 50.0;
    let mut peak = f64::NEG_INFINITY;
    let mut previous = f64::INFINITY;
    for k in 0..cfg.max_terms {
        let kf = k as f64;
        let coef = ln_abs_gamma(params.gamma + kf) - lg_gamma - ln_abs_gamma(kf + 1.0);
        let power = if k == 0 { 0.0 } else { kf * ln_z };
        let term = coef + power - ln_abs_gamma(params.alpha * kf + params.beta);
        if term.is_finite() {
            peak = peak.max(term);
        }
        if k >= 10 && term < peak - cutoff && term < previous {
            break;
        }
        if term.is_finite() {
            previous = term;
        }
    }
    if peak.is_finite() {
        peak
    } else {
        0.0
    }
}

/// Closed forms of `E^γ_{α,β}` at host precision, where one is known.
pub fn ml_closed_form(params: &MLParams, z: Complex) -> Option<Complex> {
    let MLParams { alpha, beta, gamma } = *params;
    if z == Complex::new(0.0, 0.0) {
        return Some(Complex::new(rgamma_real(beta), 0.0));
    }
    match (alpha, beta, gamma) {
        (a, b, g) if a == 1.0 && b == 1.0 && g == 1.0 => Some(z.exp()),
        (a, b, g) if a == 2.0 && b == 1.0 && g == 1.0 => Some(z.sqrt().cosh()),
        (a, b, g) if a == 0.5 && b == 1.0 && g == 1.0 && z.im == 0.0 => {
            let x = z.re;
            Some(Complex::new((x * x).exp() * erfc_real(-x), 0.0))
        }
        (a, b, g) if a == 1.0 && b == 1.0 && g == 2.0 => Some((Complex::new(1.0, 0.0) + z) * z.exp()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn p(a: f64, b: f64, g: f64) -> MLParams {
        MLParams::new(a, b, g).unwrap()
    }

    fn rel(a: Complex, b: Complex) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn exponential() {
        let v = ml_series(&p(1.0, 1.0, 1.0), c(1.0, 0.0), &OracleConfig::default()).unwrap();
        assert_eq!(v, c(std::f64::consts::E, 0.0));
    }

    #[test]
    fn cosine() {
        let v = ml_series(&p(2.0, 1.0, 1.0), c(-1.0, 0.0), &OracleConfig::default()).unwrap();
        assert!((v.re - 1f64.cos()).abs() <= 1e-16);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn prabhakar_gamma_two() {
        let v = ml_series(&p(1.0, 1.0, 2.0), c(1.0, 0.0), &OracleConfig::default()).unwrap();
        assert!((v.re - 2.0 * std::f64::consts::E).abs() <= 1e-15);
    }

    #[test]
    fn zero_argument() {
        let v = ml_series(&p(0.3, 2.0, 1.7), c(0.0, 0.0), &OracleConfig::default()).unwrap();
        assert_eq!(v, c(1.0, 0.0));
    }

    #[test]
    fn pole_terms_vanish() {
        // β = 0: the k = 0 term is 1/Γ(0) = 0, so E_{1,0}(z) = z e^z
        let v = ml_series(&p(1.0, 0.0, 1.0), c(0.5, 0.0), &OracleConfig::default()).unwrap();
        assert!((v.re - 0.5 * 0.5f64.exp()).abs() < 1e-16);
    }

    #[test]
    fn closed_forms() {
        let e1 = ml_closed_form(&p(1.0, 1.0, 1.0), c(-1.0, 0.0)).unwrap();
        assert!((e1.re - 0.367_879_441_171_442_33).abs() < 1e-17);
        assert_eq!(ml_closed_form(&p(0.7, 2.0, 1.3), c(0.0, 0.0)), Some(c(1.0, 0.0)));
        let erfc = ml_closed_form(&p(0.5, 1.0, 1.0), c(1.0, 0.0)).unwrap();
        assert!((erfc.re - std::f64::consts::E * erfc_real(-1.0)).abs() < 1e-15);
        assert!(ml_closed_form(&p(0.5, 1.0, 1.0), c(1.0, 1.0)).is_none());
        assert!(ml_closed_form(&p(0.7, 1.0, 1.0), c(1.0, 0.0)).is_none());
    }

    #[test]
    fn config_validation() {
        let cfg = OracleConfig::with_digits(20);
        assert!(matches!(
            ml_series(&p(1.0, 1.0, 1.0), c(1.0, 0.0), &cfg),
            Err(OracleError::InvalidConfig(_))
        ));
        let err = ml_series(&p(1.0, 1.0, 1.0), c(2e3, 0.0), &OracleConfig::default());
        assert_eq!(err, Err(OracleError::ArgumentTooLarge(2e3)));
    }

    #[test]
    fn non_convergence_reported() {
        let cfg = OracleConfig::default().max_terms(100);
        let err = ml_series(&p(1.0, 1.0, 1.0), c(500.0, 0.0), &cfg);
        assert_eq!(err, Err(OracleError::NonConvergence { terms: 100 }));
    }

    #[test]
    fn exp_at_full_precision() {
        // E_{1,1}(x) = e^x checked against the big-float exponential.
        let cfg = OracleConfig::default();
        for x in [-4.75, -0.5, 0.125, 3.0] {
            let v = ml_series_big(&p(1.0, 1.0, 1.0), c(x, 0.0), &cfg).unwrap();
            let prec = v.precision_bits;
            let want = bigfloat::exp(&BigFloat::from_f64(x), prec);
            let diff = v.re.sub(&want, prec);
            assert!(diff.is_zero() || diff.log2_abs() - want.log2_abs() < -95.0 * std::f64::consts::LOG2_10);
            assert!(v.im.is_zero());
        }
    }

    #[test]
    fn agrees_with_closed_forms() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        let cfg = OracleConfig::with_digits(40);
        let cases = [p(1.0, 1.0, 1.0), p(2.0, 1.0, 1.0), p(1.0, 1.0, 2.0), p(0.5, 1.0, 1.0)];
        for params in cases {
            for _ in 0..50 {
                let r = 5.0 * rng.gen::<f64>();
                let z = if params.alpha == 0.5 {
                    c(rng.gen_range(-5.0..5.0), 0.0)
                } else {
                    Complex::from_polar(r, rng.gen_range(-3.0..3.0))
                };
                let series = ml_series(&params, z, &cfg).unwrap();
                let closed = ml_closed_form(&params, z).unwrap();
                assert!(
                    (series - closed).norm() <= 1e-13 * (1.0 + closed.norm()),
                    "{params:?} z={z}: {series} vs {closed}"
                );
            }
        }
    }

    #[test]
    fn index_shift_recurrence() {
        // E_{α,β}(z) = z E_{α,α+β}(z) + 1/Γ(β)
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let cfg = OracleConfig::with_digits(40);
        let prec = 300;
        for (alpha, beta) in [(0.7, 1.0), (0.5, 0.3), (1.5, 0.25), (0.6, 0.9)] {
            let shifted = alpha + beta;
            assert_eq!(
                Rational::from_f64_decimal(shifted),
                Rational::from_f64_decimal(alpha).add(&Rational::from_f64_decimal(beta))
            );
            for _ in 0..5 {
                let z = Complex::from_polar(5.0 * rng.gen::<f64>(), rng.gen_range(-3.0..3.0));
                let lhs = ml_series_big(&p(alpha, beta, 1.0), z, &cfg).unwrap();
                let rhs = ml_series_big(&p(alpha, shifted, 1.0), z, &cfg).unwrap();
                let zr = BigFloat::from_f64(z.re);
                let zi = BigFloat::from_f64(z.im);
                let rg = rgamma_rational(&Rational::from_f64_decimal(beta), prec);
                let re = zr.mul(&rhs.re, prec).sub(&zi.mul(&rhs.im, prec), prec).add(&rg, prec);
                let im = zr.mul(&rhs.im, prec).add(&zi.mul(&rhs.re, prec), prec);
                let dr = re.sub(&lhs.re, prec);
                let di = im.sub(&lhs.im, prec);
                let err = complex_log2(&dr, &di) - complex_log2(&lhs.re, &lhs.im);
                assert!(err < -25.0 * std::f64::consts::LOG2_10, "alpha={alpha} beta={beta} z={z}: {err}");
            }
        }
    }

    #[test]
    fn conjugation_is_exact() {
        let cfg = OracleConfig::with_digits(50);
        for params in [p(0.7, 1.0, 1.0), p(0.6, 0.9, 1.2)] {
            let z = c(-3.25, 1.75);
            let a = ml_series_big(&params, z, &cfg).unwrap();
            let b = ml_series_big(&params, z.conj(), &cfg).unwrap();
            assert_eq!(a.re, b.re);
            assert_eq!(a.im, b.im.neg());
        }
    }

    #[test]
    fn large_cancellation() {
        // E_{1,1}(−100) = e^{−100}: terms reach 1e42 against a 4e-44 result.
        let v = ml_series(&p(1.0, 1.0, 1.0), c(-100.0, 0.0), &OracleConfig::default().max_terms(1000)).unwrap();
        assert!(rel(v, c((-100f64).exp(), 0.0)) < 1e-15);
    }

    #[test]
    fn ln_gamma_estimate() {
        assert!((ln_abs_gamma(10.0) - 362_880f64.ln()).abs() < 1e-9);
        assert!((ln_abs_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-9);
        assert!((ln_abs_gamma(-0.5) - (2.0 * std::f64::consts::PI.sqrt()).ln()).abs() < 1e-9);
        assert_eq!(ln_abs_gamma(-3.0), f64::INFINITY);
    }
}

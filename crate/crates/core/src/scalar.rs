//! Real and complex scalar kernels shared by the rest of the crate.
//!
//! Everything here works in plain `f64`. The branch convention for complex
//! powers is fixed once: `Arg s ∈ (−π, π]`, i.e. the cut runs along the
//! negative real axis and points on the cut take the argument `+π`.

use std::f64::consts::PI;
use std::ops::AddAssign;

use thiserror::Error;

/// Complex number used throughout the crate.
pub type Complex = num_complex::Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalarError {
    #[error("gamma function has a pole at {0}")]
    Pole(f64),
    #[error("argument {0} is not finite")]
    NotFinite(f64),
    #[error("complex power 0^{0} is undefined")]
    ZeroPower(f64),
}

// Lanczos approximation, g = 7, n = 9, with the partial-fraction sum folded
// into P(z)/Q(z), Q(z) = (z+1)(z+2)...(z+8). Both have positive coefficients
// so there is no cancellation for z >= 0. Lowest degree first.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_NUM: [f64; 9] = [
    10_619_610.099_075_992,
    11_246_929.484_659_921,
    5_210_869.017_760_827,
    1_379_496.265_878_669,
    228_235.215_499_714_08,
    24_165.510_665_029_473,
    1_599.042_534_722_041_4,
    60.458_333_333_341_905,
    0.999_999_999_999_809_9,
];
const LANCZOS_DEN: [f64; 9] = [40320.0, 109584.0, 118124.0, 67284.0, 22449.0, 4536.0, 546.0, 36.0, 1.0];

/// Largest argument for which Γ(x) is finite in `f64`.
const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

fn lanczos(x: f64) -> f64 {
    // Valid for x >= 0.5; only called on [1, 2).
    let xm1 = x - 1.0;
    let horner = |c: &[f64]| c.iter().rev().fold(0.0, |acc, &k| acc * xm1 + k);
    let acc = horner(&LANCZOS_NUM) / horner(&LANCZOS_DEN);
    let shift = LANCZOS_G + 0.5;
    let w = xm1 + shift;
    // rounding error of w, exact since shift > xm1
    let dw = xm1 - (w - shift);
    let a = xm1 + 0.5;
    let correction = 1.0 + dw * (a / w - 1.0);
    (2.0 * PI).sqrt() * w.powf(a) * (-w).exp() * acc * correction
}

/// `sin(πx)` with exact argument reduction, so it vanishes exactly at the
/// integers.
pub(crate) fn sinpi(x: f64) -> f64 {
    let r = x - 2.0 * (x / 2.0).round();
    // r in [-1, 1]; fold onto [-1/2, 1/2] using sin(πr) = sin(π(±1 − r))
    let r = if r > 0.5 {
        1.0 - r
    } else if r < -0.5 {
        -1.0 - r
    } else {
        r
    };
    if r == 0.0 {
        return 0.0;
    }
    (PI * r).sin()
}

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// Euler's gamma function on the real line.
///
/// The core interval `[1, 2)` uses a Lanczos approximation; larger arguments
/// are reached with the product form of the recurrence `Γ(x+1) = xΓ(x)`, and
/// arguments below `1/2` go through the reflection formula. Returns
/// `+∞` past the overflow threshold.
pub fn gamma_real(x: f64) -> Result<f64, ScalarError> {
    if !x.is_finite() {
        return Err(ScalarError::NotFinite(x));
    }
    if is_nonpositive_integer(x) {
        return Err(ScalarError::Pole(x));
    }
    Ok(gamma_unchecked(x))
}

/// Γ(1 − x) for x < 1/2. For x < −1/2 the form (−x)Γ(−x) avoids rounding
/// the shifted argument.
fn gamma_one_minus(x: f64) -> f64 {
    if x < -0.5 {
        -x * gamma_unchecked(-x)
    } else {
        gamma_unchecked(1.0 - x)
    }
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        let s = sinpi(x);
        let g = gamma_one_minus(x);
        if g.is_infinite() {
            return 0.0_f64.copysign(s);
        }
        return PI / (s * g);
    }
    if x < 1.0 {
        return gamma_unchecked(x + 1.0) / x;
    }
    if x >= GAMMA_MAX_ARG {
        return f64::INFINITY;
    }
    let n = x.floor() - 1.0;
    let base = x - n; // in [1, 2), exact
    let mut acc = if base == 1.0 { 1.0 } else { lanczos(base) };
    let mut k = 0.0;
    while k < n {
        acc *= base + k;
        k += 1.0;
    }
    acc
}

/// Reciprocal gamma function `1/Γ(x)`, an entire function; exactly zero at
/// the non-positive integers.
pub fn rgamma_real(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x < 0.5 {
        // 1/Γ(x) = sin(πx) Γ(1−x) / π keeps the large-|x| side finite longer.
        return sinpi(x) * gamma_one_minus(x) / PI;
    }
    if x >= GAMMA_MAX_ARG {
        return 0.0;
    }
    1.0 / gamma_unchecked(x)
}

/// Principal argument in `(−π, π]`; the negative real axis, including
/// `−0.0` imaginary parts, maps to `+π`.
pub fn arg_principal(s: Complex) -> f64 {
    if s.im == 0.0 {
        if s.re < 0.0 {
            PI
        } else {
            0.0
        }
    } else {
        s.im.atan2(s.re)
    }
}

/// Principal branch power `s^a = exp(a (ln|s| + i Arg s))`.
pub fn cpow_principal(s: Complex, a: f64) -> Result<Complex, ScalarError> {
    if s.re == 0.0 && s.im == 0.0 {
        if a > 0.0 {
            return Ok(Complex::new(0.0, 0.0));
        }
        return Err(ScalarError::ZeroPower(a));
    }
    if a == 0.0 {
        return Ok(Complex::new(1.0, 0.0));
    }
    let modulus = s.norm().powf(a);
    let phase = a * arg_principal(s);
    let (sin, cos) = phase.sin_cos();
    Ok(Complex::new(modulus * cos, modulus * sin))
}

/// Complementary error function, relative accuracy about `1e-15`.
pub fn erfc_real(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.abs() < 0.5 {
        return 1.0 - erf_taylor(x);
    }
    if x < 0.0 {
        return 2.0 - erfc_continued_fraction(-x);
    }
    erfc_continued_fraction(x)
}

fn erf_taylor(x: f64) -> f64 {
    // erf(x) = 2/√π Σ (−1)^n x^{2n+1} / (n! (2n+1))
    let x2 = x * x;
    let mut power = x; // (−1)^n x^{2n+1} / n!
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        power *= -x2 / n;
        let term = power / (2.0 * n + 1.0);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum * 2.0 / PI.sqrt()
}

fn erfc_continued_fraction(x: f64) -> f64 {
    // erfc(x) = e^{−x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + …)))), x > 0.
    // Modified Lentz evaluation.
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for n in 1..200_000 {
        let a = n as f64 / 2.0;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        d = 1.0 / d;
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / PI.sqrt() / f
}

/// Compensated running sum held as an unevaluated pair `hi + lo`.
///
/// Each addition is an exact two-sum followed by renormalization, so `lo`
/// stays below half an ulp of `hi`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct XPAccumulator {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl XPAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.hi, x);
        let lo = self.lo + e;
        let (hi, lo) = fast_two_sum(s, lo);
        self.hi = hi;
        self.lo = lo;
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    /// Sum rounded to `f64`.
    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

impl AddAssign<f64> for XPAccumulator {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl Extend<f64> for XPAccumulator {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for XPAccumulator {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        acc.extend(iter);
        acc
    }
}

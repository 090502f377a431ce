//! Minimal binary floating point on top of `num-bigint`.
//!
//! A value is `mant · 2^exp`. Every operation takes the target precision in
//! bits and truncates the magnitude toward zero, so negation commutes with
//! rounding and conjugate inputs give exactly conjugate outputs.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigFloat {
    mant: BigInt,
    exp: i64,
}

fn truncate_shr(m: &BigInt, shift: u64) -> BigInt {
    let sign = m.sign();
    let mag = m.magnitude() >> shift;
    BigInt::from_biguint(sign, mag)
}

/// `x · 2^e` without intermediate overflow or underflow.
pub(crate) fn ldexp_f64(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

impl BigFloat {
    pub fn zero() -> Self {
        Self {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        Self::from_int(BigInt::one())
    }

    pub fn from_int(i: BigInt) -> Self {
        Self { mant: i, exp: 0 }
    }

    pub fn from_i64(i: i64) -> Self {
        Self::from_int(BigInt::from(i))
    }

    /// Exact conversion of a finite `f64`.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "BigFloat::from_f64 on non-finite input");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        Self {
            mant: BigInt::from(m) * sign,
            exp: e,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn round(mut self, prec: u64) -> Self {
        let bits = self.mant.bits();
        if bits > prec {
            let shift = bits - prec;
            self.mant = truncate_shr(&self.mant, shift);
            self.exp += shift as i64;
        }
        if self.mant.is_zero() {
            self.exp = 0;
        }
        self
    }

    pub fn neg(&self) -> Self {
        Self {
            mant: -&self.mant,
            exp: self.exp,
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    /// Multiply by `2^k`, exact.
    pub fn ldexp(&self, k: i64) -> Self {
        Self {
            mant: self.mant.clone(),
            exp: self.exp + k,
        }
    }

    /// Position of the leading bit, i.e. `floor(log2 |x|) + 1`.
    fn top(&self) -> i64 {
        self.mant.bits() as i64 + self.exp
    }

    pub fn add(&self, other: &Self, prec: u64) -> Self {
        if self.is_zero() {
            return other.clone().round(prec);
        }
        if other.is_zero() {
            return self.clone().round(prec);
        }
        // An addend entirely below the precision window only affects the
        // truncated tail.
        let gap = prec as i64 + 4;
        if self.top() - other.top() > gap && other.top() < self.exp {
            return self.clone().round(prec);
        }
        if other.top() - self.top() > gap && self.top() < other.exp {
            return other.clone().round(prec);
        }
        let (mant, exp) = match self.exp.cmp(&other.exp) {
            Ordering::Equal => (&self.mant + &other.mant, self.exp),
            Ordering::Greater => (
                (&self.mant << (self.exp - other.exp) as u64) + &other.mant,
                other.exp,
            ),
            Ordering::Less => (
                &self.mant + (&other.mant << (other.exp - self.exp) as u64),
                self.exp,
            ),
        };
        Self { mant, exp }.round(prec)
    }

    pub fn sub(&self, other: &Self, prec: u64) -> Self {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Self, prec: u64) -> Self {
        Self {
            mant: &self.mant * &other.mant,
            exp: self.exp + other.exp,
        }
        .round(prec)
    }

    pub fn div(&self, other: &Self, prec: u64) -> Self {
        assert!(!other.is_zero(), "BigFloat division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let want = prec as i64 + 2;
        let shift = (want + other.mant.bits() as i64 - self.mant.bits() as i64).max(0) as u64;
        let num = &self.mant << shift;
        Self {
            mant: num / &other.mant,
            exp: self.exp - other.exp - shift as i64,
        }
        .round(prec)
    }

    pub fn mul_int(&self, k: &BigInt, prec: u64) -> Self {
        Self {
            mant: &self.mant * k,
            exp: self.exp,
        }
        .round(prec)
    }

    pub fn div_int(&self, k: &BigInt, prec: u64) -> Self {
        self.div(&Self::from_int(k.clone()), prec)
    }

    /// Multiply by the rational `num/den`.
    pub fn mul_ratio(&self, num: &BigInt, den: &BigInt, prec: u64) -> Self {
        self.mul_int(num, prec + 8).div_int(den, prec)
    }

    /// Conversion to the nearest `f64` (up to a final double rounding).
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits();
        let (m, e) = if bits > 64 {
            let shift = bits - 64;
            (truncate_shr(&self.mant, shift), self.exp + shift as i64)
        } else {
            (self.mant.clone(), self.exp)
        };
        let mf = m.to_f64().expect("64-bit mantissa converts");
        ldexp_f64(mf, e)
    }

    /// `log2 |x|`, `-inf` for zero. Accurate to about 1e-15 absolute.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let bits = self.mant.bits();
        let shift = bits.saturating_sub(60);
        let top = truncate_shr(&self.mant, shift).abs().to_f64().unwrap();
        top.log2() + (self.exp + shift as i64) as f64
    }

    pub fn cmp_abs(&self, other: &Self) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        let e = self.exp.min(other.exp);
        let a = self.mant.magnitude() << (self.exp - e) as u64;
        let b = other.mant.magnitude() << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

/// Exact rational `num/den` with `den > 0`, reduced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rational {
    pub num: BigInt,
    pub den: BigInt,
}

impl Rational {
    pub fn new(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        let g = num.gcd(&den);
        if g.is_zero() || g.is_one() {
            return Self { num, den };
        }
        Self {
            num: num / &g,
            den: den / &g,
        }
    }

    pub fn from_int(i: i64) -> Self {
        Self::new(BigInt::from(i), BigInt::one())
    }

    /// The decimal number printed by `f64`'s shortest round-trip formatting,
    /// taken as an exact rational. `0.7` becomes `7/10`, not the binary
    /// neighbour of 0.7.
    pub fn from_f64_decimal(x: f64) -> Self {
        assert!(x.is_finite(), "rational from non-finite value");
        let text = format!("{x}");
        let (negative, digits) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.as_str()),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        let all: String = format!("{int_part}{frac_part}");
        let mut num: BigInt = all.parse().expect("decimal digits");
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        Self::new(num, den)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            &self.num * &other.den + &other.num * &self.den,
            &self.den * &other.den,
        )
    }

    pub fn add_int(&self, k: i64) -> Self {
        Self::new(&self.num + BigInt::from(k) * &self.den, self.den.clone())
    }

    pub fn mul_int(&self, k: i64) -> Self {
        Self::new(&self.num * BigInt::from(k), self.den.clone())
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    /// Largest integer `<= self`.
    pub fn floor(&self) -> BigInt {
        self.num.div_floor(&self.den)
    }

    pub fn to_f64(&self) -> f64 {
        BigFloat::from_int(self.num.clone())
            .div_int(&self.den, 64)
            .to_f64()
    }

    pub fn to_bigfloat(&self, prec: u64) -> BigFloat {
        BigFloat::from_int(self.num.clone()).div_int(&self.den, prec)
    }
}

/// `ln 2` via `2·atanh(1/3)`.
pub fn ln2(prec: u64) -> BigFloat {
    let wp = prec + 32;
    let third = BigFloat::one().div_int(&BigInt::from(3), wp);
    atanh_series(&third, wp).ldexp(1).round(prec)
}

/// `Σ x^{2k+1}/(2k+1)` for small `|x|`.
fn atanh_series(x: &BigFloat, prec: u64) -> BigFloat {
    let x2 = x.mul(x, prec);
    let mut power = x.clone();
    let mut sum = x.clone();
    let mut k: i64 = 0;
    loop {
        k += 1;
        power = power.mul(&x2, prec);
        let term = power.div_int(&BigInt::from(2 * k + 1), prec);
        if term.is_zero() || term.log2_abs() < sum.log2_abs() - prec as f64 - 4.0 {
            break;
        }
        sum = sum.add(&term, prec);
    }
    sum
}

/// Natural logarithm of a positive value.
pub fn ln(x: &BigFloat, prec: u64) -> BigFloat {
    assert!(!x.is_zero() && !x.is_negative(), "ln of non-positive value");
    let wp = prec + 32 + 64;
    // x = m · 2^e with m in [1/√2, √2)
    let e = x.log2_abs().round() as i64;
    let m = x.ldexp(-e);
    let one = BigFloat::one();
    let z = m.sub(&one, wp).div(&m.add(&one, wp), wp);
    let ln_m = atanh_series(&z, wp).ldexp(1);
    let ln_2 = ln2(wp);
    ln_2.mul_int(&BigInt::from(e), wp).add(&ln_m, prec)
}

/// Exponential function.
pub fn exp(y: &BigFloat, prec: u64) -> BigFloat {
    if y.is_zero() {
        return BigFloat::one();
    }
    let yf = y.to_f64();
    let k = (yf / std::f64::consts::LN_2).round() as i64;
    let k_bits = 64 - k.unsigned_abs().leading_zeros() as u64;
    let halvings: u64 = ((prec as f64).sqrt() as u64).max(8);
    let wp = prec + k_bits + halvings + 64;
    let r = y.sub(&ln2(wp).mul_int(&BigInt::from(k), wp), wp);
    let r = r.ldexp(-(halvings as i64));
    // Taylor on the reduced argument
    let mut term = BigFloat::one();
    let mut sum = BigFloat::one();
    let mut n: i64 = 0;
    loop {
        n += 1;
        term = term.mul(&r, wp).div_int(&BigInt::from(n), wp);
        if term.is_zero() || term.log2_abs() < -(wp as f64) - 4.0 {
            break;
        }
        sum = sum.add(&term, wp);
    }
    for _ in 0..halvings {
        sum = sum.mul(&sum, wp);
    }
    sum.ldexp(k).round(prec)
}

/// `Γ(x)` for a positive rational `x`.
///
/// The argument is reduced to `f ∈ (0, 1]` and `Γ(f)` is taken from the
/// lower incomplete gamma series
/// `γ(f, n) = n^f e^{−n} Σ_k n^k / (f(f+1)…(f+k))`, with `n` large enough
/// that the neglected `Γ(f, n) < e^{−n}` is below the target precision.
pub fn gamma_positive(x: &Rational, prec: u64) -> BigFloat {
    assert!(x.is_positive(), "gamma_positive needs x > 0");
    let wp = prec + 64;
    // shift = ceil(x) - 1, f = x - shift in (0, 1]
    let mut shift = x.floor();
    if x.is_integer() {
        shift -= 1;
    }
    let f = x.add(&Rational::new(-shift.clone(), BigInt::one()));
    let n_int = ((wp as f64 + 16.0) * std::f64::consts::LN_2).ceil() as i64 + 1;
    let n_big = BigInt::from(n_int);
    let wp_sum = wp + 2 * (64 - n_int.leading_zeros() as u64) + 16;

    // Σ_k n^k / (f)_{k+1}
    let mut term = BigFloat::from_int(f.den.clone()).div_int(&f.num, wp_sum);
    let mut sum = term.clone();
    let mut k: i64 = 0;
    loop {
        k += 1;
        let denom = &f.num + BigInt::from(k) * &f.den;
        term = term.mul_ratio(&(&n_big * &f.den), &denom, wp_sum);
        if k > n_int && term.log2_abs() < sum.log2_abs() - wp_sum as f64 - 2.0 {
            break;
        }
        sum = sum.add(&term, wp_sum);
    }
    // n^f e^{−n} = exp(f ln n − n)
    let ln_n = ln(&BigFloat::from_int(n_big.clone()), wp_sum);
    let expo = ln_n
        .mul_ratio(&f.num, &f.den, wp_sum)
        .sub(&BigFloat::from_int(n_big), wp_sum);
    let mut g = sum.mul(&exp(&expo, wp_sum), wp);

    // Γ(f + m) = Γ(f) · f (f+1) … (f+m−1)
    let m = shift.to_i64().expect("gamma argument fits in i64");
    if m > 0 {
        let mut num = BigInt::one();
        for i in 0..m {
            num *= &f.num + BigInt::from(i) * &f.den;
        }
        let den = num_traits::pow(f.den.clone(), m as usize);
        g = g.mul_ratio(&num, &den, wp);
    }
    g.round(prec)
}

/// `1/Γ(x)` for any rational `x`; exactly zero at the non-positive integers.
pub fn rgamma_rational(x: &Rational, prec: u64) -> BigFloat {
    if x.is_positive() {
        return BigFloat::one().div(&gamma_positive(x, prec + 16), prec);
    }
    if x.is_integer() {
        return BigFloat::zero();
    }
    // 1/Γ(x) = x (x+1) … (x+m−1) / Γ(x+m) with x + m > 0
    let m = (-x.floor()).to_i64().expect("argument fits in i64") + 1;
    let shifted = x.add_int(m);
    let mut num = BigInt::one();
    for i in 0..m {
        num *= &x.num + BigInt::from(i) * &x.den;
    }
    let den = num_traits::pow(x.den.clone(), m as usize);
    rgamma_rational(&shifted, prec + 16).mul_ratio(&num, &den, prec)
}

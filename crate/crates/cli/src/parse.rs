//! Parsers for complex numbers and angles given on the command line.

use std::f64::consts::PI;

use mlopc::Complex;

/// `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i`, with optional exponents.
pub fn parse_complex(text: &str) -> Result<Complex, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex number".into());
    }
    let bad = || format!("cannot parse complex number '{text}' (expected a+bi)");
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not leading and not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(Complex::new(re, im))
}

/// An angle given either as a rational multiple of π or in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    PiFraction { num: f64, den: f64 },
    Radians(f64),
}

impl Angle {
    pub fn radians(&self) -> f64 {
        match *self {
            Angle::PiFraction { num, den } => num * PI / den,
            Angle::Radians(x) => x,
        }
    }

    /// `r·e^{iθ}`, exact on the coordinate axes.
    pub fn point(&self, r: f64) -> Complex {
        if let Angle::PiFraction { num, den } = *self {
            let turns = (num / den).rem_euclid(2.0);
            if turns == 0.0 {
                return Complex::new(r, 0.0);
            }
            if turns == 0.5 {
                return Complex::new(0.0, r);
            }
            if turns == 1.0 {
                return Complex::new(-r, 0.0);
            }
            if turns == 1.5 {
                return Complex::new(0.0, -r);
            }
        }
        Complex::from_polar(r, self.radians())
    }
}

/// `pi`, `-pi/2`, `3pi/4`, `0.25`.
pub fn parse_angle(text: &str) -> Result<Angle, String> {
    let s = text.trim();
    let bad = || format!("cannot parse angle '{text}' (expected e.g. pi, pi/2, 3pi/4 or radians)");
    let Some(pos) = s.find("pi") else {
        return s.parse::<f64>().map(Angle::Radians).map_err(|_| bad());
    };
    let num = match &s[..pos] {
        "" | "+" => 1.0,
        "-" => -1.0,
        k => k.trim_end_matches('*').parse::<f64>().map_err(|_| bad())?,
    };
    let den = match &s[pos + 2..] {
        "" => 1.0,
        rest => rest
            .strip_prefix('/')
            .ok_or_else(bad)?
            .parse::<f64>()
            .map_err(|_| bad())?,
    };
    if den == 0.0 {
        return Err(bad());
    }
    Ok(Angle::PiFraction { num, den })
}

/// Text form of a complex value, e.g. `2.718281828459045e0 + 0e0 i`.
pub fn format_complex(v: Complex) -> String {
    if v.im < 0.0 {
        format!("{:e} - {:e} i", v.re, -v.im)
    } else {
        format!("{:e} + {:e} i", v.re, v.im)
    }
}

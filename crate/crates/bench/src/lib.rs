//! Workloads shared by the benchmarks.

use mlopc::{Complex, MLParams};

/// A named parameter set with the points it is evaluated at.
pub struct Workload {
    pub name: &'static str,
    pub params: MLParams,
    pub points: Vec<Complex>,
}

/// `n` points with log-spaced moduli in `[rmin, rmax]` on the ray `arg z = theta`.
pub fn ray(theta: f64, rmin: f64, rmax: f64, n: usize) -> Vec<Complex> {
    let step = if n > 1 { (rmax / rmin).ln() / (n - 1) as f64 } else { 0.0 };
    (0..n).map(|k| Complex::from_polar(rmin * (step * k as f64).exp(), theta)).collect()
}

pub fn workloads() -> Vec<Workload> {
    use std::f64::consts::PI;
    let p = |a, b, g| MLParams::new(a, b, g).expect("valid parameters");
    vec![
        Workload { name: "a0.7_negative_axis", params: p(0.7, 1.0, 1.0), points: ray(PI, 1e-2, 1e2, 32) },
        Workload { name: "a0.5_b1.2_upper", params: p(0.5, 1.2, 1.0), points: ray(0.6 * PI, 1e-1, 1e2, 32) },
        Workload { name: "a1.6_positive_axis", params: p(1.6, 1.0, 1.0), points: ray(0.0, 1e-1, 5e1, 32) },
        Workload { name: "prabhakar_g0.7", params: p(0.6, 0.9, 0.7), points: ray(PI, 1e-1, 1e2, 32) },
    ]
}

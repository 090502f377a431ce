//! `mlopc`: evaluate Mittag-Leffler functions from the command line.

mod parse;
mod record;

use std::fs;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use mlopc::{evaluate, mixed_error, ml_series, Complex, EvalError, EvalResult, LtOptions, MLParams, OracleConfig};
use rayon::prelude::*;
use serde::Serialize;

use parse::{format_complex, parse_angle, parse_complex, Angle};
use record::{to_csv, SweepRecord};

const ORACLE_MAX_TERMS: usize = 200_000;

#[derive(Parser)]
#[command(name = "mlopc", version, about = "Mittag-Leffler functions by Laplace transform inversion on optimal parabolic contours")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate at a single point.
    Eval(EvalArgs),
    /// Evaluate along a log-spaced radial grid and write CSV.
    Sweep(SweepArgs),
    /// Sweep and compare every point with the series oracle.
    Compare(SweepArgs),
    /// Sweep and report the median wall time per point.
    Time(SweepArgs),
}

#[derive(Args, Clone)]
struct FunctionArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// Target accuracy of the inversion.
    #[arg(long, default_value_t = 1e-15)]
    tol: f64,
    /// Use this chart region instead of the cheapest admissible one.
    #[arg(long)]
    force_region: Option<usize>,
    /// Working precision of the series oracle, in decimal digits.
    #[arg(long, default_value_t = 100)]
    oracle_digits: u32,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    f: FunctionArgs,
    /// Argument in the form a+bi.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["modulus", "arg"])]
    z: Option<String>,
    #[arg(long, requires = "arg")]
    modulus: Option<f64>,
    /// pi, pi/2, 3pi/4 or radians.
    #[arg(long, allow_hyphen_values = true, requires = "modulus")]
    arg: Option<String>,
    /// Also evaluate the series oracle and report the mixed error.
    #[arg(long)]
    oracle: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    f: FunctionArgs,
    /// arg(z) along the ray.
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    arg: String,
    #[arg(long, default_value_t = 1e-2)]
    rmin: f64,
    #[arg(long, default_value_t = 1e2)]
    rmax: f64,
    #[arg(long, default_value_t = 50)]
    points: usize,
    /// Fill err_mixed from the series oracle.
    #[arg(long)]
    oracle: bool,
    /// Largest mixed error accepted against the oracle.
    #[arg(long, default_value_t = 1e-13)]
    tol_slack: f64,
    /// Timing repetitions per point (time only).
    #[arg(long, default_value_t = 21)]
    repetitions: usize,
    /// Write JSON records instead of CSV.
    #[arg(long)]
    json: bool,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure::new(2, message)
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        let code = match e {
            EvalError::InvalidParameter(_)
            | EvalError::InvalidTolerance(_)
            | EvalError::InvalidTime(_)
            | EvalError::NonFiniteArgument => 2,
            EvalError::Unsupported(_) | EvalError::ResidueWithGamma(_) => 3,
            EvalError::NoAdmissibleRegion(_) | EvalError::ForcedRegion { .. } => 4,
            EvalError::Overflow => 1,
        };
        Failure::new(code, e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

impl FunctionArgs {
    fn params(&self) -> Outcome<MLParams> {
        MLParams::new(self.alpha, self.beta, self.gamma).map_err(|e| EvalError::from(e).into())
    }

    fn options(&self) -> LtOptions {
        LtOptions { force_region: self.force_region }
    }

    fn eval(&self, params: &MLParams, z: Complex) -> Outcome<EvalResult> {
        Ok(evaluate(params, z, self.tol, self.options())?)
    }

    fn oracle(&self, params: &MLParams, z: Complex) -> Outcome<Complex> {
        let cfg = OracleConfig::with_digits(self.oracle_digits).max_terms(ORACLE_MAX_TERMS);
        ml_series(params, z, &cfg).map_err(|e| Failure::new(5, format!("oracle failed at z = {}: {e}", format_complex(z))))
    }
}

#[derive(Serialize)]
struct EvalReport {
    re: f64,
    im: f64,
    n_nodes: usize,
    region_index: usize,
    mu: f64,
    h: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle_im: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    err_mixed: Option<f64>,
}

fn run_eval(a: &EvalArgs) -> Outcome<()> {
    let params = a.f.params()?;
    let z = match (&a.z, a.modulus, &a.arg) {
        (Some(text), _, _) => parse_complex(text).map_err(Failure::usage)?,
        (None, Some(r), Some(theta)) => parse_angle(theta).map_err(Failure::usage)?.point(r),
        _ => return Err(Failure::usage("give either --z or --modulus with --arg")),
    };
    let res = a.f.eval(&params, z)?;
    let reference = if a.oracle { Some(a.f.oracle(&params, z)?) } else { None };
    let err = reference.map(|r| mixed_error(res.value, r));
    if a.json {
        let report = EvalReport {
            re: res.value.re,
            im: res.value.im,
            n_nodes: res.plan.n,
            region_index: res.plan.region_index,
            mu: res.plan.mu,
            h: res.plan.h,
            oracle_re: reference.map(|r| r.re),
            oracle_im: reference.map(|r| r.im),
            err_mixed: err,
        };
        println!("{}", serde_json::to_string(&report).expect("report serializes"));
    } else {
        println!("{}", format_complex(res.value));
        if let (Some(r), Some(e)) = (reference, err) {
            println!("oracle {}", format_complex(r));
            println!("err_mixed {e:e}");
        }
    }
    Ok(())
}

fn radii(a: &SweepArgs) -> Outcome<Vec<f64>> {
    if !(a.rmin > 0.0 && a.rmin.is_finite() && a.rmax.is_finite() && a.rmax >= a.rmin) {
        return Err(Failure::usage("need 0 < rmin <= rmax"));
    }
    if a.points == 0 {
        return Err(Failure::usage("--points must be at least 1"));
    }
    if a.points == 1 {
        return Ok(vec![a.rmin]);
    }
    let ratio = a.rmax / a.rmin;
    let last = (a.points - 1) as f64;
    Ok((0..a.points)
        .map(|k| match k {
            0 => a.rmin,
            k if k == a.points - 1 => a.rmax,
            k => a.rmin * ratio.powf(k as f64 / last),
        })
        .collect())
}

fn median_ns(samples: &mut [u64]) -> u64 {
    samples.sort_unstable();
    samples[samples.len() / 2]
}

fn point_record(f: &FunctionArgs, params: &MLParams, z: Complex, oracle: bool, reps: usize) -> Outcome<SweepRecord> {
    let mut times = Vec::with_capacity(reps);
    let mut res = None;
    for _ in 0..reps {
        let start = Instant::now();
        let r = f.eval(params, z)?;
        times.push(start.elapsed().as_nanos() as u64);
        res = Some(r);
    }
    let res = res.expect("at least one repetition");
    let err_mixed = if oracle { Some(mixed_error(res.value, f.oracle(params, z)?)) } else { None };
    Ok(SweepRecord {
        re_z: z.re,
        im_z: z.im,
        re_E: res.value.re,
        im_E: res.value.im,
        err_mixed,
        n_nodes: res.plan.n,
        region_index: res.plan.region_index,
        mu: res.plan.mu,
        h: res.plan.h,
        time_ns: median_ns(&mut times),
    })
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Sweep,
    Compare,
    Time,
}

fn run_sweep(a: &SweepArgs, mode: Mode) -> Outcome<()> {
    let params = a.f.params()?;
    let angle: Angle = parse_angle(&a.arg).map_err(Failure::usage)?;
    let points: Vec<Complex> = radii(a)?.into_iter().map(|r| angle.point(r)).collect();
    let oracle = a.oracle || mode == Mode::Compare;
    if !(a.tol_slack > 0.0) {
        return Err(Failure::usage("--tol-slack must be positive"));
    }

    let records: Vec<SweepRecord> = if mode == Mode::Time {
        if a.repetitions == 0 {
            return Err(Failure::usage("--repetitions must be at least 1"));
        }
        let timed = points
            .iter()
            .map(|&z| point_record(&a.f, &params, z, false, a.repetitions))
            .collect::<Outcome<Vec<_>>>()?;
        if oracle {
            // oracle runs after timing so it never competes with the measured work
            timed
                .into_par_iter()
                .map(|mut rec| {
                    let z = Complex::new(rec.re_z, rec.im_z);
                    let reference = a.f.oracle(&params, z)?;
                    rec.err_mixed = Some(mixed_error(Complex::new(rec.re_E, rec.im_E), reference));
                    Ok(rec)
                })
                .collect::<Outcome<Vec<_>>>()?
        } else {
            timed
        }
    } else {
        points
            .par_iter()
            .map(|&z| point_record(&a.f, &params, z, oracle, 1))
            .collect::<Outcome<Vec<_>>>()?
    };

    let body = if a.json {
        let mut s = serde_json::to_string_pretty(&records).expect("records serialize");
        s.push('\n');
        s
    } else {
        to_csv(&records)
    };
    match &a.out {
        Some(path) => fs::write(path, body)
            .map_err(|e| Failure::new(1, format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::new(1, format!("cannot write output: {e}")))?;
        }
    }

    if mode == Mode::Time {
        let mut all: Vec<u64> = records.iter().map(|r| r.time_ns).collect();
        eprintln!("median time per point: {} ns over {} points", median_ns(&mut all), records.len());
    }

    let violations: Vec<&SweepRecord> = records
        .iter()
        .filter(|r| r.err_mixed.is_some_and(|e| !(e <= a.tol_slack)))
        .collect();
    if !violations.is_empty() {
        let worst = violations.iter().filter_map(|r| r.err_mixed).fold(0.0f64, f64::max);
        let mut msg = format!(
            "{} of {} points exceed the mixed-error bound {:e} (worst {:e})",
            violations.len(),
            records.len(),
            a.tol_slack,
            worst
        );
        for r in violations.iter().take(10) {
            msg.push_str(&format!("\n  z = {:e}{:+e}i: {:e}", r.re_z, r.im_z, r.err_mixed.unwrap_or(f64::NAN)));
        }
        return Err(Failure::new(1, msg));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Eval(a) => run_eval(a),
        Command::Sweep(a) => run_sweep(a, Mode::Sweep),
        Command::Compare(a) => run_sweep(a, Mode::Compare),
        Command::Time(a) => run_sweep(a, Mode::Time),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("mlopc: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sweep(rmin: f64, rmax: f64, points: usize) -> SweepArgs {
        let cli = Cli::try_parse_from([
            "mlopc", "sweep", "--alpha", "0.7", "--rmin", &rmin.to_string(), "--rmax", &rmax.to_string(),
            "--points", &points.to_string(),
        ])
        .unwrap();
        match cli.command {
            Command::Sweep(a) => a,
            _ => unreachable!(),
        }
    }

    #[test]
    fn grid_endpoints_and_spacing() {
        let r = radii(&sweep(1e-2, 1e2, 5)).unwrap();
        assert_eq!(r.len(), 5);
        assert_eq!(r[0], 1e-2);
        assert_eq!(r[4], 1e2);
        assert!((r[2] - 1.0).abs() < 1e-14);
        assert_eq!(radii(&sweep(3.0, 3.0, 1)).unwrap(), vec![3.0]);
        assert!(radii(&sweep(2.0, 1.0, 3)).is_err());
    }

    #[test]
    fn error_codes() {
        assert_eq!(Failure::from(EvalError::Unsupported("x".into())).code, 3);
        assert_eq!(Failure::from(EvalError::InvalidTolerance(1.0)).code, 2);
        assert_eq!(Failure::from(EvalError::ForcedRegion { index: 3, reason: "r".into() }).code, 4);
    }

    #[test]
    fn odd_median() {
        assert_eq!(median_ns(&mut [5, 1, 9, 3, 7]), 5);
    }
}

//! Quadrature parameters `(μ, h, N)` for the parabola `z(u) = μ(iu+1)²`.
//!
//! Region `j` of a chart is the set of parabolas passing between the
//! singularities `j` and `j + 1`. In each region the discretization errors
//! on both sides and the truncation error are balanced against the target
//! accuracy, and the region with the fewest nodes wins.

use std::f64::consts::PI;

use crate::singularity::SingularityChart;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Target accuracy ε.
    pub eps: f64,
    /// Unit round-off ϵ of the arithmetic.
    pub mach: f64,
    pub fbar_min_floor: f64,
    pub fbar_max: f64,
    /// Target for the algebraic amplification factor; `None` picks the
    /// geometric mean of the admissible interval.
    pub fbar_tar: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps: 1e-15,
            mach: f64::EPSILON,
            fbar_min_floor: 1.0,
            fbar_max: 10.0,
            fbar_tar: None,
        }
    }
}

impl Tolerances {
    pub fn with_eps(eps: f64) -> Self {
        Self {
            eps,
            ..Self::default()
        }
    }

    /// Largest `μ` for which `e^{μt}·ϵ` stays below `ε`.
    pub fn roundoff_threshold(&self, t: f64) -> f64 {
        (self.eps.ln() - self.mach.ln()) / t
    }

    fn target(&self, fbar_min: f64) -> f64 {
        let lo = fbar_min.max(self.fbar_min_floor);
        let tar = self.fbar_tar.unwrap_or_else(|| (lo * self.fbar_max).sqrt());
        tar.clamp((1.05 * fbar_min).min(self.fbar_max), self.fbar_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundedRegionGeometry {
    pub phi_left: f64,
    /// `φ` of the right singularity, `+inf` in the last region.
    pub phi_right: f64,
    /// Right boundary actually used by the solve: `phi_right`, pulled in when
    /// needed so that `√φ̄_left + √φ̄_right` stays under the round-off bound.
    pub phi_right_eff: f64,
    pub phibar_left: f64,
    pub phibar_right: f64,
    pub cstar: f64,
    pub dstar: f64,
    pub cbar: f64,
    pub dbar: f64,
    pub w: f64,
    pub fbar: f64,
    pub fbar_min: f64,
    pub eps_bar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Bounded,
    Unbounded,
    /// Last region with `μ` pinned at the round-off limit.
    RoundoffLimited,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum Rejection {
    #[error("region too narrow for a usable contour")]
    NarrowRegion,
    #[error("round-off error would exceed the tolerance")]
    RoundoffDominated,
    #[error("minimal amplification factor above the allowed maximum")]
    FbarTooLarge,
    #[error("amplification factor iteration did not settle")]
    IterationDivergence,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContourPlan {
    pub region_index: usize,
    pub mu: f64,
    pub h: f64,
    /// Number of nodes on each side of `u = 0`.
    pub n: usize,
    /// `N` before rounding up.
    pub n_exact: f64,
    pub branch: Branch,
    pub geometry: Option<BoundedRegionGeometry>,
    pub admissible: bool,
    pub rejection: Option<Rejection>,
    /// Chart entries lying right of the contour, whose residues are added.
    pub residue_indices: Vec<usize>,
}

impl ContourPlan {
    fn rejected(chart: &SingularityChart, j: usize, branch: Branch, why: Rejection) -> Self {
        Self {
            region_index: j,
            mu: f64::NAN,
            h: f64::NAN,
            n: 0,
            n_exact: f64::NAN,
            branch,
            geometry: None,
            admissible: false,
            rejection: Some(why),
            residue_indices: (j + 1..chart.entries.len()).collect(),
        }
    }
}

/// Upper bound on `N` for a plan to count as usable.
const MAX_NODES: f64 = 1e6;

fn finish(
    chart: &SingularityChart,
    j: usize,
    mu: f64,
    h: f64,
    n_exact: f64,
    branch: Branch,
    geometry: Option<BoundedRegionGeometry>,
) -> ContourPlan {
    if !(n_exact.is_finite() && n_exact > 0.0 && n_exact <= MAX_NODES && h > 0.0 && mu > 0.0) {
        return ContourPlan::rejected(chart, j, branch, Rejection::NarrowRegion);
    }
    ContourPlan {
        region_index: j,
        mu,
        h,
        n: (n_exact.ceil() as usize).max(1),
        n_exact,
        branch,
        geometry,
        admissible: true,
        rejection: None,
        residue_indices: (j + 1..chart.entries.len()).collect(),
    }
}

/// One solve of the bounded-region system for a given right boundary.
#[derive(Debug, Clone, Copy)]
struct Balance {
    fbar: f64,
    fbar_min: f64,
    eps_bar: f64,
    fp: f64,
    fq: f64,
    w: f64,
    x0: f64,
    x1: f64,
}

/// `(√φ̄_j, √φ̄_{j+1})` from the 2×2 system at a given `w`.
fn solve_system(sl: f64, sr: f64, fp: f64, fq: f64, w: f64) -> (f64, f64) {
    let den = 2.0 + w - (1.0 + w) * fp + fq;
    let x0 = ((2.0 + w + fq) * sl + fp * sr) / den;
    let x1 = (-(1.0 + w) * fq * sl + (2.0 + w - (1.0 + w) * fp) * sr) / den;
    (x0, x1)
}

fn balance_at_fixed_w(sl: f64, sr: f64, b: &Balance) -> f64 {
    let (x0, x1) = solve_system(sl, sr, b.fp, b.fq, b.w);
    x0 + x1
}

fn balance(sl: f64, sr: f64, p: f64, q: f64, t: f64, tol: &Tolerances) -> Result<Balance, Rejection> {
    if !(sr > sl) {
        return Err(Rejection::NarrowRegion);
    }
    let fbar_min = if p == 0.0 {
        (sl / (sr - sl)).powf(q)
    } else {
        ((sl + sr) / (sr - sl)).powf(p.max(q))
    };
    if fbar_min > tol.fbar_max {
        return Err(Rejection::FbarTooLarge);
    }
    let fbar = tol
        .target(fbar_min)
        .clamp((fbar_min * (1.0 + 1e-6)).max(tol.fbar_min_floor), tol.fbar_max);
    let eps_bar = tol.eps / fbar;
    let log_eps = eps_bar.ln();
    let fp = if p == 0.0 { 0.0 } else { fbar.powf(-1.0 / p) };
    let fq = fbar.powf(-1.0 / q);

    // The coefficients contain w = −φ̄_{j+1} t / log ε̄; iterate to the
    // fixed point.
    let mut w = -sr * sr * t / log_eps;
    let (mut x0, mut x1) = solve_system(sl, sr, fp, fq, w);
    for _ in 0..60 {
        let next = -x1 * x1 * t / log_eps;
        let done = (next - w).abs() <= 1e-15 * next.abs();
        w = next;
        (x0, x1) = solve_system(sl, sr, fp, fq, w);
        if done {
            break;
        }
    }
    if !(x1 > x0 && x0 >= 0.0) {
        return Err(Rejection::NarrowRegion);
    }
    Ok(Balance {
        fbar,
        fbar_min,
        eps_bar,
        fp,
        fq,
        w,
        x0,
        x1,
    })
}

/// Region `j < J`, bounded on the right by entry `j + 1`.
pub fn solve_bounded(chart: &SingularityChart, j: usize, t: f64, tol: &Tolerances) -> ContourPlan {
    assert!(j + 1 < chart.entries.len(), "region {j} is not bounded on the right");
    let strengths = chart.strengths[j];
    let p = strengths.p;
    let q = strengths.q.expect("bounded region has a right exponent");
    let thr = tol.roundoff_threshold(t);

    let phi_left = chart.entries[j].phi;
    let phi_right = chart.entries[j + 1].phi;
    if phi_left >= thr {
        return ContourPlan::rejected(chart, j, Branch::Bounded, Rejection::RoundoffDominated);
    }
    let sl = phi_left.sqrt();
    let limit = 2.0 * thr.sqrt();
    let mut sr = phi_right.sqrt().min(limit - sl);
    let mut attempt = 0;
    let solved = loop {
        let step = match balance(sl, sr, p, q, t, tol) {
            Ok(step) => step,
            Err(why) => return ContourPlan::rejected(chart, j, Branch::Bounded, why),
        };
        let (x0, x1) = (step.x0, step.x1);
        if x0 + x1 < limit {
            break step;
        }
        // The round-off bound caps √φ̄_{j+1}: pull the right boundary in.
        // For fixed w the sum x0 + x1 is linear in sr.
        attempt += 1;
        let at_zero = balance_at_fixed_w(sl, 0.0, &step);
        let slope = (x0 + x1 - at_zero) / sr;
        let next = (limit * (1.0 - 1e-9) - at_zero) / slope;
        if attempt > 30 || !(next > sl && next < sr) {
            return ContourPlan::rejected(chart, j, Branch::Bounded, Rejection::RoundoffDominated);
        }
        sr = next;
    };
    let Balance {
        fbar,
        fbar_min,
        eps_bar,
        w,
        x0,
        x1,
        ..
    } = solved;
    let log_eps = eps_bar.ln();

    let denom = (1.0 + w) * x0 + x1;
    let sqrt_mu = denom / (2.0 + w);
    let mu = sqrt_mu * sqrt_mu;
    let h = -2.0 * PI / log_eps * (x1 - x0) / denom;
    let n_exact = (1.0 - log_eps / (t * mu)).sqrt() / h;

    let geometry = BoundedRegionGeometry {
        phi_left,
        phi_right,
        phi_right_eff: sr * sr,
        phibar_left: x0 * x0,
        phibar_right: x1 * x1,
        cstar: 1.0 - sl / sqrt_mu,
        dstar: sr / sqrt_mu - 1.0,
        cbar: 1.0 - x0 / sqrt_mu,
        dbar: x1 / sqrt_mu - 1.0,
        w,
        fbar,
        fbar_min,
        eps_bar,
    };
    finish(chart, j, mu, h, n_exact, Branch::Bounded, Some(geometry))
}

/// `(N, μ, h, c̄)` of the last region for a given `φ̄_J`.
fn unbounded_params(phibar: f64, t: f64, log_eps: f64) -> (f64, f64, f64, f64) {
    let l = log_eps / (phibar * t);
    let n = phibar * t / PI * (1.0 - 1.5 * l + (1.0 - 2.0 * l).sqrt());
    let a = PI * n / (t * phibar);
    let r = (1.0 + 12.0 * a).sqrt();
    // (3 + A − r)/(A − 4) without the removable singularity at A = 4
    let cbar = (a - 2.0) / (3.0 + a + r);
    let mu = phibar * ((7.0 + r) / 12.0).powi(2);
    let h = (1.0 + 2.0 * cbar) / n;
    (n, mu, h, cbar)
}

/// The last, right-unbounded region.
pub fn solve_unbounded(chart: &SingularityChart, t: f64, tol: &Tolerances) -> ContourPlan {
    let j = chart.last_index();
    let p = chart.strengths[j].p;
    let phi_j = chart.entries[j].phi;
    let thr = tol.roundoff_threshold(t);
    let log_eps = tol.eps.ln();
    if phi_j >= thr {
        return ContourPlan::rejected(chart, j, Branch::Unbounded, Rejection::RoundoffDominated);
    }
    let ftar = tol.target(tol.fbar_min_floor);
    let shift = |sqrt_mu: f64| {
        if p == 0.0 {
            phi_j
        } else {
            (ftar.powf(-1.0 / p) * sqrt_mu + phi_j.sqrt()).powi(2)
        }
    };

    let mut phibar = phi_j * (1.0 + 1e-8) + 1e-8;
    let mut settled = None;
    for _ in 0..10 {
        let (n, mu, h, cbar) = unbounded_params(phibar, t, log_eps);
        let fbar = if p == 0.0 {
            1.0
        } else {
            ((phibar.sqrt() - phi_j.sqrt()) / mu.sqrt()).powf(-p)
        };
        if (tol.fbar_min_floor..=tol.fbar_max).contains(&fbar) {
            settled = Some((n, mu, h, cbar, fbar));
            break;
        }
        phibar = shift(mu.sqrt());
    }
    let Some((n, mu, h, cbar, fbar)) = settled else {
        return ContourPlan::rejected(chart, j, Branch::Unbounded, Rejection::IterationDivergence);
    };

    if mu * t <= thr {
        let sqrt_mu = mu.sqrt();
        let geometry = BoundedRegionGeometry {
            phi_left: phi_j,
            phi_right: f64::INFINITY,
            phi_right_eff: f64::INFINITY,
            phibar_left: phibar,
            phibar_right: f64::INFINITY,
            cstar: 1.0 - phi_j.sqrt() / sqrt_mu,
            dstar: f64::INFINITY,
            cbar,
            dbar: f64::INFINITY,
            w: 0.0,
            fbar,
            fbar_min: tol.fbar_min_floor,
            eps_bar: tol.eps,
        };
        return finish(chart, j, mu, h, n, Branch::Unbounded, Some(geometry));
    }

    // Round-off dominates the left discretization error: pin μ at the limit.
    let mu = thr;
    let phibar = shift(mu.sqrt());
    if phibar >= thr {
        return ContourPlan::rejected(chart, j, Branch::RoundoffLimited, Rejection::RoundoffDominated);
    }
    let log_mach = tol.mach.ln();
    let gap = log_eps - log_mach;
    let n = log_eps * (-log_mach).sqrt() / (2.0 * PI * ((phibar * t).sqrt() - gap.sqrt()));
    let h = (log_mach / (log_mach - log_eps)).sqrt() / n;
    finish(chart, j, mu, h, n, Branch::RoundoffLimited, None)
}

/// Plans for every region of a chart and the index of the selected one.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanSet {
    pub plans: Vec<ContourPlan>,
    pub selected: usize,
}

impl PlanSet {
    pub fn selected_plan(&self) -> &ContourPlan {
        &self.plans[self.selected]
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("no admissible region: {}", describe(.reasons))]
pub struct NoAdmissibleRegion {
    pub reasons: Vec<(usize, Rejection)>,
}

fn describe(reasons: &[(usize, Rejection)]) -> String {
    reasons
        .iter()
        .map(|(j, r)| format!("region {j}: {r}"))
        .collect::<Vec<_>>()
        .join("; ")
}

pub fn plan_region(chart: &SingularityChart, j: usize, t: f64, tol: &Tolerances) -> ContourPlan {
    if j == chart.last_index() {
        solve_unbounded(chart, t, tol)
    } else {
        solve_bounded(chart, j, t, tol)
    }
}

pub fn plan_all(chart: &SingularityChart, t: f64, tol: &Tolerances) -> Result<PlanSet, NoAdmissibleRegion> {
    let plans: Vec<ContourPlan> = (0..chart.n_regions())
        .map(|j| plan_region(chart, j, t, tol))
        .collect();
    let selected = plans
        .iter()
        .enumerate()
        .filter(|(_, p)| p.admissible)
        .min_by(|(_, a), (_, b)| a.n.cmp(&b.n).then(a.mu.total_cmp(&b.mu)))
        .map(|(j, _)| j);
    match selected {
        Some(selected) => Ok(PlanSet { plans, selected }),
        None => Err(NoAdmissibleRegion {
            reasons: plans
                .iter()
                .map(|p| (p.region_index, p.rejection.unwrap_or(Rejection::NarrowRegion)))
                .collect(),
        }),
    }
}

//! Wave steady state, propagation speed `v = 1/T` and its upper bounds.
//!
//! Once the decoding wave is formed, the windowed decoder translates the
//! profile by exactly one position per configuration:
//! `x_z^{(c,t)} = x_{z+1}^{(c+1,t)}`. The smallest number of iterations per
//! configuration for which decoding succeeds gives the speed `v = 1/T_min`.

use std::fmt;
use std::ops::RangeInclusive;

use crate::coupled::{coupled_potential, CoupledPotentialContext};
use crate::error::{Error, Result};
use crate::scalar::{PotentialLandscape, DEFAULT_GRID_N};
use crate::window::{
    read, run_success, run_wd, CoupledSpec, RecordPolicy, RunOptions, SuccessPolicy, Trajectory,
    WindowSchedule,
};

pub const DEFAULT_STEADY_TOL: f64 = 1e-9;
pub const DEFAULT_T_MAX: usize = 200;
/// Lemma margins above this count as satisfied.
pub const LEMMA_B1_TOL: f64 = 1e-9;
const MIN_DENOMINATOR: f64 = 1e-300;

/// Shift-identity check between configurations `c` and `c + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftCheck {
    pub c: usize,
    /// `max |x_z^{(c,t)} − x_{z+1}^{(c+1,t)}|` over all `t` and compared `z`.
    pub residual: f64,
    /// `max (x_z^{(c,t)} − x_{z+1}^{(c,t)})`; positive values break the
    /// non-decreasing ordering in `z`.
    pub ordering: f64,
    /// Whether the compared profile has a value strictly between 0 and 1,
    /// i.e. there is a wave to translate.
    pub nontrivial: bool,
}

impl ShiftCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.residual <= tol && self.ordering <= tol && self.nontrivial
    }
}

/// Configurations whose shift identity can be tested: both `c` and `c + 1`
/// recorded, and `c + 1` no further right than `N − W + 1`.
fn shift_candidates<'a>(
    traj: &'a Trajectory,
    spec: &'a CoupledSpec,
    sched: &'a WindowSchedule,
) -> impl Iterator<Item = usize> + 'a {
    let interior_last = (spec.n() + 1).saturating_sub(sched.window);
    traj.windows()
        .filter(move |&c| c < interior_last && traj.contains(c + 1))
}

/// Tests the shift identity between configurations `c` and `c + 1`.
///
/// Compared positions are `z ∈ [max(c − w, w + 1), min(c + W − 1, N − w)]`,
/// which keeps `w` positions clear of either end of the chain.
pub fn shift_check(
    traj: &Trajectory,
    spec: &CoupledSpec,
    sched: &WindowSchedule,
    c: usize,
    tol: f64,
) -> Result<ShiftCheck> {
    let w = spec.w() as isize;
    let lo = (c as isize - w).max(w + 1);
    let hi = ((c + sched.window - 1) as isize).min(spec.n() as isize - w);
    let mut residual: f64 = 0.0;
    let mut ordering = f64::NEG_INFINITY;
    let mut nontrivial = false;
    for t in 0..=traj.iterations {
        let a = traj.state(c, t).ok_or(Error::MissingWindow(c))?;
        let b = traj.state(c + 1, t).ok_or(Error::MissingWindow(c + 1))?;
        for z in lo..=hi {
            let xz = read(a, z);
            residual = residual.max((xz - read(b, z + 1)).abs());
            ordering = ordering.max(xz - read(a, z + 1));
            nontrivial |= xz > tol && xz < 1.0 - tol;
        }
    }
    Ok(ShiftCheck {
        c,
        residual,
        ordering: ordering.max(0.0),
        nontrivial,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    pub c_prime: usize,
    /// Largest shift residual over all checked configurations from `c′` on.
    pub residual: f64,
}

/// Smallest `c′` such that the shift identity and the ordering hold to `tol`
/// for every testable configuration `c ≥ c′`.
///
/// Returns `None` when the last testable configuration already fails, or when
/// the profile carries no wave (every compared value is 0 or 1).
pub fn detect_steady_state(
    traj: &Trajectory,
    spec: &CoupledSpec,
    sched: &WindowSchedule,
    tol: f64,
) -> Option<SteadyState> {
    let checks: Vec<ShiftCheck> = shift_candidates(traj, spec, sched)
        .filter_map(|c| shift_check(traj, spec, sched, c, tol).ok())
        .collect();
    let mut found = None;
    let mut residual: f64 = 0.0;
    for check in checks.iter().rev() {
        if !check.passes(tol) {
            break;
        }
        residual = residual.max(check.residual);
        found = Some(SteadyState {
            c_prime: check.c,
            residual,
        });
    }
    found
}

/// The testable configuration with the smallest shift residual among those
/// carrying a wave.
pub fn best_shift(
    traj: &Trajectory,
    spec: &CoupledSpec,
    sched: &WindowSchedule,
) -> Option<ShiftCheck> {
    shift_candidates(traj, spec, sched)
        .filter_map(|c| shift_check(traj, spec, sched, c, DEFAULT_STEADY_TOL).ok())
        .filter(|s| s.nontrivial)
        .min_by(|a, b| a.residual.total_cmp(&b.residual))
}

/// Potential-difference speed bound
///
/// ```text
/// A₁ = α (U(x^{(c′,0)}; c′) − U(x^{(c′+1,0)}; c′))
///      / Σ_{z=c′}^{c′+W−1} ρ'(1 − x_z)(x_z − x_{z−1})²,   x = x^{(c′,0)}.
/// ```
pub fn bound_a1(traj: &Trajectory, ctx: &CoupledPotentialContext<'_>) -> Result<f64> {
    if traj.iterations <= 1 {
        return Err(Error::InvalidParameter(format!(
            "the bound needs more than one iteration per window, got T = {}",
            traj.iterations
        )));
    }
    let c = ctx.c;
    let x = traj.state(c, 0).ok_or(Error::MissingWindow(c))?;
    let next = traj.state(c + 1, 0).ok_or(Error::MissingWindow(c + 1))?;
    let ens = ctx.spec.ensemble();
    let numerator = ctx.alpha * (coupled_potential(x, ctx) - coupled_potential(next, ctx));
    let denominator: f64 = ctx
        .sched
        .covers(c)
        .map(|z| {
            let z = z as isize;
            let xz = read(x, z);
            let step = xz - read(x, z - 1);
            ens.rho_prime_at(xz) * step * step
        })
        .sum();
    if denominator.abs() < MIN_DENOMINATOR {
        return Err(Error::DegenerateDenominator(denominator));
    }
    Ok(numerator / denominator)
}

/// Form of the two `(U')²` terms in the critical-point bound denominators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Th2Variant {
    /// `W (U'(x))² / D`, the stated form.
    #[default]
    Stated,
    /// `(U'(x))² / (2 D W)`, the triangle-area form of the derivation.
    Derivation,
}

/// Point whose potential is subtracted in the large-`w` numerator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Th2Subtrahend {
    /// Numerator `U(1; ε)`.
    #[default]
    None,
    /// Numerator `U(1; ε) − U(x_e; ε)`.
    XE,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Th2Options {
    pub variant: Th2Variant,
    pub subtrahend: Th2Subtrahend,
}

/// Critical-point speed bound quantities. Bounds are only reported when their denominator is
/// positive; otherwise the bound is vacuous.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Th2Bound {
    pub b1: f64,
    pub b2: f64,
    /// `D x_d / w`, the term separating `B₁` from `B₂`.
    pub width_term: f64,
    pub finite_w: Option<f64>,
    pub infinite_w: Option<f64>,
    pub options: Th2Options,
}

impl Th2Bound {
    pub fn finite_valid(&self) -> bool {
        self.finite_w.is_some()
    }
    pub fn infinite_valid(&self) -> bool {
        self.infinite_w.is_some()
    }
}

/// Evaluates `B₁`, `B₂` and the finite-w and w → ∞ critical-point bounds from the landscape.
pub fn bound_th2(
    spec: &CoupledSpec,
    window: usize,
    landscape: &PotentialLandscape,
    alpha: f64,
    options: Th2Options,
) -> Result<Th2Bound> {
    let need = |v: Option<f64>, name| v.ok_or(Error::MissingCriticalPoint(name));
    let x_a = need(landscape.x_a, "x_a")?;
    let x_b = need(landscape.x_b, "x_b")?;
    let x_c0 = need(landscape.x_c0, "x_c0")?;
    let x_d = need(landscape.x_d, "x_d")?;
    let d = need(landscape.d, "D")?;
    let ens = spec.ensemble();
    let eps = landscape.epsilon;
    let u = |x| ens.potential(x, eps);
    let du = |x| ens.potential_d1(x, eps);
    let w = spec.w() as f64;
    let big_w = window as f64;
    let slope_term = |x: f64| {
        let s = du(x);
        match options.variant {
            Th2Variant::Stated => big_w * s * s / d,
            Th2Variant::Derivation => s * s / (2.0 * d * big_w),
        }
    };
    let width_term = d * x_d / w;
    let b1 = 2.0 * u(x_b) - u(x_d) + slope_term(x_a) + slope_term(x_c0) - width_term;
    let b2 = 2.0 * u(x_b) - u(x_d) + slope_term(x_a) + slope_term(x_c0);
    let numerator_inf = match options.subtrahend {
        Th2Subtrahend::None => u(1.0),
        Th2Subtrahend::XE => u(1.0) - u(need(landscape.x_e, "x_e")?),
    };
    Ok(Th2Bound {
        b1,
        b2,
        width_term,
        finite_w: (b1 > 0.0).then(|| w * alpha * u(1.0) / b1),
        infinite_w: (b2 > 0.0).then(|| w * alpha * numerator_inf / b2),
        options,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaB1 {
    pub min_margin: f64,
    pub holds: bool,
}

/// Minimum over in-window `z` of
/// `(x_z − x_{z−1}) − |x_z − ε λ(1 − ρ(1 − x_z))| / w`.
pub fn lemma_b1_check(x: &[f64], c: usize, spec: &CoupledSpec, sched: &WindowSchedule) -> LemmaB1 {
    let ens = spec.ensemble();
    let w = spec.w() as f64;
    let min_margin = sched
        .covers(c)
        .map(|z| {
            let z = z as isize;
            let xz = read(x, z);
            (xz - read(x, z - 1)) - (xz - ens.de_step(xz, spec.epsilon())).abs() / w
        })
        .fold(f64::INFINITY, f64::min);
    LemmaB1 {
        min_margin,
        holds: min_margin >= -LEMMA_B1_TOL,
    }
}

/// Largest `x_{c−1}^{(c,0)}` over recorded configurations `c > 1`: how far
/// the run is from having a fully decoded left neighbour at every slide.
pub fn left_neighbour_residual(traj: &Trajectory) -> f64 {
    traj.windows()
        .filter(|&c| c > 1)
        .filter_map(|c| traj.value(c, 0, c as isize - 1))
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedOptions {
    pub run: RunOptions,
    pub success: SuccessPolicy,
    pub alpha: f64,
    pub steady_tol: f64,
    pub th2: Th2Options,
    pub grid_n: usize,
    /// Evaluate the A₁ and critical-point bounds.
    pub bounds: bool,
}

impl Default for SpeedOptions {
    fn default() -> Self {
        Self {
            run: RunOptions::default(),
            success: SuccessPolicy::default(),
            alpha: 1.0,
            steady_tol: DEFAULT_STEADY_TOL,
            th2: Th2Options::default(),
            grid_n: DEFAULT_GRID_N,
            bounds: true,
        }
    }
}

impl SpeedOptions {
    /// Extended schedule with warm start and flush, judged on decision-time
    /// bit erasure probabilities.
    pub fn reproduction() -> Self {
        Self {
            run: RunOptions::reproduction(),
            success: SuccessPolicy::decision_bits(),
            ..Self::default()
        }
    }
}

/// A₁ together with the configuration it was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A1Estimate {
    pub value: f64,
    pub c: usize,
    /// Shift residual at `c`; above the steady-state tolerance when no
    /// steady state was detected and the best-matching configuration was
    /// used instead.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedReport {
    pub epsilon: f64,
    pub window: usize,
    pub t_max: usize,
    pub t_min: Option<usize>,
    /// Success metric at `T_min`, or the smallest one seen when no `T`
    /// succeeded.
    pub metric: f64,
    pub steady: Option<SteadyState>,
    pub a1: Option<A1Estimate>,
    pub th2: Option<Th2Bound>,
    pub lemma_b1: Option<LemmaB1>,
    pub left_neighbour: Option<f64>,
    pub alpha: f64,
    pub success_policy: SuccessPolicy,
}

impl SpeedReport {
    pub fn v(&self) -> Option<f64> {
        self.t_min.map(|t| 1.0 / t as f64)
    }

    pub fn c_prime(&self) -> Option<usize> {
        self.steady.map(|s| s.c_prime)
    }

    /// `v ≤ A₁` where both exist and steady state was detected.
    pub fn a1_bounds_speed(&self) -> Option<bool> {
        let v = self.v()?;
        self.steady?;
        Some(v <= self.a1?.value + 1e-9)
    }
}

impl fmt::Display for SpeedReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        write!(
            f,
            "eps={:.4} W={} T_min={} v={} c'={} A1={} th2={}",
            self.epsilon,
            self.window,
            self.t_min
                .map_or_else(|| format!(">{}", self.t_max), |t| t.to_string()),
            opt(self.v()),
            self.c_prime()
                .map_or_else(|| "-".to_string(), |c| c.to_string()),
            opt(self.a1.map(|a| a.value)),
            opt(self.th2.and_then(|b| b.finite_w)),
        )
    }
}

/// Smallest `T ≤ t_max` for which the windowed decoder succeeds, with the
/// bounds evaluated on the run at `T_min`.
pub fn measure_speed(
    spec: &CoupledSpec,
    window: usize,
    t_max: usize,
    opts: &SpeedOptions,
) -> Result<SpeedReport> {
    if t_max == 0 {
        return Err(Error::InvalidParameter("T_max must be at least 1".into()));
    }
    measure_speed_over(spec, window, 1..=t_max, opts)
}

/// [`measure_speed`] with the scan restricted to `ts`; a single-element range
/// tests one fixed `T`.
pub fn measure_speed_over(
    spec: &CoupledSpec,
    window: usize,
    ts: RangeInclusive<usize>,
    opts: &SpeedOptions,
) -> Result<SpeedReport> {
    if window == 0 || window > spec.n() {
        return Err(Error::InvalidParameter(format!(
            "window size must lie in [1, N = {}], got {window}",
            spec.n()
        )));
    }
    if *ts.start() == 0 || ts.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "iteration range {ts:?} must be non-empty and start at 1 or later"
        )));
    }
    let t_max = *ts.end();
    let run_opts = opts.run.clone().recording(RecordPolicy::None);
    let mut t_min = None;
    let mut metric = f64::INFINITY;
    for t in ts {
        let sched = WindowSchedule::new(window, t)?;
        let run = run_wd(spec, &sched, &run_opts)?;
        let verdict = run_success(&run, spec, &opts.success);
        let m = verdict.metric(&opts.success);
        if verdict.success {
            t_min = Some(t);
            metric = m;
            break;
        }
        metric = metric.min(m);
    }
    let mut report = SpeedReport {
        epsilon: spec.epsilon(),
        window,
        t_max,
        t_min,
        metric,
        steady: None,
        a1: None,
        th2: None,
        lemma_b1: None,
        left_neighbour: None,
        alpha: opts.alpha,
        success_policy: opts.success,
    };
    if opts.bounds {
        report.th2 = spec
            .ensemble()
            .landscape(spec.epsilon(), opts.grid_n)
            .ok()
            .and_then(|l| bound_th2(spec, window, &l, opts.alpha, opts.th2).ok());
    }
    let Some(t) = t_min else {
        return Ok(report);
    };
    let sched = WindowSchedule::new(window, t)?;
    let interior_last = spec.n() + 1 - window;
    let run = run_wd(
        spec,
        &sched,
        &opts
            .run
            .clone()
            .recording(RecordPolicy::Windows(1..=interior_last)),
    )?;
    let traj = run.trajectory.as_ref().expect("recording requested");
    report.steady = detect_steady_state(traj, spec, &sched, opts.steady_tol);
    report.left_neighbour = Some(left_neighbour_residual(traj));
    if !opts.bounds {
        return Ok(report);
    }
    let at = match report.steady {
        Some(s) => Some((s.c_prime, s.residual)),
        None => best_shift(traj, spec, &sched).map(|s| (s.c, s.residual)),
    };
    if let Some((c, residual)) = at {
        let ctx = CoupledPotentialContext::new(spec, sched, c)?.with_alpha(opts.alpha)?;
        report.a1 = bound_a1(traj, &ctx)
            .ok()
            .map(|value| A1Estimate { value, c, residual });
        if let Some(x) = traj.state(c, 0) {
            report.lemma_b1 = Some(lemma_b1_check(x, c, spec, &sched));
        }
    }
    Ok(report)
}

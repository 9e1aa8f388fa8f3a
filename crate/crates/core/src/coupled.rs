//! Potential of the coupled ensemble under a window configuration.
//!
//! For configuration `c` the potential sums, over `z ∈ [c − w + 1, c + W − 1]`,
//!
//! ```text
//! (R(1) − R(1 − x_z)) / R'(1) − x_z ρ(1 − x_z)
//!     − ε_z / L'(1) · L(1 − (1/w) Σ_{j=0}^{w−1} ρ(1 − x_{z+j}))
//! ```
//!
//! with the position-dependent channel `ε_z`. With that choice the partial
//! derivative in every in-window coordinate is `ρ'(1 − x_z)(x_z − f(z, x))`,
//! where `f` is the windowed DE update.

use crate::error::{Error, Result};
use crate::window::{f_value, read, CoupledSpec, ScheduleVariant, Trajectory, WindowSchedule};

/// Tolerance on the comparison in [`alpha_inequality_check`].
pub const ALPHA_CHECK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct CoupledPotentialContext<'a> {
    pub spec: &'a CoupledSpec,
    pub sched: WindowSchedule,
    pub c: usize,
    pub alpha: f64,
}

impl<'a> CoupledPotentialContext<'a> {
    /// Context for configuration `c` with `α = 1`.
    ///
    /// `c` may range over every configuration the extended schedule visits.
    pub fn new(spec: &'a CoupledSpec, sched: WindowSchedule, c: usize) -> Result<Self> {
        let last = ScheduleVariant::Extended.last_window(spec, &sched)?;
        if c == 0 || c > last {
            return Err(Error::InvalidParameter(format!(
                "window configuration {c} outside [1, {last}]"
            )));
        }
        Ok(Self {
            spec,
            sched,
            c,
            alpha: 1.0,
        })
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(1.0..=2.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in [1, 2], got {alpha}"
            )));
        }
        self.alpha = alpha;
        Ok(self)
    }

    /// In-window positions `c ..= c + W − 1`.
    fn window(&self) -> std::ops::RangeInclusive<usize> {
        self.sched.covers(self.c)
    }
}

/// Coupled potential of `x` (stored values, `z − 1` indexing).
pub fn coupled_potential(x: &[f64], ctx: &CoupledPotentialContext<'_>) -> f64 {
    let spec = ctx.spec;
    let ens = spec.ensemble();
    let w = spec.w() as isize;
    let r_one = ens.r().eval(1.0);
    let first = ctx.c as isize - w + 1;
    let last = (ctx.c + ctx.sched.window - 1) as isize;
    let mut total = 0.0;
    for z in first..=last {
        let xz = read(x, z);
        let mut inner = 0.0;
        for j in 0..w {
            inner += ens.check_erasure(read(x, z + j));
        }
        total += (r_one - ens.r().eval(1.0 - xz)) / ens.r_mean()
            - xz * ens.rho().eval(1.0 - xz)
            - spec.channel(z) / ens.l_mean() * ens.l().eval(inner / w as f64);
    }
    total
}

/// Gradient over the in-window coordinates `z = c ..= c + W − 1`.
pub fn coupled_gradient(x: &[f64], ctx: &CoupledPotentialContext<'_>) -> Vec<f64> {
    let ens = ctx.spec.ensemble();
    ctx.window()
        .map(|z| {
            let xz = read(x, z as isize);
            ens.rho_prime_at(xz) * (xz - f_value(z as isize, x, ctx.spec))
        })
        .collect()
}

/// First-order change `Σ_z ∂U/∂x_z · (y_z − x_z)` over the window.
pub fn delta_u1(y: &[f64], x: &[f64], ctx: &CoupledPotentialContext<'_>) -> f64 {
    coupled_gradient(x, ctx)
        .iter()
        .zip(ctx.window())
        .map(|(g, z)| g * (read(y, z as isize) - read(x, z as isize)))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaCheck {
    /// `α (U(y) − U(x))`.
    pub lhs: f64,
    /// `ΔU₁(y, x)`.
    pub rhs: f64,
    pub holds: bool,
}

/// Compares `α (U(y) − U(x))` with the first-order change `ΔU₁(y, x)`.
pub fn alpha_inequality_check(
    y: &[f64],
    x: &[f64],
    ctx: &CoupledPotentialContext<'_>,
) -> AlphaCheck {
    let lhs = ctx.alpha * (coupled_potential(y, ctx) - coupled_potential(x, ctx));
    let rhs = delta_u1(y, x, ctx);
    AlphaCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + ALPHA_CHECK_TOL,
    }
}

/// `(c, t, U(x^{(c,t)}; c))` for every recorded state.
pub fn potential_trace(
    traj: &Trajectory,
    spec: &CoupledSpec,
    sched: WindowSchedule,
) -> Result<Vec<(usize, usize, f64)>> {
    let mut rows = Vec::new();
    for (c, t, x) in traj.iter() {
        let ctx = CoupledPotentialContext::new(spec, sched, c)?;
        rows.push((c, t, coupled_potential(x, &ctx)));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::UncoupledEnsemble;

    fn spec() -> CoupledSpec {
        CoupledSpec::new(UncoupledEnsemble::regular(3, 6).unwrap(), 100, 3, 0.42).unwrap()
    }

    #[test]
    fn zero_vector_has_zero_potential() {
        let sp = spec();
        let ctx =
            CoupledPotentialContext::new(&sp, WindowSchedule::new(11, 6).unwrap(), 1).unwrap();
        assert_eq!(coupled_potential(&vec![0.0; 102], &ctx), 0.0);
    }

    #[test]
    fn constant_vector_collapses_to_scalar_potential() {
        let sp = spec();
        let ctx =
            CoupledPotentialContext::new(&sp, WindowSchedule::new(11, 6).unwrap(), 40).unwrap();
        for x in [0.1, 0.37, 0.9] {
            let u = coupled_potential(&vec![x; 102], &ctx);
            let expected = 13.0 * sp.ensemble().potential(x, 0.42);
            assert!((u - expected).abs() < 1e-12, "{u} vs {expected}");
        }
    }

    #[test]
    fn gradient_on_all_ones_interior() {
        let sp = spec();
        let ctx =
            CoupledPotentialContext::new(&sp, WindowSchedule::new(11, 6).unwrap(), 40).unwrap();
        let g = coupled_gradient(&vec![1.0; 102], &ctx);
        assert_eq!(g.len(), 11);
        // ρ'(0) = 0 for x^6
        assert!(g.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn alpha_bounds_and_identity_step() {
        let sp = spec();
        let ctx =
            CoupledPotentialContext::new(&sp, WindowSchedule::new(11, 6).unwrap(), 5).unwrap();
        assert!(ctx.with_alpha(0.5).is_err());
        assert!(ctx.with_alpha(2.5).is_err());
        let x = vec![0.3; 102];
        let check = alpha_inequality_check(&x, &x, &ctx.with_alpha(2.0).unwrap());
        assert_eq!((check.lhs, check.rhs, check.holds), (0.0, 0.0, true));
    }

    #[test]
    fn rejects_configuration_outside_schedule() {
        let sp = spec();
        let sched = WindowSchedule::new(11, 6).unwrap();
        assert!(CoupledPotentialContext::new(&sp, sched, 0).is_err());
        assert!(CoupledPotentialContext::new(&sp, sched, 92).is_ok());
        assert!(CoupledPotentialContext::new(&sp, sched, 93).is_err());
    }
}

//! Density evolution and the potential function of the uncoupled ensemble
//! LDPC(n, L, R) on the binary erasure channel.
//!
//! The DE recursion is `x ← ε λ(1 − ρ(1 − x))` started from `x = 1`. The
//! potential
//!
//! ```text
//! U(x; ε) = (1 − R(1 − x)) / R'(1) − x ρ(1 − x) − ε / L'(1) · L(1 − ρ(1 − x))
//! ```
//!
//! has `U'(x) = ρ'(1 − x) (x − ε λ(1 − ρ(1 − x)))`, so its stationary points
//! are exactly the DE fixed points.
//!
//! Every occurrence of the constant `1` in `1 − R(1 − x)` and `1 − ρ(1 − x)`
//! is evaluated as `R(1)` and `ρ(1)` respectively. The two agree to within the
//! normalisation tolerance, and the anchored form makes `x = 0` an exact zero
//! of `U`, `U'` and the DE map.

use crate::error::{Error, Result};
use crate::numeric::{bisect, bisect_predicate, golden_max};
use crate::poly::{DegreePolynomial, Perspective};

/// DE iterations below this value count as decoded when locating thresholds.
pub const DECODED_LIMIT: f64 = 1e-9;
pub const DEFAULT_DE_TOL: f64 = 1e-12;
pub const DEFAULT_DE_MAX_ITER: usize = 100_000;
pub const DEFAULT_GRID_N: usize = 10_000;
/// Bisection tolerance for critical points of the landscape.
pub const ROOT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct UncoupledEnsemble {
    l: DegreePolynomial,
    r: DegreePolynomial,
    lambda: DegreePolynomial,
    rho: DegreePolynomial,
    lambda_d1: DegreePolynomial,
    rho_d1: DegreePolynomial,
    rho_d2: DegreePolynomial,
    l_mean: f64,
    r_mean: f64,
    r_at_one: f64,
    rho_at_one: f64,
}

/// Result of iterating the scalar DE map from `x = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeRun {
    pub limit: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandscapeSample {
    pub x: f64,
    pub u: f64,
    pub u_prime: f64,
    pub u_double_prime: f64,
}

/// Sampled potential with its critical points.
///
/// `x_b < x_d` are the non-zero stationary points (unstable and stable DE
/// fixed points); `x_a < x_c0 < x_e` are inflection points, with `x_a` the
/// last one below `x_b`, `x_c0` the first one in `(x_b, x_d)` and `x_e` the
/// first one above `x_d`. `d` is `max |U''|` over `(0, x_d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialLandscape {
    pub epsilon: f64,
    pub x_a: Option<f64>,
    pub x_b: Option<f64>,
    pub x_c0: Option<f64>,
    pub x_d: Option<f64>,
    pub x_e: Option<f64>,
    pub d: Option<f64>,
    pub stationary_points: Vec<f64>,
    pub inflection_points: Vec<f64>,
    pub grid: Vec<LandscapeSample>,
}

impl PotentialLandscape {
    /// Names of the critical points that were not found.
    pub fn missing(&self) -> Vec<&'static str> {
        [
            ("x_a", self.x_a),
            ("x_b", self.x_b),
            ("x_c0", self.x_c0),
            ("x_d", self.x_d),
            ("x_e", self.x_e),
            ("D", self.d),
        ]
        .into_iter()
        .filter_map(|(name, v)| v.is_none().then_some(name))
        .collect()
    }
}

impl UncoupledEnsemble {
    /// Builds the ensemble from node-perspective distributions `L` and `R`.
    ///
    /// Degree-0 nodes are rejected.
    pub fn new(l: DegreePolynomial, r: DegreePolynomial) -> Result<Self> {
        for (name, p) in [("L", &l), ("R", &r)] {
            if p.perspective() != Perspective::Node {
                return Err(Error::InvalidPolynomial(format!(
                    "{name} must be a node-perspective distribution"
                )));
            }
            if p.coeffs()[0] != 0.0 {
                return Err(Error::InvalidPolynomial(format!(
                    "{name} has a degree-0 coefficient"
                )));
            }
        }
        let lambda = l.to_edge_perspective()?;
        let rho = r.to_edge_perspective()?;
        let lambda_d1 = lambda.derivative();
        let rho_d1 = rho.derivative();
        let rho_d2 = rho_d1.derivative();
        Ok(Self {
            l_mean: l.mean_degree(),
            r_mean: r.mean_degree(),
            r_at_one: r.eval(1.0),
            rho_at_one: rho.eval(1.0),
            l,
            r,
            lambda,
            rho,
            lambda_d1,
            rho_d1,
            rho_d2,
        })
    }

    /// The regular `(dv, dc)` ensemble `L = x^dv`, `R = x^dc`.
    pub fn regular(dv: usize, dc: usize) -> Result<Self> {
        Self::new(
            DegreePolynomial::monomial(dv),
            DegreePolynomial::monomial(dc),
        )
    }

    pub fn l(&self) -> &DegreePolynomial {
        &self.l
    }
    pub fn r(&self) -> &DegreePolynomial {
        &self.r
    }
    pub fn lambda(&self) -> &DegreePolynomial {
        &self.lambda
    }
    pub fn rho(&self) -> &DegreePolynomial {
        &self.rho
    }
    /// `L'(1)`.
    pub fn l_mean(&self) -> f64 {
        self.l_mean
    }
    /// `R'(1)`.
    pub fn r_mean(&self) -> f64 {
        self.r_mean
    }

    /// Erasure probability of a check-to-variable message when the incoming
    /// variable-to-check messages are erased with probability `x`:
    /// `1 − ρ(1 − x)`.
    #[inline]
    pub fn check_erasure(&self, x: f64) -> f64 {
        self.rho_at_one - self.rho.eval(1.0 - x)
    }

    /// `ρ'(1 − x)`.
    #[inline]
    pub fn rho_prime_at(&self, x: f64) -> f64 {
        self.rho_d1.eval(1.0 - x)
    }

    /// One DE iteration `ε λ(1 − ρ(1 − x))`.
    #[inline]
    pub fn de_step(&self, x: f64, epsilon: f64) -> f64 {
        epsilon * self.lambda.eval(self.check_erasure(x))
    }

    /// Iterates [`de_step`](Self::de_step) from `x = 1` until the step size
    /// drops below `tol` (or `x` hits the absorbing point 0).
    pub fn de_run(&self, epsilon: f64, tol: f64, max_iter: usize) -> DeRun {
        let mut x = 1.0;
        let mut last_step = f64::INFINITY;
        for it in 1..=max_iter {
            let next = self.de_step(x, epsilon);
            debug_assert!(next <= x, "DE sequence increased: {x} -> {next}");
            last_step = (x - next).abs();
            x = next;
            if last_step < tol || x == 0.0 {
                return DeRun {
                    limit: x,
                    iterations: it,
                    converged: true,
                };
            }
        }
        DeRun {
            limit: x,
            iterations: max_iter,
            converged: last_step < tol,
        }
    }

    fn decodes(&self, epsilon: f64) -> bool {
        self.de_run(epsilon, DEFAULT_DE_TOL, DEFAULT_DE_MAX_ITER)
            .limit
            < DECODED_LIMIT
    }

    /// Largest ε (to within `tol`) for which DE from `x = 1` reaches zero.
    pub fn bp_threshold(&self, tol: f64) -> Result<f64> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tol must be positive, got {tol}"
            )));
        }
        Ok(bisect_predicate(|e| self.decodes(e), 0.0, 1.0, tol))
    }

    /// `U(x; ε)`.
    pub fn potential(&self, x: f64, epsilon: f64) -> f64 {
        (self.r_at_one - self.r.eval(1.0 - x)) / self.r_mean
            - x * self.rho.eval(1.0 - x)
            - epsilon / self.l_mean * self.l.eval(self.check_erasure(x))
    }

    /// `U'(x; ε) = ρ'(1 − x) (x − ε λ(1 − ρ(1 − x)))`.
    pub fn potential_d1(&self, x: f64, epsilon: f64) -> f64 {
        self.rho_prime_at(x) * (x - self.de_step(x, epsilon))
    }

    /// Analytic `U''(x; ε)`.
    pub fn potential_d2(&self, x: f64, epsilon: f64) -> f64 {
        let s = self.check_erasure(x);
        let rp = self.rho_d1.eval(1.0 - x);
        -self.rho_d2.eval(1.0 - x) * (x - epsilon * self.lambda.eval(s))
            + rp * (1.0 - epsilon * self.lambda_d1.eval(s) * rp)
    }

    /// Scans `[0, 1]` on `grid_n` points, brackets and refines the zeros of
    /// `U'` and `U''`, and computes the curvature bound `D`.
    pub fn landscape(&self, epsilon: f64, grid_n: usize) -> Result<PotentialLandscape> {
        if grid_n < 1000 {
            return Err(Error::InvalidParameter(format!(
                "grid_n must be at least 1000, got {grid_n}"
            )));
        }
        let step = 1.0 / (grid_n - 1) as f64;
        let grid: Vec<LandscapeSample> = (0..grid_n)
            .map(|i| {
                let x = if i + 1 == grid_n {
                    1.0
                } else {
                    i as f64 * step
                };
                LandscapeSample {
                    x,
                    u: self.potential(x, epsilon),
                    u_prime: self.potential_d1(x, epsilon),
                    u_double_prime: self.potential_d2(x, epsilon),
                }
            })
            .collect();

        // U' vanishes at both ends (x = 0 always, x = 1 whenever ρ'(0) = 0),
        // so only interior samples are scanned.
        let interior = &grid[1..grid_n - 1];
        let stationary_points =
            sign_change_roots(interior, |s| s.u_prime, |x| self.potential_d1(x, epsilon));
        let inflection_points = sign_change_roots(
            interior,
            |s| s.u_double_prime,
            |x| self.potential_d2(x, epsilon),
        );

        let (x_b, x_d) = match stationary_points.as_slice() {
            [] => (None, None),
            [only] => (Some(*only), None),
            [first, .., last] => (Some(*first), Some(*last)),
        };
        let (x_a, x_c0, x_e) = match (x_b, x_d) {
            (Some(b), Some(d)) => (
                inflection_points.iter().rev().find(|&&x| x < b).copied(),
                inflection_points.iter().find(|&&x| x > b && x < d).copied(),
                inflection_points.iter().find(|&&x| x > d).copied(),
            ),
            _ => {
                let mut it = inflection_points.iter().copied();
                (it.next(), it.next(), it.next())
            }
        };
        let d = x_d.map(|xd| self.curvature_bound(epsilon, &grid, xd));

        Ok(PotentialLandscape {
            epsilon,
            x_a,
            x_b,
            x_c0,
            x_d,
            x_e,
            d,
            stationary_points,
            inflection_points,
            grid,
        })
    }

    fn curvature_bound(&self, epsilon: f64, grid: &[LandscapeSample], x_d: f64) -> f64 {
        let abs_d2 = |x: f64| self.potential_d2(x, epsilon).abs();
        let inside: Vec<&LandscapeSample> =
            grid.iter().filter(|s| s.x > 0.0 && s.x < x_d).collect();
        let Some((best, sample)) = inside.iter().enumerate().max_by(|a, b| {
            a.1.u_double_prime
                .abs()
                .total_cmp(&b.1.u_double_prime.abs())
        }) else {
            return abs_d2(0.5 * x_d);
        };
        let grid_max = sample.u_double_prime.abs();
        let lo = if best == 0 {
            f64::MIN_POSITIVE
        } else {
            inside[best - 1].x
        };
        let hi = inside.get(best + 1).map_or(x_d, |s| s.x);
        let (_, refined) = golden_max(abs_d2, lo, hi, 1e-12);
        refined.max(grid_max)
    }

    /// ε at which `U(x_d(ε); ε)` changes sign, with `x_d(ε)` the DE limit
    /// from `x = 1`.
    pub fn map_threshold(&self, tol: f64) -> Result<f64> {
        if tol.is_nan() || tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tol must be positive, got {tol}"
            )));
        }
        let lo = self.bp_threshold(tol)? + 2.0 * tol;
        let hi = 1.0;
        let fixed_point = |e: f64| self.de_run(e, DEFAULT_DE_TOL, DEFAULT_DE_MAX_ITER).limit;
        let xd_lo = fixed_point(lo);
        if xd_lo < DECODED_LIMIT {
            return Err(Error::MissingFixedPoint { lo, hi });
        }
        let g = |e: f64| {
            let xd = fixed_point(e);
            self.potential(xd, e)
        };
        if g(lo) <= 0.0 || g(hi) >= 0.0 {
            return Err(Error::MissingFixedPoint { lo, hi });
        }
        Ok(bisect(g, lo, hi, tol))
    }
}

/// Zeros of `value` bracketed by strict sign changes between consecutive
/// samples, refined by bisection on `f`.
fn sign_change_roots(
    samples: &[LandscapeSample],
    value: impl Fn(&LandscapeSample) -> f64,
    f: impl Fn(f64) -> f64,
) -> Vec<f64> {
    let mut roots = Vec::new();
    for pair in samples.windows(2) {
        let (a, b) = (value(&pair[0]), value(&pair[1]));
        if a == 0.0 {
            roots.push(pair[0].x);
        } else if a * b < 0.0 {
            roots.push(bisect(&f, pair[0].x, pair[1].x, ROOT_TOL));
        }
    }
    roots
}

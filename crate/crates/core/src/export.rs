//! CSV writers. Floats use 17 significant digits so values round-trip
//! exactly; absent values are empty fields.

use std::io::{self, Write};

use crate::scalar::PotentialLandscape;
use crate::speed::SpeedReport;
use crate::window::Trajectory;

pub const LANDSCAPE_HEADER: &str = "x,U,U_prime,U_double_prime";
pub const CRITICAL_POINTS_HEADER: &str = "point,value";
pub const TRAJECTORY_HEADER: &str = "c,t,z,x";
pub const POTENTIAL_TRACE_HEADER: &str = "c,t,U";
pub const SPEED_HEADER: &str =
    "epsilon,W,T_min,v,c_prime,A1,th2_finite,th2_infinite,alpha,success_policy";

/// `{:.16e}`: 17 significant digits.
pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt_float(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

pub fn write_landscape<W: Write>(out: &mut W, landscape: &PotentialLandscape) -> io::Result<()> {
    writeln!(out, "{LANDSCAPE_HEADER}")?;
    for s in &landscape.grid {
        writeln!(
            out,
            "{},{},{},{}",
            float(s.x),
            float(s.u),
            float(s.u_prime),
            float(s.u_double_prime)
        )?;
    }
    Ok(())
}

/// Critical points in the order `x_a, x_b, x_c0, x_d, x_e, D`.
pub fn write_critical_points<W: Write>(
    out: &mut W,
    landscape: &PotentialLandscape,
) -> io::Result<()> {
    writeln!(out, "{CRITICAL_POINTS_HEADER}")?;
    for (name, v) in [
        ("x_a", landscape.x_a),
        ("x_b", landscape.x_b),
        ("x_c0", landscape.x_c0),
        ("x_d", landscape.x_d),
        ("x_e", landscape.x_e),
        ("D", landscape.d),
    ] {
        writeln!(out, "{name},{}", opt_float(v))?;
    }
    Ok(())
}

/// One row per recorded `(c, t, z)` with `z = 1 ..= N + w − 1`.
pub fn write_trajectory<W: Write>(out: &mut W, traj: &Trajectory) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for (c, t, x) in traj.iter() {
        for (i, v) in x.iter().enumerate() {
            writeln!(out, "{c},{t},{},{}", i + 1, float(*v))?;
        }
    }
    Ok(())
}

pub fn write_potential_trace<W: Write>(
    out: &mut W,
    rows: &[(usize, usize, f64)],
) -> io::Result<()> {
    writeln!(out, "{POTENTIAL_TRACE_HEADER}")?;
    for &(c, t, u) in rows {
        writeln!(out, "{c},{t},{}", float(u))?;
    }
    Ok(())
}

pub fn speed_row(r: &SpeedReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        float(r.epsilon),
        r.window,
        r.t_min.map(|t| t.to_string()).unwrap_or_default(),
        opt_float(r.v()),
        r.c_prime().map(|c| c.to_string()).unwrap_or_default(),
        opt_float(r.a1.map(|a| a.value)),
        opt_float(r.th2.and_then(|b| b.finite_w)),
        opt_float(r.th2.and_then(|b| b.infinite_w)),
        float(r.alpha),
        r.success_policy,
    )
}

pub fn write_speed<W: Write>(out: &mut W, reports: &[SpeedReport]) -> io::Result<()> {
    writeln!(out, "{SPEED_HEADER}")?;
    for r in reports {
        writeln!(out, "{}", speed_row(r))?;
    }
    Ok(())
}

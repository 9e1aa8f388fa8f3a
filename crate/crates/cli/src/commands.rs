//! Subcommand implementations. Every command writes its CSV files into the
//! output directory and prints a short human-readable summary.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use rayon::prelude::*;

use scwd_core::coupled::potential_trace;
use scwd_core::export::{self, float, opt_float};
use scwd_core::speed::{
    best_shift, detect_steady_state, lemma_b1_check, measure_speed, measure_speed_over,
    DEFAULT_STEADY_TOL,
};
use scwd_core::window::{run_success, run_wd};
use scwd_core::{CoupledSpec, RecordPolicy, SpeedOptions, SpeedReport, WindowSchedule};

use crate::config::{Iterations, NamedEnsemble, RunConfig, THRESHOLD_TOL};

pub const STEADY_HEADER: &str =
    "c_prime,shift_residual,best_c,best_residual,decoded,success_metric,lemma_b1_min_margin";
pub const SPEED_DIAGNOSTICS_HEADER: &str =
    "epsilon,W,success_metric,steady_residual,a1_window,a1_shift_residual,b1,b2,lemma_b1_min_margin,left_neighbour_max";
pub const THRESHOLDS_HEADER: &str = "ensemble,L,R,bp_threshold,map_threshold";

fn write_file(
    path: &Path,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    body(&mut w)
        .and_then(|_| w.flush())
        .with_context(|| format!("cannot write {}", path.display()))
}

fn opt_usize(v: Option<usize>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn fmt4(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), |v| format!("{v:.4}"))
}

pub fn landscape(cfg: &RunConfig, out: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut tasks = Vec::new();
    for ens in cfg.ensembles()? {
        for eps in cfg.epsilons(&ens.ensemble)? {
            tasks.push((ens.clone(), eps));
        }
    }
    let results: Vec<_> = tasks
        .par_iter()
        .map(|(ens, eps)| ens.ensemble.landscape(*eps, cfg.grid_n).map(|l| (ens, l)))
        .collect::<Result<_, _>>()?;
    let mut written = Vec::new();
    for (ens, l) in results {
        let grid = out.join(format!("landscape-{}-{}.csv", ens.name, l.epsilon));
        let side = out.join(format!("critical-{}-{}.csv", ens.name, l.epsilon));
        write_file(&grid, |w| export::write_landscape(w, &l))?;
        write_file(&side, |w| export::write_critical_points(w, &l))?;
        println!(
            "{} eps={}: x_a={} x_b={} x_c0={} x_d={} x_e={} D={}",
            ens.name,
            l.epsilon,
            fmt4(l.x_a),
            fmt4(l.x_b),
            fmt4(l.x_c0),
            fmt4(l.x_d),
            fmt4(l.x_e),
            fmt4(l.d)
        );
        written.extend([grid, side]);
    }
    Ok(written)
}

pub fn wave(cfg: &RunConfig, out: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let (n, w) = cfg.require_chain()?;
    let t = match cfg.iterations()? {
        Some(Iterations::Fixed(t)) => t,
        Some(Iterations::Auto) => bail!("wave needs an explicit T"),
        None => bail!("wave needs T"),
    };
    let windows = cfg.windows();
    if windows.is_empty() {
        bail!("wave needs W");
    }
    let opts = cfg.run_options()?;
    let policy = cfg.success_policy();
    let mut tasks = Vec::new();
    for ens in cfg.ensembles()? {
        for eps in cfg.epsilons(&ens.ensemble)? {
            for &big_w in &windows {
                tasks.push((ens.clone(), eps, big_w));
            }
        }
    }
    let results: Vec<_> = tasks
        .par_iter()
        .map(|(ens, eps, big_w)| -> anyhow::Result<_> {
            let spec = CoupledSpec::new(ens.ensemble.clone(), n, w, *eps)?;
            let sched = WindowSchedule::new(*big_w, t)?;
            let run = run_wd(&spec, &sched, &opts)?;
            Ok((ens, spec, sched, run))
        })
        .collect::<anyhow::Result<_>>()?;

    let mut written = Vec::new();
    for (ens, spec, sched, run) in results {
        let tag = format!("{}-{}-W{}-T{}", ens.name, spec.epsilon(), sched.window, t);
        let verdict = run_success(&run, &spec, &policy);
        let mut steady = None;
        let mut best = None;
        let mut lemma = None;
        if let Some(traj) = &run.trajectory {
            let path = out.join(format!("trajectory-{tag}.csv"));
            if let RecordPolicy::FinalOnly = opts.record {
                let fin = &run.final_state;
                write_file(&path, |wr| {
                    writeln!(wr, "{}", export::TRAJECTORY_HEADER)?;
                    for (i, v) in fin.values().iter().enumerate() {
                        writeln!(
                            wr,
                            "{},{},{},{}",
                            fin.window(),
                            fin.iteration(),
                            i + 1,
                            float(*v)
                        )?;
                    }
                    Ok(())
                })?;
            } else {
                write_file(&path, |wr| export::write_trajectory(wr, traj))?;
                let trace = potential_trace(traj, &spec, sched)?;
                let tpath = out.join(format!("potential-{tag}.csv"));
                write_file(&tpath, |wr| export::write_potential_trace(wr, &trace))?;
                written.push(tpath);
                steady = detect_steady_state(traj, &spec, &sched, DEFAULT_STEADY_TOL);
                best = best_shift(traj, &spec, &sched);
                lemma = steady.and_then(|s| {
                    traj.state(s.c_prime, 0)
                        .map(|x| lemma_b1_check(x, s.c_prime, &spec, &sched))
                });
            }
            written.push(path);
        }
        let spath = out.join(format!("steady-{tag}.csv"));
        write_file(&spath, |wr| {
            writeln!(wr, "{STEADY_HEADER}")?;
            writeln!(
                wr,
                "{},{},{},{},{},{},{}",
                opt_usize(steady.map(|s| s.c_prime)),
                opt_float(steady.map(|s| s.residual)),
                opt_usize(best.map(|b| b.c)),
                opt_float(best.map(|b| b.residual)),
                verdict.success,
                float(verdict.metric(&policy)),
                opt_float(lemma.map(|l| l.min_margin)),
            )
        })?;
        written.push(spath);
        println!(
            "{tag}: c'={} residual={} best_c={} best_residual={} decoded={} metric={:.3e}",
            opt_usize(steady.map(|s| s.c_prime)),
            steady.map_or("-".into(), |s| format!("{:.3e}", s.residual)),
            opt_usize(best.map(|b| b.c)),
            best.map_or("-".into(), |b| format!("{:.3e}", b.residual)),
            verdict.success,
            verdict.metric(&policy),
        );
    }
    Ok(written)
}

/// Speed reports for one ensemble, sorted by `(ε, W)`.
pub fn speed_reports(cfg: &RunConfig, ens: &NamedEnsemble) -> anyhow::Result<Vec<SpeedReport>> {
    let (n, w) = cfg.require_chain()?;
    let windows = cfg.windows();
    if windows.is_empty() {
        bail!("speed needs W");
    }
    let iterations = cfg.iterations()?.unwrap_or(Iterations::Auto);
    let opts = SpeedOptions {
        run: cfg.run_options()?.recording(RecordPolicy::None),
        success: cfg.success_policy(),
        alpha: cfg.alpha,
        steady_tol: DEFAULT_STEADY_TOL,
        th2: cfg.th2_options(),
        grid_n: cfg.grid_n,
        bounds: cfg.bounds.enabled,
    };
    let mut tasks = Vec::new();
    for eps in cfg.epsilons(&ens.ensemble)? {
        for &big_w in &windows {
            tasks.push((eps, big_w));
        }
    }
    let mut reports: Vec<SpeedReport> = tasks
        .par_iter()
        .map(|&(eps, big_w)| -> anyhow::Result<SpeedReport> {
            let spec = CoupledSpec::new(ens.ensemble.clone(), n, w, eps)?;
            Ok(match iterations {
                Iterations::Auto => measure_speed(&spec, big_w, cfg.t_max, &opts)?,
                Iterations::Fixed(t) => measure_speed_over(&spec, big_w, t..=t, &opts)?,
            })
        })
        .collect::<anyhow::Result<_>>()?;
    reports.sort_by(|a, b| {
        a.epsilon
            .total_cmp(&b.epsilon)
            .then(a.window.cmp(&b.window))
    });
    Ok(reports)
}

pub fn speed(cfg: &RunConfig, out: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for ens in cfg.ensembles()? {
        let reports = speed_reports(cfg, &ens)?;
        let path = out.join(format!("speed-{}.csv", ens.name));
        write_file(&path, |w| export::write_speed(w, &reports))?;
        let dpath = out.join(format!("speed-{}-diagnostics.csv", ens.name));
        write_file(&dpath, |w| {
            writeln!(w, "{SPEED_DIAGNOSTICS_HEADER}")?;
            for r in &reports {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{}",
                    float(r.epsilon),
                    r.window,
                    float(r.metric),
                    opt_float(r.steady.map(|s| s.residual)),
                    opt_usize(r.a1.map(|a| a.c)),
                    opt_float(r.a1.map(|a| a.residual)),
                    opt_float(r.th2.map(|b| b.b1)),
                    opt_float(r.th2.map(|b| b.b2)),
                    opt_float(r.lemma_b1.map(|l| l.min_margin)),
                    opt_float(r.left_neighbour),
                )?;
            }
            Ok(())
        })?;
        println!("{}:", ens.name);
        println!(
            "  {:>7} {:>3} {:>6} {:>7} {:>4} {:>7} {:>8}",
            "eps", "W", "T_min", "v", "c'", "A1", "th2"
        );
        for r in &reports {
            println!(
                "  {:>7.4} {:>3} {:>6} {:>7} {:>4} {:>7} {:>8}",
                r.epsilon,
                r.window,
                r.t_min
                    .map_or_else(|| format!(">{}", r.t_max), |t| t.to_string()),
                fmt4(r.v()),
                r.c_prime().map_or("-".into(), |c| c.to_string()),
                fmt4(r.a1.map(|a| a.value)),
                fmt4(r.th2.and_then(|b| b.finite_w)),
            );
        }
        written.extend([path, dpath]);
    }
    Ok(written)
}

pub fn thresholds(cfg: &RunConfig, out: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let ensembles = cfg.ensembles()?;
    let rows: Vec<_> = ensembles
        .par_iter()
        .map(|e| -> anyhow::Result<_> {
            let bp = e.ensemble.bp_threshold(THRESHOLD_TOL)?;
            // ensembles without a jump to a stable non-zero fixed point have no MAP threshold
            let map = e.ensemble.map_threshold(THRESHOLD_TOL).ok();
            Ok((e, bp, map))
        })
        .collect::<anyhow::Result<_>>()?;
    let path = out.join("thresholds.csv");
    write_file(&path, |w| {
        writeln!(w, "{THRESHOLDS_HEADER}")?;
        for (e, bp, map) in &rows {
            writeln!(
                w,
                "{},{},{},{},{}",
                e.name,
                e.ensemble.l(),
                e.ensemble.r(),
                float(*bp),
                opt_float(*map)
            )?;
        }
        Ok(())
    })?;
    for (e, bp, map) in &rows {
        println!(
            "{}: eps_BP = {bp:.6}, eps_MAP = {}",
            e.name,
            map.map_or("none".into(), |m| format!("{m:.6}"))
        );
    }
    Ok(vec![path])
}

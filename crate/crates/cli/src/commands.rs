use std::fs;
use std::path::{Path, PathBuf};

use convec_core::annulus::{steady_solve, AnnulusParams, BaseState, Resolution, SteadyOptions};
use convec_core::checks::{run_all, CheckOutcome};
use convec_core::config::{RunConfig, SimulationConfig, SIMULATION_KEYS};
use convec_core::dynamics::{simulate as run_simulation, OBState};
use convec_core::energy::energy_identity_residual;
use convec_core::stability::{layer_profile, maximize_F, solve_eig, solve_eig0, StabilityReport};
use convec_core::subspace::{mean_values, SubspaceSplit};
use convec_core::{Error, Result};
use rayon::prelude::*;
use serde_json::json;

use crate::output::{csv_err, csv_writer, ensure_dir, num, opt, write_json};

const THREADS_ENV: &str = "CONVEC_SYM_THREADS";

/// Caps the global rayon pool when `CONVEC_SYM_THREADS` is set.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("{THREADS_ENV} must be a positive integer, got `{value}`")))?;
    // A pool that is already initialized keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

pub fn simulate(config: &Path, output_dir: Option<PathBuf>) -> Result<bool> {
    let cfg = RunConfig::load(config, SIMULATION_KEYS)?;
    let sim = SimulationConfig::from_config(&cfg)?;
    let base_dir = config.parent().unwrap_or(Path::new("."));
    let initial = sim.initial_state(base_dir)?;
    let out = ensure_dir(&output_dir.unwrap_or_else(|| PathBuf::from(&sim.output_dir)))?;

    let mut traj = run_simulation(&initial, &sim.params, sim.sample_every)?;
    let sampled_evenly = traj.records.len() >= 3 && {
        let h = traj.records[1].t - traj.records[0].t;
        traj.records.windows(2).all(|w| ((w[1].t - w[0].t) - h).abs() <= 1e-9 * h)
    };
    if sampled_evenly {
        energy_identity_residual(&mut traj.records)?;
    } else if traj.records.len() >= 4 {
        // The last interval may be short; leave it out of the identity check.
        let n = traj.records.len() - 1;
        energy_identity_residual(&mut traj.records[..n])?;
    }

    let mut w = csv_writer(&out.join("diagnostics.csv"))?;
    w.write_record(["t", "E", "grad_u_sq", "grad_sigma_sq", "F_value", "rhs", "residual", "s_energy"]).map_err(csv_err)?;
    for r in &traj.records {
        w.write_record([
            num(r.t),
            num(r.energy),
            num(r.grad_u_sq),
            num(r.grad_sigma_sq),
            num(r.f_value),
            num(r.rhs),
            opt(r.residual),
            num(r.s_energy),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;

    let snaps = ensure_dir(&out.join("snapshots"))?;
    for (i, s) in traj.states.iter().enumerate() {
        write_json(&snaps.join(format!("state_{i:05}.json")), &s.to_snapshot())?;
    }
    if let Some(last) = traj.last() {
        write_json(&out.join("final.json"), &last.to_snapshot())?;
    }
    let p = &sim.params;
    let summary = json!({
        "pr": p.pr, "ra": p.ra, "dt": p.dt, "t_end": p.t_end,
        "m_max": p.m_max, "n_max": p.n_max,
        "samples": traj.states.len(),
        "max_residual": traj.records.iter().filter_map(|r| r.residual).fold(0.0, f64::max),
    });
    write_json(&out.join("summary.json"), &summary)?;
    println!("simulate: {} samples written to {}", traj.states.len(), out.display());
    Ok(true)
}

pub fn decompose(input: &Path, pr: f64, ra: f64, t_end: f64, samples: usize, nz: usize, output_dir: &Path) -> Result<bool> {
    if !(pr > 0.0) || !ra.is_finite() {
        return Err(Error::InvalidInput("need Pr > 0 and finite Ra".into()));
    }
    if !(t_end >= 0.0) || nz < 2 {
        return Err(Error::InvalidInput("need t_end >= 0 and nz >= 2".into()));
    }
    let state = OBState::from_json(&read_text(input)?)?;
    let out = ensure_dir(output_dir)?;
    let split = SubspaceSplit::of(&state, pr, ra);
    let s_state = split.s_part.to_state(state.m_max(), state.n_max())?;
    write_json(&out.join("s_part.json"), &s_state.to_snapshot())?;
    write_json(&out.join("f_part.json"), &split.f_part.to_snapshot())?;

    let steps = if t_end > 0.0 { samples.max(1) } else { 0 };
    let mut w = csv_writer(&out.join("profiles.csv"))?;
    w.write_record(["t", "z", "mean_vx", "mean_tau"]).map_err(csv_err)?;
    for k in 0..=steps {
        let dt = if steps == 0 { 0.0 } else { t_end * k as f64 / steps as f64 };
        let prof = mean_values(&state, state.t + dt, pr, ra)?;
        for j in 0..nz {
            let z = j as f64 / (nz - 1) as f64;
            w.write_record([num(state.t + dt), num(z), num(prof.eval_a(z)), num(prof.eval_t(z))]).map_err(csv_err)?;
        }
    }
    w.flush()?;
    println!("decompose: wrote s_part.json, f_part.json, profiles.csv to {}", out.display());
    Ok(true)
}

fn solve_base(pr: f64, ra: f64, d: f64, k: usize, nr: usize) -> Result<BaseState> {
    let params = AnnulusParams::new(pr, ra, d)?;
    let res = Resolution::new(k, nr)?;
    steady_solve(&params, res, SteadyOptions::default())
}

const STEADY_HEADER: [&str; 5] = ["Ra", "grad_v_norm", "grad_tau_norm", "residual", "picard_iters"];

fn steady_row(b: &BaseState) -> Vec<String> {
    vec![num(b.params.ra), num(b.grad_v_norm), num(b.grad_tau_norm), num(b.residual), b.picard_iters.to_string()]
}

pub fn annulus_steady(pr: f64, ra: f64, d: f64, k: usize, nr: usize, output_dir: &Path) -> Result<bool> {
    let base = solve_base(pr, ra, d, k, nr)?;
    let out = ensure_dir(output_dir)?;
    write_json(&out.join("base_state.json"), &base)?;
    let mut w = csv_writer(&out.join("steady.csv"))?;
    w.write_record(STEADY_HEADER).map_err(csv_err)?;
    w.write_record(steady_row(&base)).map_err(csv_err)?;
    w.flush()?;
    println!(
        "steady: Ra = {ra}, |grad v0| = {:.6e}, |grad tau0| = {:.6e}, residual = {:.2e} after {} iterations",
        base.grad_v_norm, base.grad_tau_norm, base.residual, base.picard_iters
    );
    Ok(true)
}

fn print_report(r: &StabilityReport) {
    println!(
        "stability: M = {:.8} (direct {:.8}, eigen {:.8}), verdict {}, critical mode {}",
        r.m,
        r.m_direct,
        r.m_eigen,
        serde_json::to_value(r.verdict).map(|v| v.as_str().unwrap_or_default().to_string()).unwrap_or_default(),
        r.label.as_str()
    );
}

pub fn annulus_stability(pr: f64, ra: f64, d: f64, k: usize, nr: usize, count: usize, output_dir: &Path) -> Result<bool> {
    let base = solve_base(pr, ra, d, k, nr)?;
    let report = maximize_F(&base)?;
    let spectrum = solve_eig(&base, count)?;
    let out = ensure_dir(output_dir)?;
    write_json(&out.join("base_state.json"), &base)?;
    write_json(&out.join("report.json"), &report)?;
    let mut w = csv_writer(&out.join("spectrum.csv"))?;
    w.write_record(["index", "lambda", "symmetry_label", "residual"]).map_err(csv_err)?;
    for (i, ((l, s), r)) in spectrum.lambdas.iter().zip(&spectrum.symmetry_labels).zip(&spectrum.residuals).enumerate() {
        w.write_record([i.to_string(), num(*l), s.as_str().to_string(), num(*r)]).map_err(csv_err)?;
    }
    w.flush()?;
    print_report(&report);
    Ok(true)
}

pub fn layer_eig0(nr: usize, kmin: f64, kmax: f64, count: usize, output_dir: &Path) -> Result<bool> {
    let sol = solve_eig0(nr, kmin, kmax, count)?;
    let out = ensure_dir(output_dir)?;
    write_json(&out.join("eig0.json"), &sol)?;
    let mut w = csv_writer(&out.join("spectrum.csv"))?;
    w.write_record(["index", "lambda", "lambda_sq"]).map_err(csv_err)?;
    for (i, l) in sol.lambdas.iter().enumerate() {
        w.write_record([i.to_string(), num(*l), num(l * l)]).map_err(csv_err)?;
    }
    w.flush()?;
    let mut w = csv_writer(&out.join("profile.csv"))?;
    w.write_record(["z", "f", "g"]).map_err(csv_err)?;
    for (z, f, g) in layer_profile(&sol, 101) {
        w.write_record([num(z), num(f), num(g)]).map_err(csv_err)?;
    }
    w.flush()?;
    println!(
        "eig0: lambda_c = {:.8}, lambda_c^2 = {:.6}, wavenumber = {:.6}, mode {}",
        sol.lambda_c,
        sol.lambda_c * sol.lambda_c,
        sol.wavenumber,
        sol.label.as_str()
    );
    Ok(true)
}

struct SweepPoint {
    base: BaseState,
    report: Option<StabilityReport>,
}

pub fn sweep(pr: f64, d: f64, k: usize, nr: usize, ras: &[f64], stability: bool, output_dir: &Path) -> Result<bool> {
    let out = ensure_dir(output_dir)?;
    let points: Vec<Result<SweepPoint>> = ras
        .par_iter()
        .map(|&ra| {
            let base = solve_base(pr, ra, d, k, nr)?;
            let report = if stability { Some(maximize_F(&base)?) } else { None };
            let dir = ensure_dir(&out.join(format!("ra_{ra}")))?;
            write_json(&dir.join("base_state.json"), &base)?;
            if let Some(r) = &report {
                write_json(&dir.join("report.json"), r)?;
            }
            Ok(SweepPoint { base, report })
        })
        .collect();
    let points: Vec<SweepPoint> = points.into_iter().collect::<Result<_>>()?;
    let mut w = csv_writer(&out.join("sweep.csv"))?;
    let mut header: Vec<&str> = STEADY_HEADER.to_vec();
    if stability {
        header.extend(["M", "verdict", "label"]);
    }
    w.write_record(&header).map_err(csv_err)?;
    for p in &points {
        let mut row = steady_row(&p.base);
        if let Some(r) = &p.report {
            let verdict = serde_json::to_value(r.verdict)?;
            row.extend([num(r.m), verdict.as_str().unwrap_or_default().to_string(), r.label.as_str().to_string()]);
        }
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    println!("sweep: {} points written to {}", points.len(), out.display());
    Ok(true)
}

fn print_table(rows: &[CheckOutcome]) {
    println!("{:>3}  {:<30} {:<6} {:>8}  detail", "#", "criterion", "result", "seconds");
    for r in rows {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{:>3}  {:<30} {:<6} {:>8.2}  {}", r.id, r.name, status, r.seconds, r.detail);
    }
    let passed = rows.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", rows.len());
}

pub fn repro(quick: bool, output_dir: Option<&Path>) -> Result<bool> {
    let rows = run_all(quick);
    print_table(&rows);
    if let Some(dir) = output_dir {
        let out = ensure_dir(dir)?;
        write_json(&out.join("repro.json"), &rows)?;
    }
    Ok(rows.iter().all(|r| r.passed))
}

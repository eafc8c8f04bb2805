//! One function per subcommand. Each writes CSV tables with sidecars into
//! the output directory and returns the lines to print.

use serde_json::json;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::config::*;
use crate::error::CliError;
use crate::io::{self, num, Sidecar, Table};
use crate::pool;
use gzscar_core::bogoliubov::{self, PhaseClass, Rates, UnitCell, WindowSide};
use gzscar_core::ed_oracle;
use gzscar_core::lattice_classical::{self, LyapunovConfig};
use gzscar_core::rotframe;
use gzscar_core::scars::{self, ScarParams, XyzCouplings};
use gzscar_core::spinwave;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    /// `false` turns into exit code 1.
    pub pass: bool,
    pub files: Vec<PathBuf>,
    pub report: Vec<String>,
}

type Res<T> = Result<T, CliError>;

pub fn run(cfg: &RunConfig, out: &Path) -> Res<Outcome> {
    if let RunConfig::Replay(r) = cfg {
        let side = io::read_sidecar(&r.from)?;
        return run(&side.config, out);
    }
    io::ensure_dir(out)?;
    match cfg {
        RunConfig::ScarVerify(c) => scar_verify(cfg, c, out),
        RunConfig::Dispersion(c) => dispersion(cfg, c, out),
        RunConfig::ContrastSw(c) => contrast_sw(cfg, c, out),
        RunConfig::ContrastEd(c) => contrast_ed(cfg, c, out),
        RunConfig::LlEvolve(c) => ll_evolve(cfg, c, out),
        RunConfig::PhaseScan(c) => phase_scan(cfg, c, out),
        RunConfig::Rates(c) => rates(cfg, c, out),
        RunConfig::Replay(_) => unreachable!(),
    }
}

fn emit(cfg: &RunConfig, out: &Path, stem: &str, table: &Table, summary: serde_json::Value) -> Res<Vec<PathBuf>> {
    let csv = out.join(format!("{stem}.csv"));
    io::write_csv(&csv, table)?;
    let side = io::sidecar_path(&csv);
    io::write_sidecar(&side, &Sidecar::new(cfg, &csv, summary))?;
    Ok(vec![csv, side])
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn require<T: Copy>(v: Option<T>, flag: &str, family: &str) -> Res<T> {
    v.ok_or_else(|| usage(format!("--{flag} is required for family {family}")))
}

fn ring_params(r: &Ring, two_s: u32) -> Res<ScarParams> {
    Ok(ScarParams::commensurate(r.kappa, r.m, r.l, r.gamma, r.phi, two_s)?)
}

fn couplings(p: &ScarParams, c: &Perturbation) -> Res<XyzCouplings> {
    let mut j = scars::parent_couplings(p.kappa, p.q)?;
    if let Some(x) = c.jx {
        j.jx = x;
    }
    if let Some(z) = c.jz {
        j.jz = z;
    }
    Ok(j.perturbed(c.djx, c.djz))
}

fn scar_verify(cfg: &RunConfig, c: &ScarVerify, out: &Path) -> Res<Outcome> {
    let p = ring_params(&c.ring, c.two_s)?;
    let j = couplings(&p, &c.couplings)?;
    let tex = scars::scar_texture(&p);
    let (r1, r2) = scars::gz_condition_residuals(&tex, &j)?;
    let mut t = Table::new(&["site", "omega_x", "omega_y", "omega_z", "r1", "r2"]);
    let mut report = Vec::new();
    for (i, w) in tex.omegas.iter().enumerate() {
        t.push(vec![i.to_string(), num(w[0]), num(w[1]), num(w[2]), num(r1[i]), num(r2[i])]);
        report.push(format!("site {i}: r1 = {:.3e}, r2 = {:.3e}", r1[i], r2[i]));
    }
    let gz = r1.iter().chain(&r2).fold(0.0f64, |m, r| m.max(*r));
    let dim = (c.two_s as f64 + 1.0).powi(p.l as i32);
    let (exact, energy) = if dim <= ed_oracle::DEFAULT_DIM_CAP as f64 {
        let res = ed_oracle::eigenstate_residual_with(&p, &j)?;
        let psi = ed_oracle::product_state(&tex, c.two_s, ed_oracle::DEFAULT_DIM_CAP)?;
        let h = ed_oracle::build_hamiltonian(&j, c.two_s, p.l, ed_oracle::DEFAULT_DIM_CAP)?;
        report.push(format!("exact residual: {res:.3e}"));
        (Some(res), Some(h.expectation(&psi) / p.l as f64))
    } else {
        report.push(format!("exact residual: skipped (dimension {dim} > {})", ed_oracle::DEFAULT_DIM_CAP));
        (None, None)
    };
    let pass = gz <= c.tol && exact.map_or(true, |e| e <= c.tol);
    report.push(if pass { "PASS".into() } else { "FAIL".into() });
    let summary = json!({
        "q": p.q,
        "couplings": j.diagonal(),
        "max_gz_residual": gz,
        "exact_residual": exact,
        "energy_per_site": energy,
        "energy_density_parent": scars::energy_density(p.kappa, p.q, p.spin())?,
        "pass": pass,
    });
    let files = emit(cfg, out, "scar_verify", &t, summary)?;
    Ok(Outcome { pass, files, report })
}

fn dispersion(cfg: &RunConfig, c: &Dispersion, out: &Path) -> Res<Outcome> {
    let Helix { q, theta, djz } = c.helix;
    check_helix(q, theta)?;
    if c.nk == 0 {
        return Err(usage("--nk must be positive"));
    }
    let mut t = Table::new(&["k", "A", "B", "B_plus", "B_minus", "omega_re", "omega_im", "w_re", "w_im"]);
    let mut max_im: f64 = 0.0;
    for k in bogoliubov::k_grid(c.nk) {
        let m = bogoliubov::transverse_dispersion(k, q, theta, djz, c.s);
        max_im = max_im.max(m.w_tilde.im);
        t.push(vec![
            num(k),
            num(m.a),
            num(m.b),
            num(m.b_plus),
            num(m.b_minus),
            num(m.omega_sw.re),
            num(m.omega_sw.im),
            num(m.w_tilde.re),
            num(m.w_tilde.im),
        ]);
    }
    let window = bogoliubov::instability_window(q, theta, djz)?;
    let mut report = vec![format!("max Im w = {max_im:.6e}")];
    let wjson = window.map(|w| {
        report.push(format!(
            "unstable window ({}): k_* = {:.12}, k_max = {:.6}, b1_max = {:.6e}",
            side_name(w.side),
            w.k_star,
            w.k_max,
            w.b1_max
        ));
        json!({ "side": side_name(w.side), "k_star": w.k_star, "k_max": w.k_max, "b1_max": w.b1_max })
    });
    if window.is_none() {
        report.push("stable: dispersion real for all k".into());
    }
    let summary = json!({ "max_im_w": max_im, "window": wjson });
    let files = emit(cfg, out, "dispersion", &t, summary)?;
    Ok(Outcome { pass: true, files, report })
}

fn side_name(s: WindowSide) -> &'static str {
    match s {
        WindowSide::Centre => "centre",
        WindowSide::Edge => "edge",
    }
}

fn check_helix(q: f64, theta: f64) -> Res<()> {
    if !(q > 0.0 && q < PI / 2.0) {
        return Err(usage("q must lie in (0, pi/2)"));
    }
    if !(theta > 0.0 && theta < PI) {
        return Err(usage("theta must lie in (0, pi)"));
    }
    Ok(())
}

fn rates(cfg: &RunConfig, c: &RatesArgs, out: &Path) -> Res<Outcome> {
    let Helix { q, theta, djz } = c.helix;
    check_helix(q, theta)?;
    let r = bogoliubov::rates(q, theta, djz, c.s)?;
    let mut t = Table::new(&["regime", "gamma1", "gamma2", "gamma2_perturbative", "k_max"]);
    let (report, summary) = match r {
        Rates::Stable { gamma1 } => {
            t.push(vec!["stable".into(), num(gamma1), String::new(), String::new(), String::new()]);
            (vec![format!("stable: gamma1 = {gamma1:.3e}")], json!({ "regime": "stable", "gamma1": gamma1 }))
        }
        Rates::Unstable { gamma2, gamma2_perturbative, k_max } => {
            t.push(vec!["unstable".into(), String::new(), num(gamma2), num(gamma2_perturbative), num(k_max)]);
            (
                vec![format!("unstable: gamma2 = {gamma2:.3e} (small-dJz form {gamma2_perturbative:.3e}), k_max = {k_max:.6}")],
                json!({ "regime": "unstable", "gamma2": gamma2, "gamma2_perturbative": gamma2_perturbative, "k_max": k_max }),
            )
        }
    };
    let files = emit(cfg, out, "rates", &t, summary)?;
    Ok(Outcome { pass: true, files, report })
}

fn steps_of(t_final: f64, dt: f64) -> Res<usize> {
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(usage("need --dt > 0 and --T >= 0"));
    }
    Ok((t_final / dt).round() as usize)
}

fn contrast_table(cs: &spinwave::ContrastSeries, c: Option<&[f64]>) -> Table {
    let mut t = Table::new(if c.is_some() { &["t", "tau", "D", "f", "C"] } else { &["t", "tau", "D", "f"] });
    for (i, (&time, (&d, &f))) in cs.times.iter().zip(cs.d.iter().zip(&cs.f)).enumerate() {
        let mut row = vec![num(time), num(cs.s * time), num(d), num(f)];
        if let Some(c) = c {
            row.push(num(c[i]));
        }
        t.push(row);
    }
    t
}

fn contrast_summary(cs: &spinwave::ContrastSeries) -> serde_json::Value {
    json!({ "final_D": cs.d.last(), "final_f": cs.f.last(), "samples": cs.d.len() })
}

fn contrast_sw(cfg: &RunConfig, c: &ContrastSw, out: &Path) -> Res<Outcome> {
    let steps = steps_of(c.t_final, c.dt)?;
    let (cs, spin_c) = match c.family {
        SwFamily::Transverse => {
            let q = require(c.q, "q", "transverse")?;
            let theta = require(c.theta, "theta", "transverse")?;
            check_helix(q, theta)?;
            let wind = q * c.l as f64 / (2.0 * PI);
            if (wind - wind.round()).abs() > 1e-9 {
                return Err(usage(format!("q L / 2pi = {wind} must be an integer on a ring")));
            }
            let j = scars::parent_couplings(0.0, q)?.perturbed(0.0, c.dj);
            let omega = -2.0 * c.s * theta.cos() * c.dj;
            let frame = rotframe::frame_transverse(theta, q, omega, 0.0, c.l, &j)?;
            let cs = spinwave::contrast_sw(&spinwave::sw_coefficients(&frame, c.s), c.dt, steps)?;
            let sc = spinwave::spin_contrast(&cs.d, theta)?;
            (cs, Some(sc))
        }
        SwFamily::Gtsh | SwFamily::Glsh => {
            let fam = if c.family == SwFamily::Gtsh { ScanFamily::Gtsh } else { ScanFamily::Glsh };
            let name = if c.family == SwFamily::Gtsh { "gtsh" } else { "glsh" };
            let kappa = require(c.kappa, "kappa", name)?;
            let lambda = require(c.lambda, "lambda", name)?;
            let cell = UnitCell::multiflavour_lambda(fam.into(), kappa, lambda, c.dj, c.s)?;
            (bogoliubov::contrast_multiflavour(&cell, c.dt, steps, c.nk)?, None)
        }
    };
    let t = contrast_table(&cs, spin_c.as_deref());
    let report = vec![format!("D(T) = {:.9}", cs.d.last().copied().unwrap_or(1.0))];
    let files = emit(cfg, out, "contrast_sw", &t, contrast_summary(&cs))?;
    Ok(Outcome { pass: true, files, report })
}

fn contrast_ed(cfg: &RunConfig, c: &ContrastEd, out: &Path) -> Res<Outcome> {
    let steps = steps_of(c.t_final, c.dt)?;
    let p = ring_params(&c.ring, c.two_s)?;
    let j = couplings(&p, &c.couplings)?;
    let tex = scars::scar_texture(&p);
    let times: Vec<f64> = (0..=steps).map(|n| n as f64 * c.dt).collect();
    let cs = ed_oracle::contrast_exact_ll(&tex, &j, c.two_s, &times)?;
    let t = contrast_table(&cs, None);
    let mut files = emit(cfg, out, "contrast_ed", &t, contrast_summary(&cs))?;
    let mut report = vec![format!("D(T) = {:.9}", cs.d.last().copied().unwrap_or(1.0))];
    if c.dump_state {
        let cap = ed_oracle::DEFAULT_DIM_CAP;
        let psi = ed_oracle::product_state(&tex, c.two_s, cap)?;
        let h = ed_oracle::build_hamiltonian(&j, c.two_s, p.l, cap)?;
        let last = ed_oracle::evolve_exact(&psi, &h, &[c.t_final])?.remove(0);
        let path = out.join("contrast_ed_state.bin");
        io::write_state(&path, &last)?;
        report.push(format!("state written to {}", path.display()));
        files.push(path);
    }
    Ok(Outcome { pass: true, files, report })
}

fn ll_evolve(cfg: &RunConfig, c: &LlEvolve, out: &Path) -> Res<Outcome> {
    let p = ring_params(&c.ring, 1)?;
    let j = couplings(&p, &c.couplings)?;
    let dt = c.dt.unwrap_or_else(|| lattice_classical::default_dt(c.s));
    steps_of(c.t_final, dt)?;
    let tex = scars::scar_texture(&p);
    let tr = lattice_classical::ll_evolve(&tex, &j.matrix(), c.s, dt, c.t_final, c.record_every)?;
    let mut t = Table::new(&["t", "site", "x", "y", "z"]);
    let mut e = Table::new(&["t", "energy"]);
    for ((time, w), en) in tr.times.iter().zip(&tr.textures).zip(&tr.energy) {
        for (i, o) in w.omegas.iter().enumerate() {
            t.push(vec![num(*time), i.to_string(), num(o[0]), num(o[1]), num(o[2])]);
        }
        e.push(vec![num(*time), num(*en)]);
    }
    let mut report = vec![format!(
        "relative energy drift {:.3e}, max norm drift {:.3e}",
        tr.relative_energy_drift(),
        tr.max_norm_drift
    )];
    let mut summary = json!({
        "relative_energy_drift": tr.relative_energy_drift(),
        "max_norm_drift": tr.max_norm_drift,
    });
    if c.lyapunov {
        let lc = LyapunovConfig { dt, seed: c.seed, ..LyapunovConfig::new(c.s, c.t_final) };
        let est = lattice_classical::classical_lyapunov(&tex, &j.matrix(), c.s, &lc)?;
        report.push(format!(
            "lyapunov rate {:.6e} (slope {:.6e}, {:.1} e-folds, {})",
            est.rate,
            est.slope,
            est.efolds,
            if est.unstable { "unstable" } else { "no exponential growth" }
        ));
        summary["lyapunov"] = json!({
            "rate": est.rate, "slope": est.slope, "efolds": est.efolds,
            "unstable": est.unstable, "reference_excursion": est.reference_excursion,
        });
    }
    let mut files = emit(cfg, out, "ll_evolve", &t, summary.clone())?;
    files.extend(emit(cfg, out, "ll_energy", &e, summary)?);
    Ok(Outcome { pass: true, files, report })
}

fn phase_scan(cfg: &RunConfig, c: &PhaseScan, out: &Path) -> Res<Outcome> {
    let (lo, hi) = c.lambda;
    if lo < 5 {
        return Err(usage("lambda must be at least 5"));
    }
    if c.nk == 0 {
        return Err(usage("--nk must be positive"));
    }
    let items: Vec<(f64, usize)> = c.kappa.0.iter().flat_map(|&k| (lo..=hi).map(move |l| (k, l))).collect();
    let points = pool::parallel_map(&items, pool::thread_count(), |&(k, l)| {
        bogoliubov::phase_scan_point(c.family.into(), k, l, c.dj, c.s, c.nk, !c.full)
    });
    let mut t = Table::new(&["kappa", "lambda", "q", "class", "lyap_minus", "lyap_plus"]);
    let mut counts = [0usize; 4];
    let classes = [PhaseClass::SS, PhaseClass::SU, PhaseClass::US, PhaseClass::UU];
    for p in points {
        let p = p?;
        counts[classes.iter().position(|x| *x == p.class).unwrap()] += 1;
        t.push(vec![num(p.kappa), p.lambda.to_string(), num(p.q), p.class.label().into(), num(p.lyap_minus), num(p.lyap_plus)]);
    }
    let report = vec![classes.iter().zip(counts).map(|(c, n)| format!("{}: {n}", c.label())).collect::<Vec<_>>().join(", ")];
    let summary = json!({
        "counts": classes.iter().zip(counts).map(|(c, n)| (c.label().to_string(), json!(n))).collect::<serde_json::Map<_, _>>(),
        "threshold": bogoliubov::stability_threshold(c.s),
        "exponents_are_lower_bounds": !c.full,
    });
    let files = emit(cfg, out, "phase_scan", &t, summary)?;
    Ok(Outcome { pass: true, files, report })
}

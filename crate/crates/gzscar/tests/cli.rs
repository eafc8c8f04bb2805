use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gzscar::config::RunConfig;
use gzscar::io::{read_csv, read_sidecar, read_state};

fn gz(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gzscar")).arg("--out").arg(out).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn scar_verify_passes_for_helix() {
    let d = tempfile::tempdir().unwrap();
    let o = gz(d.path(), &["scar-verify", "--kappa", "0", "--M", "1", "--L", "6", "--gamma", "0.7071", "--S", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).trim_end().ends_with("PASS"));
    let t = read_csv(&d.path().join("scar_verify.csv")).unwrap();
    assert_eq!(t.rows.len(), 6);
}

#[test]
fn scar_verify_fails_when_detuned() {
    let d = tempfile::tempdir().unwrap();
    let o = gz(d.path(), &["scar-verify", "--kappa", "0.9", "--M", "1", "--L", "6", "--gamma", "0", "--Jz", "0.9"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).trim_end().ends_with("FAIL"));
}

#[test]
fn usage_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(gz(d.path(), &["scar-verify", "--kappa", "0", "--M", "1", "--gamma", "0"]).status.code(), Some(2));
    assert_eq!(gz(d.path(), &["rates", "--q", "pi/x", "--theta", "pi/4", "--dJz", "0.1"]).status.code(), Some(2));
    // q at or beyond K is a parameter error, not a numerical failure
    assert_eq!(gz(d.path(), &["scar-verify", "--kappa", "0", "--M", "2", "--L", "6", "--gamma", "0"]).status.code(), Some(2));
    assert_eq!(gz(d.path(), &["contrast-sw", "--q", "pi/3", "--dJ", "0.01", "--T", "1"]).status.code(), Some(2));
    assert_eq!(gz(d.path(), &["contrast-sw", "--q", "0.9", "--theta", "pi/4", "--dJ", "0.01", "--T", "1"]).status.code(), Some(2));
    let cap = gz(d.path(), &["contrast-ed", "--M", "1", "--L", "13", "--gamma", "0", "--S", "1/2", "--T", "1"]);
    assert_eq!(cap.status.code(), Some(2));
}

#[test]
fn rates_prints_gamma1() {
    let d = tempfile::tempdir().unwrap();
    let o = gz(d.path(), &["rates", "--q", "pi/3", "--theta", "pi/4", "--dJz", "-0.03"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("gamma1 = 9.186e-4"), "{}", stdout(&o));
}

#[test]
fn dispersion_unstable_window() {
    let d = tempfile::tempdir().unwrap();
    let o = gz(d.path(), &["dispersion", "--q", "pi/3", "--theta", "pi/4", "--dJz", "0.03"]);
    assert_eq!(o.status.code(), Some(0));
    let t = read_csv(&d.path().join("dispersion.csv")).unwrap();
    assert_eq!(t.rows.len(), 400);
    let w_im = t.header.iter().position(|h| h == "w_im").unwrap();
    let k = t.header.iter().position(|h| h == "k").unwrap();
    for r in &t.rows {
        let (k, im): (f64, f64) = (r[k].parse().unwrap(), r[w_im].parse().unwrap());
        assert_eq!(im > 0.0, k.abs() > 0.0 && k.abs() < 0.2419, "k = {k}");
    }
    let side = read_sidecar(&d.path().join("dispersion.json")).unwrap();
    let ks = side.summary["window"]["k_star"].as_f64().unwrap();
    assert!((ks - 0.2419450827659765).abs() < 1e-12);
}

#[test]
fn phase_scan_is_deterministic_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["phase-scan", "--family", "glsh", "--lambda", "7:10", "--kappa", "0.5,0.8", "--nk", "100"];
    let run = |dir: &Path, threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_gzscar"))
            .env("GZSCAR_THREADS", threads)
            .arg("--out")
            .arg(dir)
            .args(args)
            .output()
            .unwrap()
    };
    assert_eq!(run(a.path(), "1").status.code(), Some(0));
    assert_eq!(run(b.path(), "4").status.code(), Some(0));
    for f in ["phase_scan.csv", "phase_scan.json"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let t = read_csv(&a.path().join("phase_scan.csv")).unwrap();
    assert_eq!(t.rows.len(), 8);
    let anchor = t.rows.iter().find(|r| r[0] == "8e-1" && r[1] == "7").unwrap();
    assert_eq!(anchor[3], "U-S");
}

#[test]
fn sidecars_round_trip_and_replay() {
    let runs: [&[&str]; 5] = [
        &["contrast-sw", "--q", "pi/3", "--theta", "pi/4", "--dJz", "0.03", "--L", "30", "--T", "5", "--dt", "0.5"],
        &["contrast-sw", "--family", "gtsh", "--kappa", "0.9", "--lambda", "6", "--dJ", "0.02", "--T", "5", "--dt", "1", "--nk", "20"],
        &["ll-evolve", "--kappa", "0.5", "--M", "1", "--L", "8", "--gamma", "0.3", "--phi", "pi/7", "--dJx", "0.01", "--T", "2", "--record-every", "500"],
        &["contrast-ed", "--M", "1", "--L", "5", "--gamma", "0.6", "--S", "1/2", "--dJz", "0.05", "--T", "2", "--dt", "0.5"],
        &["rates", "--q", "pi/4", "--theta", "pi/3", "--dJz", "0.02", "--S", "2"],
    ];
    for args in runs {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert_eq!(gz(a.path(), args).status.code(), Some(0), "{args:?}");
        let json = fs::read_dir(a.path())
            .unwrap()
            .map(|e| e.unwrap().path())
            .find(|p| p.extension().is_some_and(|x| x == "json"))
            .unwrap();
        let side = read_sidecar(&json).unwrap();
        let text = serde_json::to_string(&side.config).unwrap();
        assert_eq!(serde_json::from_str::<RunConfig>(&text).unwrap(), side.config);
        assert_eq!(gz(b.path(), &["replay", "--from", json.to_str().unwrap()]).status.code(), Some(0));
        for e in fs::read_dir(a.path()).unwrap() {
            let p = e.unwrap().path();
            let q = b.path().join(p.file_name().unwrap());
            assert_eq!(fs::read(&p).unwrap(), fs::read(&q).unwrap(), "{}", p.display());
        }
    }
}

#[test]
fn contrast_ed_state_dump() {
    let d = tempfile::tempdir().unwrap();
    let o = gz(d.path(), &["contrast-ed", "--M", "1", "--L", "6", "--gamma", "0.7071", "--S", "1", "--T", "1", "--dt", "0.5", "--dump-state"]);
    assert_eq!(o.status.code(), Some(0));
    let psi = read_state(&d.path().join("contrast_ed_state.bin")).unwrap();
    assert_eq!((psi.l, psi.two_s, psi.dim()), (6, 2, 729));
    assert!((psi.norm() - 1.0).abs() < 1e-10);
    // unperturbed: the scar only picks up a phase
    let t = read_csv(&d.path().join("contrast_ed.csv")).unwrap();
    for r in &t.rows {
        assert!((r[2].parse::<f64>().unwrap() - 1.0).abs() < 1e-6, "{r:?}");
    }
}

#[test]
fn ll_evolve_writes_trajectory() {
    let d = tempfile::tempdir().unwrap();
    let o = gz(d.path(), &["ll-evolve", "--kappa", "0.9", "--M", "1", "--L", "6", "--gamma", "0", "--T", "20", "--record-every", "500", "--lyapunov"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let t = read_csv(&d.path().join("ll_evolve.csv")).unwrap();
    assert!(t.rows.len() >= 2 * 6 && t.rows.len() % 6 == 0);
    let side = read_sidecar(&d.path().join("ll_evolve.json")).unwrap();
    assert!(side.summary["lyapunov"]["rate"].is_number());
    assert!(side.summary["relative_energy_drift"].as_f64().unwrap() < 1e-10);
}

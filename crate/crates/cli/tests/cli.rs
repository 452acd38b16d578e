use std::fs;
use std::process::Command;

use threshold_ep_cli::{parse_config, CliError, Subcommand};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_threshold-ep"))
}

#[test]
fn cli_overrides_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    fs::write(&path, "# survival run\ng = 0.1\nt-max = 50  # short\nmethod = bessel\n").unwrap();
    let cfg = parse_config(["threshold-ep", "dynamics", "--g", "0.02"], Some(&path)).unwrap();
    assert_eq!(cfg.subcommand, Subcommand::Dynamics);
    assert_eq!(cfg.real("g"), Some(0.02));
    assert_eq!(cfg.real("t_max"), Some(50.0));
    assert_eq!(cfg.text("method"), Some("bessel"));

    // The same file through --config.
    let p = path.to_str().unwrap();
    let cfg = parse_config(["threshold-ep", "dynamics", "--config", p], None).unwrap();
    assert_eq!(cfg.real("g"), Some(0.1));
}

#[test]
fn unknown_file_key_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.conf");
    fs::write(&path, "g = 0.1\n\ngg = 3\nstep = -1\n").unwrap();
    let Err(CliError::Config(msgs)) = parse_config(["threshold-ep", "dynamics"], Some(&path)) else {
        panic!("expected a configuration error");
    };
    assert_eq!(msgs.len(), 2, "{msgs:?}");
    assert!(msgs.iter().any(|m| m.contains(":3:") && m.contains("unknown key `gg`")));
    assert!(msgs.iter().any(|m| m.contains(":4:") && m.contains("step")));
}

#[test]
fn negative_coupling_exits_with_usage_code() {
    let out = bin().args(["dynamics", "--g", "-1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("must be >= 0"));
}

#[test]
fn dynamics_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    let status = bin()
        .args(["dynamics", "--g", "0.02", "--eps-d", "-2", "--t-max", "20", "--step", "0.5", "-o"])
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,re_A,im_A,P,method"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 41);
    for r in &rows {
        let p: f64 = r[3].parse().unwrap();
        assert!((0.0..=1.0 + 1e-12).contains(&p));
        assert_eq!(r[4], "lattice_oracle");
    }
}

#[test]
fn figures_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let status = bin().args(["figures", "--name", "fig1", "--out-dir"]).arg(d.path()).status().unwrap();
        assert!(status.success());
        let status = bin().args(["figures", "--name", "fig3", "--out-dir"]).arg(d.path()).status().unwrap();
        assert!(status.success());
    }
    for f in ["fig1.csv", "fig1.gp", "fig3.csv", "fig3.gp"] {
        let x = fs::read(a.path().join(f)).unwrap();
        let y = fs::read(b.path().join(f)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{f} differs between runs");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let run = || bin().args(["generic", "--model", "lorentzian", "--points", "7"]).output().unwrap();
    let (x, y) = (run(), run());
    assert!(x.status.success());
    assert_eq!(x.stdout, y.stdout);
    let header = String::from_utf8_lossy(&x.stdout).lines().next().unwrap().to_string();
    assert_eq!(header, "E,sigma_quadrature,sigma_closed_form,abs_err");
}

#[test]
fn thread_variable_is_checked() {
    let out = bin().env("THRESHOLD_EP_THREADS", "zero").arg("jordan").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().env("THRESHOLD_EP_THREADS", "2").arg("jordan").output().unwrap();
    assert!(out.status.success());
}

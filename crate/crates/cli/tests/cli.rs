use std::fs;
use std::process::{Command, Output};

use tempfile::tempdir;

fn qrkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrkit")).args(args).env("RUST_LOG", "error").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_passes_and_injection_fails() {
    let ok = qrkit(&["verify", "--cases", "3"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    let text = stdout(&ok);
    assert!(text.starts_with("check,max_error,tolerance,pass\n"));
    assert_eq!(text.lines().count(), 21);
    let bad = qrkit(&["verify", "--cases", "3", "--inject", "r_add_cols"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).lines().any(|l| l.starts_with("r_add_cols,") && l.ends_with(",false")));
}

#[test]
fn unknown_injection_is_an_error() {
    assert_eq!(qrkit(&["verify", "--inject", "nope"]).status.code(), Some(2));
}

#[test]
fn small_cost_grid_is_exact() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("costs.csv");
    let o = qrkit(&["costs", "--grid", "small", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("operation,N,p,m,k,predicted,measured,log10_predicted"));
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[5], f[6], "{line}");
    }
}

#[test]
fn simulate_is_deterministic_apart_from_timing() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("sim.json");
    fs::write(&cfg, r#"{"ns":[60],"ps":[12],"p0s":[3],"reps":2,"draws":2000}"#).unwrap();
    let run = |threads: &str| {
        let o = qrkit(&["simulate", "--config", cfg.to_str().unwrap(), "--threads", threads, "--seed", "5"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect::<Vec<_>>()
    };
    let (a, b) = (run("1"), run("3"));
    assert_eq!(a.len(), 2);
    assert_eq!(a, b);
}

#[test]
fn select_writes_tables_and_exact_columns() {
    let dir = tempdir().unwrap();
    let data = dir.path().join("d.csv");
    let mut text = String::from("y,a,b,c\n");
    for i in 0..40 {
        let (a, b, c) = ((i as f64 * 0.37).sin(), (i as f64 * 1.3).cos(), (i % 7) as f64 - 3.0);
        text += &format!("{},{a},{b},{c}\n", 3.0 * a - 2.0 * c + 0.1 * (i as f64 * 2.9).sin());
    }
    fs::write(&data, text).unwrap();
    let out = dir.path().join("out");
    let o = qrkit(&[
        "select",
        data.to_str().unwrap(),
        "--header",
        "--intercept",
        "--enumerate",
        "--out",
        out.to_str().unwrap(),
        "--config",
        "/dev/null",
    ]);
    // an empty config file is not valid JSON
    assert_eq!(o.status.code(), Some(2));
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"draws": 5000}"#).unwrap();
    let o = qrkit(&[
        "select",
        data.to_str().unwrap(),
        "--header",
        "--intercept",
        "--enumerate",
        "--out",
        out.to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mip = fs::read_to_string(out.join("mip.csv")).unwrap();
    assert!(mip.starts_with("column,name,mip,mpm,beta_bma,beta_mpm,exact_mip\n"));
    for name in ["a", "c"] {
        let row = mip.lines().find(|l| l.split(',').nth(1) == Some(name)).unwrap();
        let v: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!(v > 0.9, "{row}");
    }
    let pmp = fs::read_to_string(out.join("pmp.csv")).unwrap();
    assert!(pmp.starts_with("rank,model,estimated_pmp,exact_pmp\n"));
}

#[test]
fn select_reports_malformed_input_location() {
    let dir = tempdir().unwrap();
    let data = dir.path().join("bad.csv");
    fs::write(&data, "1,2\n3,x\n").unwrap();
    let o = qrkit(&["select", data.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("column 2"), "{err}");
}

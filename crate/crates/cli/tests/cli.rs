use std::fs;
use std::process::{Command, Output};

fn gbspectra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gbspectra"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &tempfile::TempDir, body: &str) -> String {
    let path = dir.path().join("exp.cfg");
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn symbol_of_hat_functions() {
    let o = gbspectra(&["symbol", "--p", "1", "--space", "poly", "--n", "16"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let (coeffs, samples) = text.split_once("\n\n").unwrap();
    let rows: Vec<(i32, f64)> = coeffs
        .lines()
        .skip(1)
        .map(|l| {
            let (k, c) = l.split_once(',').unwrap();
            (k.parse().unwrap(), c.parse().unwrap())
        })
        .collect();
    let want = [(-1, -1.0), (0, 2.0), (1, -1.0)];
    assert_eq!(rows.len(), 3);
    for ((k, c), (wk, wc)) in rows.iter().zip(want) {
        assert_eq!(*k, wk);
        assert!((c - wc).abs() < 1e-12);
    }
    let values: Vec<f64> = samples
        .lines()
        .skip(1)
        .map(|l| l.split_once(',').unwrap().1.parse().unwrap())
        .collect();
    assert_eq!(values.len(), 512);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(min.abs() < 1e-12, "{min}");

    let o = gbspectra(&[
        "symbol", "--p", "1", "--space", "poly", "--n", "16", "--kind", "h",
    ]);
    let text = stdout(&o);
    let c: Vec<f64> = text
        .split("\n\n")
        .next()
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split_once(',').unwrap().1.parse().unwrap())
        .collect();
    for (x, y) in c.iter().zip([1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]) {
        assert!((x - y).abs() < 1e-12, "{c:?}");
    }
}

#[test]
fn assemble_writes_dense_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a.csv");
    let o = gbspectra(&[
        "assemble",
        "--p",
        "2",
        "--n",
        "8",
        "--space",
        "hyp:1:nonnested",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# size=8"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|r| r.split(',').count() == 8));
}

#[test]
fn phase_refusal_is_an_error() {
    let o = gbspectra(&[
        "symbol",
        "--p",
        "2",
        "--space",
        "trig:12.566370614359172:nonnested",
        "--n",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains('5'), "{err}");
}

#[test]
fn run_exit_status_follows_checks() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(
        &dir,
        "checks = mineig, conditioning\np = 2\nn = 8, 16\nconditioning_n = 8, 16\n",
    );
    let o = gbspectra(&[
        "run",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--space",
        "poly",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let report = fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(report.starts_with("check,p,space,alpha,mode,n,beta,gamma,measured,bound,pass,ms\n"));
    assert!(out.join("summary.json").exists());

    // an impossible spread tolerance forces a failure
    let strict = write_config(
        &dir,
        "checks = conditioning\np = 2\nconditioning_n = 8, 16\ntol.conditioning_spread = 0.5\n",
    );
    let o = gbspectra(&[
        "run",
        &strict,
        "--out",
        out.to_str().unwrap(),
        "--space",
        "poly",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("FAIL"));

    let o = gbspectra(&["run", &cfg, "--out", out.to_str().unwrap(), "--p", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

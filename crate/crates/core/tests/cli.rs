use std::io::Write;
use std::process::{Command, Output};

fn ccnorms(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_ccnorms"));
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("NORMS_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["norm", "--op", "cesaro-minus-identity", "--cone", "nonincr", "--u", "power:0.3", "--v", "power:0.2", "--n-max", "20000"];
    let one = ccnorms(&args, Some("1"));
    let many = ccnorms(&args, Some("4"));
    let default = ccnorms(&args, None);
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(one.stdout, default.stdout);
}

#[test]
fn list_weights_and_parse_errors() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "0.5\n0.25\n\n0.125").unwrap();
    let spec = format!("list:{}", file.path().display());
    let out = ccnorms(&["norm", "--op", "copson", "--cone", "nonneg", "--u", &spec, "--v", &spec], None);
    assert!(out.status.success());
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["status"], "TruncatedConverged");
    // Row 1: 0.5 (0.5 + 0.25/2 + 0.125/3).
    let want = 0.5 * (0.5 + 0.125 + 0.125 / 3.0);
    assert!((json["value"].as_f64().unwrap() - want).abs() < 1e-15);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "1\nabc").unwrap();
    let spec = format!("list:{}", bad.path().display());
    let out = ccnorms(&["norm", "--op", "copson", "--cone", "all", "--u", &spec, "--v", &spec], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("abc"));
}

#[test]
fn power_table_is_stable() {
    let args = ["power-table", "--theorem", "cstar-le-c", "--from", "-0.5", "--to", "2", "--step", "0.25"];
    let a = ccnorms(&args, None);
    let b = ccnorms(&args, Some("2"));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("# note:"));
    assert!(text.contains("-0.5,all,inf,alpha <= 0"));
    assert!(text.contains("2,nonneg,0,alpha > 1"));
}

use std::process::{Command, Output};

fn mlopc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlopc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_exponential() {
    let o = mlopc(&["eval", "--alpha", "1", "--beta", "1", "--z", "1+0i"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).trim(), "2.718281828459045e0 + 0e0 i");
}

#[test]
fn eval_polar_on_negative_axis() {
    let o = mlopc(&["eval", "--alpha", "2", "--modulus", "9.869604401089358", "--arg", "pi", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // E_2(-π²) = cos(π)
    assert!((v["re"].as_f64().unwrap() + 1.0).abs() < 1e-14);
    assert_eq!(v["im"].as_f64().unwrap(), 0.0);
}

#[test]
fn eval_with_oracle() {
    let o = mlopc(&["eval", "--alpha", "0.6", "--beta", "1.3", "--z", "-2+1.5i", "--oracle", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["err_mixed"].as_f64().unwrap() <= 1e-13);
}

#[test]
fn unsupported_prabhakar_exits_3() {
    let o = mlopc(&["eval", "--alpha", "0.8", "--gamma", "1.3", "--z", "0.9+0.4i"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha*pi"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(mlopc(&["eval", "--alpha", "1"]).status.code(), Some(2));
    assert_eq!(mlopc(&["eval", "--alpha", "1", "--z", "nonsense"]).status.code(), Some(2));
    assert_eq!(mlopc(&["eval", "--alpha", "1", "--z", "1", "--tol", "1e-20"]).status.code(), Some(2));
    assert_eq!(mlopc(&["eval", "--alpha", "-1", "--z", "1"]).status.code(), Some(2));
    assert_eq!(mlopc(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn forced_bad_region_exits_4() {
    let o = mlopc(&["eval", "--alpha", "1", "--z", "1", "--force-region", "7"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn oracle_sweep_on_negative_axis() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let o = mlopc(&[
        "sweep", "--alpha", "0.7", "--beta", "1", "--arg", "pi", "--rmin", "1e-2", "--rmax", "1e2", "--points", "50",
        "--oracle", "--out", path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re_z,im_z,re_E,im_E,err_mixed,n_nodes,region_index,mu,h,time_ns"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 50);
    for row in &rows {
        assert_eq!(row.len(), 10);
        assert_eq!(row[1].parse::<f64>().unwrap(), 0.0);
        assert!(row[0].parse::<f64>().unwrap() < 0.0);
        assert!(row[4].parse::<f64>().unwrap() <= 1e-13, "{row:?}");
    }
}

fn without_time(csv: &str) -> Vec<String> {
    csv.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string()).collect()
}

#[test]
fn csv_is_deterministic() {
    let args = ["sweep", "--alpha", "0.45", "--beta", "1.2", "--gamma", "0.8", "--arg", "3pi/4", "--points", "40"];
    let a = mlopc(&args);
    let b = mlopc(&args);
    assert!(a.status.success() && b.status.success());
    assert_eq!(without_time(&stdout(&a)), without_time(&stdout(&b)));
    // no oracle: err_mixed left empty
    assert!(stdout(&a).lines().skip(1).all(|l| l.split(',').nth(4) == Some("")));
}

#[test]
fn json_matches_csv() {
    let base = ["sweep", "--alpha", "1.5", "--arg", "-pi/2", "--rmin", "0.1", "--rmax", "30", "--points", "7"];
    let csv = mlopc(&base);
    let mut with_json = base.to_vec();
    with_json.push("--json");
    let json = mlopc(&with_json);
    let recs: Vec<serde_json::Value> = serde_json::from_str(&stdout(&json)).unwrap();
    let rows: Vec<String> = stdout(&csv).lines().skip(1).map(String::from).collect();
    assert_eq!(recs.len(), rows.len());
    for (rec, row) in recs.iter().zip(&rows) {
        let f: Vec<&str> = row.split(',').collect();
        assert_eq!(rec["re_E"].as_f64().unwrap(), f[2].parse::<f64>().unwrap());
        assert_eq!(rec["im_E"].as_f64().unwrap(), f[3].parse::<f64>().unwrap());
        assert_eq!(rec["n_nodes"].as_u64().unwrap(), f[5].parse::<u64>().unwrap());
        assert!(rec.get("err_mixed").is_none());
    }
}

#[test]
fn slack_violation_exits_nonzero() {
    let o = mlopc(&[
        "compare", "--alpha", "0.9", "--arg", "pi/3", "--points", "3", "--tol", "1e-6", "--tol-slack", "1e-14",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("exceed"));
    // the CSV is still written
    assert_eq!(stdout(&o).lines().count(), 4);
}

#[test]
fn time_reports_median() {
    let o = mlopc(&["time", "--alpha", "0.8", "--points", "4", "--repetitions", "5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 5);
    assert!(String::from_utf8_lossy(&o.stderr).contains("median time per point"));
}

use std::process::{Command, Output};

fn denjoy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_denjoy")).args(args).output().expect("spawn denjoy")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn build_emits_rebuildable_descriptors() {
    let o = denjoy(&["build", "--rank", "w+1", "--interval", "0", "1", "--r", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["rank"], "w+1");
    assert_eq!(v["interval"], serde_json::json!(["0", "1"]));
    assert_eq!(v["kind"], "Successor");
    let again = denjoy(&["sample", "--descriptor", &stdout(&o), "--grid", "2"]);
    assert_eq!(again.status.code(), Some(0));
}

#[test]
fn base_descriptor_carries_amplitude() {
    let o = denjoy(&["build", "--rank", "0", "--interval", "0", "2", "--r", "3/2"]);
    let v = json(&o);
    let lo: f64 = ratio(v["amplitude"][0].as_str().unwrap());
    let hi: f64 = ratio(v["amplitude"][1].as_str().unwrap());
    let want = 3.0 * std::f64::consts::PI / 4.0;
    assert!(lo <= want + 1e-12 && want - 1e-12 <= hi && hi - lo < 1e-20);
}

fn ratio(s: &str) -> f64 {
    let (n, d) = s.split_once('/').unwrap_or((s, "1"));
    n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap()
}

#[test]
fn unsupported_ordinals_are_usage_errors() {
    let o = denjoy(&["build", "--rank", "e0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsupported"));
    assert_eq!(denjoy(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(denjoy(&["--depth", "17", "gaps"]).status.code(), Some(3));
    assert_eq!(denjoy(&["--help"]).status.code(), Some(0));
}

#[test]
fn sample_rows_match_closed_form() {
    let o = denjoy(&["sample", "--rank", "0", "--grid", "4", "--exact"]);
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "x,f_lo,f_hi,F_lo,F_hi");
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[1], "0,0,0,0,0");
    assert!(rows[3].starts_with("1/2,") && rows[3].ends_with(",1,1"), "{}", rows[3]);
    assert_eq!(rows[5], "1,0,0,0,0");
}

#[test]
fn sample_decimals_round_outward() {
    let text = stdout(&denjoy(&["sample", "--rank", "0", "--grid", "4"]));
    let row: Vec<f64> = text.lines().nth(2).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert!(row[1] <= std::f64::consts::PI && std::f64::consts::PI <= row[2]);
}

#[test]
fn sample_is_deterministic() {
    let a = denjoy(&["sample", "--rank", "w", "--grid", "32", "--depth", "4"]);
    let b = denjoy(&["sample", "--rank", "w", "--grid", "32", "--depth", "4"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_exit_status_follows_the_report() {
    let step = denjoy(&["verify", "--rank", "1", "--which", "step", "--depth", "3"]);
    assert_eq!(step.status.code(), Some(0));
    assert!(json(&step)["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    assert_eq!(denjoy(&["verify", "--rank", "w", "--which", "improper", "--N", "8"]).status.code(), Some(0));
    let rank = denjoy(&["verify", "--rank", "2", "--which", "rank"]);
    assert_eq!(rank.status.code(), Some(0));
    assert_eq!(json(&rank)["vanish_level"], "3");
    assert_eq!(denjoy(&["verify", "--rank", "1", "--which", "improper"]).status.code(), Some(3));
    assert_eq!(denjoy(&["verify", "--rank", "1", "--which", "rank", "--probe", "2"]).status.code(), Some(2));
    let ftc = denjoy(&["verify", "--rank", "1", "--which", "ftc", "--depth", "5", "--samples", "10", "--seed", "4"]);
    assert_eq!(ftc.status.code(), Some(0));
}

#[test]
fn decide_prints_truth_values_with_exit_codes() {
    let f = denjoy(&["decide", "A x . E y . x = X*y"]);
    assert_eq!((stdout(&f).trim(), f.status.code()), ("false", Some(1)));
    let t = denjoy(&["decide", "A x . x + 0 = x"]);
    assert_eq!((stdout(&t).trim(), t.status.code()), ("true", Some(0)));
    let big = "A x . A y . A z . (x = 0 | y = 0 | z = 0) & (x = X*y | y = X*z | z = X*x) & (X*x = y | X*y = z | X*z = x)";
    assert_eq!(denjoy(&["decide", "--budget", "2", big]).status.code(), Some(2));
    assert_eq!(denjoy(&["decide", "x = = 0"]).status.code(), Some(3));
}

#[test]
fn decide_ignores_the_module_name() {
    for s in ["A x . E y . x = X*y", "Inv(x = x, E y . x = X^2*y) > 10", "E x . A y . E z . x = X*y + X^2*z"] {
        let outs: Vec<_> = ["C", "L1", "Den"].iter().map(|m| denjoy(&["decide", "--sentence", s, "--module", m]).stdout).collect();
        assert!(outs.windows(2).all(|w| w[0] == w[1]), "{s}");
    }
    assert_eq!(denjoy(&["decide", "A x . x = x", "--module", "Lp"]).status.code(), Some(3));
}

#[test]
fn classify_prints_the_class() {
    assert_eq!(stdout(&denjoy(&["classify", "--p", "1", "--q", "X^2"])).trim(), "X^2*M");
    assert_eq!(stdout(&denjoy(&["classify", "--p", "X"])).trim(), "0");
    assert_eq!(stdout(&denjoy(&["classify", "--p", "0"])).trim(), "M");
    let v = json(&denjoy(&["classify", "--p", "X", "--q", "X^2", "--format", "json"]));
    assert_eq!(v["class"], "X*M");
}

#[test]
fn gaps_lists_level_ordered_sets() {
    let v = json(&denjoy(&["gaps", "--depth", "2"]));
    assert_eq!(v["gaps"].as_array().unwrap().len(), 3);
    let csv = stdout(&denjoy(&["gaps", "--set", "finite", "--points", "1/2,3/4", "--format", "csv"]));
    assert_eq!(csv.trim(), "lo,hi\n0,1/2\n1/2,3/4\n3/4,1");
    let iv = json(&denjoy(&["gaps", "--set", "interval", "--host", "-1", "1"]));
    assert!(iv["gaps"].as_array().unwrap().is_empty());
}

use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (bool, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_soergel")).args(args).output().expect("binary runs");
    let json: Value = serde_json::from_slice(&out.stdout).expect("stdout is JSON");
    (out.status.success(), json)
}

fn statuses(v: &Value) -> Vec<(String, String)> {
    v["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| (a["name"].as_str().unwrap().to_string(), a["status"].as_str().unwrap().to_string()))
        .collect()
}

#[test]
fn dxy_table_and_schema() {
    let (ok, v) = run(&["dxy", "--group", "A2", "--max-length", "3"]);
    assert!(ok);
    for key in ["command", "group", "params", "results", "assertions"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["command"], "dxy");
    // d(s, s) = alpha_s = x0 in the simple-root coordinates of A2
    assert_eq!(v["results"]["d"]["s"]["s"], "1/1*x0");
    assert_eq!(v["results"]["d"]["sts"]["e"], "1/1");
}

#[test]
fn pieri_suite_passes_on_universal3() {
    let (ok, v) = run(&["verify", "--suite", "pieri", "--group", "universal3", "--max-length", "4"]);
    assert!(ok, "{v}");
    assert_eq!(v["results"]["edge_sign"], "-1");
}

#[test]
fn universal_counterexample_report() {
    let (ok, v) = run(&["counterexample", "universal", "--group", "universal3"]);
    let verdict = &v["results"]["verdict"];
    assert_eq!(verdict["deg"], 2);
    assert_eq!(verdict["in_gamma_id"], false);
    assert_eq!(verdict["annihilates_Rplus"], true);
    assert_eq!(verdict["theta_surjective"], false);
    // the only failing step is the stated KL coefficient
    let failing: Vec<_> = statuses(&v).into_iter().filter(|(_, s)| s == "fail").map(|(n, _)| n).collect();
    assert_eq!(failing, vec!["universal.kl_coefficient".to_string()]);
    assert!(!ok);
}

#[test]
fn homdim_reports_right_r_excess() {
    let (ok, v) = run(&["homdim", "--group", "universal3", "e:stustu"]);
    assert!(ok);
    let row = &v["results"]["pairs"][0];
    assert_eq!(row["zbar"], row["pairing"]);
    assert_eq!(row["right_r"], "v^2+3v^4+v^6");
}

#[test]
fn unknown_group_is_a_structured_error() {
    let (ok, v) = run(&["klbasis", "--group", "no-such-group"]);
    assert!(!ok);
    assert!(v["error"].as_str().unwrap().contains("no-such-group"));
}

#[test]
fn output_is_deterministic() {
    let a = run(&["hw", "--word", "sts"]).1;
    let b = run(&["hw", "--word", "sts"]).1;
    assert_eq!(a, b);
}

use std::process::{Command, Output};

use serde_json::Value;

fn meslab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meslab"))
        .args(args)
        .env_remove("MESLAB_OUT")
        .output()
        .expect("spawn meslab")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn verify_all_passes_for_d3() {
    let out = meslab(&["verify", "--d", "3", "--suite", "all"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["command"], "verify");
    assert!(v["suites"].as_array().unwrap().iter().all(|s| s["passed"] == true));
}

#[test]
fn non_prime_dimension_is_a_usage_error() {
    for d in ["4", "2", "9", "1", "x"] {
        let out = meslab(&["verify", "--d", d]);
        assert_eq!(out.status.code(), Some(2), "d={d}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("dimension must be an odd prime"));
    }
}

#[test]
fn unknown_flags_and_bad_values_exit_2() {
    assert_eq!(meslab(&["king", "--d", "3", "--bogus"]).status.code(), Some(2));
    assert_eq!(meslab(&["verify", "--d", "3", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(meslab(&["track", "--d", "3", "--line", "1"]).status.code(), Some(2));
    assert_eq!(meslab(&["track", "--d", "3", "--line", "3,0"]).status.code(), Some(2));
    assert_eq!(meslab(&["king", "--d", "3", "--basis", "7"]).status.code(), Some(2));
    assert_eq!(meslab(&["king", "--d", "3", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(meslab(&["mes", "--d", "3", "--format", "text"]).status.code(), Some(2));
    assert_eq!(meslab(&[]).status.code(), Some(2));
}

#[test]
fn help_and_version() {
    let out = meslab(&["--version"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("meslab "));
    let out = meslab(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let help = String::from_utf8_lossy(&out.stdout);
    for cmd in ["mub", "geometry", "mes", "verify", "king", "track"] {
        assert!(help.contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn king_report_has_provenance_and_full_success() {
    let out = meslab(&["king", "--d", "5", "--trials", "1000", "--seed", "42"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["command"], "king");
    assert_eq!(v["d"], 5);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["trials"], 1000);
    assert_eq!(v["empirical"]["success_rate"], 1.0);
    assert_eq!(v["exact"]["correct"], "1");
    assert_eq!(v["exact"]["per_basis"].as_array().unwrap().len(), 6);
}

#[test]
fn king_with_fixed_basis_and_transcript() {
    let out = meslab(&["king", "--d", "3", "--trials", "50", "--seed", "1", "--basis", "cb", "--transcript"]);
    let v = json(&out);
    assert_eq!(v["policy"]["fixed"], "cb");
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 50);
    for (i, r) in records.iter().enumerate() {
        assert_eq!(r["trial"], i as u64);
        assert_eq!(r["king"]["basis"], "cb");
        assert_eq!(r["verdict"], "correct");
        assert_eq!(r["deduction"]["outcome"], r["king"]["outcome"]);
    }
}

#[test]
fn track_cb_reports_exact_rates() {
    let out = meslab(&["track", "--d", "5", "--line", "2,3", "--trials", "2000", "--seed", "5", "--basis", "ö"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["protocol"], "track");
    assert_eq!(v["preparation"]["line"]["m_dd"], 2);
    assert_eq!(v["exact"]["correct"], "4/5");
    assert_eq!(v["exact"]["undetermined"], "1/5");
    assert_eq!(v["empirical"]["error_count"], 0);
}

#[test]
fn track_csv_summary() {
    let out = meslab(&["track", "--d", "3", "--line", "1,0", "--trials", "300", "--seed", "2", "--basis", "1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "b,trials,correct,undetermined,error,exact_correct,exact_undetermined,exact_error");
    assert!(rows[1].starts_with("1,300,"));
    assert!(rows[1].ends_with(",2/3,1/3,0"));
    assert!(rows[2].starts_with("all,300,"));
}

#[test]
fn tables() {
    let v = json(&meslab(&["mub", "--d", "3"]));
    assert_eq!(v["bases"].as_array().unwrap().len(), 4);
    assert_eq!(v["bases"][0]["b"], "cb");

    let v = json(&meslab(&["geometry", "--d", "3"]));
    assert_eq!(v["lines"].as_array().unwrap().len(), 9);
    assert_eq!(v["points"], 12);

    let dot = meslab(&["geometry", "--d", "3", "--dot"]);
    assert!(String::from_utf8_lossy(&dot.stdout).starts_with("graph dapg {"));

    let v = json(&meslab(&["mes", "--d", "3"]));
    let probs = v["overlaps"]["probabilities"].as_array().unwrap();
    assert_eq!(probs.len(), 12);
    assert_eq!(probs[0].as_array().unwrap().len(), 9);
    assert_eq!(v["line_states"].as_array().unwrap().len(), 9);

    let csv = meslab(&["mes", "--d", "3", "--format", "csv"]);
    assert_eq!(String::from_utf8_lossy(&csv.stdout).lines().count(), 1 + 12 * 9);
    let csv = meslab(&["mes", "--d", "3", "--format", "csv", "--table", "lines"]);
    assert_eq!(String::from_utf8_lossy(&csv.stdout).lines().count(), 1 + 9 * 3);
}

#[test]
fn meslab_out_and_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_meslab"))
        .args(["mub", "--d", "3"])
        .env("MESLAB_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let written = std::fs::read(dir.path().join("mub-d3.json")).unwrap();
    assert_eq!(written, meslab(&["mub", "--d", "3"]).stdout);

    let file = dir.path().join("nested/g.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_meslab"))
        .args(["geometry", "--d", "3", "--format", "csv", "--out", file.to_str().unwrap()])
        .env("MESLAB_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&file).unwrap().starts_with("line_m_dd,line_m0,point_m,point_b"));

    let out = Command::new(env!("CARGO_BIN_EXE_meslab"))
        .args(["mub", "--d", "3", "--out", "-"])
        .env("MESLAB_OUT", dir.path())
        .output()
        .unwrap();
    assert!(!out.stdout.is_empty());
}

#[test]
fn verify_text_and_csv() {
    let out = meslab(&["verify", "--d", "5", "--suite", "geometry", "--format", "text"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.ends_with("all checks passed\n"));
    let out = meslab(&["verify", "--d", "3", "--suite", "mub", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("suite,check,passed,cases,violations\n"));
    assert!(text.lines().skip(1).all(|l| l.contains(",true,")));
}

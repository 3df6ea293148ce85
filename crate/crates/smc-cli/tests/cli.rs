use std::io::Write;
use std::process::{Command, Output, Stdio};

fn smc(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_smc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn smc");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(args: &[&str], stdin: &str) -> String {
    let out = smc(args, stdin);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str], stdin: &str) -> serde_json::Value {
    let mut a = vec!["--json"];
    a.extend_from_slice(args);
    serde_json::from_str(&stdout(&a, stdin)).unwrap()
}

const K4: &str = "graph 4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n";

#[test]
fn maxcut_of_k4() {
    let out = stdout(&["maxcut"], K4);
    assert!(out.starts_with("score 4\n"), "{out}");
    assert_eq!(json(&["maxcut", "--policy", "local"], K4)["score"], 4);
}

#[test]
fn generated_csp_agrees_with_oracle() {
    for seed in ["1", "2", "3"] {
        let inst = stdout(&["--seed", seed, "gen", "csp", "--n", "7", "--m", "10", "--r", "3"], "");
        let solved = json(&["solve-csp"], &inst);
        let oracle = json(&["oracle", "csp"], &inst);
        assert_eq!(solved["score"], oracle["score"]);
    }
}

#[test]
fn domination_counts() {
    let expect = "0 0\n1 4\n2 6\n3 4\n4 1\n";
    assert_eq!(stdout(&["count-ds"], K4), expect);
    assert_eq!(stdout(&["count-ds", "--subcubic"], K4), expect);
    assert_eq!(stdout(&["oracle", "ds"], K4), expect);
    let labeled = "graph 2 1\n0 1\nlabel 0 C\nlabel 1 N\n";
    assert_eq!(stdout(&["count-ds", "--subcubic"], labeled), stdout(&["oracle", "ds", "--labeled"], labeled));
}

#[test]
fn set_cover_counts() {
    let sc = "setcover 2 2\nset 0 0 1\nset 1 1\n";
    assert_eq!(stdout(&["count-sc"], sc), "0 0\n1 1\n2 1\n");
    assert_eq!(stdout(&["oracle", "sc"], sc), "0 0\n1 1\n2 1\n");
}

#[test]
fn max2sat_reports_model() {
    let out = stdout(&["max2sat"], "p cnf 2 2\n1 2 0\n-1 0\n");
    assert_eq!(out, "score 2\nv -1 2 0\n");
}

#[test]
fn separation_is_valid() {
    let g = stdout(&["--seed", "5", "gen", "cubic", "--n", "20"], "");
    for method in ["cubic", "bisect", "measure"] {
        let out = stdout(&["separate", "--method", method], &g);
        assert!(out.contains("valid true"), "{method}: {out}");
    }
}

#[test]
fn lower_bound_traces() {
    assert!(stdout(&["trace-lb", "--family", "g3", "--n", "40"], "").contains("branchings=10 expected=10 match=true"));
    let v = json(&["trace-lb", "--family", "g4", "--n3", "16", "--n4", "8"], "");
    assert_eq!(v["branchings"], 7);
}

#[test]
fn measure_audits() {
    assert_eq!(
        stdout(&["audit-measure", "--system", "sc"], "").lines().last().unwrap(),
        "feasible=true exponent=0.60243 base=1.5183"
    );
    let v = json(&["audit-measure", "--system", "csp"], "");
    assert_eq!(v["feasible"], true);
    assert!((v["base"].as_f64().unwrap() - 1.2458).abs() < 1e-4);
}

#[test]
fn audited_solve_is_clean() {
    let g = stdout(&["--seed", "9", "gen", "cubic", "--n", "16"], "");
    let v = json(&["maxcut", "--audit"], &g);
    assert_eq!(v["audit"]["violations"], 0, "{v}");
}

#[test]
fn input_errors_exit_with_two() {
    let out = smc(&["maxcut"], "not a graph");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
    let out = smc(&["maxcut", "/nonexistent/input"], "");
    assert_eq!(out.status.code(), Some(2));
    let out = smc(&["gen", "g3", "--n", "6"], "");
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn generators_are_seeded() {
    let a = stdout(&["--seed", "3", "gen", "graph", "--n", "12"], "");
    assert_eq!(a, stdout(&["--seed", "3", "gen", "graph", "--n", "12"], ""));
    assert!(a.starts_with("graph 12 "));
}

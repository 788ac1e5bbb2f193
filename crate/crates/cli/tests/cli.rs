use std::process::{Command, Output};

fn qtrees(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtrees"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

#[test]
fn permuted_tree_level_as_csv() {
    let o = qtrees(&["tree", "--kind", "sb", "--permuted", "--depth", "4", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "level,index,num,den");
    assert_eq!(lines.len(), 9);
    assert_eq!(lines[1], "4,1,1,4");
    assert_eq!(lines[8], "4,8,4,1");
}

#[test]
fn orbit_of_infinity_reaches_three() {
    let o = qtrees(&["enumerate", "--map", "R", "--start", "1/0", "--count", "9"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 10);
    assert_eq!(text.lines().nth(1), Some("0,1,0"));
    assert_eq!(text.lines().last(), Some("8,3,1"));
}

#[test]
fn question_mark_values() {
    let o = qtrees(&["qmark", "2/5", "1/3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines, ["input,value,decimal", "2/5,3/2^3,0.375", "1/3,1/2^2,0.25"]);
}

#[test]
fn verify_passes_and_lists() {
    let o = qtrees(&["verify", "--suite", "exact-core,lr-coding", "--seed", "7"]);
    assert!(o.status.success());
    assert!(stdout(&o).lines().all(|l| !l.starts_with("FAIL")));
    let o = qtrees(&["verify", "--list"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("hitting-curve"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(qtrees(&["bogus"]).status.code(), Some(1));
    assert_eq!(qtrees(&["tree", "--kind", "nope", "--depth", "2"]).status.code(), Some(1));
    assert_eq!(qtrees(&["enumerate", "--map", "R", "--start", "1/x", "--count", "3"]).status.code(), Some(1));
    assert_eq!(qtrees(&["verify", "--suite", "no-such-suite"]).status.code(), Some(1));
}

#[test]
fn json_carries_metadata() {
    let o = qtrees(&["--format", "json", "simulate", "--chain", "mc0", "--walks", "4", "--horizon", "8", "--seed", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).expect("valid JSON");
    assert_eq!(v["metadata"]["command"], "simulate");
    assert_eq!(v["metadata"]["seed"], 3);
    assert_eq!(v["rows"].as_array().map(Vec::len), Some(4));
}

#[test]
fn output_file_is_written() {
    let dir = std::env::temp_dir().join(format!("qtrees-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("rows.csv");
    let o = qtrees(&["tree", "--kind", "farey", "--depth", "2", "-o", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, "level,index,num,den\n2,1,1,3\n2,2,2,3\n");
    std::fs::remove_dir_all(dir).unwrap();
}

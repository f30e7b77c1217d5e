use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn ittm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ittm")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_program(name: &str, rules: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ittm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(format!("{name}.ittm"));
    let text = format!("program {name}\nstates start=s limit=L halt=h\n{rules}");
    std::fs::write(&path, text).unwrap();
    path
}

fn jsonl(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn run_exit_codes() {
    let zero = write_program("zero", "rule s *** -> --- R h\n");
    let drift = write_program("drift", "rule s *** -> --- R s\n");
    let relimit = write_program("relimit", "rule s *** -> --- R s\nrule L *** -> --- R s\n");
    let stuck = write_program("stuck", "rule s 1** -> --- R h\n");
    let cases: &[(Vec<&str>, i32)] = &[
        (vec!["run", "pc-output", "--policy", "tail=1"], 0),
        (vec!["run", "pc-scratch", "--policy", "script=1.0,tail=1"], 1),
        (vec!["run", zero.to_str().unwrap()], 1),
        (vec!["run", drift.to_str().unwrap()], 2),
        (vec!["run", relimit.to_str().unwrap(), "--max-limits", "2"], 2),
        (vec!["run", stuck.to_str().unwrap()], 3),
        (vec!["run", stuck.to_str().unwrap(), "--input", "prefix=1,period=0"], 1),
        (vec!["run", "pc-scratch"], 3),
        (vec!["run", "no-such-program"], 3),
        (vec!["run", "pc-output", "--policy", "tail=1", "--max-steps", "0"], 3),
    ];
    for (args, code) in cases {
        let o = ittm(args);
        assert_eq!(o.status.code(), Some(*code), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn run_trace_is_jsonl() {
    let o = ittm(&["run", "pc-output", "--policy", "script=1.0,tail=1"]);
    let lines = jsonl(&o);
    assert!(lines.len() >= 3);
    for v in &lines {
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["choice", "event", "head", "stage", "state", "tapes"]);
    }
    assert_eq!(lines[0]["stage"], "0");
    assert_eq!(lines[1]["choice"], 1);
    let last = lines.last().unwrap();
    assert_eq!(last["event"], "halt");
    assert_eq!(last["stage"], "w*1 + 1");
    let before = &lines[lines.len() - 2];
    assert_eq!(before["event"], "limit");
    assert_eq!(before["head"], 1);
    assert_eq!(before["tapes"]["output"]["prefix"], "10");
    assert_eq!(before["tapes"]["output"]["period"], "1");

    let o = ittm(&["run", "pc-output", "--policy", "tail=1", "--format", "summary"]);
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["outcome"], "halted");
    assert_eq!(v["output_bit"], 1);
}

#[test]
fn explore_and_recognize() {
    let bounds = ["--script-len", "0", "--tail-len", "1"];
    for (program, accepted, code) in [("pc-scratch", false, 1), ("pc-output", true, 0)] {
        let mut args = vec!["explore", program];
        args.extend(bounds);
        let o = ittm(&args);
        assert_eq!(o.status.code(), Some(code));
        let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
        assert_eq!(v["paths"].as_array().unwrap().len(), 2);
        assert_eq!(v["summary"]["accepted"], accepted);
        assert!(v["paths"].as_array().unwrap().iter().all(|p| p["outcome"] == "halted"));

        let mut args = vec!["recognize", program];
        args.extend(bounds);
        let o = ittm(&args);
        assert_eq!(o.status.code(), Some(code));
        let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
        let expected = if accepted { "accept" } else { "no_witness_found" };
        assert_eq!(v["result"], expected);
    }
    let o = ittm(&["explore", "pc-output", "--sequential", "--script-len", "2", "--tail-len", "2"]);
    let p = ittm(&["explore", "pc-output", "--script-len", "2", "--tail-len", "2"]);
    assert_eq!(stdout(&o), stdout(&p));
}

#[test]
fn tree_leaves() {
    let o = ittm(&["tree", "pc-scratch", "--depth", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    fn leaves(v: &Value) -> Vec<Vec<u64>> {
        let kids = v["children"].as_array().unwrap();
        if kids.is_empty() {
            let c = v["choices"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
            return vec![c];
        }
        kids.iter().flat_map(|k| leaves(&k["node"])).collect()
    }
    let mut got = leaves(&v);
    got.sort();
    got.dedup();
    assert_eq!(got.len(), 8);
    assert!(got.iter().all(|c| c.len() == 3));
}

#[test]
fn encode_decode() {
    let o = ittm(&["encode", "pair", "--i", "2", "--j", "2"]);
    assert_eq!(stdout(&o).trim(), "36");
    let o = ittm(&["decode", "pair", "--pos", "36"]);
    assert_eq!(stdout(&o).trim(), "(2,2)");

    let o = ittm(&["encode", "relation", "--pairs", "(1,2),(2,1)"]);
    assert_eq!(stdout(&o).trim(), "support=12,18");
    let o = ittm(&["decode", "relation", "--stream", "support=12,18"]);
    assert_eq!(stdout(&o).trim(), "{(2,1),(1,2)}");
    let o = ittm(&["decode", "relation", "--stream", "support=5"]);
    assert_eq!(o.status.code(), Some(3));

    let o = ittm(&["encode", "real-pair", "--a", "prefix=,period=1", "--b", "prefix=,period=0"]);
    let paired = stdout(&o).trim().to_string();
    assert_eq!(paired, "prefix=,period=10");
    let o = ittm(&["decode", "real-pair", "--stream", &paired]);
    assert_eq!(stdout(&o), "prefix=,period=1\nprefix=,period=0\n");
}

#[test]
fn snapshot_code_round_trips_through_a_pipe() {
    let enc = ittm(&["encode", "snapshot", "pc-scratch", "--input", "prefix=101,period=0"]);
    assert_eq!(enc.status.code(), Some(0));
    let code = stdout(&enc);
    assert!(code.trim().chars().all(|c| c.is_ascii_digit()));

    let mut child = Command::new(env!("CARGO_BIN_EXE_ittm"))
        .args(["decode", "snapshot", "--program", "pc-scratch"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(code.as_bytes()).unwrap();
    let dec = child.wait_with_output().unwrap();
    assert_eq!(dec.status.code(), Some(0));
    let v: Value = serde_json::from_str(stdout(&dec).trim()).unwrap();
    assert_eq!(v["stage"], "0");
    assert_eq!(v["head"], 1);
    assert_eq!(v["state"], "s");
    assert_eq!(v["tapes"]["input"]["prefix"], "101");

    let by_arg = ittm(&["decode", "snapshot", "--program", "pc-scratch", code.trim()]);
    assert_eq!(stdout(&by_arg), stdout(&dec));
}

#[test]
fn run_code_round_trip() {
    let zero = write_program("tiny", "rule s *** -> --- R h\n");
    let path = zero.to_str().unwrap();
    let enc = ittm(&["encode", "run", path]);
    assert_eq!(enc.status.code(), Some(0), "{}", String::from_utf8_lossy(&enc.stderr));
    let stream = stdout(&enc);
    let dec = ittm(&["decode", "run", "--program", path, "--stream", stream.trim()]);
    assert_eq!(dec.status.code(), Some(0));
    let lines = jsonl(&dec);
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["stage"], "0");
    assert_eq!(lines[1]["state"], "h");
}

#[test]
fn samples() {
    let o = ittm(&["samples", "list"]);
    let names: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    assert!(names.iter().any(|n| n == "pc-scratch"));
    assert!(names.iter().any(|n| n == "count-through"));
    for name in names.iter().filter(|n| !n.contains(':')) {
        let o = ittm(&["samples", "emit", name]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        let parsed = ittm_core::parse_program(&text).unwrap();
        assert_eq!(&parsed, &ittm_core::programs::sample(name).unwrap());
    }
    let o = ittm(&["samples", "emit", "nope"]);
    assert_eq!(o.status.code(), Some(3));
}

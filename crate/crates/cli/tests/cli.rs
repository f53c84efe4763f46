use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mlfq-sim"));
    c.env_remove("MLFQ_SIM_SCENARIO_DIR");
    c
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn step(script: &str) -> String {
    let mut child = bin()
        .args(["step", "paper-demo"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(script.as_bytes())
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    stdout(&out)
}

#[test]
fn golden_trace_until_178() {
    let o = run(&["run", "paper-demo", "--until", "178", "--trace"]);
    assert_eq!(o.status.code(), Some(0));
    let golden = include_str!("golden/paper-demo-until-178.txt");
    assert_eq!(stdout(&o), golden);
    assert!(golden.contains("t=178 Terminated pid=1"));
}

#[test]
fn run_empty_scenario() {
    let o = run(&["run", &fixture("empty.txt")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("finished: 0  rejected: 0  censored: 0"));
}

#[test]
fn run_bad_file_exits_2() {
    let o = run(&["run", &fixture("bad-tag.txt")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2: unknown event tag 'X'"));
    assert!(o.stdout.is_empty());
}

#[test]
fn run_unknown_scenario_and_bad_flags_exit_2() {
    assert_eq!(run(&["run", "no-such-scenario"]).status.code(), Some(2));
    assert_eq!(
        run(&["run", "paper-demo", "--memory", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["run", "paper-demo", "--until", "40000"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["run", "paper-demo", "--sems", "1,2"]).status.code(),
        Some(2)
    );
    // Events beyond a shortened horizon are an input error.
    assert_eq!(
        run(&["run", "paper-demo", "--max-time", "1000"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn validate_reports() {
    let o = run(&["validate", "paper-demo"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "OK: 74 events\n");

    let o = run(&["validate", &fixture("decreasing.txt")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2: time 5 is earlier than previous event time 10"));

    let o = run(&["validate", &fixture("bad-sem.txt")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2:") && stderr(&o).contains("1..5"));
}

#[test]
fn json_is_one_document_and_agrees_with_text() {
    let j = run(&["run", "paper-demo", "--format", "json"]);
    assert_eq!(j.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&j.stdout).unwrap();
    let t = stdout(&run(&["run", "paper-demo"]));

    let stats = &doc["stats"];
    assert_eq!(doc["final_time"], 7640);
    let rows: Vec<&str> = t
        .lines()
        .skip_while(|l| !l.trim_start().starts_with("pid"))
        .skip(1)
        .take_while(|l| !l.starts_with("final"))
        .collect();
    let procs = stats["per_process"].as_array().unwrap();
    assert_eq!(rows.len(), procs.len());
    for (row, p) in rows.iter().zip(procs) {
        let cells: Vec<&str> = row.split_whitespace().collect();
        let fields = [
            "pid",
            "arrival_time",
            "completion_time",
            "turnaround",
            "job_queue_wait",
            "ready_wait",
            "io_wait",
            "sem_wait",
            "cpu_time",
        ];
        for (cell, f) in cells.iter().zip(fields) {
            assert_eq!(cell.to_string(), p[f].to_string(), "{f} in {row}");
        }
    }
    let avg = stats["averages"]["turnaround"].as_f64().unwrap();
    assert!(t.contains(&format!("average turnaround: {avg:.2}")));
    // The D event at 779 produces a status dump.
    let dumps = doc["status_dumps"].as_array().unwrap();
    assert_eq!(dumps.len(), 1);
    assert_eq!(dumps[0]["time"], 779);
    assert_eq!(dumps[0]["state"]["cpu"]["pid"], 13);
    assert!(doc.get("trace").is_none());

    let j = run(&[
        "run",
        "paper-demo",
        "--format",
        "json",
        "--trace",
        "--until",
        "200",
    ]);
    let doc: Value = serde_json::from_slice(&j.stdout).unwrap();
    assert!(doc["trace"].as_array().unwrap().len() > 100);
}

#[test]
fn status_dumps_in_text_mode() {
    let o = run(&["run", &fixture("dumps.txt")]);
    let s = stdout(&o);
    assert_eq!(s.matches("time 12   memory").count(), 1);
    assert!(s.contains("I/O wait:   1@15"));
    assert!(s.contains("rejected:   2"));
}

#[test]
fn config_flags_apply() {
    let j = run(&[
        "run",
        "fcfs-basic",
        "--q1",
        "0",
        "--q2",
        "0",
        "--sems",
        "1,0,0,0,2",
        "--format",
        "json",
    ]);
    let doc: Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(doc["config"]["quantum_level1"], 0);
    assert_eq!(
        doc["config"]["semaphore_initial_values"],
        serde_json::json!([1, 0, 0, 0, 2])
    );
}

#[test]
fn step_walkthrough() {
    let out = step("t 100\ns\nt 101\nn\nq\n");
    let dump = out.split("now 100").nth(1).unwrap();
    assert!(dump.contains("CPU:        1 (remaining 78/78, quantum 100)"));
    assert!(out.contains("now 120\n  t=120 Arrived pid=2"));
}

#[test]
fn step_clamps_and_survives_bad_input() {
    let out = step("+20\n-50\nbogus\nt 99999\nt x\np\n+5\n");
    assert!(out.contains("now 20\n"));
    assert!(out.contains("clamped to 0\nnow 0\n"));
    assert!(out.contains("unknown command 'bogus'"));
    assert!(out.contains("time 99999 is outside 0..30000"));
    assert!(out.contains("'x' is not an integer"));
    assert!(out.contains("no earlier event"));
    assert!(out.trim_end().ends_with("now 5"));
}

#[test]
fn scenarios_lists_catalog_and_honors_dir() {
    let o = run(&["scenarios"]);
    let s = stdout(&o);
    for n in [
        "paper-demo",
        "fcfs-basic",
        "semaphore-demo",
        "collision-demo",
    ] {
        assert!(s.contains(n));
    }
    let dir = std::env::temp_dir().join(format!("mlfq-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("tiny.txt"), "# one small job\nA 0 5 5\n").unwrap();
    let o = bin()
        .env("MLFQ_SIM_SCENARIO_DIR", &dir)
        .args(["scenarios"])
        .output()
        .unwrap();
    assert!(stdout(&o).contains("tiny             one small job"));
    let o = bin()
        .env("MLFQ_SIM_SCENARIO_DIR", &dir)
        .args(["run", "tiny"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("finished: 1"));
    std::fs::remove_dir_all(&dir).unwrap();
}

use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_tspd");

fn tspd(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn record_line(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .find(|l| l.starts_with("tspd-solution/1 "))
        .expect("record line")
        .to_string()
}

fn generate(dir: &Path, n: usize, seed: u64) -> String {
    let path = dir.join(format!("n{n}s{seed}.txt"));
    let p = path.to_str().unwrap().to_string();
    let out = tspd(&["generate", "--n", &n.to_string(), "--seed", &seed.to_string(), "--out", &p]);
    assert!(out.status.success());
    p
}

#[test]
fn generate_then_solve() {
    let tmp = tempfile::tempdir().unwrap();
    let inst = generate(tmp.path(), 7, 4);
    let rec = tmp.path().join("rec.txt");
    let out = tspd(&[
        "solve", "--instance", &inst, "--objective", "time", "--seed", "3", "--params", "iter_ni=100",
        "--record", rec.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let line = record_line(&out);
    assert!(line.contains(" objective=time ") && line.contains(" feasible=1 "));
    assert_eq!(std::fs::read_to_string(rec).unwrap(), format!("{line}\n"));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("instance   gen-n7-s4\n"));
}

#[test]
fn generate_to_stdout_matches_file() {
    let tmp = tempfile::tempdir().unwrap();
    let path = generate(tmp.path(), 5, 9);
    let out = tspd(&["generate", "--n", "5", "--seed", "9"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), std::fs::read_to_string(path).unwrap());
}

#[test]
fn usage_and_parse_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let inst = generate(tmp.path(), 4, 1);
    assert_eq!(tspd(&["solve", "--instance", &inst, "--bogus"]).status.code(), Some(1));
    assert_eq!(tspd(&["solve", "--instance", "/does/not/exist"]).status.code(), Some(1));
    assert_eq!(tspd(&["solve", "--instance", &inst, "--params", "mu=0"]).status.code(), Some(1));
    assert_eq!(tspd(&["solve", "--instance", &inst, "--crossover", "abc"]).status.code(), Some(1));
    let broken = tmp.path().join("broken.txt");
    std::fs::write(&broken, "TSPD 1\nNAME x\nN two\n").unwrap();
    let out = tspd(&["solve", "--instance", broken.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3: N:"));
    assert_eq!(tspd(&["--help"]).status.code(), Some(0));
}

#[test]
fn no_feasible_solution_exits_with_two() {
    // Free drone flights that always break the endurance, with no penalty
    // weight on the violation: every decoded solution flies and is infeasible.
    let text = "TSPD 1
NAME hopeless
N 3
ENDURANCE 0.01
LAUNCH_TIME 1
RETRIEVE_TIME 1
TRUCK_COST 1000
DRONE_COST 0
TRUCK_WAIT_FEE 0
DRONE_WAIT_FEE 0
TRUCK_SPEED 0.6666666666666666
DRONE_SPEED 0.6666666666666666
WAIT_FEES as_written
NODES
0 0 0 0
1 5 0 1
2 5 5 1
3 0 5 1
END
";
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("hopeless.txt");
    std::fs::write(&path, text).unwrap();
    let out = tspd(&[
        "solve", "--instance", path.to_str().unwrap(), "--params", "max_iterations=5,p_rep=0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no feasible solution"));
}

#[test]
fn bench_writes_runs_and_aggregates() {
    let tmp = tempfile::tempdir().unwrap();
    let a = generate(tmp.path(), 5, 1);
    let b = generate(tmp.path(), 6, 2);
    let csv = tmp.path().join("out.csv");
    let out = tspd(&[
        "bench", "--instances", &a, &b, "--objective", "cost", "--runs", "2", "--params", "iter_ni=30", "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 4 + 2);
    assert_eq!(lines.iter().filter(|l| l.starts_with("aggregate,")).count(), 2);
}

#[test]
fn verify_passes() {
    let out = tspd(&["verify", "--cases", "3"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("verify: ok"));
}

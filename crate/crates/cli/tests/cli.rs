use std::path::Path;
use std::process::{Command, Output};

fn phfkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phfkit")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn seq_reports_terminating_number() {
    let o = phfkit(&["seq", "3,6,8,4,5,1,7,2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("tau: 3"), "{s}");
    assert!(s.contains("chi: (1,0,0)"), "{s}");
    assert!(stdout(&phfkit(&["seq", "1,2,3"])).contains("tau: 0"));
}

#[test]
fn repeated_entries_are_a_usage_error() {
    let o = phfkit(&["seq", "1,1,2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("repeated"));
}

#[test]
fn greedy_three_term_free_set() {
    let o = phfkit(&["solfree", "--equation", "1,1;2", "--m", "20"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("set: 1,2,4,5,10,11,13,14"));
    let o = phfkit(&["solfree", "--equation", "1,1;2", "--m", "1"]);
    assert!(stdout(&o).contains("set: 1\n"));
}

#[test]
fn exact_search_refuses_large_m() {
    let o = phfkit(&["solfree", "--r", "0,1,2", "--m", "100", "--strategy", "exact"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
}

#[test]
fn certificate_and_set_files() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let set = dir.path().join("set.txt");
    let o = phfkit(&["solfree", "--r", "0,1,2", "--m", "30", "--out", path(&cert), "--set-out", path(&set)]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(json["verified"], true);
    let lines = std::fs::read_to_string(&set).unwrap();
    assert_eq!(lines.lines().count(), json["set"].as_array().unwrap().len());

    let o = phfkit(&["export", "--input", path(&cert), "--to", "text"]);
    assert_eq!(stdout(&o), lines);
}

#[test]
fn built_matrix_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    let o = phfkit(&["phf", "build", "--r", "0,1,2", "--q", "31", "--auto-m", "--out", path(&csv)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = phfkit(&["phf", "verify", "--matrix", path(&csv)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS"));

    let json = dir.path().join("a.json");
    assert!(phfkit(&["export", "--input", path(&csv), "--to", "json", "--out", path(&json)]).status.success());
    let back = phfkit(&["export", "--input", path(&json), "--to", "csv"]);
    assert_eq!(stdout(&back), std::fs::read_to_string(&csv).unwrap());
}

#[test]
fn repeated_column_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("dup.csv");
    std::fs::write(&csv, "# q=5\n0,1,1\n2,3,3\n4,0,0\n").unwrap();
    let o = phfkit(&["phf", "verify", "--matrix", path(&csv)]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.starts_with("FAIL"), "{s}");
    assert!(s.contains("{1}") && s.contains("{2}"), "{s}");
}

#[test]
fn rainbow_cycle_reports_collision() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let o = phfkit(&["phf", "build", "--r", "1,3,5,6", "--q", "7", "--m-list", "0,1", "--out", path(&csv)]);
    assert!(o.status.success());
    let o = phfkit(&["phf", "verify", "--matrix", path(&csv)]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("rainbow 4-cycle"), "{s}");
    assert!(s.contains("zero mod q: true"), "{s}");
}

#[test]
fn out_of_range_m_cites_the_bound() {
    let o = phfkit(&["phf", "build", "--r", "0,1,2", "--q", "31", "--m-list", "0,20"]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("[0, 15]"), "{err}");
}

#[test]
fn bench_table() {
    let o = phfkit(&["bench", "--q", "13,31,61", "--no-timing"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("q,m_size,n,upper,lower"));
    let mut last_n = 0u64;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let n: u64 = cols[2].parse().unwrap();
        let upper: u64 = cols[3].parse().unwrap();
        assert!(n > last_n && n <= upper, "{line}");
        last_n = n;
    }

    let empty = phfkit(&["bench", "--q", ""]);
    assert_eq!(stdout(&empty), "q,m_size,n,upper,lower,runtime_ms\n");
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let runs: Vec<String> = ["1", "4"]
        .iter()
        .flat_map(|j| {
            [
                stdout(&phfkit(&["--jobs", j, "bench", "--q", "13,31", "--verify", "--no-timing"])),
                stdout(&phfkit(&["--jobs", j, "solfree", "--r", "0,1,3,7", "--m", "60", "--json"])),
            ]
        })
        .collect();
    assert_eq!(runs[0], runs[2]);
    assert_eq!(runs[1], runs[3]);
    assert_eq!(runs[0], stdout(&phfkit(&["bench", "--q", "13,31", "--verify", "--no-timing"])));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"m": "2^64", "t": 3}"#).unwrap();
    let o = phfkit(&["--config", path(&cfg), "tower"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("{3,7,256}"));
    std::fs::write(&cfg, r#"{"unknown": 1}"#).unwrap();
    assert_eq!(phfkit(&["--config", path(&cfg), "tower", "--m", "16", "--t", "3"]).status.code(), Some(2));
}

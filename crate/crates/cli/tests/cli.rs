use std::io::Write;
use std::process::{Command, Output, Stdio};

fn cluster(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_cluster"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    if let Some(text) = stdin {
        child.stdin.take().unwrap().write_all(text.as_bytes()).unwrap();
    } else {
        drop(child.stdin.take());
    }
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn centers(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

const SMALL: &str = "synth:n=400,d=3,c=4,sep=9,seed=1";

#[test]
fn bench_csv_has_one_row_per_cell() {
    let out = cluster(
        &["bench", "--dataset", SMALL, "--k", "2,4", "--m", "0.1,0.5", "--trials", "2", "--format", "csv"],
        None,
    );
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[0].starts_with("m,k,EM avg phi,EM++ avg phi impr"));
    assert!(lines[1].starts_with("0.1,2,"));
    assert!(lines[4].starts_with("0.5,4,"));
}

#[test]
fn bench_is_reproducible_under_seed() {
    let args = ["bench", "--dataset", SMALL, "--k", "4", "--m", "0.25", "--trials", "3", "--seed", "11", "--format", "csv"];
    let phi = |text: String| -> Vec<String> {
        text.lines()
            .skip(1)
            .map(|l| l.split(',').take(6).collect::<Vec<_>>().join(","))
            .collect()
    };
    assert_eq!(phi(stdout(&cluster(&args, None))), phi(stdout(&cluster(&args, None))));
}

#[test]
fn bench_writes_markdown_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.md");
    let out = cluster(
        &[
            "bench", "--dataset", SMALL, "--k", "3", "--m", "0.5", "--trials", "1",
            "--algo", "em,empp,stream,window", "--memory", "80", "--window", "200",
            "--out", path.to_str().unwrap(),
        ],
        None,
    );
    assert!(stdout(&out).is_empty());
    let table = std::fs::read_to_string(&path).unwrap();
    assert!(table.contains("| m | k | EM avg phi | EM++ avg phi impr | Stream avg phi impr | Window avg phi impr |"));
    assert!(table.contains("| 0.5 | 3 |"));
}

#[test]
fn bench_reports_missing_spam_file() {
    let out = cluster(&["bench", "--dataset", "spam:/nonexistent/spambase.data", "--trials", "1"], None);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("/nonexistent/spambase.data"), "{err}");
}

#[test]
fn bench_rejects_unknown_algorithm() {
    let out = cluster(&["bench", "--dataset", SMALL, "--algo", "kmedoids"], None);
    assert!(!out.status.success());
}

#[test]
fn stream_reads_stdin_with_header() {
    let mut input = String::from("x,y\n");
    for i in 0..600 {
        let c = if i % 2 == 0 { 0.0 } else { 100.0 };
        input.push_str(&format!("{},{}\n", c + (i % 7) as f64 * 0.1, c - (i % 5) as f64 * 0.1));
    }
    let out = cluster(&["stream", "--k", "2", "--memory", "50", "--seed", "3"], Some(&input));
    let mut found = centers(&stdout(&out));
    found.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap());
    assert_eq!(found.len(), 2);
    assert!(found[0][0] < 1.0 && found[1][0] > 99.0, "{found:?}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("ingested 600 points"));
}

#[test]
fn window_follows_the_recent_points() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("drift.txt");
    let mut text = String::new();
    for i in 0..3000 {
        let base = if i < 2000 { -500.0 } else { 500.0 };
        text.push_str(&format!("{} {}\n", base + (i % 3) as f64 * 20.0, (i % 11) as f64));
    }
    std::fs::write(&path, text).unwrap();
    let out = cluster(
        &["window", "--k", "3", "--window", "500", "--input", path.to_str().unwrap(), "--query-runs", "5", "--refine"],
        None,
    );
    let found = centers(&stdout(&out));
    assert_eq!(found.len(), 3);
    assert!(found.iter().all(|c| c[0] > 400.0), "{found:?}");
}

#[test]
fn malformed_input_names_row_and_column() {
    let out = cluster(&["stream", "--k", "2", "--memory", "50"], Some("1,2\n3,oops\n"));
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("oops") && err.contains('2'), "{err}");
}

#[test]
fn empty_input_is_an_error() {
    let out = cluster(&["window", "--k", "2", "--window", "10"], Some(""));
    assert!(!out.status.success());
}

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn decept(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_decept"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_records_a_replay_that_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let replay = dir.path().join("dc1.replay");
    let o = decept(&[
        "run",
        "--game",
        "DC1",
        "--agent",
        "oracle",
        "--seed",
        "3",
        "--replay-out",
        path(&replay),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("score=5"), "{}", stdout(&o));

    let o = decept(&["verify", "--replay", path(&replay)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    // change one recorded action
    let text = fs::read_to_string(&replay).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let first_step = lines.iter().position(|l| l.starts_with("0 ")).unwrap();
    let mut fields: Vec<String> = lines[first_step].split(' ').map(String::from).collect();
    fields[1] = if fields[1] == "U" {
        "D".into()
    } else {
        "U".into()
    };
    lines[first_step] = fields.join(" ");
    fs::write(&replay, lines.join("\n") + "\n").unwrap();
    let o = decept(&["verify", "--replay", path(&replay)]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("tick 0"), "{}", stderr(&o));
}

#[test]
fn verify_missing_file_is_usage_error() {
    let o = decept(&["verify", "--replay", "/nonexistent/x.replay"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn garbage_replay_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.replay");
    fs::write(&f, "not a replay\n").unwrap();
    let o = decept(&["verify", "--replay", path(&f)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["run", "--game", "DC9", "--agent", "oracle"],
        vec!["run", "--game", "DC1", "--agent", "nobody"],
        vec![
            "eval",
            "--game",
            "DC1",
            "--agent",
            "random",
            "--episodes",
            "0",
        ],
        vec![
            "eval", "--game", "DC1", "--agent", "random", "--format", "xml",
        ],
        vec![
            "train",
            "--game",
            "DC1",
            "--learner",
            "sarsa",
            "--episodes",
            "5",
        ],
        vec!["frobnicate"],
        vec![],
    ] {
        let o = decept(&args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
    let o = decept(&["run", "--game", "DC1", "--agent", "nobody"]);
    assert!(stderr(&o).contains("greedy"), "{}", stderr(&o));
}

#[test]
fn help_exits_zero() {
    let o = decept(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for sub in ["run", "eval", "train", "verify", "table"] {
        assert!(stdout(&o).contains(sub));
    }
}

#[test]
fn eval_csv_is_reproducible_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let o = decept(&[
            "eval",
            "--game",
            "DC1,Mints",
            "--agent",
            "random,greedy",
            "--episodes",
            "4",
            "--base-seed",
            "10",
            "--budget",
            "20",
            "--format",
            "csv",
            "--out",
            path(out),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());
    assert_eq!(
        String::from_utf8(text).unwrap().lines().count(),
        1 + 2 * 2 * 4
    );

    fs::remove_file(&b).unwrap();
    let o = decept(&["table", "--in", path(dir.path()), "--format", "markdown"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let md = stdout(&o);
    assert!(
        md.starts_with("| Agent | DC 1 | DC 2 | DC 3 | Inv | Flow | Mints |"),
        "{md}"
    );
    assert_eq!(md.lines().count(), 4);

    let o = decept(&["table", "--in", path(dir.path()), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(
        stdout(&o).starts_with("agent,game,mean,std,min,max,n"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn eval_markdown_to_stdout() {
    let o = decept(&[
        "eval",
        "--game",
        "DC1",
        "--agent",
        "oracle",
        "--episodes",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(
        stdout(&o).contains("| oracle | 5.00 ± 0.00 |"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn table_of_empty_dir_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = decept(&["table", "--in", path(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn train_writes_curve_and_policy_usable_by_run() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.csv");
    let policy = dir.path().join("policy.json");
    let o = decept(&[
        "train",
        "--game",
        "DC1",
        "--learner",
        "q",
        "--episodes",
        "300",
        "--seed",
        "1",
        "--curve-out",
        path(&curve),
        "--policy-out",
        path(&policy),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(&curve).unwrap();
    assert!(csv.starts_with("episode,return,length"));
    assert_eq!(csv.lines().count(), 301);

    let agent = format!("file:{}", path(&policy));
    let o = decept(&["run", "--game", "DC1", "--agent", &agent]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // a policy trained on one game is refused on another
    let o = decept(&["run", "--game", "DC2", "--agent", &agent]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_openimage"));
    c.env_remove("OPENIMAGE_CAP").env_remove("OPENIMAGE_BUDGET");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("openimage-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

#[test]
fn bound_gamma12() {
    let o = run(&["--format", "structured", "bound", "--degree", "1", "--height", "1", "--variant", "gamma12"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let line = s.lines().find(|l| l.starts_with("log10_index=")).unwrap();
    assert!(line.starts_with("log10_index=4.34294481903251827651128918916605"), "{line}");
    assert!(line.ends_with("e+21482"));
}

#[test]
fn bound_budget_tightens() {
    let args = ["--format", "structured", "bound", "--degree", "2", "--height", "3.5", "--variant", "composed"];
    let value = |budget: &str| -> f64 {
        let o = bin().args(args).env("OPENIMAGE_BUDGET", budget).output().unwrap();
        assert_eq!(o.status.code(), Some(0));
        let s = stdout(&o);
        s.lines().find_map(|l| l.strip_prefix("log10_index=")).unwrap().parse().unwrap()
    };
    let (a, b) = (value("64"), value("128"));
    assert!(b <= a && a.is_finite());
}

#[test]
fn bound_torsion_and_invalid() {
    let o = run(&["--format", "structured", "bound", "--degree", "1", "--variant", "gamma34", "--torsion", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("torsion_order=7"));
    assert_eq!(run(&["bound", "--degree", "0"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--degree", "1", "--height", "abc"]).status.code(), Some(2));
    assert_eq!(run(&["bound", "--degree", "1", "--budget", "0"]).status.code(), Some(2));
}

#[test]
fn classify_examples() {
    let cases = [
        ("prime = 5\nprecision = 1\ngenerators = [[[2, 0], [0, 3]], [[3, 0], [0, 3]]]\n", "split-cartan"),
        ("prime = 5\nprecision = 1\ngenerators = [[[1, 1], [0, 1]], [[2, 0], [0, 1]]]\n", "borel"),
        ("prime = 3\nprecision = 1\ngenerators = [[[1, 1], [0, 1]], [[1, 0], [1, 1]]]\n", "contains-sl2"),
    ];
    for (i, (text, tag)) in cases.iter().enumerate() {
        let f = scratch(&format!("classify{i}.toml"), text);
        let o = run(&["--format", "structured", "classify", f.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains(&format!("class={tag}\n")), "{}", stdout(&o));
    }
}

#[test]
fn malformed_file_exits_2() {
    let f = scratch("bad.toml", "prime = 3\nprecision = 2\ngenerators = [[1, 2]]\n");
    assert_eq!(run(&["classify", f.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--theorem", "star", "--file", f.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["lie", "/nonexistent/group.toml"]).status.code(), Some(2));
}

#[test]
fn cap_exceeded_exits_3() {
    let o = bin().args(["fixture", "s3-lift"]).output().unwrap();
    let f = scratch("s3.toml", &stdout(&o));
    let o = bin().args(["lie", f.to_str().unwrap()]).env("OPENIMAGE_CAP", "10").output().unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn lie_table() {
    let f = scratch(
        "lie.toml",
        "prime = 3\nprecision = 3\ngenerators = []\n[lie]\nx1 = [[1, 0], [3, -1]]\nx2 = [[3, 0], [0, -3]]\nx3 = [[0, 1], [0, 0]]\n",
    );
    let o = run(&["--format", "structured", "lie", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    for want in ["k=1\n", "j_1=2\n", "j_2=3\n", "j_3=3\n", "min_scale=2\n"] {
        assert!(s.contains(want), "{want} missing from {s}");
    }
}

#[test]
fn verify_fixtures() {
    let o = run(&["--format", "structured", "verify", "--theorem", "trichotomy", "--fixture", "optimal-lie", "--k", "0", "--n", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("j_n=3\n") && s.contains("tight=true\n"), "{s}");
    let o = run(&["verify", "--theorem", "starstar", "--fixture", "s3-lift", "--s", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("outcome=inapplicable"));
}

#[test]
fn verify_campaign_is_deterministic() {
    let args = [
        "--format", "structured", "verify", "--theorem", "starstar", "--prime", "3", "--precision", "3", "--s", "1",
        "--trials", "12", "--seed", "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let s = stdout(&a);
    assert!(s.contains("summary trials=12 ") && s.contains("violated=0"), "{s}");
    assert_eq!(s.lines().filter(|l| l.starts_with("theorem=starstar")).count(), 12);
}

#[test]
fn verify_file_round_trip() {
    let o = run(&["fixture", "pink-borel", "--prime", "7", "--s", "1", "--order", "3", "--precision", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let f = scratch("pink.toml", &stdout(&o));
    let o = run(&["--format", "structured", "lie", f.to_str().unwrap()]);
    assert!(stdout(&o).contains("min_scale=2\n"));
    let o = run(&["verify", "--theorem", "star", "--file", f.to_str().unwrap(), "--s", "1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn key_dump_reads_back() {
    let o = run(&["fixture", "s3-lift", "--dump"]);
    let f = scratch("s3.keys", &stdout(&o));
    let o = run(&["--format", "structured", "keys", f.to_str().unwrap(), "--prime", "5", "--precision", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("order=1500\n") && s.contains("sl2=true\n"), "{s}");
}

#[test]
fn selftest_passes() {
    let o = run(&["--format", "structured", "selftest"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!stdout(&o).contains("=fail"));
}

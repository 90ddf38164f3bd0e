use std::process::Command;

use mdsearch::adversaries::AdversaryKind;
use mdsearch::strategies::StrategyKind;
use mdsearch_cli::table::{EvalMode, RowConfig};
use mdsearch_cli::{cmd_sweep, parse_range, parse_shape, verify_shapes, CliError, SweepConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mdsearch"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn shapes_parse() {
    assert_eq!(parse_shape("6x5x4").unwrap().dims(), &[6, 5, 4]);
    assert_eq!(parse_shape("8").unwrap().dims(), &[8]);
    assert!(matches!(parse_shape("4x0"), Err(CliError::Usage(_))));
    assert!(matches!(parse_shape("4xa"), Err(CliError::Usage(_))));
    assert!(matches!(parse_shape(""), Err(CliError::Usage(_))));
    assert_eq!(parse_range("2-64").unwrap(), (2, 64));
    assert_eq!(parse_range("3").unwrap(), (3, 3));
    assert!(parse_range("0-3").is_err());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bounds", "--shape", "6x5x4"]).0, 0);
    assert_eq!(run(&["bounds", "--shape", "4x0"]).0, 2);
    assert_eq!(run(&["evaluate", "--shape", "4x4", "--strategy", "grid3d"]).0, 2);
    assert_eq!(run(&["solve", "--shape", "9x9"]).0, 3);
    assert_eq!(run(&["solve", "--shape", "4x4", "--max-states", "2"]).0, 3);
    assert_eq!(
        run(&[
            "simulate",
            "--shape",
            "4",
            "--strategy",
            "binary1d",
            "--adversary",
            "honest"
        ])
        .0,
        2
    );
    assert_eq!(
        run(&[
            "simulate",
            "--shape",
            "3x3",
            "--strategy",
            "binary1d",
            "--adversary",
            "greedy"
        ])
        .0,
        2
    );
}

#[test]
fn solve_and_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("line.jsonl");
    let (code, out, _) = run(&["solve", "--shape", "2x2", "--trace", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("exact_qc=4"));
    let tr = mdsearch::Transcript::from_jsonl(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(tr.queries(), 4);
    tr.replay().unwrap();
    let (code, out, _) = run(&["solve", "--shape", "3x2", "--symmetry", "false"]);
    assert_eq!(code, 0);
    assert!(out.contains("exact_qc=4"));
}

#[test]
fn simulate_binary_search() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("match.jsonl");
    let (code, out, _) = run(&[
        "simulate",
        "--shape",
        "8",
        "--strategy",
        "binary1d",
        "--adversary",
        "honest",
        "--target",
        "5",
        "--trace",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("outcome=found queries=2"));
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        r#"{"shape":[8],"strategy":"binary1d","adversary":"honest","target":[5],"queries":2,"outcome":"found"}"#
    );
    assert_eq!(lines[1], r#"{"q":[3],"reply":{"corner":[0]}}"#);
    assert_eq!(lines[2], r#"{"q":[5],"reply":"found"}"#);
}

#[test]
fn simulate_against_optimal_and_surfaces() {
    let (code, out, _) = run(&[
        "simulate",
        "--shape",
        "2x2",
        "--strategy",
        "grid2d",
        "--adversary",
        "optimal",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("queries=4"), "{out}");
    for (shape, strategy, adversary) in [
        ("9x6", "grid2d", "diagonal"),
        ("6x5x4", "slicing", "plane3d"),
        ("3x3x3", "slicing", "cube"),
    ] {
        let (code, out, err) = run(&[
            "simulate",
            "--shape",
            shape,
            "--strategy",
            strategy,
            "--adversary",
            adversary,
        ]);
        assert_eq!(code, 0, "{shape} {adversary}: {out}{err}");
    }
}

#[test]
fn evaluate_reports_worst_case() {
    let (code, out, _) = run(&["evaluate", "--shape", "8x3", "--strategy", "grid2d"]);
    assert_eq!(code, 0);
    assert!(out.contains("correct=true"));
    let wc: u32 = out
        .split("worst_case=")
        .nth(1)
        .unwrap()
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!(wc <= 11);
    let (code, out, _) = run(&["evaluate", "--shape", "2x4x3", "--sort", "--strategy", "slicing"]);
    assert_eq!(code, 0);
    assert!(out.contains("shape=4x3x2"));
}

#[test]
fn verify_small_grids() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.csv");
    let (code, _, err) = run(&["verify", "--max-cells", "20", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    for prefix in ["16,", "2x2,", "4x2x2,"] {
        assert!(rows.iter().any(|r| r.starts_with(prefix)), "missing {prefix}");
    }
    let two = rows.iter().find(|r| r.starts_with("2x2,")).unwrap();
    let cols: Vec<&str> = two.split(',').collect();
    assert_eq!(cols[1], "0");
    assert_eq!(cols[6], "4");
    let cube = rows.iter().find(|r| r.starts_with("2x2x2,")).unwrap();
    let cols: Vec<&str> = cube.split(',').collect();
    assert_eq!((cols[4], cols[6]), ("4", "8"));
}

#[test]
fn verify_shape_order_is_lexicographic() {
    let shapes: Vec<String> = verify_shapes(12).iter().map(|s| s.to_string()).collect();
    let mut sorted = shapes.clone();
    sorted.sort();
    assert_eq!(shapes, sorted);
    assert!(shapes.contains(&"3x2x2".to_string()));
    assert!(!shapes.contains(&"2x3".to_string()));
}

#[test]
fn sweep_writes_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let cfg = SweepConfig {
        ranges: vec![(2, 12), (2, 4)],
        row: RowConfig {
            strategies: vec![StrategyKind::Grid2d],
            adversaries: vec![AdversaryKind::Greedy],
            eval: EvalMode::Greedy,
            solve_max_cells: 12,
            ..Default::default()
        },
        out: path.clone(),
    };
    assert_eq!(cmd_sweep(&cfg).unwrap(), 33);
    let a = std::fs::read_to_string(&path).unwrap();
    assert!(a.starts_with("shape,lower_2d,per_segment_lower,lower_3d,lower_cube,budget_d,exact_qc,"));
    cmd_sweep(&cfg).unwrap();
    let b = std::fs::read_to_string(&path).unwrap();
    let strip = |s: &str| {
        s.lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn sweep_empty_range_and_bad_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.csv");
    let (code, _, _) = run(&["sweep", "--range", "5-4", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1);
    let bad = dir.path().join("missing").join("x.csv");
    let (code, _, _) = run(&["sweep", "--range", "2-3", "--out", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
}

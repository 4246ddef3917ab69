use std::process::{Command, Output};

use trcalc::cli::ChartFile;

fn trcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trcalc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn tr_chart_cells() {
    let o = trcalc(&["chart", "tr", "--p", "2", "--r", "3", "--vars", "1", "--max-weight", "8", "--max-dim", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let file = ChartFile::from_json(&stdout(&o)).unwrap();
    assert_eq!(file.version, 1);
    for c in &file.cells {
        let d = c.deg[0];
        let e = if d == 0 { 3 } else { (d.trailing_zeros() + 1).min(3) };
        assert_eq!(c.exps, vec![e], "{c:?}");
    }
    assert_eq!(file.cells.len(), 7 + 8 * 13);
    let keys: Vec<_> = file.cells.iter().map(|c| (c.deg.clone(), c.dim)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn length_one_is_rank_one_everywhere() {
    let o = trcalc(&["chart", "tr", "--p", "3", "--r", "1", "--max-weight", "5", "--max-dim", "9"]);
    let file = ChartFile::from_json(&stdout(&o)).unwrap();
    assert!(file.cells.iter().all(|c| c.exps == vec![1]));
    assert_eq!(file.cells.len(), 5 + 5 * 10);
}

#[test]
fn filtration_zero_is_tr() {
    let a = ChartFile::from_json(&stdout(&trcalc(&[
        "chart",
        "tr",
        "--p",
        "2",
        "--r",
        "2",
        "--vars",
        "2",
        "--max-weight",
        "3",
    ])))
    .unwrap();
    let b = ChartFile::from_json(&stdout(&trcalc(&[
        "chart",
        "filtration",
        "--i",
        "0",
        "--p",
        "2",
        "--r",
        "2",
        "--vars",
        "2",
        "--max-weight",
        "3",
    ])))
    .unwrap();
    assert_eq!(a.cells, b.cells);
}

#[test]
fn output_is_deterministic() {
    let args = ["chart", "gr", "--p", "3", "--r", "2", "--vars", "2", "--i", "1", "--max-weight", "4"];
    assert_eq!(trcalc(&args).stdout, trcalc(&args).stdout);
    let args = ["descent", "verify", "--p", "2", "--r", "2", "--weight", "3"];
    assert_eq!(trcalc(&args).stdout, trcalc(&args).stdout);
}

#[test]
fn descent_examples() {
    let o = trcalc(&["descent", "verify", "--p", "2", "--r", "2", "--weight", "4", "--kmax", "6", "--denom", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = trcalc(&["descent", "verify", "--p", "2", "--r", "1", "--weight", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = trcalc(&["descent", "verify", "--p", "5", "--r", "2", "--weight", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let o = trcalc(&["descent", "verify", "--p", "2", "--r", "2", "--deg", "1,2", "--max-dim", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn descent_writes_chart_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e2.json");
    let o = trcalc(&["descent", "verify", "--p", "3", "--r", "2", "--weight", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let file = ChartFile::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(file.engine, "compare");
    assert_eq!(file.cells.len(), 11);
    assert!(file.cells.iter().all(|c| c.exps == vec![2]));
}

#[test]
fn usage_errors() {
    for args in [
        &["chart", "tr", "--p", "6"][..],
        &["chart", "tr"],
        &["chart", "tr", "--p", "2", "--r", "0"],
        &["descent", "verify", "--p", "2", "--r", "2"],
        &["descent", "verify", "--p", "2", "--r", "3", "--weight", "2", "--denom", "1"],
        &["golden", "check", "/nonexistent/golden.json"],
        &["frobnicate"],
    ] {
        assert_eq!(trcalc(args).status.code(), Some(2), "{args:?}");
    }
    let o = Command::new(env!("CARGO_BIN_EXE_trcalc"))
        .args(["chart", "tr", "--p", "2"])
        .env("TRCALC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_trcalc"))
        .args(["descent", "verify", "--p", "3", "--r", "2", "--weight", "6"])
        .env("TRCALC_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn golden_round_trip_and_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tr.json");
    let p = path.to_str().unwrap();
    let o = trcalc(&[
        "golden",
        "record",
        p,
        "--target",
        "tr",
        "--p",
        "2",
        "--r",
        "2",
        "--vars",
        "2",
        "--max-weight",
        "3",
        "--max-dim",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(trcalc(&["golden", "check", p]).status.code(), Some(0));

    let text = std::fs::read_to_string(&path).unwrap().replacen("\"p\": 2", "\"p\": 3", 1);
    std::fs::write(&path, text).unwrap();
    let o = trcalc(&["golden", "check", p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("mismatch"));
    assert!(stdout(&o).contains("dim 0"));

    std::fs::write(&path, "{\"version\": 1}").unwrap();
    assert_eq!(trcalc(&["golden", "check", p]).status.code(), Some(2));
}

#[test]
fn golden_witt_row_is_stable_in_the_denominator() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("row.json");
    let p = path.to_str().unwrap();
    let o = trcalc(&[
        "golden", "record", p, "--target", "witt-row", "--p", "2", "--r", "2", "--weight", "6", "--denom", "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(trcalc(&["golden", "check", p, "--denom", "2"]).status.code(), Some(0));
}

#[test]
fn other_chart_targets() {
    let o = trcalc(&["chart", "mackey", "--p", "2", "--r", "4", "--max-dim", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let file = ChartFile::from_json(&stdout(&o)).unwrap();
    assert_eq!(file.cells.len(), 12);
    let o = trcalc(&["chart", "e3alg", "--p", "3", "--r", "2", "--denom", "2", "--max-weight", "3", "--max-dim", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let file = ChartFile::from_json(&stdout(&o)).unwrap();
    // z_ℓ^s survives for s < ℓ + 1, i.e. numerators below 9(ℓ + 1)
    assert_eq!(file.cells.len(), 9 + 18 + 27);
    assert!(file.cells.iter().all(|c| c.labels[0].contains("/3^2")));
    let o = trcalc(&["chart", "tr", "--p", "2", "--max-weight", "1", "--format", "csv"]);
    assert!(stdout(&o).starts_with("deg,dim,exps,labels\n"));
}

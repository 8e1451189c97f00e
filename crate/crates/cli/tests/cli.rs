use std::process::{Command, Output};

fn mprk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mprk"))
        .args(args)
        .env_remove("MPRK_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Data rows of a CSV: the provenance comment and header line removed.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(2)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s:?}"))
}

#[test]
fn integrate_reports_conserved_mass() {
    let out = mprk(&[
        "integrate",
        "--alpha",
        "-0.5",
        "--dt",
        "1",
        "--steps",
        "20",
        "--a",
        "20",
        "--b",
        "20",
        "--delta",
        "0.23",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("# mprk integrate"));
    assert_eq!(text.lines().nth(1), Some("step,t,y_1,y_2,mass"));
    let data = rows(&text);
    assert_eq!(data.len(), 21);
    for r in &data {
        assert!((num(&r[4]) - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn integrate_zero_steps_prints_initial_state() {
    let out = mprk(&[
        "integrate",
        "--alpha",
        "1",
        "--a",
        "1",
        "--delta",
        "0.25",
        "--steps",
        "0",
    ]);
    assert!(out.status.success());
    assert_eq!(
        rows(&stdout(&out)),
        vec![vec!["0", "0", "0.75", "0.25", "1"]]
    );
}

#[test]
fn integrate_reads_matrix_files() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("a.csv");
    std::fs::write(&good, "-2,1,0\n1,-1,3\n1,0,-3\n").unwrap();
    let out = mprk(&[
        "integrate",
        "--alpha",
        "-0.25",
        "--dt",
        "0.5",
        "--steps",
        "5",
        "--matrix",
        good.to_str().unwrap(),
        "--y0",
        "0.2,0.3,0.5",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().nth(1), Some("step,t,y_1,y_2,y_3,mass"));
    for r in rows(&text) {
        assert!((num(&r[5]) - 1.0).abs() <= 1e-12);
    }

    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "1,2,3\n4,5,6\n").unwrap();
    let out = mprk(&[
        "integrate",
        "--alpha",
        "1",
        "--matrix",
        bad.to_str().unwrap(),
        "--y0",
        "1,1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("non-square"));

    let typo = dir.path().join("typo.csv");
    std::fs::write(&typo, "-1,1\n1,x\n").unwrap();
    let out = mprk(&[
        "integrate",
        "--alpha",
        "1",
        "--matrix",
        typo.to_str().unwrap(),
        "--y0",
        "1,1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2, column 2"));

    let out = mprk(&[
        "integrate",
        "--alpha",
        "1",
        "--matrix",
        good.to_str().unwrap(),
        "--y0",
        "0.2,0,0.8",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn integrate_rejects_mixed_or_missing_groups() {
    let out = mprk(&["integrate", "--alpha", "1", "--a", "1", "--y0", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = mprk(&["integrate", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = mprk(&["integrate", "--a", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--alpha"));
    let out = mprk(&["integrate", "--alpha", "1", "--a", "1", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_delta_finds_transition_near_0_235() {
    let out = mprk(&[
        "scan-delta",
        "--alpha",
        "-0.5",
        "--a",
        "20",
        "--dt",
        "1",
        "--steps",
        "10000",
        "--samples",
        "200",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().nth(1), Some("delta,d,class"));
    let data = rows(&text);
    assert_eq!(data.len(), 200);
    let first_unstable = data.iter().position(|r| r[2] == "unstable").unwrap();
    assert!(data[..first_unstable].iter().all(|r| r[2] == "stable"));
    let below = num(&data[first_unstable - 1][0]);
    let above = num(&data[first_unstable][0]);
    assert!(below < 0.235 && 0.235 < above + 0.0025, "{below} {above}");
}

#[test]
fn scan_rejects_bad_grids() {
    let out = mprk(&["scan-delta", "--samples", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = mprk(&["scan-delta", "--alpha", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("MPRK22 undefined at alpha=0"));
    let out = mprk(&[
        "scan-alpha-delta",
        "--alpha-min",
        "-1",
        "--alpha-max",
        "1",
        "--alpha-samples",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("MPRK22 undefined at alpha=0"));
}

#[test]
fn scan_alpha_delta_rows_are_alpha_major() {
    let out = mprk(&[
        "scan-alpha-delta",
        "--alpha-min",
        "0.5",
        "--alpha-max",
        "1",
        "--alpha-samples",
        "2",
        "--delta-samples",
        "3",
        "--steps",
        "50",
        "--with-states",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().nth(1), Some("alpha,delta,d,class,y_1,y_2"));
    let data = rows(&text);
    assert_eq!(data.len(), 6);
    let alphas: Vec<&str> = data.iter().map(|r| r[0].as_str()).collect();
    assert_eq!(alphas, ["0.75", "0.75", "0.75", "1", "1", "1"]);
}

#[test]
fn stability_queries() {
    let out = mprk(&["stability", "--alpha", "1", "--z", "-2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().nth(1), Some("R,|R|,class,z_star"));
    let r = num(&rows(&text)[0][0]);
    assert!((r - 1.0 / 9.0).abs() < 1e-15);

    let out = mprk(&["stability", "--alpha", "-0.25"]);
    let text = stdout(&out);
    let zs = num(&rows(&text)[0][2]);
    assert!((zs + 4.4232).abs() < 1e-4);

    let out = mprk(&["stability", "--alpha", "0", "--z", "-1"]);
    assert_eq!(out.status.code(), Some(2));

    let out = mprk(&["stability", "--alpha", "0.5", "--dt", "2", "--lambda", "-1"]);
    assert!(out.status.success());
    assert_eq!(rows(&stdout(&out))[0][2], "stable");
}

#[test]
fn stability_sweep_flags_undefined_points() {
    let out = mprk(&[
        "stability",
        "--alpha",
        "0.25",
        "--zmin",
        "-2",
        "--zmax",
        "2",
        "--n",
        "5",
    ]);
    assert!(out.status.success());
    let data = rows(&stdout(&out));
    assert_eq!(data.len(), 5);
    assert_eq!(data[2], vec!["0", "1"]);
    assert_eq!(data[4][1], "undefined");

    // 1 - αz vanishes at z = 1/α for α ≥ 1/2.
    let out = mprk(&[
        "stability",
        "--alpha",
        "2",
        "--zmin",
        "0",
        "--zmax",
        "1",
        "--n",
        "3",
    ]);
    assert!(out.status.success());
    assert_eq!(rows(&stdout(&out))[1][1], "pole");
}

#[test]
fn convergence_order_column() {
    for alpha in ["1", "-1"] {
        let out = mprk(&["convergence", "--alpha", alpha]);
        assert!(out.status.success(), "{}", stderr(&out));
        let text = stdout(&out);
        assert_eq!(text.lines().nth(1), Some("dt,error,order"));
        let data = rows(&text);
        assert_eq!(data[0][2], "");
        let last = num(&data.last().unwrap()[2]);
        assert!((1.9..=2.1).contains(&last), "alpha {alpha}: {last}");
    }
    let out = mprk(&["convergence", "--dt-list", "0.1,0.05"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn every_subcommand_documents_its_flags() {
    for sub in [
        "integrate",
        "scan-delta",
        "scan-alpha-delta",
        "stability",
        "convergence",
    ] {
        let out = mprk(&[sub, "--help"]);
        assert!(out.status.success());
        let help = stdout(&out);
        assert!(help.contains("--out"), "{sub}");
    }
    let help = stdout(&mprk(&["scan-delta", "--help"]));
    assert!(help.contains("[default: 200]") && help.contains("--threads"));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.csv");
    let args = [
        "stability",
        "--alpha",
        "-1",
        "--zmin",
        "-10",
        "--zmax",
        "-1",
        "--n",
        "4",
    ];
    let printed = stdout(&mprk(&args));
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let out = mprk(&with_out);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
}

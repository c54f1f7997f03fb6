use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mixwidth"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_str(&stdout(&out)).unwrap()
}

const EXCEPTIONAL: [&str; 8] = ["--p1", "inf", "--p2", "1", "--q1", "1", "--q2", "2"];

fn with_tuple<'a>(cmd: &'a str, rest: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend_from_slice(&EXCEPTIONAL);
    v.extend_from_slice(rest);
    v
}

#[test]
fn classify_reports() {
    let r = ok_json(&with_tuple("classify", &[]));
    assert_eq!(r["verdict"], "NonRigid");
    assert_eq!(r["case_label"], "exceptional");
    assert_eq!(r["d0_exponents"], serde_json::json!(["1/1", "0/1"]));

    let r = ok_json(&[
        "classify", "--p1", "inf", "--p2", "inf", "--q1", "2", "--q2", "2",
    ]);
    assert_eq!(r["verdict"], "Rigid");
    assert_eq!(r["case_label"], "a");

    let out = run(&[
        "classify", "--p1", "3/2", "--p2", "1", "--q1", "3/2", "--q2", "2", "--format", "csv",
    ]);
    assert_eq!(
        stdout(&out),
        "p1,p2,q1,q2,verdict,case_label,d0_inner,d0_outer\n3/2,1,3/2,2,Rigid,d2,0/1,0/1\n"
    );
}

#[test]
fn usage_errors_exit_2() {
    let out = run(&[
        "classify", "--p1", "bogus", "--p2", "1", "--q1", "1", "--q2", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--p1"));
    assert_eq!(
        run(&["classify", "--p1", "1/2", "--p2", "1", "--q1", "1", "--q2", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["design", "--r", "6", "--d", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["design", "--r", "128", "--d", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["design", "--r", "2", "--d", "13"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&with_tuple("sweep", &["--sizes", "4y4"])).status.code(),
        Some(2)
    );
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn designs_verify() {
    let d = ok_json(&["design", "--r", "2", "--d", "2", "--verify"]);
    assert_eq!(d["m"], 6);
    assert_eq!(d["verification"]["ok"], true);
    let d = ok_json(&["design", "--r", "4", "--d", "2", "--verify"]);
    assert_eq!((d["b"].as_u64(), d["m"].as_u64()), (Some(16), Some(20)));
    assert_eq!(d["verification"]["replication"], 5);
    let d = ok_json(&[
        "design", "--r", "3", "--d", "2", "--repeat", "2", "--verify",
    ]);
    assert_eq!((d["m"].as_u64(), d["l"].as_u64()), (Some(24), Some(2)));
    assert_eq!(d["verification"]["l_observed"], 2);
}

#[test]
fn partitions_verify() {
    let p = ok_json(&["partition", "--s", "12", "--b", "9", "--d", "2", "--verify"]);
    assert_eq!(p["verification"]["ok"], true);
    assert_eq!(p["partition"]["r"], 4);
    let p = ok_json(&[
        "partition",
        "--s",
        "5",
        "--b",
        "5",
        "--kind",
        "transposition",
        "--verify",
    ]);
    assert_eq!(p["partition"]["m"], 15);
    assert_eq!(
        run(&["partition", "--s", "4", "--b", "8"]).status.code(),
        Some(3)
    );
    assert_eq!(
        run(&[
            "partition",
            "--s",
            "4",
            "--b",
            "5",
            "--kind",
            "transposition"
        ])
        .status
        .code(),
        Some(3)
    );
}

#[test]
fn sweep_rejects_non_exceptional_tuples() {
    let out = run(&[
        "sweep", "--p1", "2", "--p2", "2", "--q1", "2", "--q2", "2", "--sizes", "8",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("\"case_label\":\"a\""), "{err}");
    let out = run(&[
        "sweep", "--p1", "1", "--p2", "1", "--q1", "3", "--q2", "1", "--sizes", "8",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

fn parse_csv(text: &str) -> Vec<Vec<f64>> {
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("s,b,d,k,r,l,dim,d0,sup_sampled_error,ratio,certified_bound")
    );
    lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect()
}

#[test]
fn sweep_csv_is_deterministic_and_consistent() {
    let args = with_tuple(
        "sweep",
        &[
            "--sizes",
            "8x8,16x16,4x12",
            "--samples",
            "8",
            "--seed",
            "5",
            "--format",
            "csv",
        ],
    );
    let a = run(&args);
    assert_eq!(a.status.code(), Some(0));
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);

    let rows = parse_csv(&stdout(&a));
    assert_eq!(rows.len(), 3);
    assert_eq!((rows[2][0], rows[2][1]), (4.0, 12.0));
    for row in &rows {
        let (d0, err, ratio, bound) = (row[7], row[8], row[9], row[10]);
        assert!((ratio - err / d0).abs() <= 1e-12);
        assert!(err <= bound + 1e-9);
    }

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let mut with_out = args.clone();
    let p = path.to_str().unwrap();
    with_out.extend_from_slice(&["--out", p]);
    let out = run(&with_out);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn transposition_sweep_matches_closed_form() {
    // Residual of a +-1 column is its transpose without the diagonal cell:
    // error sqrt(s - 1), d0 = s.
    let out = run(&with_tuple(
        "sweep",
        &[
            "--sizes",
            "16,64",
            "--partition",
            "transposition",
            "--samples",
            "4",
            "--format",
            "csv",
        ],
    ));
    assert_eq!(out.status.code(), Some(0));
    for row in parse_csv(&stdout(&out)) {
        let s = row[0];
        assert_eq!(row[6], s * (s + 1.0) / 2.0);
        assert!(row[8] >= (s - 1.0).sqrt() - 1e-12);
    }
    let out = run(&with_tuple(
        "sweep",
        &["--sizes", "4x8", "--partition", "transposition"],
    ));
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn example_transpose_rows() {
    let rows = ok_json(&["example-transpose", "--s", "4,16", "--samples", "32"]);
    let rows = rows.as_array().unwrap();
    for row in rows {
        let s = row["s"].as_f64().unwrap();
        assert_eq!(row["skew_error"].as_f64().unwrap(), s.sqrt());
        assert_eq!(row["skew_ratio"].as_f64().unwrap(), 1.0 / s.sqrt());
        assert!((row["sup_sampled_error"].as_f64().unwrap() - (s - 1.0).sqrt()).abs() < 1e-12);
        assert_eq!(row["dim"].as_f64().unwrap(), s * (s + 1.0) / 2.0);
        assert_eq!(row["skew_dim"].as_f64().unwrap(), s * (s - 1.0) / 2.0);
    }
}

#[test]
fn bound_on_sampled_and_given_inputs() {
    let r = ok_json(&with_tuple(
        "bound",
        &["--s", "16", "--b", "16", "--partition", "transposition"],
    ));
    assert_eq!(r["dim"], 136);
    assert_eq!(r["certified_bound"], 4.0);
    assert_eq!(r["measured_error"].as_f64().unwrap(), 15f64.sqrt());

    let r = ok_json(&with_tuple(
        "bound",
        &["--s", "4", "--b", "12", "--point", "ball", "--seed", "3"],
    ));
    assert!(r["measured_error"].as_f64().unwrap() <= r["certified_bound"].as_f64().unwrap() + 1e-9);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    let mut entries = vec![0.0; 9];
    entries[3] = 1.0;
    entries[4] = -1.0;
    std::fs::write(
        &path,
        serde_json::json!({"s": 3, "b": 3, "entries": entries}).to_string(),
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let r = ok_json(&with_tuple(
        "bound",
        &["--s", "3", "--b", "3", "--input", p],
    ));
    assert_eq!(r["selected"], "1");

    entries[0] = 2.0;
    std::fs::write(
        &path,
        serde_json::json!({"s": 3, "b": 3, "entries": entries}).to_string(),
    )
    .unwrap();
    assert_eq!(
        run(&with_tuple(
            "bound",
            &["--s", "3", "--b", "3", "--input", p]
        ))
        .status
        .code(),
        Some(3)
    );
    assert_eq!(
        run(&with_tuple(
            "bound",
            &["--s", "4", "--b", "3", "--input", p]
        ))
        .status
        .code(),
        Some(3)
    );
    let out = run(&[
        "bound", "--p1", "2", "--p2", "2", "--q1", "2", "--q2", "2", "--s", "3", "--b", "3",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

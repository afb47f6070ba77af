use std::path::Path;
use std::process::{Command, Output};

fn bcp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcp"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn gen_writes_csv_and_teacher() {
    let dir = tempfile::tempdir().unwrap();
    let out = bcp(
        dir.path(),
        &[
            "gen", "--kind", "poly", "--n", "300", "--p", "2", "--degree", "2", "--seed", "4",
            "--out", "d.csv",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("d.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "f0,f1,label");
    assert_eq!(lines.count(), 300);
    let teacher: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("d.teacher.json")).unwrap())
            .unwrap();
    assert_eq!(teacher["beta"].as_array().unwrap().len(), 5);
    assert_eq!(teacher["lifted_dim"], 5);

    // same seed, same bytes
    bcp(
        dir.path(),
        &[
            "gen", "--kind", "poly", "--n", "300", "--p", "2", "--degree", "2", "--seed", "4",
            "--out", "e.csv",
        ],
    );
    assert_eq!(
        text,
        std::fs::read_to_string(dir.path().join("e.csv")).unwrap()
    );
}

#[test]
fn full_workflow() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(
        code(&bcp(
            d,
            &[
                "gen",
                "--n",
                "1500",
                "--p",
                "4",
                "--margin-gap",
                "0.1",
                "--out",
                "d.csv"
            ]
        )),
        0
    );

    let out = bcp(d, &["bcp", "--input", "d.csv", "--out", "h.json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["best_error_count"], 0);

    let out = bcp(
        d,
        &[
            "reduce",
            "--input",
            "d.csv",
            "--model",
            "h.json",
            "--keep-fraction",
            "0.1",
            "--out",
            "s.csv",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let subset = std::fs::read_to_string(d.join("s.csv")).unwrap();
    assert!(subset.starts_with("f0,f1,f2,f3,label,bcp_distance\n"));
    assert_eq!(subset.lines().count(), 151);

    std::fs::write(d.join("svm.json"), r#"{"reg_lambda":0.001,"epochs":10}"#).unwrap();
    let out = bcp(
        d,
        &[
            "train",
            "--algo",
            "svm",
            "--input",
            "s.csv",
            "--drop",
            "bcp_distance",
            "--config",
            "svm.json",
            "--out",
            "m.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let model: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("m.json")).unwrap()).unwrap();
    assert_eq!(model["kind"], "hyperplane");
    assert_eq!(model["meta"]["config"]["epochs"], 10);

    let out = bcp(
        d,
        &[
            "eval", "--model", "m.json", "--input", "d.csv", "--out", "r.json",
        ],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert!(report["accuracy"].as_f64().unwrap() > 0.95);
    assert!(d.join("r.json").exists());

    let out = bcp(
        d,
        &[
            "rff",
            "--input",
            "d.csv",
            "--components",
            "16",
            "--seed",
            "1",
            "--out",
            "z.csv",
        ],
    );
    assert_eq!(code(&out), 0);
    let header = std::fs::read_to_string(d.join("z.csv")).unwrap();
    assert!(header.starts_with("rff0,"));
}

#[test]
fn mlp_and_perceptron_training() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    bcp(d, &["gen", "--n", "400", "--p", "3", "--out", "d.csv"]);
    for algo in ["mlp", "perceptron"] {
        let out = bcp(
            d,
            &[
                "train", "--algo", algo, "--input", "d.csv", "--seed", "3", "--out", "m.json",
            ],
        );
        assert_eq!(
            code(&out),
            0,
            "{algo}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert_eq!(stdout_json(&out)["trainer"], algo);
    }
    let model: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("m.json")).unwrap()).unwrap();
    assert_eq!(model["meta"]["config"]["seed"], 3);
}

#[test]
fn categorical_input() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let mut text = String::from("colour,size,outcome\n");
    for i in 0..200 {
        let colour = ["red", "green", "blue"][i % 3];
        let size = (i % 17) as f64 - 8.0;
        let outcome = if size > 0.0 { "yes" } else { "no" };
        text.push_str(&format!("{colour},{size},{outcome}\n"));
    }
    std::fs::write(d.join("c.csv"), text).unwrap();
    let args = [
        "train",
        "--input",
        "c.csv",
        "--label-column",
        "outcome",
        "--positive-label",
        "yes",
        "--standardize",
        "--out",
        "m.json",
    ];
    let out = bcp(d, &args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_json(&out)["p"], 4);
    let out = bcp(d, &["eval", "--model", "m.json", "--input", "c.csv"]);
    assert_eq!(code(&out), 0);
    assert!(stdout_json(&out)["accuracy"].as_f64().unwrap() > 0.9);
}

#[test]
fn bench_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("grid.json"),
        r#"{"cells":[{"id":"a","data":{"kind":"linear","n":400,"p":3},"repeats":2},
                     {"id":"b","data":{"kind":"linear","n":400,"p":3},"pipeline":{"policy":{"rule":{"keep_fraction":2.0}}}}]}"#,
    )
    .unwrap();
    let out = bcp(
        d,
        &["bench", "--config", "grid.json", "--out-dir", "reports"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(d.join("reports/bench.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv
        .lines()
        .last()
        .unwrap()
        .contains("invalid configuration"));
    assert!(d.join("reports/bench.json").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&bcp(d, &["--help"])), 0);
    assert_eq!(code(&bcp(d, &["--version"])), 0);
    assert_eq!(code(&bcp(d, &[])), 1);
    assert_eq!(code(&bcp(d, &["frobnicate"])), 1);
    assert_eq!(code(&bcp(d, &["gen", "--n", "many", "--out", "x.csv"])), 1);
    assert_eq!(code(&bcp(d, &["gen", "--n", "10"])), 1);
    std::fs::write(d.join("bad.json"), "{not json").unwrap();
    assert_eq!(
        code(&bcp(
            d,
            &["bcp", "--input", "x.csv", "--config", "bad.json", "--out", "h.json"]
        )),
        1
    );
    std::fs::write(d.join("neg.json"), r#"{"reg_lambda":-1}"#).unwrap();
    assert_eq!(
        code(&bcp(
            d,
            &["train", "--input", "x.csv", "--config", "neg.json", "--out", "m.json"]
        )),
        1
    );

    // data errors
    let out = bcp(d, &["bcp", "--input", "missing.csv", "--out", "h.json"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.csv"));
    std::fs::write(d.join("one.csv"), "x,label\n1,1\n2,1\n").unwrap();
    let out = bcp(d, &["bcp", "--input", "one.csv", "--out", "h.json"]);
    assert_eq!(code(&out), 2);
    std::fs::write(d.join("nolabel.csv"), "x,y\n1,1\n").unwrap();
    assert_eq!(
        code(&bcp(
            d,
            &["train", "--input", "nolabel.csv", "--out", "m.json"]
        )),
        2
    );
    assert_eq!(
        code(&bcp(
            d,
            &["train", "--input", "one.csv", "--drop", "nope", "--out", "m.json"]
        )),
        2
    );
    std::fs::write(d.join("trunc.json"), r#"{"kind":"hyperplane","w":[1,"#).unwrap();
    std::fs::write(d.join("ok.csv"), "x,label\n1,1\n-1,0\n").unwrap();
    assert_eq!(
        code(&bcp(
            d,
            &["eval", "--model", "trunc.json", "--input", "ok.csv"]
        )),
        2
    );
    std::fs::write(
        d.join("wide.json"),
        r#"{"kind":"hyperplane","w":[1,2],"theta":0}"#,
    )
    .unwrap();
    let out = bcp(d, &["eval", "--model", "wide.json", "--input", "ok.csv"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension mismatch"));
}

//! End-to-end runs of the `inkmetrics` binary.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_inkmetrics"));
    cmd.args(args).env_remove("INKMETRICS_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = run(args, &[]);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn corpus_metrics_analyze_compare() {
    let dir = tempfile::tempdir().unwrap();
    let (c1, c2) = (dir.path().join("c1"), dir.path().join("c2"));
    ok(&["synth", "--kind", "corpus", "--n", "60", "--seed", "1", "--out", p(&c1)]);
    ok(&["synth", "--kind", "corpus", "--n", "60", "--seed", "2", "--out", p(&c2)]);
    assert!(c1.join("synthetic-0000.csv").exists() && c1.join("synthetic-0000.json").exists());

    let (m1, m2) = (dir.path().join("m1"), dir.path().join("m2"));
    ok(&["metrics", "--in", p(&c1), "--out", p(&m1)]);
    ok(&["metrics", "--in", p(&c2), "--out", p(&m2), "--dt-ms", "100", "--epsilon", "10"]);
    let csv = std::fs::read_to_string(m1.join("metrics.csv")).unwrap();
    assert!(csv.starts_with("drawing_id,"));
    assert_eq!(csv.lines().count(), 61);

    let a1 = dir.path().join("a1");
    ok(&["analyze", "--in", p(&m1.join("metrics.csv")), "--out", p(&a1), "--k", "3", "--threshold", "0.4"]);
    for f in ["loadings_step1.csv", "loadings_step2.csv", "assignments.json", "tests.json", "manifest.json"] {
        assert!(a1.join(f).exists(), "{f}");
    }
    let header = std::fs::read_to_string(a1.join("loadings_step2.csv")).unwrap();
    assert!(header.starts_with("variable,dim1,dim2,dim3,assigned_dim,retained"));

    // Rerunning gives identical bytes.
    let a2 = dir.path().join("a2");
    ok(&["analyze", "--in", p(&m1.join("metrics.csv")), "--out", p(&a2)]);
    for f in ["loadings_step2.csv", "manifest.json", "tests.json"] {
        assert_eq!(std::fs::read_to_string(a1.join(f)).unwrap(), std::fs::read_to_string(a2.join(f)).unwrap(), "{f}");
    }

    let cmp = dir.path().join("cmp");
    ok(&[
        "compare",
        "--a",
        p(&m1.join("metrics.csv")),
        "--b",
        p(&m2.join("metrics.csv")),
        "--group-by",
        "group",
        "--out",
        p(&cmp),
    ]);
    assert!(cmp.join("consensus.json").exists());
    assert!(cmp.join("score_correlations.json").exists());
}

#[test]
fn synth_levy_is_seeded_and_env_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b, c) = (dir.path().join("a.csv"), dir.path().join("b.csv"), dir.path().join("c.csv"));
    ok(&["synth", "--kind", "levy", "--mu", "2.0", "--n", "500", "--seed", "7", "--out", p(&a)]);
    ok(&["synth", "--kind", "levy", "--mu", "2.0", "--n", "500", "--seed", "7", "--out", p(&b)]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert!(a.with_extension("json").exists());

    let out =
        run(&["synth", "--kind", "levy", "--n", "500", "--seed", "7", "--out", p(&c)], &[("INKMETRICS_SEED", "8")]);
    assert!(out.status.success());
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // Validation: stroke CSV without its sidecar.
    let sessions = dir.path().join("s");
    std::fs::create_dir(&sessions).unwrap();
    std::fs::write(sessions.join("x.csv"), "session_id,stroke_id,colour_id,t_ms,x_px,y_px\nx,0,0,0,1,1\n").unwrap();
    let out = run(&["metrics", "--in", p(&sessions), "--out", p(&dir.path().join("o"))], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sidecar"));

    // Validation: bad colour id, reported with its stroke.
    std::fs::write(sessions.join("x.json"), r#"{"session_id":"x","screen_w":100,"screen_h":100,"labels":{}}"#).unwrap();
    std::fs::write(
        sessions.join("x.csv"),
        "session_id,stroke_id,colour_id,t_ms,x_px,y_px\nx,0,12,0,1,1\nx,0,12,10,2,2\n",
    )
    .unwrap();
    let out = run(&["metrics", "--in", p(&sessions), "--out", p(&dir.path().join("o"))], &[]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));

    // Bad arguments.
    assert_eq!(run(&["analyze", "--in", "nowhere.csv", "--out", "o", "--k", "1"], &[]).status.code(), Some(2));
    assert_eq!(
        run(
            &["synth", "--kind", "levy", "--seed", "1", "--out", p(&dir.path().join("l.csv"))],
            &[("INKMETRICS_SEED", "x")]
        )
        .status
        .code(),
        Some(2)
    );

    // Degeneracy: a constant metric column cannot be analysed.
    let m = dir.path().join("m.csv");
    let mut csv = String::from("drawing_id,a,b,c\n");
    for i in 0..10 {
        csv += &format!("d{i},{},{},1\n", i, (i * i) % 7);
    }
    std::fs::write(&m, csv).unwrap();
    let out = run(&["analyze", "--in", p(&m), "--out", p(&dir.path().join("a")), "--k", "2"], &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn other_synth_kinds() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["brownian", "fgn_binary", "shape"] {
        let out = dir.path().join(format!("{kind}.csv"));
        ok(&["synth", "--kind", kind, "--n", "1024", "--out", p(&out)]);
        assert!(out.exists() && out.with_extension("json").exists());
    }
}

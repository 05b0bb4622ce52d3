//! End-to-end tests of the binary: exit codes, golden outputs, and
//! reproducibility of the machine-readable reports.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_dixmap")
}

fn examples(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name)
}

fn golden(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    std::fs::read_to_string(path).expect("golden file")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("run binary")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

#[test]
fn exit_codes() {
    let h3 = examples("heisenberg3.json");
    let lam = examples("lam_z.json");
    let lam2 = examples("lam_2z.json");
    // validate: 0
    let out = run(&["validate", h3.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    // member true: 0, false: 1
    let out = run(&[
        "member",
        h3.to_str().unwrap(),
        lam.to_str().unwrap(),
        "--element",
        "z - 1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&[
        "member",
        h3.to_str().unwrap(),
        lam.to_str().unwrap(),
        "--element",
        "q",
    ]);
    assert_eq!(out.status.code(), Some(1));
    // distinct orbits: 1
    let out = run(&[
        "orbit-eq",
        h3.to_str().unwrap(),
        lam.to_str().unwrap(),
        lam2.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    // unreadable input: 3
    let out = run(&["validate", "/definitely/not/a/file.json"]);
    assert_eq!(out.status.code(), Some(3));
    // unknown identifier in an element: 3
    let out = run(&[
        "member",
        h3.to_str().unwrap(),
        lam.to_str().unwrap(),
        "--element",
        "z + nope",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn golden_outputs_are_reproducible() {
    let cases: Vec<(Vec<String>, &str)> = vec![
        (
            vec![
                "dixmier".into(),
                examples("heisenberg3.json").to_str().unwrap().into(),
                examples("lam_z.json").to_str().unwrap().into(),
                "--json".into(),
            ],
            "dixmier_heisenberg3_z.json",
        ),
        (
            vec![
                "dixmier".into(),
                examples("super_heisenberg_diag.json").to_str().unwrap().into(),
                examples("lam_z.json").to_str().unwrap().into(),
                "--json".into(),
            ],
            "dixmier_sheis_diag_z.json",
        ),
        (
            vec![
                "dixmier".into(),
                examples("mixed31.json").to_str().unwrap().into(),
                examples("lam_z.json").to_str().unwrap().into(),
                "--json".into(),
            ],
            "dixmier_mixed31_z.json",
        ),
        (
            vec![
                "polarize".into(),
                examples("mixed31.json").to_str().unwrap().into(),
                examples("lam_z.json").to_str().unwrap().into(),
                "--json".into(),
            ],
            "polarize_mixed31_z.json",
        ),
        (
            vec![
                "split-max".into(),
                examples("odd11_clifford.json").to_str().unwrap().into(),
                examples("lam_z.json").to_str().unwrap().into(),
                "--json".into(),
            ],
            "splitmax_odd11_z.json",
        ),
        (
            vec![
                "orbit-eq".into(),
                examples("heisenberg3.json").to_str().unwrap().into(),
                examples("lam_z.json").to_str().unwrap().into(),
                examples("lam_z_minus_p.json").to_str().unwrap().into(),
                "--json".into(),
                "--seed".into(),
                "0".into(),
            ],
            "orbiteq_h3_witness.json",
        ),
        (
            vec![
                "induce".into(),
                examples("super_heisenberg.json").to_str().unwrap().into(),
                examples("lam_z.json").to_str().unwrap().into(),
                "--degree".into(),
                "4".into(),
                "--json".into(),
            ],
            "induce_sheis_z.json",
        ),
        (
            vec![
                "validate".into(),
                examples("heisenberg3.json").to_str().unwrap().into(),
                "--json".into(),
            ],
            "validate_heisenberg3.json",
        ),
    ];
    for (args, golden_name) in cases {
        let argrefs: Vec<&str> = args.iter().map(|s| s.as_str()).collect();
        let first = run(&argrefs);
        let second = run(&argrefs);
        // byte-identical across runs
        assert_eq!(
            stdout(&first),
            stdout(&second),
            "output of {:?} is not reproducible",
            args
        );
        assert_eq!(
            stdout(&first),
            golden(golden_name),
            "output of {:?} drifted from the golden file",
            args
        );
    }
}

#[test]
fn normalize_is_a_fixpoint() {
    let out = run(&["normalize", examples("heisenberg3.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    // feed the normalized output back through normalize
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h3.json");
    std::fs::write(&path, &text).unwrap();
    let out2 = run(&["normalize", path.to_str().unwrap()]);
    let text2 = stdout(&out2);
    // names differ (derived from the file stem) but the content agrees
    let strip = |s: &str| -> String {
        s.lines()
            .filter(|l| !l.contains("\"name\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(&text), strip(&text2));
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).lines().all(|l| l.starts_with("ok")));
}

#[test]
fn invalid_algebra_reports_axiom() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"name":"bad","generators":[
            {"id":"a","parity":"even"},{"id":"b","parity":"even"},{"id":"c","parity":"even"}],
            "brackets":[
              {"left":"a","right":"b","value":{"c":"1"}},
              {"left":"b","right":"a","value":{"c":"1"}}
            ]}"#,
    )
    .unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("superskew"));
}

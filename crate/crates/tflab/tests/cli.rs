//! Exit-code and file-format behavior of the command-line front end.

use std::fs;

use tflab::cli::{run, EXIT_PROVEN, EXIT_REFUTED, EXIT_UNKNOWN, EXIT_USAGE};

fn tflab(args: &[&str]) -> i32 {
    let mut argv = vec!["tflab"];
    argv.extend_from_slice(args);
    run(argv)
}

#[test]
fn exit_codes_encode_verdicts() {
    assert_eq!(
        tflab(&[
            "verify",
            "--expr",
            "x + (x*x | 5)",
            "--width",
            "16",
            "--property",
            "ergodic",
            "--method",
            "deriv"
        ]),
        EXIT_PROVEN
    );
    assert_eq!(
        tflab(&[
            "verify",
            "--expr",
            "x + x*x",
            "--width",
            "8",
            "--property",
            "mp",
            "--method",
            "deriv"
        ]),
        EXIT_REFUTED
    );
    assert_eq!(
        tflab(&[
            "verify",
            "--expr",
            "x + (x*x | 5)",
            "--width",
            "8",
            "--property",
            "ergodic",
            "--method",
            "brute"
        ]),
        EXIT_UNKNOWN
    );
    assert_eq!(tflab(&["verify", "--property", "ergodic"]), EXIT_USAGE);
}

#[test]
fn named_definitions_flow_through_verify() {
    assert_eq!(
        tflab(&[
            "verify",
            "--expr",
            "1 + x + 2*(g(x+1) - g(x))",
            "--def",
            "g=x ^ (2*x + 1)",
            "--width",
            "10",
            "--property",
            "mp",
            "--method",
            "brute"
        ]),
        EXIT_UNKNOWN // bijective at every checked width: evidence, not proof
    );
}

#[test]
fn classify_exit_codes() {
    assert_eq!(tflab(&["classify", "--poly-ff", "1,1"]), EXIT_PROVEN);
    assert_eq!(tflab(&["classify", "--poly-ff", "1,2"]), EXIT_REFUTED);
    assert_eq!(tflab(&["classify", "--perm-poly", "0,1,2"]), EXIT_PROVEN);
    assert_eq!(
        tflab(&["classify", "--ks-c", "4", "--width", "8"]),
        EXIT_REFUTED
    );
    assert_eq!(tflab(&["classify"]), EXIT_USAGE);
}

#[test]
fn gen_is_deterministic_and_report_matches_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = dir.path().join("spec.json");
    fs::write(
        &spec_path,
        r#"{
            "type": "ordinary",
            "width": 6,
            "seed": "0x00",
            "exprs": ["x + (x*x | 5)"]
        }"#,
    )
    .unwrap();
    let spec = spec_path.to_str().unwrap();

    let out1 = dir.path().join("ks1.bin");
    let out2 = dir.path().join("ks2.bin");
    let rep1 = dir.path().join("r1.json");
    let rep2 = dir.path().join("r2.json");
    assert_eq!(
        tflab(&[
            "gen",
            "--spec",
            spec,
            "--count",
            "64",
            "--raw",
            "--out",
            out1.to_str().unwrap(),
            "--report",
            rep1.to_str().unwrap()
        ]),
        EXIT_PROVEN
    );
    assert_eq!(
        tflab(&[
            "gen",
            "--spec",
            spec,
            "--count",
            "64",
            "--raw",
            "--out",
            out2.to_str().unwrap()
        ]),
        EXIT_PROVEN
    );
    assert_eq!(fs::read(&out1).unwrap(), fs::read(&out2).unwrap());

    assert_eq!(
        tflab(&["analyze", "--spec", spec, "--out", rep2.to_str().unwrap()]),
        EXIT_PROVEN
    );
    assert_eq!(
        fs::read_to_string(&rep1).unwrap(),
        fs::read_to_string(&rep2).unwrap(),
        "gen --report and analyze must emit the same report"
    );
}

#[test]
fn refused_spec_exits_refuted() {
    let dir = tempfile::tempdir().unwrap();
    let spec_path = dir.path().join("bad.json");
    fs::write(
        &spec_path,
        r#"{
            "type": "wreath",
            "width": 6,
            "seed": "0x00",
            "exprs": ["1 + x + 4*(x*x)", "1 + x + 4*(x & 11)",
                      "1 + x + ((x ^ 3) << 2)", "1 + x + 4*(x*x*x)"],
            "control": {"consts": [1, 1, 0, 0]}
        }"#,
    )
    .unwrap();
    assert_eq!(
        tflab(&["gen", "--spec", spec_path.to_str().unwrap(), "--count", "8"]),
        EXIT_REFUTED
    );
}

#[test]
fn plot_emits_csv_and_line_count() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("lcg.csv");
    assert_eq!(
        tflab(&[
            "plot",
            "--expr",
            "3 + 5*x",
            "--width",
            "8",
            "--pairs",
            "--lines",
            "5",
            "--out",
            csv_path.to_str().unwrap(),
            "--pgm",
            "4"
        ]),
        EXIT_PROVEN
    );
    let csv = fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("x,y\n"));
    assert_eq!(csv.lines().count(), 257); // header + full period
    let pgm = fs::read(dir.path().join("lcg.csv.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n16 16\n255\n"));

    // empty input period: header-only csv, success
    let empty = dir.path().join("empty.bin");
    fs::write(&empty, []).unwrap();
    let out = dir.path().join("empty.csv");
    assert_eq!(
        tflab(&[
            "plot",
            "--in",
            empty.to_str().unwrap(),
            "--width",
            "8",
            "--pairs",
            "--out",
            out.to_str().unwrap()
        ]),
        EXIT_PROVEN
    );
    assert_eq!(fs::read_to_string(&out).unwrap(), "x,y\n");
}

#[test]
fn abc_template_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("abc.json");
    assert_eq!(
        tflab(&[
            "abc",
            "template",
            "--width",
            "8",
            "--out",
            spec.to_str().unwrap()
        ]),
        EXIT_PROVEN
    );
    assert_eq!(
        tflab(&["abc", "validate", "--spec", spec.to_str().unwrap()]),
        EXIT_PROVEN
    );
    assert_eq!(
        tflab(&["gen", "--spec", spec.to_str().unwrap(), "--count", "16"]),
        EXIT_PROVEN
    );
}

use std::path::Path;

use lcextract::cli::{run_with, EXIT_INVALID, EXIT_IO, EXIT_OK, EXIT_USAGE};
use lcextract::TruthTable;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_with(std::iter::once("lcextract").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_table(dir: &Path, name: &str, t: &TruthTable) -> String {
    let path = dir.join(name);
    t.write_file(&path).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn extract_local_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let src = write_table(dir.path(), "x.xtt", &TruthTable::new(2, vec![1, 3, 0, 2]).unwrap());
    // x = 10, r = 01
    let (code, out, _) = run(&[
        "extract", "--kind", "local", "--source", &src, "--seed", "9", "--no-strict", "--ell", "1", "--m", "2",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "00\n");
}

#[test]
fn extract_bmy_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let src = write_table(dir.path(), "id.xtt", &TruthTable::identity(2));
    let (code, out, _) = run(&[
        "extract", "--kind", "bmy", "--source", &src, "--seed", "1", "--no-strict", "--ell", "1", "--m", "2",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out, "01\n");
}

#[test]
fn extract_bit_matches_extract() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("x.xtt");
    let src = src.to_str().unwrap();
    let (code, _, _) = run(&["gen-source", "--kind", "uniform", "--ntilde", "6", "--rng-seed", "3", "--out", src]);
    assert_eq!(code, EXIT_OK);
    let flags = ["--source", src, "--seed", "a1b2c3d4e5f6", "--no-strict", "--ell", "4", "--m", "20"];
    let (_, full, _) = run(&[&["extract", "--kind", "local"][..], &flags].concat());
    let full = full.trim().to_string();
    assert_eq!(full.len(), 20);
    for i in 0..20 {
        let i_text = i.to_string();
        let (code, bit, _) = run(&[&["extract-bit", "--i", &i_text][..], &flags].concat());
        assert_eq!(code, EXIT_OK);
        assert_eq!(bit.trim(), &full[i..=i]);
    }
    let (code, _, _) = run(&[&["extract-bit", "--i", "20"][..], &flags].concat());
    assert_eq!(code, EXIT_INVALID);
}

#[test]
fn wrong_seed_length_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let src = write_table(dir.path(), "x.xtt", &TruthTable::identity(2));
    let (code, _, err) = run(&[
        "extract", "--kind", "local", "--source", &src, "--seed", "99", "--no-strict", "--ell", "1", "--m", "2",
    ]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("seed length must be d=4 bits"), "{err}");
    let (code, _, _) = run(&[
        "extract", "--kind", "local", "--source", &src, "--seed", "xz", "--no-strict", "--ell", "1", "--m", "2",
    ]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn missing_and_malformed_files() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("none.xtt");
    let (code, _, _) = run(&[
        "extract", "--kind", "local", "--source", missing.to_str().unwrap(), "--seed", "9", "--no-strict",
        "--ell", "1", "--m", "2",
    ]);
    assert_eq!(code, EXIT_IO);

    let bad = dir.path().join("bad.xtt");
    std::fs::write(&bad, b"not a table").unwrap();
    let (code, _, err) = run(&[
        "extract", "--kind", "bmy", "--source", bad.to_str().unwrap(), "--seed", "9", "--no-strict",
        "--ell", "1", "--m", "2",
    ]);
    assert_eq!(code, EXIT_IO);
    assert!(err.contains("malformed"), "{err}");
}

#[test]
fn strict_mode_rules() {
    let dir = tempfile::tempdir().unwrap();
    let src = write_table(dir.path(), "x.xtt", &TruthTable::identity(2));
    // Flag checks come before the file is touched.
    let (code, _, err) = run(&["extract", "--kind", "local", "--source", "/no/such", "--seed", "9", "--m", "2"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--lambda"), "{err}");
    let (code, _, _) = run(&[
        "extract", "--kind", "local", "--source", &src, "--seed", "9", "--no-strict", "--lambda", "0.9",
        "--ell", "1", "--m", "2",
    ]);
    assert_eq!(code, EXIT_USAGE);
    // Strict parameters that violate a constraint at ñ = 2.
    let (code, _, err) = run(&[
        "extract", "--kind", "local", "--source", &src, "--seed", "9", "--lambda", "0.9", "--alpha", "0.2",
        "--beta", "0.05", "--m", "16", "--epsilon", "0.5",
    ]);
    assert_eq!(code, EXIT_INVALID);
    assert!(err.contains("m > N^alpha"), "{err}");
}

#[test]
fn gen_source_round_trip_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.xtt");
    let out = out.to_str().unwrap();
    let (code, text, _) = run(&["gen-source", "--kind", "constant", "--value", "5", "--ntilde", "3", "--out", out]);
    assert_eq!(code, EXIT_OK);
    assert!(text.contains("min_entropy=0\n"));
    assert!(TruthTable::read_file(out).unwrap().entries().iter().all(|&e| e == 5));

    let (code, _, _) = run(&["gen-source", "--kind", "flat-random-subset", "--k", "99", "--ntilde", "3", "--out", out]);
    assert_eq!(code, EXIT_INVALID);
    let (code, _, _) = run(&["gen-source", "--kind", "biased-iid", "--ntilde", "3", "--out", out]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = run(&[
        "gen-source", "--kind", "uniform", "--ntilde", "3", "--out", "/no/such/dir/x.xtt",
    ]);
    assert_eq!(code, EXIT_IO);
}

#[test]
fn verify_modes() {
    let common = ["--kind", "local", "--ntilde", "2", "--no-strict", "--ell", "1", "--m", "2", "--epsilon", "0.25"];
    let (code, out, _) = run(&[&["verify", "--mode", "exact"][..], &common].concat());
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("seeds=16\n") && out.contains("distance="));

    let (code, out, _) = run(&[&["verify", "--mode", "flat", "--tests", "5"][..], &common].concat());
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("bound_holds=true\n"), "{out}");

    let (code, out, _) = run(&[&["verify", "--mode", "mc", "--samples", "1000", "--rng-seed", "7"][..], &common].concat());
    assert_eq!(code, EXIT_OK);
    for key in ["estimate=", "radius=", "rng_seed=7\n", "ell=1\n", "strict=false\n"] {
        assert!(out.contains(key), "{key} missing from {out}");
    }

    let (code, _, _) = run(&["verify", "--mode", "mc", "--kind", "local", "--no-strict", "--ell", "1", "--m", "2"]);
    assert_eq!(code, EXIT_USAGE);
    let (code, _, _) = run(&[&["verify", "--mode", "flat"][..], &["--kind", "local", "--ntilde", "3", "--no-strict", "--ell", "1", "--m", "1"]].concat());
    assert_eq!(code, EXIT_INVALID);
}

#[test]
fn bench_csv() {
    let (code, out, _) = run(&["bench", "--op", "local-bit", "--sizes", "6,8", "--reps", "2", "--ell", "3", "--ms", "4,8", "--batch", "32"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n_tilde,n_bar,ell,m,op,median_ns,p99_ns,lookups_per_bit");
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.ends_with(",3") && l.contains(",local-bit,")));
    let (code, _, _) = run(&["bench", "--op", "bmy", "--reps", "0", "--sizes", "6"]);
    assert_eq!(code, EXIT_INVALID);
}

use std::process::Command;

fn sharbly(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sharbly")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn predict_lists_five_torsion_levels() {
    let (code, out, _) = sharbly(&["predict", "--level", "1,11,30-31", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.contains("1,2 3 5,true,true"));
    assert!(out.contains("11,2 3 5,true,true"));
    assert!(out.contains("30,2 3,false,false"));
    assert!(out.contains("31,2 3 5,true,true"));
}

#[test]
fn rank_two_hecke_and_match_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = [
        "hecke", "--rank", "2", "--level", "11", "--p", "7", "--space", "full", "--ell", "2,3,5", "--format", "json",
        "--cache-dir", cache.to_str().unwrap(),
    ];
    let (code, first, err) = sharbly(&args);
    assert_eq!(code, 0, "{err}");
    assert!(first.contains("\"free_rank\": 3"));
    let (code, second, _) = sharbly(&args);
    assert_eq!(code, 0);
    assert_eq!(first, second, "warm cache must reproduce the output");
    let file = dir.path().join("pkgs.json");
    std::fs::write(&file, &first).unwrap();
    let (code, out, err) = sharbly(&["match", file.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("N = 11, p = 7"));
}

#[test]
fn two_torsion_is_rejected() {
    let (code, _, err) = sharbly(&["hecke", "--rank", "2", "--level", "11", "--p", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("division by 2"), "{err}");
}

#[test]
fn reference_tables_and_matches() {
    let (code, out, _) = sharbly(&["tables", "--reference"]);
    assert_eq!(code, 0);
    assert!(out.contains("  11    5    1"));
    assert!(out.contains("T2 : 1 - 4X + 4X^2 + X^3 - 2X^4"));
    let (code, out, _) = sharbly(&["match", "--reference", "--format", "csv"]);
    assert_eq!(code, 0);
    assert!(out.contains("30,5,1,ε⊕ε⊕ε²⊕ε²"));
}

#[test]
fn bad_input_fails() {
    let (code, _, _) = sharbly(&["compute", "--rank", "4", "--level", "11", "--degree", "4"]);
    assert_eq!(code, 2);
    let (code, _, _) = sharbly(&["predict", "--level", "x"]);
    assert_eq!(code, 2);
}

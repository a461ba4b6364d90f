use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use tempfile::TempDir;
use wginv::cli::run;
use wginv::io::{matrix_from_str, matrix_from_value, write_matrix};
use wginv::{Complex64, Matrix, Q};

fn wginv(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("wginv").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn q(rows: &[&[&str]]) -> Matrix<Q> {
    Matrix::parse_rows(rows).unwrap()
}

fn save(dir: &TempDir, name: &str, a: &Matrix<Q>) -> String {
    let p = dir.path().join(name);
    write_matrix(&p, a).unwrap();
    p.to_str().unwrap().to_string()
}

fn result_of(stdout: &str) -> Matrix<Q> {
    let line = stdout.lines().find_map(|l| l.strip_prefix("result=")).expect("result line");
    matrix_from_str(line).unwrap()
}

fn value_of<'a>(stdout: &'a str, key: &str) -> &'a str {
    let prefix = format!("{key}=");
    stdout
        .lines()
        .find_map(|l| l.strip_prefix(prefix.as_str()))
        .unwrap_or_else(|| panic!("no `{key}` in\n{stdout}"))
}

fn first_example() -> (Matrix<Q>, Matrix<Q>) {
    (q(&[&["1", "i"], &["0", "0"], &["0", "0"]]), Matrix::from_i64(&[&[1, 1, 0], &[0, 0, 0]]))
}

fn section_example() -> (Matrix<Q>, Matrix<Q>) {
    (
        Matrix::from_i64(&[&[1, 2, 0, 0, -1], &[-1, 0, 1, 0, 1], &[0, 2, 0, -1, 0]]),
        Matrix::from_i64(&[&[1, 2, 0], &[0, 0, 1], &[1, 2, 1], &[0, 0, 0], &[0, 0, 0]]),
    )
}

#[test]
fn mp_of_first_example() {
    let dir = TempDir::new().unwrap();
    let a = save(&dir, "a.json", &first_example().0);
    let out = dir.path().join("x.json");
    let (code, stdout, _) = wginv(&["compute", "--inverse", "mp", "--matrix", &a, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");
    let expected = q(&[&["1/2", "0", "0"], &["-1/2i", "0", "0"]]);
    assert_eq!(result_of(&stdout), expected);
    assert_eq!(value_of(&stdout, "overall"), "pass");

    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(doc["inverse"], "mp");
    assert_eq!(doc["report"]["overall"], true);
    assert_eq!(matrix_from_value::<Q>(&doc["matrix"]).unwrap(), expected);
}

#[test]
fn m_core_with_singular_metric_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let a = save(&dir, "a.json", &Matrix::from_i64(&[&[1, 1], &[0, 0]]));
    let m = save(&dir, "m.json", &Matrix::from_i64(&[&[1, 1], &[1, 1]]));
    let (code, _, stderr) = wginv(&["compute", "--inverse", "m-core", "--matrix", &a, "--metric-m", &m]);
    assert_eq!(code, 1);
    assert!(stderr.contains("singular"), "{stderr}");
}

#[test]
fn w_k_mp_of_section_example() {
    let dir = TempDir::new().unwrap();
    let (a, w) = section_example();
    let (a, w) = (save(&dir, "a.json", &a), save(&dir, "w.json", &w));
    let (code, stdout, _) = wginv(&["compute", "--inverse", "w-k-mp", "--matrix", &a, "--weight", &w]);
    assert_eq!(code, 0, "{stdout}");
    let expected = Matrix::<Q>::from_i64(&[&[1, 2, 4], &[0, 0, 2], &[1, 2, 6], &[0, 0, 0], &[0, 0, 0]]);
    assert_eq!(result_of(&stdout), expected);
    assert_eq!(value_of(&stdout, "overall"), "pass");
    assert_eq!(value_of(&stdout, "definition"), "true");
}

#[test]
fn float_backend_writes_bit_exact_documents() {
    let dir = TempDir::new().unwrap();
    let (a, w) = section_example();
    let (a, w) = (save(&dir, "a.json", &a), save(&dir, "w.json", &w));
    let out = dir.path().join("x.json");
    let args = ["compute", "--inverse", "w-mp-k", "--matrix", &a, "--weight", &w, "--backend", "float"];
    let (code, stdout, _) = wginv(&[&args[..], &["--out", out.to_str().unwrap()]].concat());
    assert_eq!(code, 0, "{stdout}");
    let line = value_of(&stdout, "result");
    let printed = matrix_from_str::<Complex64>(line).unwrap();
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let stored = matrix_from_value::<Complex64>(&doc["matrix"]).unwrap();
    for (x, y) in printed.data().iter().zip(stored.data()) {
        assert_eq!(x.re.to_bits(), y.re.to_bits());
        assert_eq!(x.im.to_bits(), y.im.to_bits());
    }
    assert_eq!(doc["backend"], "float");
}

#[test]
fn nonexistence_exits_with_two() {
    let dir = TempDir::new().unwrap();
    let a = save(&dir, "a.json", &Matrix::from_i64(&[&[0, 1], &[0, 0]]));
    for inv in ["group", "core", "dual-core", "m-core"] {
        let mut args = vec!["compute", "--inverse", inv, "--matrix", &a];
        let m = save(&dir, "m.json", &Matrix::identity(2));
        if inv == "m-core" {
            args.extend(["--metric-m", &m]);
        }
        let (code, _, stderr) = wginv(&args);
        assert_eq!(code, 2, "{inv}: {stderr}");
        assert!(stderr.contains("does not exist"), "{stderr}");
    }
}

#[test]
fn input_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let a = save(&dir, "a.json", &first_example().0);
    let cases: Vec<Vec<&str>> = vec![
        vec!["compute", "--inverse", "nope", "--matrix", &a],
        vec!["compute", "--inverse", "w-drazin", "--matrix", &a],
        vec!["compute", "--inverse", "wmp", "--matrix", &a],
        vec!["compute", "--inverse", "mp", "--matrix", "/nonexistent/a.json"],
        vec!["compute", "--inverse", "mp", "--matrix", &a, "--tol", "-1"],
        vec!["compute", "--inverse", "group", "--matrix", &a],
        vec!["decompose", "--matrix", &a, "--weight", &a, "--backend", "exact"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let (code, _, stderr) = wginv(&args);
        assert_eq!(code, 1, "{args:?}: {stderr}");
        assert!(!stderr.is_empty());
    }
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"rows": 1, "cols": 2, "data": [[1]]}"#).unwrap();
    let (code, _, stderr) = wginv(&["compute", "--inverse", "mp", "--matrix", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(stderr.contains("parse error"), "{stderr}");
}

#[test]
fn verify_labels() {
    let dir = TempDir::new().unwrap();
    let i3 = save(&dir, "i.json", &Matrix::identity(3));
    let (code, stdout, _) = wginv(&["verify", "--matrix", &i3, "--candidate", &i3]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("overall=pass"));

    let (a, w) = first_example();
    let (pa, pw) = (save(&dir, "a.json", &a), save(&dir, "w.json", &w));
    let (code, stdout, _) = wginv(&["verify", "--matrix", &pa, "--weight", &pw, "--candidate", &pa, "--labels", "3W"]);
    assert_eq!(code, 2);
    assert!(stdout.contains("label.3W=fail"), "{stdout}");
    let (code, _, _) = wginv(&["verify", "--matrix", &pa, "--weight", &pw, "--candidate", &pa, "--labels", "2W,5W,1kW"]);
    assert_eq!(code, 0);

    let wide = Matrix::<Q>::from_i64(&[&[-1, 0, 0, 0, 0], &[0, 1, 0, 0, 0], &[0, 0, 0, 1, 0], &[0, 0, 0, 0, -1]]);
    let ww = Matrix::<Q>::from_i64(&[&[2, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 1], &[0, 0, 0, 1], &[0, 0, 0, 0]]);
    let member = q(&[&["-1/4", "0", "0", "0", "0"], &["0", "1", "0", "0", "0"], &["0", "0", "9", "0", "0"], &["0", "0", "1", "0", "0"]]);
    let (pa, pw, px) = (save(&dir, "wa.json", &wide), save(&dir, "ww.json", &ww), save(&dir, "wx.json", &member));
    let (code, stdout, _) = wginv(&["verify", "--matrix", &pa, "--weight", &pw, "--candidate", &px, "--labels", "1231kW"]);
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(value_of(&stdout, "k"), "3");

    let (code, _, stderr) = wginv(&["verify", "--matrix", &pa, "--candidate", &i3]);
    assert_eq!(code, 1, "{stderr}");
}

#[test]
fn rol_and_decompose() {
    let dir = TempDir::new().unwrap();
    let i = save(&dir, "i.json", &Matrix::identity(3));
    let (code, stdout, _) = wginv(&["rol", "--a", &i, "--b", &i, "--metric-m", &i]);
    assert_eq!(code, 0);
    assert_eq!(value_of(&stdout, "rol_holds"), "true");
    let (code, stdout, _) = wginv(&["rol", "--a", &i, "--b", &i, "--metric-n", &i]);
    assert_eq!(code, 0);
    assert_eq!(value_of(&stdout, "variant"), "n-dual-core");

    let (a, w) = section_example();
    let (a, w) = (save(&dir, "a.json", &a), save(&dir, "w.json", &w));
    let (code, stdout, _) = wginv(&["decompose", "--matrix", &a, "--weight", &w]);
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(value_of(&stdout, "kappa"), "1");
    let res: f64 = value_of(&stdout, "residual.max").parse().unwrap();
    assert!(res <= 1e-9, "{res}");
}

#[test]
fn bilateral_from_param_file() {
    let dir = TempDir::new().unwrap();
    let a = Matrix::<Q>::from_i64(&[&[1, 0], &[0, 0]]);
    let p = dir.path().join("p.json");
    let x = wginv::io::matrix_to_value(&a).unwrap();
    std::fs::write(&p, serde_json::json!({"x1": x, "x2": x}).to_string()).unwrap();
    let (pa, pw) = (save(&dir, "a.json", &a), save(&dir, "w.json", &Matrix::identity(2)));
    let (code, stdout, _) = wginv(&["compute", "--inverse", "bilateral", "--matrix", &pa, "--weight", &pw, "--param", p.to_str().unwrap()]);
    assert_eq!(code, 0, "{stdout}");
    assert_eq!(result_of(&stdout), a);
}

#[test]
fn selftest_is_deterministic() {
    let (code, first, _) = wginv(&["selftest", "--seed", "42", "--instances", "2"]);
    assert_eq!(code, 0, "{first}");
    let (_, second, _) = wginv(&["selftest", "--seed", "42", "--instances", "2"]);
    assert_eq!(first, second);
    assert!(first.ends_with("overall=pass\n"));
}

fn binary() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_wginv"))
}

fn exit_of(args: &[&str], cwd: &Path) -> i32 {
    Command::new(binary()).args(args).current_dir(cwd).output().unwrap().status.code().unwrap()
}

#[test]
fn binary_exit_codes() {
    let dir = TempDir::new().unwrap();
    let a = save(&dir, "a.json", &Matrix::from_i64(&[&[0, 1], &[0, 0]]));
    assert_eq!(exit_of(&["compute", "--inverse", "mp", "--matrix", &a], dir.path()), 0);
    assert_eq!(exit_of(&["compute", "--inverse", "group", "--matrix", &a], dir.path()), 2);
    assert_eq!(exit_of(&["compute", "--inverse", "mp"], dir.path()), 1);
    assert_eq!(exit_of(&["--help"], dir.path()), 0);
}

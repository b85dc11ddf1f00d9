use std::fs;
use std::path::Path;

use onefactor::cli::run;

fn onefactor(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("onefactor").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

#[test]
fn gen_factorize_verify() {
    let dir = tempfile::tempdir().unwrap();
    let (g, f) = (path(dir.path(), "g.txt"), path(dir.path(), "f.txt"));
    let (code, _, err) =
        onefactor(&["gen", "--model", "random-regular", "-n", "30", "-d", "7", "--seed", "5", "-o", &g]);
    assert_eq!(code, 0, "{err}");
    let (code, _, err) = onefactor(&["factorize", &g, "--seed", "5", "-o", &f]);
    assert_eq!(code, 0, "{err}");
    let (code, out, _) = onefactor(&["verify", &g, &f]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "accept");
}

#[test]
fn corrupted_factorization_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let (g, f) = (path(dir.path(), "g.txt"), path(dir.path(), "f.txt"));
    assert_eq!(onefactor(&["gen", "--model", "complete", "-n", "8", "-o", &g]).0, 0);
    assert_eq!(onefactor(&["factorize", &g, "-o", &f]).0, 0);
    let text = fs::read_to_string(&f).unwrap();
    // give the first edge a different color, so two classes stop being perfect matchings
    let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
    let first = lines.iter().position(|l| !l.starts_with('#')).unwrap();
    let parts: Vec<&str> = lines[first].split_whitespace().collect();
    let color: usize = parts[2].parse().unwrap();
    lines[first] = format!("{} {} {}", parts[0], parts[1], (color + 1) % 7);
    fs::write(&f, lines.join("\n")).unwrap();
    let (code, out, _) = onefactor(&["verify", &g, &f]);
    assert_eq!(code, 1);
    assert!(out.starts_with("reject"), "{out}");
}

#[test]
fn petersen_fails_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let (g, f) = (path(dir.path(), "p.txt"), path(dir.path(), "f.txt"));
    assert_eq!(onefactor(&["gen", "--model", "petersen", "-n", "10", "-o", &g]).0, 0);
    let (code, _, err) = onefactor(&["factorize", &g, "-o", &f]);
    assert_eq!(code, 1);
    assert!(err.contains("no 1-factorization"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(onefactor(&["gen", "--model", "nonsense", "-n", "4"]).0, 2);
    assert_eq!(onefactor(&[]).0, 2);
    let (code, _, _) = onefactor(&["gen", "--model", "random-regular", "-n", "5", "-d", "3"]);
    assert_eq!(code, 2);
}

#[test]
fn spectral_and_bounds_reports() {
    let dir = tempfile::tempdir().unwrap();
    let g = path(dir.path(), "c.txt");
    assert_eq!(onefactor(&["gen", "--model", "cycle", "-n", "6", "-o", &g]).0, 0);
    let (code, out, _) = onefactor(&["spectral", &g, "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["lambda"].as_f64().unwrap() - 2.0).abs() < 1e-6);

    let (code, out, _) = onefactor(&["bounds", "-n", "8", "-d", "4", "-k", "4", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!((v["schrijver"].as_f64().unwrap() - 4.0 * (576.0f64 / 256.0).ln()).abs() < 1e-9);
}

#[test]
fn print_config_is_json() {
    let (code, out, _) = onefactor(&["--print-config"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["factorize"]["t"], 3);
}

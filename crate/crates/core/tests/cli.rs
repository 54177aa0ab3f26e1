use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn tiltgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tiltgap")).args(args).output().unwrap()
}

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn bundled_scenarios_pass() {
    for name in [
        "two_point.json",
        "mutual_continuity_violation.json",
        "gaussian_grid.json",
    ] {
        let out = tiltgap(&["verify", &scenario(name)]);
        assert_eq!(out.status.code(), Some(0), "{name}:\n{}", stdout(&out));
        assert!(!stdout(&out).contains("FAIL"));
    }
}

#[test]
fn json_report_is_deterministic_and_parseable() {
    let args = ["verify", &scenario("two_point.json"), "--format", "json"];
    let (a, b) = (tiltgap(&args), tiltgap(&args));
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["failed"], 0);
    let checks = doc["checks"].as_array().unwrap();
    assert_eq!(checks.len(), doc["total"].as_u64().unwrap() as usize);
    for key in [
        "check",
        "identity",
        "lambda",
        "expect",
        "pass",
        "direct",
        "closed_form",
        "discrepancy",
        "tolerance",
        "error",
        "terms",
    ] {
        assert!(checks[0].get(key).is_some(), "missing {key}");
    }
    let declared = checks.iter().find(|c| c["expect"] != "pass").unwrap();
    assert_eq!(declared["pass"], true);
    assert!(declared["error"]
        .as_str()
        .unwrap()
        .starts_with("NotAbsolutelyContinuous"));
}

#[test]
fn zero_tolerance_exposes_rounding_and_exits_one() {
    let out = tiltgap(&["verify", &scenario("two_point.json"), "--tolerance", "0"]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let mismatched = dir.path().join("mismatch.json");
    let text = std::fs::read_to_string(scenario("two_point.json")).unwrap();
    std::fs::write(&mismatched, text.replace("\"cost\": [[0, 1]]", "\"cost\": [[0, 1, 2]]")).unwrap();
    let missing = dir.path().join("absent.json");
    let cases: [Vec<String>; 4] = [
        vec!["verify".into(), mismatched.to_string_lossy().into()],
        vec!["verify".into(), missing.to_string_lossy().into()],
        vec![
            "verify".into(),
            scenario("two_point.json"),
            "--tolerance".into(),
            "-1".into(),
        ],
        vec![
            "verify".into(),
            scenario("two_point.json"),
            "--format".into(),
            "yaml".into(),
        ],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = tiltgap(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

fn generate_into(dir: &Path, seed: &str, nx: &str, ny: &str, count: &str) -> Vec<PathBuf> {
    let out = tiltgap(&[
        "generate",
        "--seed",
        seed,
        "--nx",
        nx,
        "--ny",
        ny,
        "--count",
        count,
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
}

#[test]
fn generate_is_byte_identical_per_seed() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let fa = generate_into(a.path(), "7", "2", "3", "5");
    let fb = generate_into(b.path(), "7", "2", "3", "5");
    assert_eq!(fa.len(), 5);
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.file_name(), y.file_name());
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
        let out = tiltgap(&["verify", x.to_str().unwrap(), "--tolerance", "1e-10"]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    }
    let c = tempfile::tempdir().unwrap();
    let fc = generate_into(c.path(), "8", "2", "3", "1");
    assert_ne!(std::fs::read(&fa[0]).unwrap(), std::fs::read(&fc[0]).unwrap());
}

#[test]
fn single_point_y_gives_zero_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let files = generate_into(dir.path(), "11", "3", "1", "2");
    for f in files {
        let out = tiltgap(&["verify", f.to_str().unwrap(), "--format", "json"]);
        assert_eq!(out.status.code(), Some(0));
        let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        for c in doc["checks"].as_array().unwrap() {
            let name = c["check"].as_str().unwrap();
            if name.contains("gap") {
                assert!(c["direct"].as_f64().unwrap().abs() < 1e-15, "{name}");
                assert!(c["closed_form"].as_f64().unwrap().abs() < 1e-15, "{name}");
            }
        }
    }
}

#[test]
fn generate_reports_unwritable_output() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = tiltgap(&[
        "generate",
        "--seed",
        "1",
        "--nx",
        "1",
        "--ny",
        "1",
        "--count",
        "1",
        "--out",
        blocker.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

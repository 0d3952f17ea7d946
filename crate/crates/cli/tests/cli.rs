use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_flexbeam"))
}

fn spec(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("specs").join(format!("{name}.toml"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn read_json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn shipped_specs_solve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for name in ["smooth", "crack", "crease", "strengthening"] {
        let (code, _, err) = run(&["solve", "--spec", spec(name).to_str().unwrap(), "--out", out]);
        assert_eq!(code, 0, "{name}: {err}");
        let doc = read_json(&dir.path().join(format!("{name}.json")));
        assert!(doc["energy"]["total"].is_f64());
        assert!(doc["verification"]["conditions"].is_array());
        assert!(dir.path().join(format!("{name}.csv")).exists());
    }
}

#[test]
fn verify_reproduces_the_stored_energy() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for name in ["crack", "crease", "strengthening"] {
        let (code, _, _) = run(&["solve", "--spec", spec(name).to_str().unwrap(), "--out", out]);
        assert_eq!(code, 0);
        let result = dir.path().join(format!("{name}.json"));
        let (code, stdout, _) = run(&["verify", result.to_str().unwrap()]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
        assert_eq!(v["energy_matches"], true, "{name}: {}", v["energy_difference"]);
        assert!(v["energy_difference"].as_f64().unwrap() <= 1e-12);
    }
}

#[test]
fn verify_reports_tampering_but_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    run(&["solve", "--spec", spec("smooth").to_str().unwrap(), "--out", out]);
    let result = dir.path().join("smooth.json");
    let mut doc = read_json(&result);
    let d = &mut doc["solution"]["dofs"][10];
    *d = serde_json::json!(d.as_f64().unwrap() + 1e-3);
    std::fs::write(&result, serde_json::to_string(&doc).unwrap()).unwrap();
    let (code, stdout, _) = run(&["verify", result.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["energy_matches"], false);
    assert!(v["verification"]["stationarity"].as_f64().unwrap() > 1e-8);
}

#[test]
fn malformed_spec_exits_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.toml");
    std::fs::write(&p, "problem = \"E1\"\n[params]\neta = 1.0\nmuu = 2.0\n").unwrap();
    let (code, _, err) = run(&["solve", "--spec", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 4") && err.contains("muu"), "{err}");

    std::fs::write(&p, "problem = \"E1\"\n[params]\nalpha = 3.0\nbeta = 1.0\n").unwrap();
    let (code, _, err) = run(&["solve", "--spec", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("params"), "{err}");

    std::fs::write(&p, "problem = \"E1\"\n[[breaks]]\nx = 0.0\nkind = \"hinge\"\n").unwrap();
    let (code, _, _) = run(&["solve", "--spec", p.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn unknown_subcommand_exits_64() {
    let (code, _, err) = run(&["frobnicate"]);
    assert_eq!(code, 64);
    assert!(err.contains("Usage"), "{err}");
}

#[test]
fn search_is_independent_of_thread_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let s = spec("search");
    for (dir, jobs) in [(&a, "1"), (&b, "4")] {
        let (code, _, err) = run(&["search", "--spec", s.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--jobs", jobs]);
        assert_eq!(code, 0, "{err}");
    }
    for f in ["search.json", "search.csv"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f} differs"
        );
    }
}

#[test]
fn sweep_writes_an_index() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run(&["sweep", "--spec", spec("sweep").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let index = std::fs::read_to_string(dir.path().join("sweep_index.csv")).unwrap();
    let lines: Vec<&str> = index.lines().collect();
    assert_eq!(lines[0], "value,n_breaks,energy,file");
    assert_eq!(lines.len(), 6);
    for i in 0..5 {
        let doc = read_json(&dir.path().join(format!("sweep_{i:03}.json")));
        assert_eq!(doc["command"], "search");
    }
}

#[test]
fn poincare_matches_the_clamped_root() {
    let (code, stdout, _) = run(&["poincare", "--n", "128"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    assert!(v["relative_error"].as_f64().unwrap() < 1e-7);
    let (code, _, _) = run(&["poincare", "--n", "4"]);
    assert_eq!(code, 3);
}

#[test]
fn library_entry_point_matches_the_binary() {
    assert_eq!(flexbeam_cli::run(["flexbeam", "nope"]), 64);
    assert_eq!(flexbeam_cli::run(["flexbeam", "poincare", "--n", "32"]), 0);
}

use std::process::Command;

fn radpol() -> Command {
    Command::new(env!("CARGO_BIN_EXE_radpol"))
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn simulate_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(&dir, "c.toml", "[[sample]]\nkind = \"hwp\"\ntheta_deg = 22.5\n");
    let out = dir.path().join("r.json");
    let st = radpol().args(["simulate", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["seed"], 0);
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(&dir, "c.toml", "seed = 1\n[noise]\nsigma_rel = 1e-3\n[[sample]]\nkind = \"identity\"\n");
    let out = radpol()
        .args(["simulate", "--seed", "9", "--trials", "5", "--scheme", "conventional", "--format", "csv", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(2).unwrap().starts_with("mueller_hat,conventional,"));
    assert!(text.trim_end().ends_with(",9"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = radpol().args(["simulate", "--config", "/definitely/not/here.toml"]).status().unwrap();
    assert_eq!(missing.code(), Some(4));
    let bad = write(&dir, "bad.toml", "[[sample]]\nkind = \"hwp\"\n");
    assert_eq!(radpol().arg("simulate").arg("--config").arg(&bad).status().unwrap().code(), Some(2));
    assert_eq!(radpol().arg("simulate").status().unwrap().code(), Some(2));
    assert_eq!(radpol().arg("frobnicate").status().unwrap().code(), Some(2));
    let good = write(&dir, "good.toml", "[[sample]]\nkind = \"identity\"\n");
    let unwritable = radpol().arg("simulate").arg("--config").arg(&good).args(["--out", "/no/such/dir/r.json"]).status();
    assert_eq!(unwritable.unwrap().code(), Some(4));
    let opaque = write(&dir, "zero.toml", "[[sample]]\nkind = \"jones\"\nre = [[0, 0], [0, 0]]\n");
    // A zero sample is measurable: every estimate is the zero matrix.
    assert_eq!(radpol().arg("simulate").arg("--config").arg(&opaque).output().unwrap().status.code(), Some(0));
    let huge = write(&dir, "huge.toml", "[[sample]]\nkind = \"jones\"\nre = [[1e200, 0], [0, 1]]\n");
    assert_eq!(radpol().arg("simulate").arg("--config").arg(&huge).output().unwrap().status.code(), Some(3));
}

#[test]
fn render_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(&dir, "c.toml", "[[sample]]\nkind = \"polarizer\"\ntheta_deg = 0\n[render]\nnx = 16\nny = 8\n");
    let csv = dir.path().join("m.csv");
    let st = radpol().arg("render").arg("--config").arg(&cfg).arg("--out").arg(&csv).status().unwrap();
    assert_eq!(st.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 1 + 16 * 8);
    let ppm = dir.path().join("m.ppm");
    let st = radpol()
        .args(["render", "--layer", "phase-x", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&ppm)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(std::fs::read(&ppm).unwrap().starts_with(b"P6\n16 8\n255\n"));
    let ens = write(&dir, "e.toml", "haar_members = 3\n");
    assert_eq!(radpol().arg("render").arg("--config").arg(&ens).status().unwrap().code(), Some(2));
    let st = radpol().args(["render", "--decomposition", "circular", "--layer", "intensity"]).status().unwrap();
    assert_eq!(st.code(), Some(2), "pixmap without --out");
}

#[test]
fn selftest_quick_passes() {
    let out = radpol().args(["selftest", "--quick"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.contains(" PASS ")).count(), 10);
}

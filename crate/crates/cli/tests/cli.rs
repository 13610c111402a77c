use std::path::PathBuf;
use std::process::{Command, Output};

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("homog-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn homog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homog")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn generate_writes_realization_and_fractions() {
    let dir = workdir("generate");
    let o = homog(&["generate", "--preset", "rve4", "--seed", "3", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("sphere") && text.contains("ellipsoid") && text.contains("target"));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("rve4.json")).unwrap()).unwrap();
    assert_eq!(doc["inclusions"].as_array().unwrap().len(), 4);
    assert_eq!(doc["seed"], 3);
}

#[test]
fn empty_preset_gives_valid_empty_file() {
    let dir = workdir("empty");
    let o = homog(&["generate", "--preset", "empty", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("empty.json")).unwrap()).unwrap();
    assert!(doc["inclusions"].as_array().unwrap().is_empty());
}

#[test]
fn voxelize_then_sweep_from_realization_file() {
    let dir = workdir("sweep");
    let out = dir.to_str().unwrap();
    assert!(homog(&["generate", "--preset", "rve4", "--seed", "1", "--out", out]).status.success());
    let file = dir.join("rve4.json");
    let file = file.to_str().unwrap();
    let v = homog(&["voxelize", "--realization", file, "--resolution", "16", "--out", out]);
    assert!(v.status.success());
    assert_eq!(std::fs::metadata(dir.join("rve4_16.raw")).unwrap().len(), 16 * 16 * 16);

    let args = ["sweep", "--realization", file, "--resolution", "16", "--contrasts", "1,5", "--out", out];
    let s = homog(&args);
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
    let csv = std::fs::read_to_string(dir.join("rve4_sweep.csv")).unwrap();
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "rve_id,model,contrast,K_norm,mu_norm,E1_norm,deltaK_pct,deltaMu_pct,deltaE_pct");
    assert_eq!(lines.len(), 9);
    assert!(dir.join("rve4_timings.json").exists());
    // Same inputs, same bytes.
    assert!(homog(&args).status.success());
    assert_eq!(std::fs::read_to_string(dir.join("rve4_sweep.csv")).unwrap(), csv);
}

#[test]
fn config_file_with_flag_override() {
    let dir = workdir("config");
    let cfg = dir.join("study.json");
    std::fs::write(
        &cfg,
        format!(
            r#"{{"rve": {{"preset": "rve5"}}, "seed": 2, "contrasts": [10], "models": ["mt", "nsc"], "out": "{}"}}"#,
            dir.display()
        ),
    )
    .unwrap();
    let o = homog(&["meanfield", "--config", cfg.to_str().unwrap(), "--contrasts", "1,10"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.join("rve5_meanfield.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.lines().nth(1).unwrap().starts_with("rve5,MT,1,1.0000000000"));
}

#[test]
fn fft_command_reports_moduli() {
    let dir = workdir("fft");
    let o = homog(&["fft", "--preset", "rve4", "--resolution", "8", "--contrasts", "3", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("contrast 3: K/Km"));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("rve4_fft.json")).unwrap()).unwrap();
    assert_eq!(doc[0]["mandel"].as_array().unwrap().len(), 6);
}

#[test]
fn validate_prints_each_oracle() {
    let o = homog(&["validate"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 4);
    assert!(text.contains("max deviation"));
    let degraded = homog(&["validate", "--quadrature-order", "4"]);
    assert!(!degraded.status.success());
    assert!(stdout(&degraded).lines().any(|l| l.starts_with("FAIL") && l.contains("Eshelby")));
}

#[test]
fn config_errors_exit_with_2() {
    assert_eq!(homog(&["sweep", "--contrasts", "0.5"]).status.code(), Some(2));
    assert_eq!(homog(&["generate", "--preset", "rve9"]).status.code(), Some(2));
    let dir = workdir("badcfg");
    let cfg = dir.join("bad.json");
    std::fs::write(&cfg, r#"{"unknown_key": 1}"#).unwrap();
    assert_eq!(homog(&["generate", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn solver_failure_everywhere_exits_with_3() {
    let dir = workdir("nonconv");
    let cfg = dir.join("study.json");
    std::fs::write(&cfg, r#"{"solver": {"max_iterations": 1}}"#).unwrap();
    let o = homog(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--preset",
        "rve4",
        "--resolution",
        "8",
        "--contrasts",
        "50,100",
        "--models",
        "fft,mt",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let csv = std::fs::read_to_string(dir.join("rve4_sweep.csv")).unwrap();
    assert_eq!(csv.matches("FAILED").count(), 12);
}

#[test]
fn verbose_run_writes_residual_logs() {
    let dir = workdir("logs");
    let o = homog(&["fft", "-v", "--preset", "rve4", "--resolution", "8", "--contrasts", "2", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(dir.join("logs").join("load_case_0.csv").exists());
}

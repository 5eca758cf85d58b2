//! End-to-end checks of the binary: exit codes, error reporting and
//! byte-level determinism of the artifact files.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nlwave"))
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0));
    entries
}

#[test]
fn unknown_command_exits_one() {
    let out = bin().args(["--command", "frobnicate"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("unknown command"), "{msg}");
}

#[test]
fn bad_config_exits_one_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "command = simulate\nN = 511\n").unwrap();
    let out = bin().arg("--config").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("line 2") && msg.contains("even"), "{msg}");
}

#[test]
fn blowup_exits_two_with_error_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    // violently unstable configuration: huge data, explicit big step
    std::fs::write(
        &cfg,
        "command = simulate\nN = 64\nL = 20\namplitude = 80\nepsilon = 1\n\
         dt = 0.2\nt_end = 50\nsample_every = 50\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = bin()
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(out_dir.join("summary.json")).unwrap();
    assert!(summary.contains("\"blowup_at\": ") && !summary.contains("\"blowup_at\": null"));
    assert!(out_dir.join("error.json").exists());
    assert!(out_dir.join("diagnostics.csv").exists());
}

#[test]
fn identical_config_and_seed_give_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "command = sweep\nN = 128\nL = 20\np = 1\nepsilon_list = 0.3,0.2\nT_cap = 1\nseed = 7\n",
    )
    .unwrap();
    // identical config implies an identical destination: run twice into the
    // same directory and snapshot the bytes in between
    let out_dir = dir.path().join("out");
    let run = || {
        let out = bin()
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(&out_dir)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    };
    run();
    let fa = read_dir_bytes(&out_dir);
    run();
    let fb = read_dir_bytes(&out_dir);
    assert!(!fa.is_empty());
    assert_eq!(fa.len(), fb.len());
    for ((na, ba), (nb, bb)) in fa.iter().zip(&fb) {
        assert_eq!(na, nb);
        assert_eq!(ba, bb, "file {na} differs between runs");
    }
}

#[test]
fn probes_deterministic_and_well_formed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "command = probes\nN = 64\nL = 3.141592653589793\nsamples = 10\nseed = 3\n",
    )
    .unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out_dir in [&a, &b] {
        let out = bin()
            .arg("--config")
            .arg(&cfg)
            .arg("--out")
            .arg(out_dir)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let ja = std::fs::read_to_string(a.join("probes.json")).unwrap();
    let jb = std::fs::read_to_string(b.join("probes.json")).unwrap();
    assert_eq!(ja, jb);
    let v: serde_json::Value = serde_json::from_str(&ja).unwrap();
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 5);
    for rep in reports {
        assert!(rep["empirical_c"].as_f64().unwrap().is_finite());
        assert_eq!(rep["samples"].as_u64().unwrap(), 10);
        assert_eq!(rep["seed"].as_u64().unwrap(), 3);
        assert_eq!(rep["max_ratio_input_hash"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn validate_kernel_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "command = validate-kernel\nkernel = triangular\nL = 16\nN = 512\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = bin()
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("validation.json")).unwrap())
            .unwrap();
    assert_eq!(v["elliptic"].as_bool().unwrap(), false);
    let r = v["fitted_r"].as_f64().unwrap();
    assert!((r - 2.0).abs() < 0.2, "fitted r {r}");
}

#[test]
fn custom_kernel_file_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let kcsv = dir.path().join("custom.csv");
    let mut text = String::from("xi,beta_hat\n");
    for i in 0..200 {
        let xi = i as f64 * 0.5;
        text.push_str(&format!("{},{}\n", xi, 1.0 / (1.0 + xi * xi)));
    }
    std::fs::write(&kcsv, text).unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        format!(
            "command = validate-kernel\nkernel_file = {}\nL = 10\nN = 128\n",
            kcsv.display()
        ),
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = bin()
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("validation.json")).unwrap())
            .unwrap();
    assert!(v["elliptic"].as_bool().unwrap());
}

#[test]
fn config_echo_reparses_to_the_same_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "command = nashmoser\nL = 17.25\nN = 64\nepsilon = 0.125\nseed = 11\n",
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    assert!(bin()
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap()
        .success());
    let echoed = std::fs::read_to_string(out_dir.join("config_echo.cfg")).unwrap();
    let reparsed = nlwave_cli::parse_config(&echoed, None, None, None).unwrap();
    let original = nlwave_cli::parse_config(
        &std::fs::read_to_string(&cfg).unwrap(),
        None,
        Some(out_dir.to_str().unwrap()),
        None,
    )
    .unwrap();
    assert_eq!(reparsed, original);
}

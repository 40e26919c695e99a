//! End-to-end tests of the command-line surface: flags, file formats,
//! exit codes, and byte-level reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_creepwave"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn creepwave")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn temp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("creepwave-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

/// A small dataset most tests share: 2 subjects x 6 activities x 3 trials.
fn small_dataset(dir: &Path) {
    let output = run(&[
        "synth",
        "--out",
        dir.to_str().unwrap(),
        "--seed",
        "5",
        "--subjects",
        "2",
        "--trials",
        "3",
        "--duration-s",
        "8",
    ]);
    assert!(output.status.success(), "synth failed: {}", stderr(&output));
}

#[test]
fn profile_emits_47_rows_and_is_deterministic() {
    let out = run(&["profile", "--circumference-cm", "48", "--freq-mhz", "2450", "--step-cm", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> =
        text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("arc_cm")).collect();
    assert_eq!(rows.len(), 47);
    assert!(text.contains("arc_cm,angle_deg,mag_db,phase_rad"));
    let again = run(&["profile", "--circumference-cm", "48", "--freq-mhz", "2450", "--step-cm", "1"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn profile_requires_circumference() {
    let out = run(&["profile", "--freq-mhz", "2450"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--circumference-cm"), "{}", stderr(&out));
}

#[test]
fn profile_warns_outside_plausible_range() {
    let out = run(&["profile", "--circumference-cm", "150", "--freq-mhz", "2450"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("plausible"), "{}", stderr(&out));
}

#[test]
fn synth_writes_the_requested_grid() {
    let dir = temp_dir("synth");
    let out = run(&[
        "synth",
        "--out",
        dir.to_str().unwrap(),
        "--seed",
        "7",
        "--subjects",
        "2",
        "--trials",
        "3",
        "--duration-s",
        "4",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(files.iter().filter(|f| f.starts_with("rec_")).count(), 36);
    assert!(files.contains(&"manifest.txt".to_string()));
    let manifest = std::fs::read_to_string(dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("seed = 7"));
    assert!(manifest.contains("format = creepwave-dataset v1"));

    // Same seed and flags reproduce the same bytes.
    let dir2 = temp_dir("synth2");
    let out2 = run(&[
        "synth",
        "--out",
        dir2.to_str().unwrap(),
        "--seed",
        "7",
        "--subjects",
        "2",
        "--trials",
        "3",
        "--duration-s",
        "4",
    ]);
    assert!(out2.status.success());
    let pick = |d: &Path| std::fs::read_to_string(d.join("rec_male2_squatting_t02.csv")).unwrap();
    let a = pick(&dir);
    let b = pick(&dir2);
    // Only the flags header (the --out path) may differ.
    let body = |s: &str| {
        s.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(body(&a), body(&b));
    std::fs::remove_dir_all(dir).unwrap();
    std::fs::remove_dir_all(dir2).unwrap();
}

#[test]
fn synth_rejects_more_subjects_than_the_roster() {
    let dir = temp_dir("badsubj");
    let out = run(&["synth", "--out", dir.to_str().unwrap(), "--subjects", "9"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--subjects"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn evaluate_writes_reports_and_a_summary() {
    let data = temp_dir("evaldata");
    small_dataset(&data);
    let reports = temp_dir("evalout");
    let out = run(&[
        "evaluate",
        "--dataset",
        data.to_str().unwrap(),
        "--classifier",
        "knn",
        "--window-s",
        "4",
        "--out",
        reports.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = stdout(&out);
    assert!(table.contains("classifier") && table.contains("knn"), "{table}");
    let report = std::fs::read_to_string(reports.join("report_knn.txt")).unwrap();
    assert!(report.contains("accuracy = 0.") || report.contains("accuracy = 1"));
    let accuracy: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("accuracy = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.0..=1.0).contains(&accuracy));
    assert!(report.contains("[confusion_counts]"));
    assert!(report.contains("seed: 0"));
    std::fs::remove_dir_all(data).unwrap();
    std::fs::remove_dir_all(reports).unwrap();
}

#[test]
fn evaluate_all_writes_five_reports() {
    let data = temp_dir("alldata");
    small_dataset(&data);
    let reports = temp_dir("allout");
    let out = run(&[
        "evaluate",
        "--dataset",
        data.to_str().unwrap(),
        "--classifier",
        "all",
        "--out",
        reports.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    for kind in ["svm", "knn", "gnb", "tree", "dtw"] {
        assert!(reports.join(format!("report_{kind}.txt")).exists(), "missing {kind}");
    }
    assert_eq!(stdout(&out).lines().count(), 6); // header + five rows
    std::fs::remove_dir_all(data).unwrap();
    std::fs::remove_dir_all(reports).unwrap();
}

#[test]
fn evaluate_rejects_unknown_classifier_with_usage_error() {
    let out = run(&["evaluate", "--dataset", "/nonexistent", "--classifier", "cnn"]);
    assert_eq!(out.status.code(), Some(2));
    let text = stderr(&out);
    for name in ["svm", "knn", "gnb", "tree", "dtw"] {
        assert!(text.contains(name), "{text}");
    }
}

#[test]
fn evaluate_reports_are_byte_identical_across_runs() {
    let data = temp_dir("detdata");
    small_dataset(&data);
    let r1 = temp_dir("det1");
    let r2 = temp_dir("det2");
    for out_dir in [&r1, &r2] {
        let out = run(&[
            "evaluate",
            "--dataset",
            data.to_str().unwrap(),
            "--classifier",
            "svm",
            "--seed",
            "3",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let body = |p: &Path| {
        let text = std::fs::read_to_string(p.join("report_svm.txt")).unwrap();
        text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>().join("\n")
    };
    assert_eq!(body(&r1), body(&r2));
    std::fs::remove_dir_all(data).unwrap();
    std::fs::remove_dir_all(r1).unwrap();
    std::fs::remove_dir_all(r2).unwrap();
}

#[test]
fn evaluate_can_save_models() {
    let data = temp_dir("modeldata");
    small_dataset(&data);
    let reports = temp_dir("modelout");
    let models = temp_dir("models");
    let out = run(&[
        "evaluate",
        "--dataset",
        data.to_str().unwrap(),
        "--classifier",
        "tree",
        "--out",
        reports.to_str().unwrap(),
        "--save-models",
        models.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let model_text = std::fs::read_to_string(models.join("model_tree.txt")).unwrap();
    assert!(model_text.starts_with("creepwave-model v1"));
    // The saved file loads back into a usable model.
    let model = creepwave::classifiers::io::load_model(&models.join("model_tree.txt")).unwrap();
    assert_eq!(model.kind(), creepwave::classifiers::ClassifierKind::Tree);
    std::fs::remove_dir_all(data).unwrap();
    std::fs::remove_dir_all(reports).unwrap();
    std::fs::remove_dir_all(models).unwrap();
}

#[test]
fn evaluate_can_export_the_feature_matrix() {
    let data = temp_dir("featdata");
    small_dataset(&data);
    let reports = temp_dir("featout");
    let features = reports.join("features.csv");
    let out = run(&[
        "evaluate",
        "--dataset",
        data.to_str().unwrap(),
        "--classifier",
        "gnb",
        "--out",
        reports.to_str().unwrap(),
        "--save-features",
        features.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&features).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next().unwrap(), "mean,peak,rms,std,kurtosis,skewness,label");
    // 2 subjects x 6 activities x 3 trials x 2 windows.
    assert_eq!(lines.count(), 72);
    std::fs::remove_dir_all(data).unwrap();
    std::fs::remove_dir_all(reports).unwrap();
}

#[test]
fn sweep_emits_a_sorted_grid() {
    let data = temp_dir("sweepdata");
    small_dataset(&data);
    let out = run(&[
        "sweep",
        "--dataset",
        data.to_str().unwrap(),
        "--windows",
        "1,2,4",
        "--classifier",
        "knn",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("window_s"))
        .collect();
    assert_eq!(rows.len(), 6);
    assert!(rows[0].starts_with("1,false,"));
    assert!(rows[3].starts_with("1,true,"));
    assert!(rows[5].starts_with("4,true,"));
    // Deterministic bytes for identical flags.
    let again = run(&[
        "sweep",
        "--dataset",
        data.to_str().unwrap(),
        "--windows",
        "1,2,4",
        "--classifier",
        "knn",
    ]);
    assert_eq!(out.stdout, again.stdout);
    std::fs::remove_dir_all(data).unwrap();
}

#[test]
fn sweep_names_an_oversized_window() {
    let data = temp_dir("sweepbad");
    small_dataset(&data); // 8 s recordings
    let out = run(&[
        "sweep",
        "--dataset",
        data.to_str().unwrap(),
        "--windows",
        "4,9",
        "--classifier",
        "knn",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains('9'), "{}", stderr(&out));
    std::fs::remove_dir_all(data).unwrap();
}

#[test]
fn ingest_accepts_a_trace_and_extends_the_manifest() {
    let dir = temp_dir("ingest");
    // A synthetic external trace: 8 s at 25 Hz.
    let trace = dir.join("external.csv");
    let mut text = String::from("time_s,mag_db,phase_rad\n");
    for i in 0..200 {
        let t = i as f64 / 25.0;
        text.push_str(&format!("{t},{},{}\n", -60.0 - (t * 2.1).sin() * 8.0, 0.3));
    }
    std::fs::write(&trace, text).unwrap();
    let dataset_dir = dir.join("dataset");
    let ingest = |trial: &str| {
        run(&[
            "ingest",
            "--file",
            trace.to_str().unwrap(),
            "--out",
            dataset_dir.to_str().unwrap(),
            "--subject-id",
            "guest1",
            "--height-cm",
            "180",
            "--weight-kg",
            "75",
            "--circumference-cm",
            "52",
            "--age",
            "30",
            "--sex",
            "male",
            "--activity",
            "squatting",
            "--trial",
            trial,
        ])
    };
    let out = ingest("0");
    assert!(out.status.success(), "{}", stderr(&out));
    let out = ingest("1");
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("2 recordings"));
    let manifest = std::fs::read_to_string(dataset_dir.join("manifest.txt")).unwrap();
    assert!(manifest.contains("generator = ingested"));
    assert_eq!(manifest.matches("guest1,").count(), 2);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn ingest_rejects_unknown_activity() {
    let dir = temp_dir("ingestbad");
    let trace = dir.join("x.csv");
    std::fs::write(&trace, "time_s,mag_db,phase_rad\n0,-60,0\n0.02,-60,0\n").unwrap();
    let out = run(&[
        "ingest",
        "--file",
        trace.to_str().unwrap(),
        "--out",
        dir.join("d").to_str().unwrap(),
        "--subject-id",
        "x",
        "--height-cm",
        "180",
        "--weight-kg",
        "75",
        "--circumference-cm",
        "52",
        "--age",
        "30",
        "--sex",
        "male",
        "--activity",
        "moonwalk",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("moonwalk"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn out_dir_env_var_is_honored() {
    let data = temp_dir("envdata");
    small_dataset(&data);
    let reports = temp_dir("envout");
    let out = bin()
        .args(["evaluate", "--dataset", data.to_str().unwrap(), "--classifier", "gnb"])
        .env("CREEPWAVE_OUT_DIR", reports.to_str().unwrap())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(reports.join("report_gnb.txt").exists());
    std::fs::remove_dir_all(data).unwrap();
    std::fs::remove_dir_all(reports).unwrap();
}

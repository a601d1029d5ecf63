//! End-to-end tests of the command-line interface: exit codes, output
//! determinism and the run-directory artifacts.

use std::path::Path;
use std::process::{Command, Output};

fn polyclass(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyclass"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn weights_prints_shape_and_angle() {
    let out = polyclass(&["weights", "--kind", "simplex", "--classes", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("d=9"), "{text}");
    assert!(text.contains("K_total=10"), "{text}");
    assert!(text.contains("adjacent_angle_deg=96.379"), "{text}");

    let out = polyclass(&["weights", "--kind", "cube", "--classes", "100"]);
    let text = stdout(&out);
    assert!(text.contains("d=7"), "{text}");
    assert!(text.contains("K_total=128"), "{text}");
    assert!(text.contains("virtual=28"), "{text}");

    let out = polyclass(&["weights", "--kind", "polygon", "--classes", "10"]);
    let text = stdout(&out);
    assert!(text.contains("K_total=10"), "{text}");
    assert!(text.contains("adjacent_angle_deg=36.000"), "{text}");
}

#[test]
fn weights_csv_round_trips_through_inspect() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("w.csv");
    let out = polyclass(&[
        "weights",
        "--kind",
        "orthoplex",
        "--classes",
        "6",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(csv.exists());

    let out = polyclass(&["inspect", "--weights", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("kind=orthoplex"), "{text}");
    assert!(text.contains("min_pairwise_angle_deg=90.000"), "{text}");
}

#[test]
fn usage_errors_exit_2() {
    // Unknown flag.
    let out = polyclass(&["weights", "--kind", "simplex", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    // Unknown kind.
    let out = polyclass(&["weights", "--kind", "dodecahedron", "--classes", "5"]);
    assert_eq!(out.status.code(), Some(2));
    // Missing required count.
    let out = polyclass(&["weights", "--kind", "simplex"]);
    assert_eq!(out.status.code(), Some(2));
    // Unknown subcommand.
    let out = polyclass(&["transmogrify"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn io_errors_exit_1() {
    let out = polyclass(&[
        "weights",
        "--kind",
        "simplex",
        "--classes",
        "4",
        "--out",
        "/nonexistent_dir_polyclass/w.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));

    let out = polyclass(&["inspect", "--weights", "/no/such/file.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_lists_flags_and_exits_0() {
    let out = polyclass(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    for sub in [
        "weights", "angles", "train", "sweep", "virtual", "hadamard", "plot", "inspect",
    ] {
        assert!(stdout(&out).contains(sub), "missing {sub} in help");
    }
    let out = polyclass(&["train", "--help"]);
    assert_eq!(out.status.code(), Some(0));
    for flag in ["--epochs", "--lr", "--seed", "--hidden", "--head", "--out"] {
        assert!(stdout(&out).contains(flag), "missing {flag} in train help");
    }
}

#[test]
fn angle_sweep_has_27_rows_and_constant_orthoplex() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("sweep.csv");
    let svg = dir.path().join("sweep.svg");
    let out = polyclass(&[
        "angles",
        "--sweep",
        "2",
        "10",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 27);
    for row in rows.iter().filter(|r| r.starts_with("orthoplex")) {
        assert!(row.ends_with(",90"), "{row}");
    }
    // Cube at d=10: arccos(0.8) in degrees.
    let cube10 = rows
        .iter()
        .find(|r| r.starts_with("cube,10"))
        .expect("cube d=10 row");
    let deg: f64 = cube10.rsplit(',').next().unwrap().parse().unwrap();
    assert!((deg - 36.8698976458).abs() < 1e-6);
    assert!(svg.exists());
}

#[test]
fn train_run_dir_is_deterministic_and_plottable() {
    let dir = tempfile::tempdir().unwrap();
    let run_a = dir.path().join("a");
    let run_b = dir.path().join("b");
    let base = [
        "train",
        "--dataset",
        "blobs",
        "--classes",
        "4",
        "--per-class",
        "40",
        "--epochs",
        "3",
        "--seed",
        "11",
    ];
    for run in [&run_a, &run_b] {
        let mut args: Vec<&str> = base.to_vec();
        args.push("--out");
        args.push(run.to_str().unwrap());
        let out = polyclass(&args);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let metrics_a = std::fs::read(run_a.join("metrics.csv")).unwrap();
    let metrics_b = std::fs::read(run_b.join("metrics.csv")).unwrap();
    assert_eq!(metrics_a, metrics_b);

    // Feature scatter: 4 weight rays, one point per train sample, plus
    // bisectors; identical bytes when re-plotted.
    let svg_path = run_a.join("plot_features.svg");
    let out = polyclass(&[
        "plot",
        "--run",
        run_a.to_str().unwrap(),
        "--what",
        "features",
        "--bisectors",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let svg1 = std::fs::read_to_string(&svg_path).unwrap();
    assert_eq!(svg1.matches("class=\"weight-ray\"").count(), 4);
    assert_eq!(svg1.matches("class=\"pt\"").count(), 4 * 32);
    assert_eq!(svg1.matches("class=\"bisector\"").count(), 4);
    let out = polyclass(&[
        "plot",
        "--run",
        run_a.to_str().unwrap(),
        "--what",
        "features",
        "--bisectors",
    ]);
    assert!(out.status.success());
    let svg2 = std::fs::read_to_string(&svg_path).unwrap();
    assert_eq!(svg1, svg2);

    for what in ["angles", "accuracy"] {
        let out = polyclass(&["plot", "--run", run_a.to_str().unwrap(), "--what", what]);
        assert!(out.status.success());
        assert!(run_a.join(format!("plot_{what}.svg")).exists());
    }

    // Unsupported plot name is a usage error.
    let out = polyclass(&[
        "plot",
        "--run",
        run_a.to_str().unwrap(),
        "--what",
        "mystery",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Inspect summarizes the run.
    let out = polyclass(&["inspect", "--run", run_a.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("experiment: stationarity"), "{text}");
    assert!(text.contains("epochs logged: 3"), "{text}");
    assert!(text.contains("trainable_params="), "{text}");
}

#[test]
fn zero_epoch_train_writes_header_only_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("zero");
    let out = polyclass(&[
        "train",
        "--dataset",
        "blobs",
        "--classes",
        "3",
        "--per-class",
        "20",
        "--epochs",
        "0",
        "--out",
        run.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let metrics = std::fs::read_to_string(run.join("metrics.csv")).unwrap();
    let lines: Vec<&str> = metrics.lines().collect();
    assert_eq!(lines.len(), 1);
    assert!(lines[0].starts_with("epoch,train_loss,"));
}

#[test]
fn feature_scatter_rejects_non_planar_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("simplex_run");
    let out = polyclass(&[
        "train",
        "--dataset",
        "blobs",
        "--classes",
        "4",
        "--input-dim",
        "3",
        "--per-class",
        "20",
        "--head",
        "simplex",
        "--epochs",
        "1",
        "--out",
        run.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = polyclass(&["plot", "--run", run.to_str().unwrap(), "--what", "features"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"classes": 3, "epochs": 2, "per_class": 30, "seed": 5, "hidden": "8"}"#,
    )
    .unwrap();
    let run = dir.path().join("cfgrun");
    let out = polyclass(&[
        "train",
        "--config",
        cfg.to_str().unwrap(),
        "--epochs",
        "4", // flag beats the config file
        "--out",
        run.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let metrics = std::fs::read_to_string(run.join("metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 5); // header + 4 epochs
                                            // Classes came from the file: 3 angle columns.
    assert!(metrics
        .lines()
        .next()
        .unwrap()
        .contains("mean_angle_class_2"));
    assert!(!metrics
        .lines()
        .next()
        .unwrap()
        .contains("mean_angle_class_3"));
}

#[test]
fn sweep_virtual_and_hadamard_commands_run() {
    let dir = tempfile::tempdir().unwrap();

    let sweep = dir.path().join("sweep");
    let out = polyclass(&[
        "sweep",
        "--dataset",
        "blobs",
        "--classes",
        "4",
        "--per-class",
        "30",
        "--epochs",
        "2",
        "--n-perms",
        "3",
        "--out",
        sweep.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("mean_acc="));
    assert!(sweep.join("runs.csv").exists());
    assert!(sweep.join("report.json").exists());

    let virt = dir.path().join("virt");
    let out = polyclass(&[
        "virtual",
        "--dataset",
        "blobs",
        "--classes",
        "4",
        "--per-class",
        "30",
        "--head",
        "polygon",
        "--k-total",
        "10",
        "--epochs",
        "2",
        "--out",
        virt.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("virtual_fraction="));
    assert!(virt.join("report.json").exists());

    let had = dir.path().join("had");
    let out = polyclass(&[
        "hadamard",
        "--dataset",
        "blobs",
        "--classes",
        "4",
        "--per-class",
        "30",
        "--dim",
        "2",
        "--epochs",
        "2",
        "--out",
        had.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("gap="));
    assert!(had.join("polytope/metrics.csv").exists());
    assert!(had.join("hadamard/metrics.csv").exists());
}

#[test]
fn diverged_training_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let run = dir.path().join("diverge");
    let out = polyclass(&[
        "train",
        "--dataset",
        "blobs",
        "--classes",
        "4",
        "--per-class",
        "30",
        "--epochs",
        "5",
        "--lr",
        "1e30",
        "--out",
        run.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("diverged"), "{err}");
}

#[test]
fn sweep_results_do_not_depend_on_the_thread_cap() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let run = dir.path().join(format!("sweep_{threads}"));
        let out = Command::new(env!("CARGO_BIN_EXE_polyclass"))
            .env("POLYCLASS_THREADS", threads)
            .args([
                "sweep",
                "--dataset",
                "blobs",
                "--classes",
                "4",
                "--per-class",
                "30",
                "--epochs",
                "2",
                "--n-perms",
                "4",
                "--out",
                run.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        outputs.push(std::fs::read(run.join("runs.csv")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn digits_dataset_flows_through_the_idx_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let data_dir = dir.path().join("digits");
    let run = dir.path().join("digits_run");
    let out = polyclass(&[
        "virtual",
        "--dataset",
        "digits",
        "--data-dir",
        data_dir.to_str().unwrap(),
        "--per-class",
        "40",
        "--keep",
        "0,1,2,3",
        "--head",
        "polygon",
        "--k-total",
        "10",
        "--epochs",
        "3",
        "--out",
        run.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(Path::new(&data_dir)
        .join("train-images-idx3-ubyte")
        .exists());
    assert!(stdout(&out).contains("K=4/10"));
}

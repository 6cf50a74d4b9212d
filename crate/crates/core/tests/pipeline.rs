use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use evflow::io::write_csv;
use evflow::pipeline::{compute, run_pipeline, EpsilonPolicy, RunConfig};
use evflow::synthetic::{gen_flat_2d, gen_flat_three, ScaleSet};
use evflow::Error;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("evflow-it-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn flat_fixture(dir: &Path, n: usize, seed: u64) {
    let s = ScaleSet::uniform(2.0).unwrap();
    let (a, b, lat) = gen_flat_2d(n, &s, seed).unwrap();
    write_csv(&dir.join("a.csv"), a.rows(), Some(&["u", "v"])).unwrap();
    write_csv(&dir.join("b.csv"), b.rows(), Some(&["u", "v"])).unwrap();
    let x = nalgebra::DMatrix::from_column_slice(n, 1, &lat.x);
    write_csv(&dir.join("x.csv"), &x, Some(&["x"])).unwrap();
}

fn small_config(dir: &Path, inputs: &[&str]) -> RunConfig {
    let mut cfg = RunConfig::new(inputs.iter().map(|f| dir.join(f)).collect(), dir.join("out"));
    cfg.epsilon = EpsilonPolicy::Fixed(vec![0.3; inputs.len()]);
    cfg.n_t = 41;
    cfg.k = 10;
    cfg
}

#[test]
fn symmetric_flat_fixture_peaks_at_half() {
    let dir = scratch("flat");
    flat_fixture(&dir, 300, 5);
    let mut cfg = small_config(&dir, &["a.csv", "b.csv"]);
    cfg.target = Some(dir.join("x.csv"));
    let report = run_pipeline(&cfg).unwrap();
    let t = report.t_star().unwrap();
    assert!((t - 0.5).abs() <= 0.05, "t* = {t}");
    for f in ["diagram.json", "diagram.svg", "embedding.csv", "metrics.csv", "provenance.cfg"] {
        assert!(cfg.output.join(f).exists(), "{f}");
    }
    assert!(!cfg.output.join("hull.json").exists());
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(cfg.output.join("diagram.json")).unwrap()).unwrap();
    for key in ["grid", "eigenvalues", "trajectories", "w", "cmr", "t_star", "common_set", "meta"] {
        assert!(json.get(key).is_some(), "{key}");
    }
    assert_eq!(json["grid"].as_array().unwrap().len(), 41);
    assert_eq!(report.metrics.len(), 5);
}

#[test]
fn repeated_and_echoed_runs_are_byte_identical() {
    let dir = scratch("det");
    flat_fixture(&dir, 120, 8);
    let cfg = small_config(&dir, &["a.csv", "b.csv"]);
    let files = ["diagram.json", "diagram.svg", "embedding.csv", "metrics.csv", "provenance.cfg"];
    run_pipeline(&cfg).unwrap();
    let first: Vec<Vec<u8>> = files.iter().map(|f| fs::read(cfg.output.join(f)).unwrap()).collect();
    run_pipeline(&cfg).unwrap();
    let echoed = RunConfig::from_file(&cfg.output.join("provenance.cfg")).unwrap();
    assert_eq!(echoed, cfg);
    run_pipeline(&echoed).unwrap();
    for (f, bytes) in files.iter().zip(&first) {
        assert_eq!(&fs::read(cfg.output.join(f)).unwrap(), bytes, "{f}");
    }
}

#[test]
fn identical_inputs_are_all_common() {
    let dir = scratch("same");
    flat_fixture(&dir, 80, 2);
    let mut cfg = small_config(&dir, &["a.csv", "a.csv"]);
    cfg.n_t = 11;
    cfg.k = 5;
    let report = compute(&cfg).unwrap();
    assert!(report.report.is_none());
    assert!(report.point_w.iter().flatten().all(|&w| w == 0.0));
    let id: Vec<usize> = (0..5).collect();
    assert!(report.trajectories.perms().iter().all(|p| *p == id));
    let first = &report.diagram.values()[0];
    for row in report.diagram.values() {
        for (x, y) in row.iter().zip(first) {
            assert!((x - y).abs() <= 1e-12 * y);
        }
    }
}

#[test]
fn three_inputs_write_hull_grid() {
    let dir = scratch("three");
    let (views, _) = gen_flat_three(60, 4).unwrap();
    for (i, v) in views.iter().enumerate() {
        write_csv(&dir.join(format!("v{i}.csv")), v.rows(), None).unwrap();
    }
    let mut cfg = small_config(&dir, &["v0.csv", "v1.csv", "v2.csv"]);
    cfg.epsilon = EpsilonPolicy::Fixed(vec![0.05; 3]);
    cfg.n_t = 11;
    cfg.k = 4;
    cfg.hull_grid = 3;
    run_pipeline(&cfg).unwrap();
    let hull: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(cfg.output.join("hull.json")).unwrap()).unwrap();
    let values = hull["eigenvalues"].as_array().unwrap();
    assert_eq!(values.len(), 3);
    assert_eq!(values[0].as_array().unwrap().len(), 3);
    assert_eq!(values[0][0].as_array().unwrap().len(), 5);
}

#[test]
fn load_errors_name_the_stage() {
    let dir = scratch("mismatch");
    fs::write(dir.join("a.csv"), "1,2\n3,4\n5,6\n7,8\n").unwrap();
    fs::write(dir.join("b.csv"), "1,2\n3,4\n5,6\n7,8\n9,1\n").unwrap();
    let cfg = small_config(&dir, &["a.csv", "b.csv"]);
    match compute(&cfg) {
        Err(Error::Stage { stage, source }) => {
            assert_eq!(stage, "load");
            assert!(matches!(*source, Error::RowCountMismatch(4, 5)));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn cli_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_evflow");
    let dir = scratch("cli");
    let ok = Command::new(bin)
        .args(["--seed", "3", "synth", "--suite", "flat", "--n", "60", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert_eq!(ok.code(), Some(0));
    let text = fs::read_to_string(dir.join("run.cfg")).unwrap().replace("n_t = 200", "n_t = 11").replace("k = 20", "k = 4");
    fs::write(dir.join("run.cfg"), text).unwrap();
    let run = Command::new(bin).args(["--threads", "1", "run", "--config"]).arg(dir.join("run.cfg")).output().unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(dir.join("run/diagram.json").exists());

    fs::write(dir.join("bad.cfg"), "inputs = view1.csv, view2.csv\noutput = o\nsurprise = 1\n").unwrap();
    let bad = Command::new(bin).args(["run", "--config"]).arg(dir.join("bad.cfg")).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));

    // A kernel that is exactly zero in one direction fails the SPD check.
    fs::write(dir.join("dup.csv"), "x\n0\n0\n1\n2\n").unwrap();
    fs::write(dir.join("other.csv"), "x\n0\n1\n2\n3\n").unwrap();
    fs::write(
        dir.join("num.cfg"),
        "inputs = dup.csv, other.csv\noutput = o\ngeometry = spd\nn_t = 5\nk = 1\nepsilon = 1, 1\n",
    )
    .unwrap();
    let num = Command::new(bin).args(["run", "--config"]).arg(dir.join("num.cfg")).output().unwrap();
    assert_eq!(num.status.code(), Some(3), "{}", String::from_utf8_lossy(&num.stderr));

    let graph = Command::new(bin).args(["synth", "--suite", "graph", "--out"]).arg(dir.join("g")).status().unwrap();
    assert_eq!(graph.code(), Some(0));
    let k = evflow::io::read_csv_matrix(&dir.join("g/kernel1.csv")).unwrap();
    assert_eq!(k.shape(), (341, 341));
}

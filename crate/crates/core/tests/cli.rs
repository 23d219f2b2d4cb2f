use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_cpt-cell");

const SMALL: &str = "\
rabi = 0.01
branching = 0.7
cell_length = 1000
grid_min_ratio = 0.01
grid_max_ratio = 100
grid_points_per_decade = 6
";

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn spectrum_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let o = run(&["spectrum", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("delta_over_gamma,delta_over_gp,signal,derivative"));
    for line in lines {
        assert_eq!(line.split(',').count(), 4);
        assert!(!line.contains(';'));
        for cell in line.split(',') {
            cell.parse::<f64>().unwrap();
        }
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "spectrum");
    assert!(manifest["config_text"].as_str().unwrap().contains("rabi"));
}

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    let mut seen = Vec::new();
    for workers in ["1", "3"] {
        let out = dir.path().join(format!("w{workers}"));
        let out = out.to_str().unwrap();
        assert_eq!(code(&run(&["spectrum", "--config", &cfg, "--out", out, "--workers", workers])), 0);
        let o = run(&["scan", "--config", &cfg, "--out", out, "--workers", workers, "--axis", "kL", "--values", "100,1000,10000,100000"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let read = |f: &str| std::fs::read(Path::new(out).join(f)).unwrap();
        seen.push((read("spectrum.csv"), read("scan.csv")));
    }
    assert!(seen[0] == seen[1]);
}

#[test]
fn single_value_scan_has_one_row_and_no_fit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), SMALL);
    let out = dir.path().join("out");
    let o = run(&["scan", "--config", &cfg, "--out", out.to_str().unwrap(), "--axis", "alpha", "--values", "0.7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("scan.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 2);
    let header: Vec<&str> = rows[0].split(',').collect();
    let row: Vec<&str> = rows[1].split(',').collect();
    let fit = header.iter().position(|h| *h == "fit_exponent").unwrap();
    assert_eq!(row[fit], "");
    assert_eq!(row[0].parse::<f64>().unwrap(), 0.7);
}

#[test]
fn velocity_select_and_validate() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), &format!("{SMALL}draws = 20\n"));
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let o = run(&["velocity-select", "--config", &cfg, "--out", out, "--values", "0.001,0.1,10"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(Path::new(out).join("velocity_select.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3 + 1);

    let o = run(&["validate", "--config", &cfg, "--out", out]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(Path::new(out).join("validate.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["draws"], 20);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let cases = [
        "rabi = 0.01\ndelta_over_gp =\n",
        "rabi = 0.01\ncolour = blue\n",
        "rabi = 0.01\nrabi = 0.02\n",
        "rabi = fast\n",
        "branching = 1.5\n",
    ];
    for text in cases {
        let cfg = config(dir.path(), text);
        let o = run(&["spectrum", "--config", &cfg, "--out", out]);
        assert_eq!(code(&o), 2, "{text:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    let cfg = config(dir.path(), SMALL);
    assert_eq!(code(&run(&["scan", "--config", &cfg, "--out", out, "--axis", "colour", "--values", "1"])), 2);
    assert_eq!(code(&run(&["scan", "--config", &cfg, "--out", out, "--axis", "kL", "--values", "100,10"])), 2);
    assert_eq!(code(&run(&["spectrum", "--config", "/nonexistent/run.cfg"])), 2);
    assert_eq!(code(&run(&["reproduce", "fig12", "--out", out])), 2);
    assert_eq!(code(&run(&["transmogrify"])), 2);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn unconverged_quadrature_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), &format!("{SMALL}nodes_per_decade = 1\npanel_order = 1\n"));
    let out = dir.path().join("out");
    let o = run(&["spectrum", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("converge"));
}

use std::f64::consts::FRAC_PI_4;
use std::path::Path;
use std::process::{Command, Output};

use qbattery::analytic::kbody_closed_form;
use qbattery_cli::csv::HEADER;

const BIN: &str = env!("CARGO_BIN_EXE_qbattery");

const ISING: &str = r#"
[model]
scheme = "ising"
n_qubits = 4
s = 2
drive = 1.0
omega0 = 2.0
normalize_total = true

[grid]
t_final = 5.0
steps = 40

[output]
name = "ising4"
"#;

fn qbattery(args: &[&str], cwd: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(cwd).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("scenario.toml");
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, rows)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn simulate_writes_fixed_header_and_no_empty_cells() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), ISING);
    let out = qbattery(&["simulate", &cfg, "--out", "data"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("data/ising4.csv"));
    assert_eq!(header, HEADER);
    assert_eq!(
        header.join(","),
        "t,mean_work,var_work,nsr_work,nsr_work_flag,mean_power,var_power,nsr_power,nsr_power_flag,fisher_work,angle_work,bound_work,fisher_power,angle_power,bound_power,tradeoff_lhs,tradeoff_rhs,tradeoff_flag,fidelity"
    );
    assert_eq!(rows.len(), 40);
    for row in &rows {
        assert_eq!(row.len(), HEADER.len());
        assert!(row.iter().all(|c| !c.is_empty()));
    }
    assert_eq!(rows[0][column(&header, "nsr_work")], "undef");
    assert_eq!(rows[0][column(&header, "nsr_work_flag")], "zero_mean");
    assert!((rows[0][column(&header, "fidelity")].parse::<f64>().unwrap() - 1.0).abs() < 1e-12);
    let manifest = std::fs::read_to_string(dir.path().join("data/ising4_manifest.txt")).unwrap();
    assert!(manifest.starts_with("version = qbattery "));
    assert!(manifest.contains("model.n_qubits = 4\n"));
}

#[test]
fn reruns_are_byte_identical_across_execution_modes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), ISING);
    assert!(qbattery(&["simulate", &cfg, "--name", "a"], dir.path()).status.success());
    assert!(qbattery(&["simulate", &cfg, "--name", "b"], dir.path()).status.success());
    assert!(qbattery(&["simulate", &cfg, "--name", "c", "--sequential"], dir.path()).status.success());
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.csv")).unwrap());
    assert_eq!(a, std::fs::read(dir.path().join("c.csv")).unwrap());
}

#[test]
fn flags_override_file_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), ISING);
    let out = qbattery(&["simulate", &cfg, "--set", "grid.steps=7", "--set", "options.emit_bounds=false"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = read_csv(&dir.path().join("ising4.csv"));
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r[column(&header, "fisher_work")] == "undef"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "[model]\nscheme = \"ising\"\n");
    assert_eq!(qbattery(&["simulate", &bad], dir.path()).status.code(), Some(1));
    assert_eq!(qbattery(&["simulate", "missing.toml"], dir.path()).status.code(), Some(1));
    let big = write_config(dir.path(), &ISING.replace("n_qubits = 4", "n_qubits = 16"));
    assert_eq!(qbattery(&["simulate", &big], dir.path()).status.code(), Some(3));
    let capped = write_config(dir.path(), &ISING.replace("normalize_total = true", "normalize_total = true\nmax_qubits = 3"));
    assert_eq!(qbattery(&["simulate", &capped], dir.path()).status.code(), Some(3));
    let ok = qbattery(&["verify", "--level", "fast", "--only", "1,11", "--report", "r.json"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    assert_eq!(report["criteria"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_reports_failures_with_exit_two() {
    // Power saturation past a quarter period is the one criterion this build does not meet.
    let dir = tempfile::tempdir().unwrap();
    let out = qbattery(&["verify", "--level", "fast", "--only", "2"], dir.path());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL criterion  2"), "{stdout}");
    assert_eq!(out.status.code(), Some(2));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("verify_fast.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn fig1_numeric_matches_analytic_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = qbattery(&["figure", "fig1", "--out", "figs"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for k in [2usize, 3, 4] {
        let (header, rows) = read_csv(&dir.path().join(format!("figs/fig1_k{k}.csv")));
        assert_eq!(&header[..HEADER.len()], HEADER);
        assert_eq!(rows.len(), 600);
        for name in ["mean_work", "var_work", "mean_power", "var_power"] {
            let (num, ex) = (column(&header, name), column(&header, &format!("exact_{name}")));
            let peak = rows.iter().map(|r| r[ex].parse::<f64>().unwrap().abs()).fold(0.0, f64::max);
            for r in &rows {
                let (a, b) = (r[num].parse::<f64>().unwrap(), r[ex].parse::<f64>().unwrap());
                assert!((a - b).abs() <= 1e-8 * b.abs() + 1e-12 * peak, "k={k} {name}: {a} vs {b}");
            }
        }
        let t = rows[100][0].parse::<f64>().unwrap();
        let exact = kbody_closed_form(12, k, 1.0, 1.0, t).unwrap();
        assert_eq!(rows[100][column(&header, "exact_mean_work")].parse::<f64>().unwrap(), exact.mean_work);
        let target = (k * k) as f64 / 144.0;
        let flag = column(&header, "tradeoff_flag");
        let defined: Vec<&Vec<String>> = rows.iter().filter(|r| r[flag] == "ok").collect();
        assert!(defined.len() >= 590, "k={k}: {} defined", defined.len());
        for r in defined {
            let lhs = r[column(&header, "tradeoff_lhs")].parse::<f64>().unwrap();
            let rhs = r[column(&header, "tradeoff_rhs")].parse::<f64>().unwrap();
            assert!((lhs - target).abs() < 1e-8 && (rhs - target).abs() < 1e-8, "k={k}: {lhs} {rhs}");
        }
    }
    let manifest = std::fs::read_to_string(dir.path().join("figs/fig1_manifest.txt")).unwrap();
    assert!(manifest.contains("n_qubits = 12\n") && manifest.contains("file.2 = fig1_k4.csv\n"));
}

#[test]
fn fig2_writes_three_curves_with_products() {
    let dir = tempfile::tempdir().unwrap();
    let out = qbattery(&["figure", "fig2", "--out", "."], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for s in [2, 3, 4] {
        let (header, rows) = read_csv(&dir.path().join(format!("fig2_s{s}.csv")));
        assert_eq!(header.last().unwrap(), "nsr_product_flag");
        assert_eq!(rows.len(), 600);
        let last = &rows[599];
        assert_eq!(last[0].parse::<f64>().unwrap(), 20.0);
        let (w, p, prod) = (column(&header, "nsr_work"), column(&header, "nsr_power"), column(&header, "nsr_product"));
        let expect = last[w].parse::<f64>().unwrap() * last[p].parse::<f64>().unwrap();
        assert_eq!(last[prod].parse::<f64>().unwrap(), expect);
    }
    assert!(qbattery(&["figure", "fig9", "--out", "."], dir.path()).status.code() != Some(0));
}

#[test]
fn analytic_subcommand_prints_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let out = qbattery(&["analytic", "single", "--t-final", &(2.0 * FRAC_PI_4).to_string(), "--steps", "3"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    let mid: Vec<&str> = lines[2].split(',').collect();
    assert!((mid[3].parse::<f64>().unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(lines[1].split(',').nth(4), Some("zero_mean"));

    let out = qbattery(&["analytic", "kbody", "--n", "1000", "--k", "1", "--t-final", "100", "--steps", "11", "--scaling"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0][11], "undef");
    assert_ne!(rows[1][11], "undef");
    assert_eq!(rows[10][11], "undef");
    assert_eq!(qbattery(&["analytic", "kbody", "--n", "6", "--k", "4"], dir.path()).status.code(), Some(1));
}

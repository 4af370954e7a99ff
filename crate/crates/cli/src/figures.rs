//! Datasets behind the three figures.
//!
//! fig1: k-body battery, `N = 12`, `Omega_0 = omega_0 = 1`, `k = 2, 3, 4`, 600
//! points over one charging period, with the closed forms alongside.
//! fig2/fig3: Ising-type battery, `N = 10`, `Omega_s = 1`, `omega_0 = 2`,
//! `s = 2, 3, 4`, normalized, 600 points on `[0, 20]`.

use std::path::{Path, PathBuf};

use qbattery::analytic::{kbody_charging_period, kbody_closed_form};
use qbattery::dynamics::TimeGrid;
use qbattery::scenario::{run_scenario, ScenarioOptions};
use qbattery::BatteryModel;

use crate::csv;
use crate::error::{CliError, CliResult};
use crate::manifest::Manifest;
use crate::run::{ensure_dir, write_csv};

pub const FIG1_N: usize = 12;
pub const FIG1_KS: [usize; 3] = [2, 3, 4];
pub const FIG1_OMEGA0: f64 = 1.0;
pub const FIG1_BATTERY_OMEGA0: f64 = 1.0;

pub const ISING_N: usize = 10;
pub const ISING_SS: [usize; 3] = [2, 3, 4];
pub const ISING_OMEGA_S: f64 = 1.0;
pub const ISING_BATTERY_OMEGA0: f64 = 2.0;
pub const ISING_T_FINAL: f64 = 20.0;

pub const FIGURE_STEPS: usize = 600;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
}

impl Figure {
    pub fn tag(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
        }
    }
}

impl std::str::FromStr for Figure {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            other => Err(CliError::Config(format!("unknown figure `{other}`"))),
        }
    }
}

pub fn fig1_model(k: usize) -> qbattery::Result<BatteryModel> {
    BatteryModel::kbody(FIG1_N, k, FIG1_OMEGA0, FIG1_BATTERY_OMEGA0)
}

pub fn fig1_grid(k: usize) -> qbattery::Result<TimeGrid> {
    TimeGrid::new(kbody_charging_period(FIG1_N, k, FIG1_OMEGA0), FIGURE_STEPS)
}

pub fn ising_model(n: usize, s: usize) -> qbattery::Result<BatteryModel> {
    BatteryModel::ising(n, s, ISING_OMEGA_S, ISING_BATTERY_OMEGA0, true)
}

pub fn ising_grid() -> qbattery::Result<TimeGrid> {
    TimeGrid::new(ISING_T_FINAL, FIGURE_STEPS)
}

/// Writes the figure's CSVs and `<tag>_manifest.txt`; returns the CSV paths.
pub fn emit_figure_dataset(figure: Figure, out_dir: &Path, options: &ScenarioOptions) -> CliResult<Vec<PathBuf>> {
    ensure_dir(out_dir)?;
    let tag = figure.tag();
    let mut manifest = Manifest::new();
    manifest.push("figure", tag).push("steps", FIGURE_STEPS);
    let mut paths = Vec::new();
    match figure {
        Figure::Fig1 => {
            manifest
                .push("scheme", "kbody")
                .push("n_qubits", FIG1_N)
                .push("drive", FIG1_OMEGA0)
                .push("omega0", FIG1_BATTERY_OMEGA0)
                .push("normalize_total", false);
            for k in FIG1_KS {
                let grid = fig1_grid(k)?;
                let out = run_scenario(&fig1_model(k)?, &grid, options)?;
                let path = out_dir.join(format!("{tag}_k{k}.csv"));
                let rows = out
                    .records
                    .iter()
                    .map(|r| {
                        let exact = kbody_closed_form(FIG1_N, k, FIG1_OMEGA0, FIG1_BATTERY_OMEGA0, r.t)?;
                        let mut f = csv::record_fields(r);
                        f.extend(csv::analytic_fields(r, &exact));
                        Ok(f)
                    })
                    .collect::<qbattery::Result<Vec<_>>>()?;
                write_csv(&path, &csv::header_with(&csv::ANALYTIC_COLUMNS), rows)?;
                manifest.push(format!("k{k}.t_final"), csv::num(grid.t_final()));
                paths.push(path);
            }
        }
        Figure::Fig2 | Figure::Fig3 => {
            manifest
                .push("scheme", "ising")
                .push("n_qubits", ISING_N)
                .push("drive", ISING_OMEGA_S)
                .push("omega0", ISING_BATTERY_OMEGA0)
                .push("normalize_total", true)
                .push("t_final", ISING_T_FINAL);
            let grid = ising_grid()?;
            for s in ISING_SS {
                let out = run_scenario(&ising_model(ISING_N, s)?, &grid, options)?;
                let path = out_dir.join(format!("{tag}_s{s}.csv"));
                let rows = out.records.iter().map(|r| {
                    let mut f = csv::record_fields(r);
                    f.extend(csv::product_fields(r));
                    f
                });
                write_csv(&path, &csv::header_with(&csv::PRODUCT_COLUMNS), rows)?;
                paths.push(path);
            }
        }
    }
    for (i, p) in paths.iter().enumerate() {
        manifest.push(format!("file.{i}"), p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default());
    }
    manifest.write(&out_dir.join(format!("{tag}_manifest.txt")))?;
    Ok(paths)
}

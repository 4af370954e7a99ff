//! Closed-form series for the `analytic` subcommand.

use std::io::Write;

use qbattery::analytic::{kbody_charging_period, kbody_closed_form, kbody_scaling, single_qubit_closed_form, ClosedFormRecord};
use qbattery::dynamics::TimeGrid;

use crate::csv::{flagged, num, write_row, UNDEF};
use crate::error::{CliError, CliResult};

pub const HEADER: [&str; 11] = [
    "t",
    "mean_work",
    "var_work",
    "nsr_work",
    "nsr_work_flag",
    "mean_power",
    "var_power",
    "nsr_power",
    "nsr_power_flag",
    "nsr_product",
    "nsr_product_flag",
];

pub const SCALING_HEADER: [&str; 2] = ["approx_nsr_work", "approx_nsr_power"];

#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticModel {
    Single { omega0: f64, drive: f64 },
    Kbody { n: usize, k: usize, omega0: f64, drive: f64, scaling: bool },
}

impl AnalyticModel {
    /// One charging period when no final time is given.
    pub fn default_t_final(&self) -> f64 {
        match *self {
            AnalyticModel::Single { drive, .. } => kbody_charging_period(1, 1, drive),
            AnalyticModel::Kbody { n, k, drive, .. } => kbody_charging_period(n, k, drive),
        }
    }

    fn record(&self, t: f64) -> CliResult<ClosedFormRecord> {
        Ok(match *self {
            AnalyticModel::Single { omega0, drive } => single_qubit_closed_form(omega0, drive, t),
            AnalyticModel::Kbody { n, k, omega0, drive, .. } => kbody_closed_form(n, k, drive, omega0, t)?,
        })
    }
}

pub fn write_series<W: Write>(w: &mut W, model: &AnalyticModel, t_final: Option<f64>, steps: usize) -> CliResult<()> {
    let grid = TimeGrid::new(t_final.unwrap_or_else(|| model.default_t_final()), steps)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let io = |e| CliError::Io { path: "<stdout>".into(), source: e };
    let scaling = matches!(model, AnalyticModel::Kbody { scaling: true, .. });
    let mut header: Vec<String> = HEADER.iter().map(|s| (*s).to_owned()).collect();
    if scaling {
        header.extend(SCALING_HEADER.iter().map(|s| (*s).to_owned()));
    }
    write_row(w, &header).map_err(io)?;
    for t in grid.points() {
        let r = model.record(t)?;
        let mut row = vec![
            num(r.t),
            num(r.mean_work),
            num(r.var_work),
            flagged(r.nsr_work),
            r.nsr_work.flag.to_string(),
            num(r.mean_power),
            num(r.var_power),
            flagged(r.nsr_power),
            r.nsr_power.flag.to_string(),
            flagged(r.nsr_product),
            r.nsr_product.flag.to_string(),
        ];
        if let AnalyticModel::Kbody { n, k, drive, scaling: true, .. } = *model {
            match kbody_scaling(n, k, drive, t) {
                Ok(a) => row.extend([num(a.nsr_work), num(a.nsr_power)]),
                Err(_) => row.extend([UNDEF.to_owned(), UNDEF.to_owned()]),
            }
        }
        write_row(w, &row).map_err(io)?;
    }
    Ok(())
}

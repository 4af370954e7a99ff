//! Scenario execution and dataset writing.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use qbattery::scenario::{run_scenario, ScenarioOutput, StatisticsRecord};

use crate::config::ScenarioConfig;
use crate::csv;
use crate::error::{CliError, CliResult};
use crate::manifest::Manifest;

pub fn simulate(config: &ScenarioConfig) -> CliResult<ScenarioOutput> {
    let model = config.model()?;
    let grid = config.grid()?;
    Ok(run_scenario(&model, &grid, &config.options())?)
}

/// Writes `<name>.csv` and `<name>_manifest.txt`; returns both paths.
pub fn simulate_to_dir(config: &ScenarioConfig) -> CliResult<(PathBuf, PathBuf)> {
    let out = simulate(config)?;
    let dir = &config.output.dir;
    ensure_dir(dir)?;
    let csv_path = dir.join(format!("{}.csv", config.output.name));
    write_csv(&csv_path, &csv::header_with(&[]), out.records.iter().map(csv::record_fields))?;
    let manifest_path = dir.join(format!("{}_manifest.txt", config.output.name));
    let mut m = Manifest::new();
    m.extend(config.entries()).push("rows", out.records.len());
    m.write(&manifest_path)?;
    Ok((csv_path, manifest_path))
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_csv(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io = |e| CliError::io(path, e);
    csv::write_row(&mut w, header).map_err(io)?;
    for row in rows {
        csv::write_row(&mut w, &row).map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn standard_rows(records: &[StatisticsRecord]) -> impl Iterator<Item = Vec<String>> + '_ {
    records.iter().map(csv::record_fields)
}

//! Scenario configuration: a sectioned TOML file plus command-line overrides.

use std::path::{Path, PathBuf};

use qbattery::dynamics::TimeGrid;
use qbattery::model::DEFAULT_MAX_QUBITS;
use qbattery::scenario::ScenarioOptions;
use qbattery::{BatteryModel, ChargingScheme, Execution, PowerScale};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Single,
    Kbody,
    Ising,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerScaleKey {
    EigenvalueRange,
    SpectralNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExecutionKey {
    Parallel,
    Sequential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub scheme: Scheme,
    #[serde(default = "one_qubit")]
    pub n_qubits: usize,
    #[serde(default = "unit")]
    pub omega0: f64,
    /// `Omega` for single, `Omega_0` for kbody, `Omega_s` for ising.
    #[serde(default = "unit")]
    pub drive: f64,
    #[serde(default = "one_qubit")]
    pub k: usize,
    #[serde(default = "two")]
    pub s: usize,
    #[serde(default)]
    pub normalize_total: bool,
    #[serde(default = "default_power_scale")]
    pub power_scale: PowerScaleKey,
    #[serde(default = "default_max_qubits")]
    pub max_qubits: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub t_final: f64,
    #[serde(default = "default_steps")]
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_name")]
    pub name: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: default_dir(), name: default_name() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSection {
    #[serde(default = "yes")]
    pub emit_bounds: bool,
    #[serde(default = "yes")]
    pub emit_tradeoff: bool,
    #[serde(default = "yes")]
    pub emit_fidelity: bool,
    #[serde(default = "default_execution")]
    pub execution: ExecutionKey,
}

impl Default for OptionsSection {
    fn default() -> Self {
        Self { emit_bounds: true, emit_tradeoff: true, emit_fidelity: true, execution: default_execution() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelSection,
    pub grid: GridSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub options: OptionsSection,
}

fn unit() -> f64 {
    1.0
}
fn one_qubit() -> usize {
    1
}
fn two() -> usize {
    2
}
fn yes() -> bool {
    true
}
fn default_steps() -> usize {
    600
}
fn default_max_qubits() -> usize {
    DEFAULT_MAX_QUBITS
}
fn default_power_scale() -> PowerScaleKey {
    PowerScaleKey::EigenvalueRange
}
fn default_execution() -> ExecutionKey {
    ExecutionKey::Parallel
}
fn default_dir() -> PathBuf {
    PathBuf::from(".")
}
fn default_name() -> String {
    "scenario".to_owned()
}

/// A `section.key=value` override; the value is parsed as a TOML literal,
/// falling back to a bare string.
#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub section: String,
    pub key: String,
    pub value: toml::Value,
}

impl std::str::FromStr for Override {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let (path, raw) = s
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("override `{s}` is not of the form section.key=value")))?;
        let (section, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| CliError::Config(format!("override key `{path}` must be section.key")))?;
        let raw = raw.trim();
        let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.to_owned()));
        Ok(Self { section: section.to_owned(), key: key.to_owned(), value })
    }
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str, overrides: &[Override]) -> CliResult<Self> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        for o in overrides {
            let section = table
                .entry(o.section.clone())
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            match section {
                toml::Value::Table(t) => {
                    t.insert(o.key.clone(), o.value.clone());
                }
                _ => return Err(CliError::Config(format!("`{}` is not a section", o.section))),
            }
        }
        let config: Self = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path, overrides: &[Override]) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text, overrides)
    }

    pub fn validate(&self) -> CliResult<()> {
        self.grid()?;
        self.model()?;
        if self.output.name.is_empty() || self.output.name.contains(['/', '\\']) {
            return Err(CliError::Config(format!("invalid dataset name `{}`", self.output.name)));
        }
        Ok(())
    }

    pub fn model(&self) -> CliResult<BatteryModel> {
        let m = &self.model;
        let scheme = match m.scheme {
            Scheme::Single => ChargingScheme::SingleQubit { omega: m.drive },
            Scheme::Kbody => ChargingScheme::KBody { k: m.k, omega0: m.drive },
            Scheme::Ising => ChargingScheme::IsingS { s: m.s, omega_s: m.drive },
        };
        let model = BatteryModel {
            n_qubits: m.n_qubits,
            omega0: m.omega0,
            scheme,
            normalize_total: m.normalize_total,
            max_qubits: m.max_qubits,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn grid(&self) -> CliResult<TimeGrid> {
        TimeGrid::new(self.grid.t_final, self.grid.steps).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn options(&self) -> ScenarioOptions {
        ScenarioOptions {
            emit_bounds: self.options.emit_bounds,
            emit_tradeoff: self.options.emit_tradeoff,
            emit_fidelity: self.options.emit_fidelity,
            keep_distributions: false,
            power_scale: match self.model.power_scale {
                PowerScaleKey::EigenvalueRange => PowerScale::EigenvalueRange,
                PowerScaleKey::SpectralNorm => PowerScale::SpectralNorm,
            },
            execution: match self.options.execution {
                ExecutionKey::Parallel => Execution::Parallel,
                ExecutionKey::Sequential => Execution::Sequential,
            },
        }
    }

    /// Resolved configuration as ordered `section.key = value` pairs.
    pub fn entries(&self) -> Vec<(String, String)> {
        let value = toml::Value::try_from(self).expect("config serializes");
        let mut out = Vec::new();
        if let toml::Value::Table(sections) = value {
            for (section, body) in sections {
                if let toml::Value::Table(fields) = body {
                    for (key, v) in fields {
                        out.push((format!("{section}.{key}"), v.to_string()));
                    }
                }
            }
        }
        out
    }
}

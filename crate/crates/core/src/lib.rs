//! Reliability of work and power in closed many-body quantum batteries.
//!
//! Builds battery and charging Hamiltonians from Pauli strings, evolves the
//! ground state exactly, and evaluates counting-statistics moments, the
//! Fisher-information lower bound on their noise-to-signal ratios and the
//! work-power trade-off.

pub mod analytic;
pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod operator;
pub mod par;
pub mod pauli;
pub mod scenario;
pub mod spectral;
pub mod statistics;

pub use error::{Error, Result};
pub use model::{BatteryModel, BatteryOperators, ChargingScheme, PowerScale};
pub use operator::HermitianOperator;
pub use par::Execution;
pub use pauli::{Axis, PauliTerm};
pub use scenario::{run_scenario, run_with_operators, ScenarioOptions, ScenarioOutput, StatisticsRecord};
pub use spectral::SpectralDecomposition;
pub use statistics::{Flag, Flagged};

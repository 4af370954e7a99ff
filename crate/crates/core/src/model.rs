//! Battery, charging and total Hamiltonians, and the work/power counting
//! observables built from them.

use crate::error::{Error, Result};
use crate::operator::HermitianOperator;
use crate::par::Execution;
use crate::pauli::{Axis, PauliTerm};
use crate::spectral::SpectralDecomposition;

pub const DEFAULT_MAX_QUBITS: usize = 14;

/// Smallest spectral width that can be normalized to `[0, 1]`.
pub const MIN_NORMALIZABLE_WIDTH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ChargingScheme {
    /// `omega * X - H_B` on a single qubit.
    SingleQubit { omega: f64 },
    /// `Omega_k sum_j X_{kj} ... X_{kj+k-1} - H_B`, `Omega_k = (k/N) omega0`.
    KBody { k: usize, omega0: f64 },
    /// `-omega_s sum_i X_i ... X_{i+s-1} - H_B` on an open chain.
    IsingS { s: usize, omega_s: f64 },
    /// Explicit sum of Pauli strings, used as given.
    Custom(Vec<PauliTerm>),
}

/// How the power observable is scaled when the total Hamiltonian is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PowerScale {
    /// `E_max - E_min`, the factor that also normalizes the evolution.
    #[default]
    EigenvalueRange,
    /// Spectral norm of the unnormalized total Hamiltonian.
    SpectralNorm,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatteryModel {
    pub n_qubits: usize,
    pub omega0: f64,
    pub scheme: ChargingScheme,
    pub normalize_total: bool,
    pub max_qubits: usize,
}

impl BatteryModel {
    pub fn new(n_qubits: usize, omega0: f64, scheme: ChargingScheme, normalize_total: bool) -> Result<Self> {
        let model = Self { n_qubits, omega0, scheme, normalize_total, max_qubits: DEFAULT_MAX_QUBITS };
        model.validate()?;
        Ok(model)
    }

    pub fn single_qubit(omega0: f64, omega: f64) -> Result<Self> {
        Self::new(1, omega0, ChargingScheme::SingleQubit { omega }, false)
    }

    pub fn kbody(n_qubits: usize, k: usize, omega0_drive: f64, omega0: f64) -> Result<Self> {
        Self::new(n_qubits, omega0, ChargingScheme::KBody { k, omega0: omega0_drive }, false)
    }

    pub fn ising(n_qubits: usize, s: usize, omega_s: f64, omega0: f64, normalize_total: bool) -> Result<Self> {
        Self::new(n_qubits, omega0, ChargingScheme::IsingS { s, omega_s }, normalize_total)
    }

    pub fn with_max_qubits(mut self, max_qubits: usize) -> Result<Self> {
        self.max_qubits = max_qubits;
        self.validate()?;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits;
        if n > self.max_qubits {
            return Err(Error::DimensionCap { n_qubits: n, max_qubits: self.max_qubits });
        }
        if n == 0 {
            return Err(Error::InvalidModel("at least one qubit is required".into()));
        }
        if !(self.omega0.is_finite() && self.omega0 > 0.0) {
            return Err(Error::InvalidModel(format!("omega0 must be positive, got {}", self.omega0)));
        }
        let finite = |name: &str, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidModel(format!("{name} must be finite")))
            }
        };
        match &self.scheme {
            ChargingScheme::SingleQubit { omega } => {
                finite("drive amplitude", *omega)?;
                if n != 1 {
                    return Err(Error::InvalidModel(format!("single-qubit scheme needs N = 1, got {n}")));
                }
            }
            ChargingScheme::KBody { k, omega0 } => {
                finite("drive amplitude", *omega0)?;
                if *k == 0 || *k > n || !n.is_multiple_of(*k) {
                    return Err(Error::InvalidModel(format!("k-body scheme needs 1 <= k <= N and k | N (k = {k}, N = {n})")));
                }
            }
            ChargingScheme::IsingS { s, omega_s } => {
                finite("coupling", *omega_s)?;
                if *s < 2 || *s > n {
                    return Err(Error::InvalidModel(format!("Ising scheme needs 2 <= s <= N (s = {s}, N = {n})")));
                }
            }
            ChargingScheme::Custom(terms) => {
                for t in terms {
                    t.check_sites(n)?;
                }
            }
        }
        Ok(())
    }

    /// `Omega_k = (k/N) Omega_0` for the k-body scheme.
    pub fn kbody_frequency(&self) -> Option<f64> {
        match self.scheme {
            ChargingScheme::KBody { k, omega0 } => Some(k as f64 / self.n_qubits as f64 * omega0),
            _ => None,
        }
    }

    /// Pauli strings of the charging drive, excluding the `-H_B` counter-term.
    pub fn drive_terms(&self) -> Vec<PauliTerm> {
        let n = self.n_qubits;
        match &self.scheme {
            ChargingScheme::SingleQubit { omega } => vec![PauliTerm::single(*omega, 0, Axis::X)],
            ChargingScheme::KBody { k, .. } => {
                let amplitude = self.kbody_frequency().expect("k-body scheme");
                (0..n / k)
                    .map(|j| PauliTerm::string(amplitude, j * k..(j + 1) * k, Axis::X).expect("distinct sites"))
                    .collect()
            }
            ChargingScheme::IsingS { s, omega_s } => (0..=n - s)
                .map(|i| PauliTerm::string(-omega_s, i..i + s, Axis::X).expect("distinct sites"))
                .collect(),
            ChargingScheme::Custom(terms) => terms.clone(),
        }
    }

    /// `true` when the charging Hamiltonian includes `-H_B`.
    fn cancels_battery(&self) -> bool {
        !matches!(self.scheme, ChargingScheme::Custom(_))
    }
}

/// `H_B = -(omega0 / 2) sum_i Z_i`.
pub fn build_battery_hamiltonian(n_qubits: usize, omega0: f64) -> Result<HermitianOperator> {
    build_battery_hamiltonian_capped(n_qubits, omega0, DEFAULT_MAX_QUBITS)
}

pub fn build_battery_hamiltonian_capped(n_qubits: usize, omega0: f64, max_qubits: usize) -> Result<HermitianOperator> {
    if n_qubits > max_qubits {
        return Err(Error::DimensionCap { n_qubits, max_qubits });
    }
    if n_qubits == 0 || !(omega0.is_finite() && omega0 > 0.0) {
        return Err(Error::InvalidModel(format!("need N >= 1 and omega0 > 0 (N = {n_qubits}, omega0 = {omega0})")));
    }
    let dim = 1usize << n_qubits;
    let diag: Vec<f64> = (0..dim)
        .map(|b| {
            let excited = b.count_ones() as f64;
            -(omega0 / 2.0) * (n_qubits as f64 - 2.0 * excited)
        })
        .collect();
    Ok(HermitianOperator::diagonal(&diag))
}

pub fn build_charging_hamiltonian(model: &BatteryModel) -> Result<HermitianOperator> {
    model.validate()?;
    let drive = HermitianOperator::from_terms(model.n_qubits, &model.drive_terms())?;
    if model.cancels_battery() {
        let hb = build_battery_hamiltonian_capped(model.n_qubits, model.omega0, model.max_qubits)?;
        drive.minus(&hb)
    } else {
        Ok(drive)
    }
}

/// Total Hamiltonian, optionally normalized to spectrum `[0, 1]`.
#[derive(Debug, Clone)]
pub struct NormalizedTotal {
    /// Generator of the evolution: `H_T` or `(H_T - e_min) / scale`.
    pub h_norm: HermitianOperator,
    pub e_min: f64,
    pub e_max: f64,
    /// `e_max - e_min` when normalized, otherwise 1.
    pub scale: f64,
    /// `max |eigenvalue|` of the unnormalized `H_T`.
    pub spectral_norm: f64,
    /// Eigendecomposition of `h_norm`.
    pub spectrum: SpectralDecomposition,
}

pub fn total_hamiltonian(model: &BatteryModel) -> Result<NormalizedTotal> {
    total_hamiltonian_with(model, Execution::default())
}

pub fn total_hamiltonian_with(model: &BatteryModel, exec: Execution) -> Result<NormalizedTotal> {
    let hb = build_battery_hamiltonian_capped(model.n_qubits, model.omega0, model.max_qubits)?;
    let hc = build_charging_hamiltonian(model)?;
    normalize_total(&hb.plus(&hc)?, model.normalize_total, exec)
}

pub fn normalize_total(h_total: &HermitianOperator, normalize: bool, exec: Execution) -> Result<NormalizedTotal> {
    let raw = SpectralDecomposition::new(h_total, exec)?;
    let (e_min, e_max) = (raw.min_eigenvalue(), raw.max_eigenvalue());
    let spectral_norm = raw.spectral_norm();
    if !normalize {
        return Ok(NormalizedTotal { h_norm: h_total.clone(), e_min, e_max, scale: 1.0, spectral_norm, spectrum: raw });
    }
    let width = e_max - e_min;
    if width < MIN_NORMALIZABLE_WIDTH {
        return Err(Error::DegenerateSpectrum { width });
    }
    let h_norm = h_total.shifted(-e_min).scaled(1.0 / width);
    let spectrum = raw.map_eigenvalues(|l| (l - e_min) / width);
    Ok(NormalizedTotal { h_norm, e_min, e_max, scale: width, spectral_norm, spectrum })
}

impl NormalizedTotal {
    pub fn power_scale(&self, mode: PowerScale, normalized: bool) -> f64 {
        match (normalized, mode) {
            (false, _) => 1.0,
            (true, PowerScale::EigenvalueRange) => self.scale,
            (true, PowerScale::SpectralNorm) => self.spectral_norm,
        }
    }
}

/// `P_0 = -(i / scale) [H_B, H_C]`.
pub fn power_counting_observable(
    h_battery: &HermitianOperator,
    h_charge: &HermitianOperator,
    scale: f64,
) -> Result<HermitianOperator> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidArgument(format!("power scale must be positive, got {scale}")));
    }
    h_battery.scaled_commutator(h_charge, 1.0 / scale)
}

/// Every operator a scenario needs, built once.
#[derive(Debug, Clone)]
pub struct BatteryOperators {
    pub battery: HermitianOperator,
    pub charging: HermitianOperator,
    pub total: NormalizedTotal,
    pub power: HermitianOperator,
}

impl BatteryOperators {
    pub fn build(model: &BatteryModel, power_scale: PowerScale, exec: Execution) -> Result<Self> {
        model.validate()?;
        let battery = build_battery_hamiltonian_capped(model.n_qubits, model.omega0, model.max_qubits)?;
        let charging = build_charging_hamiltonian(model)?;
        let total = normalize_total(&battery.plus(&charging)?, model.normalize_total, exec)?;
        let scale = total.power_scale(power_scale, model.normalize_total);
        let power = power_counting_observable(&battery, &charging, scale)?;
        Ok(Self { battery, charging, total, power })
    }

    /// `W_0 = H_B`.
    pub fn work(&self) -> &HermitianOperator {
        &self.battery
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn battery_single_site() {
        let h = build_battery_hamiltonian(1, 1.0).unwrap();
        assert_eq!(h.diagonal_values(), vec![-0.5, 0.5]);
        assert!(h.is_diagonal());
    }

    #[test]
    fn battery_two_sites() {
        let h = build_battery_hamiltonian(2, 2.0).unwrap();
        assert_eq!(h.diagonal_values(), vec![-2.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn dimension_cap() {
        assert!(matches!(build_battery_hamiltonian(15, 1.0), Err(Error::DimensionCap { .. })));
        assert!(matches!(
            BatteryModel::kbody(16, 1, 1.0, 1.0),
            Err(Error::DimensionCap { n_qubits: 16, max_qubits: 14 })
        ));
    }

    #[test]
    fn invalid_schemes() {
        assert!(BatteryModel::kbody(6, 4, 1.0, 1.0).is_err());
        assert!(BatteryModel::kbody(4, 0, 1.0, 1.0).is_err());
        assert!(BatteryModel::kbody(4, 5, 1.0, 1.0).is_err());
        assert!(BatteryModel::ising(4, 1, 1.0, 1.0, false).is_err());
        assert!(BatteryModel::ising(4, 5, 1.0, 1.0, false).is_err());
        assert!(BatteryModel::new(2, 1.0, ChargingScheme::SingleQubit { omega: 1.0 }, false).is_err());
        assert!(BatteryModel::single_qubit(0.0, 1.0).is_err());
        assert!(BatteryModel::single_qubit(-1.0, 1.0).is_err());
    }

    #[test]
    fn power_scale_must_be_positive() {
        let hb = build_battery_hamiltonian(1, 1.0).unwrap();
        assert!(power_counting_observable(&hb, &hb, 0.0).is_err());
    }

    #[test]
    fn degenerate_spectrum_cannot_normalize() {
        let h = HermitianOperator::identity(4).scaled(3.0);
        assert!(matches!(
            normalize_total(&h, true, Execution::Sequential),
            Err(Error::DegenerateSpectrum { .. })
        ));
    }

    #[test]
    fn ising_string_count() {
        let m = BatteryModel::ising(10, 3, 1.0, 2.0, false).unwrap();
        let terms = m.drive_terms();
        assert_eq!(terms.len(), 8);
        assert!(terms.iter().all(|t| t.factors().len() == 3));
        assert_eq!(terms.last().unwrap().factors()[2].0, 9);
    }
}

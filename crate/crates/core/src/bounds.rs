//! Classical Fisher information in a counting observable's eigenbasis, the
//! cumulative Bhattacharyya angle, and the NSR lower bound it implies.

use num_complex::Complex64;

use crate::dynamics::{ProjectorFamily, StateVector, TimeGrid};
use crate::error::{Error, Result};
use crate::spectral::SpectralDecomposition;
use crate::statistics::{Flag, Flagged};

/// Probabilities below this are treated as zero in the Fisher sum.
pub const FISHER_PROBABILITY_FLOOR: f64 = 1e-12;
/// Largest flux allowed through a zero-probability outcome.
pub const FISHER_FLUX_FLOOR: f64 = 1e-9;

/// Per-outcome probabilities and their exact time derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeRates {
    pub probabilities: Vec<f64>,
    pub derivatives: Vec<f64>,
    /// `4 ||Pi_i H psi||^2`, the limit of `(dp_i/dt)^2 / p_i` as `p_i -> 0`.
    pub vanishing_limits: Vec<f64>,
}

impl OutcomeRates {
    /// `p_i = <psi|Pi_i|psi>` and `dp_i/dt = 2 Im <psi|Pi_i H|psi>` for
    /// `d psi/dt = -i H psi`.
    pub fn new(family: &ProjectorFamily, generator: &SpectralDecomposition, psi_t: &[Complex64]) -> Result<Self> {
        if generator.dim() != family.dim() {
            return Err(Error::DimensionMismatch { expected: family.dim(), found: generator.dim() });
        }
        let h_psi = generator.apply_function(psi_t, |l| Complex64::new(l, 0.0))?;
        let w = family.weights_and_flux(psi_t, Some(&h_psi))?;
        Ok(Self {
            probabilities: w.probabilities,
            derivatives: w.flux.iter().map(|z| 2.0 * z.im).collect(),
            vanishing_limits: w.generator_weight.iter().map(|g| 4.0 * g).collect(),
        })
    }

    /// `sum_i (dp_i/dt)^2 / p_i`. An outcome with vanishing probability
    /// contributes its continuous limit `4 ||Pi_i H psi||^2`.
    pub fn fisher_information(&self) -> Flagged {
        let mut total = 0.0;
        for ((&p, &dp), &limit) in self.probabilities.iter().zip(&self.derivatives).zip(&self.vanishing_limits) {
            if p < FISHER_PROBABILITY_FLOOR {
                if dp.abs() >= FISHER_FLUX_FLOOR {
                    return Flagged::undefined(Flag::Singular);
                }
                total += limit;
            } else {
                total += dp * dp / p;
            }
        }
        Flagged::defined(total.max(0.0))
    }
}

pub fn fisher_information(
    family: &ProjectorFamily,
    generator: &SpectralDecomposition,
    psi_t: &StateVector,
) -> Result<Flagged> {
    Ok(OutcomeRates::new(family, generator, psi_t.amplitudes())?.fisher_information())
}

/// Fisher information along a grid and its cumulative Bhattacharyya angle.
#[derive(Debug, Clone)]
pub struct FisherSeries {
    pub grid: TimeGrid,
    pub values: Vec<Flagged>,
    pub cumulative_angle: Vec<f64>,
}

impl FisherSeries {
    pub fn new(grid: TimeGrid, values: Vec<Flagged>) -> Result<Self> {
        if values.len() != grid.steps() {
            return Err(Error::DimensionMismatch { expected: grid.steps(), found: values.len() });
        }
        let cumulative_angle = bhattacharyya_angle(&grid, &values);
        Ok(Self { grid, values, cumulative_angle })
    }

    /// Flag of the first singular point at or before index `i`.
    pub fn flag_through(&self, i: usize) -> Flag {
        self.values[..=i].iter().map(|v| v.flag).find(|&f| f != Flag::Ok).unwrap_or(Flag::Ok)
    }
}

/// Cumulative trapezoid of `sqrt(I/4)`. Singular points contribute zero and
/// stay visible through their flag.
pub fn bhattacharyya_angle(grid: &TimeGrid, fisher: &[Flagged]) -> Vec<f64> {
    let rate: Vec<f64> = fisher
        .iter()
        .map(|v| v.get().map_or(0.0, |i| (i.max(0.0) / 4.0).sqrt()))
        .collect();
    cumulative_trapezoid(&rate, grid.spacing())
}

pub fn cumulative_trapezoid(y: &[f64], dx: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in y.windows(2) {
        acc += 0.5 * dx * (w[0] + w[1]);
        out.push(acc);
    }
    out.truncate(y.len());
    out
}

/// Largest change of a cumulative angle between a grid and its refinement,
/// compared at the shared points.
pub fn refinement_change(coarse: &[f64], fine: &[f64]) -> Result<f64> {
    if fine.len() != 2 * coarse.len() - 1 {
        return Err(Error::DimensionMismatch { expected: 2 * coarse.len() - 1, found: fine.len() });
    }
    Ok(coarse.iter().enumerate().map(|(i, a)| (a - fine[2 * i]).abs()).fold(0.0, f64::max))
}

/// `cot^2(min(angle, pi/2)) - f`; negative (vacuous) values are returned
/// unclipped.
///
/// The overlap angle `arccos sum sqrt(p q)` never exceeds `pi/2`, so an
/// integrated angle past `pi/2` only certifies `pi/2` and the bound becomes `-f`.
pub fn nsr_lower_bound(angle: f64, f: Flagged) -> Flagged {
    if angle <= 0.0 {
        return Flagged::undefined(Flag::ZeroAngle);
    }
    match f.get() {
        Some(f) => {
            let a = angle.min(std::f64::consts::FRAC_PI_2);
            let cot = a.cos() / a.sin();
            Flagged::defined(cot * cot - f)
        }
        None => Flagged::undefined(f.flag),
    }
}

/// `sum_i sqrt(p_i q_i)`.
pub fn bhattacharyya_coefficient(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a.max(0.0) * b.max(0.0)).sqrt()).sum::<f64>().min(1.0)
}

/// `1 - sum_i sqrt(p_i q_i)` for normalized `p`, `q`, evaluated as
/// `sum_i (sqrt p_i - sqrt q_i)^2 / 2` to avoid cancellation near `p = q`.
pub fn hellinger_distance_sq(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a.max(0.0).sqrt() - b.max(0.0).sqrt()).powi(2)).sum::<f64>()
}

/// `arccos sum_i sqrt(p_i q_i)`, as `2 arcsin sqrt(h / 2)` with `h` the
/// squared Hellinger distance.
pub fn overlap_angle(p: &[f64], q: &[f64]) -> f64 {
    2.0 * (hellinger_distance_sq(p, q) / 2.0).sqrt().min(1.0).asin()
}

/// NSR and bound along a grid.
#[derive(Debug, Clone)]
pub struct BoundSeries {
    pub grid: TimeGrid,
    pub bound: Vec<Flagged>,
    pub nsr: Vec<Flagged>,
}

impl BoundSeries {
    /// `nsr - bound` where both are defined.
    pub fn slack(&self) -> Vec<Option<f64>> {
        self.nsr
            .iter()
            .zip(&self.bound)
            .map(|(n, b)| Some(n.get()? - b.get()?))
            .collect()
    }

    pub fn min_slack(&self) -> Option<f64> {
        self.slack().into_iter().flatten().reduce(f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HellingerCheck {
    /// `1 - sum sqrt(p q)`.
    pub lhs: f64,
    /// `1 - [((mu_p - mu_q) / (sigma_p + sigma_q))^2 + 1]^{-1/2}`.
    pub rhs: f64,
    pub holds: bool,
}

pub const HELLINGER_TOL: f64 = 1e-9;

pub fn hellinger_check(
    p: &[f64],
    q: &[f64],
    mu_p: f64,
    mu_q: f64,
    sigma_p: f64,
    sigma_q: f64,
) -> Result<HellingerCheck> {
    check_distribution(p)?;
    check_distribution(q)?;
    if p.len() != q.len() {
        return Err(Error::InvalidDistribution(format!("lengths differ: {} vs {}", p.len(), q.len())));
    }
    if !(sigma_p >= 0.0 && sigma_q >= 0.0 && sigma_p + sigma_q > 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "standard deviations must be nonnegative with positive sum ({sigma_p}, {sigma_q})"
        )));
    }
    let lhs = hellinger_distance_sq(p, q);
    let ratio = (mu_p - mu_q) / (sigma_p + sigma_q);
    let rhs = 1.0 - 1.0 / (ratio * ratio + 1.0).sqrt();
    Ok(HellingerCheck { lhs, rhs, holds: lhs >= rhs - HELLINGER_TOL })
}

/// Mean and standard deviation of outcome values under `p`.
pub fn distribution_moments(values: &[f64], p: &[f64]) -> (f64, f64) {
    let mean: f64 = values.iter().zip(p).map(|(v, w)| v * w).sum();
    let second: f64 = values.iter().zip(p).map(|(v, w)| v * v * w).sum();
    (mean, (second - mean * mean).max(0.0).sqrt())
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty".into()));
    }
    if let Some(x) = p.iter().find(|&&x| !x.is_finite() || x < -1e-12) {
        return Err(Error::InvalidDistribution(format!("entry {x} is not a probability")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDistribution(format!("total mass {total}")));
    }
    Ok(())
}

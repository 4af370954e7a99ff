//! Closed-form moments for the single-qubit and k-body batteries charged
//! from `|0...0>`, and their small-angle scaling laws.

use crate::error::{Error, Result};
use crate::statistics::{Flag, Flagged};

/// Relative size of `sin` below which a mean is treated as zero.
const ZERO_SIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormRecord {
    pub t: f64,
    pub mean_work: f64,
    pub var_work: f64,
    pub nsr_work: Flagged,
    pub mean_power: f64,
    pub var_power: f64,
    pub nsr_power: Flagged,
    pub nsr_product: Flagged,
}

/// k-body record with `N = k = 1` reduces to the single qubit.
pub fn single_qubit_closed_form(omega0: f64, drive: f64, t: f64) -> ClosedFormRecord {
    let x = drive * t;
    let (s, c) = x.sin_cos();
    let s2 = (2.0 * x).sin();
    let nsr_work = if s.abs() < ZERO_SIN { Flagged::undefined(Flag::ZeroMean) } else { Flagged::defined((c / s).powi(2)) };
    let nsr_power = if s2.abs() < ZERO_SIN { Flagged::undefined(Flag::ZeroMean) } else { Flagged::defined((s / c).powi(2)) };
    ClosedFormRecord {
        t,
        mean_work: omega0 * s * s,
        var_work: omega0 * omega0 / 4.0 * s2 * s2,
        nsr_work,
        mean_power: drive * omega0 * s2,
        var_power: 4.0 * drive * drive * omega0 * omega0 * s.powi(4),
        nsr_power,
        nsr_product: product(nsr_work, nsr_power),
    }
}

/// `N/k` independent blocks, each a two-level system rotating at
/// `Omega_k = (k/N) Omega_0`.
pub fn kbody_closed_form(n: usize, k: usize, drive: f64, omega0: f64, t: f64) -> Result<ClosedFormRecord> {
    if k == 0 || k > n || !n.is_multiple_of(k) {
        return Err(Error::InvalidModel(format!("k = {k} does not divide N = {n}")));
    }
    let (nf, kf) = (n as f64, k as f64);
    let omega_k = kf / nf * drive;
    let beta = omega0 * drive;
    let x = omega_k * t;
    let (s, c) = x.sin_cos();
    let s2 = (2.0 * x).sin();
    let ratio = kf / nf;
    let nsr_work = if s.abs() < ZERO_SIN {
        Flagged::undefined(Flag::ZeroMean)
    } else {
        Flagged::defined(ratio * (c / s).powi(2))
    };
    let nsr_power = if s2.abs() < ZERO_SIN {
        Flagged::undefined(Flag::ZeroMean)
    } else {
        Flagged::defined(ratio * (s / c).powi(2))
    };
    Ok(ClosedFormRecord {
        t,
        mean_work: nf * omega0 * s * s,
        var_work: nf * kf * omega0 * omega0 / 4.0 * s2 * s2,
        nsr_work,
        mean_power: kf * beta * s2,
        var_power: 4.0 * kf.powi(3) / nf * beta * beta * s.powi(4),
        nsr_power,
        nsr_product: product(nsr_work, nsr_power),
    })
}

/// `T = pi N / (2 k Omega_0)`, time to full charge.
pub fn kbody_charging_period(n: usize, k: usize, drive: f64) -> f64 {
    std::f64::consts::PI * n as f64 / (2.0 * k as f64 * drive)
}

/// Small-angle NSR approximations, valid for `N/k >> Omega_0 t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingApprox {
    /// `(N/k) / (Omega_0 t)^2`.
    pub nsr_work: f64,
    /// `(k/N)^3 (Omega_0 t)^2`.
    pub nsr_power: f64,
}

/// Required margin `N/k > REGIME_FACTOR * Omega_0 t`.
pub const REGIME_FACTOR: f64 = 20.0;

pub fn kbody_scaling(n: usize, k: usize, drive: f64, t: f64) -> Result<ScalingApprox> {
    if k == 0 || k > n {
        return Err(Error::InvalidModel(format!("need 1 <= k <= N (k = {k}, N = {n})")));
    }
    let blocks = n as f64 / k as f64;
    let phase = drive * t;
    if phase.is_nan() || phase <= 0.0 {
        return Err(Error::OutOfRegime(format!("Omega_0 t = {phase} must be positive")));
    }
    if blocks <= REGIME_FACTOR * phase {
        return Err(Error::OutOfRegime(format!("N/k = {blocks} is not above {REGIME_FACTOR} Omega_0 t = {}", REGIME_FACTOR * phase)));
    }
    Ok(ScalingApprox { nsr_work: blocks / (phase * phase), nsr_power: phase * phase / blocks.powi(3) })
}

fn product(a: Flagged, b: Flagged) -> Flagged {
    match (a.get(), b.get()) {
        (Some(x), Some(y)) => Flagged::defined(x * y),
        _ => Flagged::undefined(a.flag.or(b.flag)),
    }
}

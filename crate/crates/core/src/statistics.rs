//! Counting statistics of work and power.
//!
//! Every expectation is a quadratic form on the initial pure state. The
//! operator-level entry points take dense Heisenberg operators; the pipeline
//! instead builds the vectors `O_0 psi_0` and `O_t psi_0` by propagation and
//! hands them to the same [`CountingMoments`] algebra.

use std::fmt;

use num_complex::Complex64;

use crate::dynamics::{inner, l2_norm, StateVector};
use crate::error::{Error, Result};
use crate::operator::HermitianOperator;
use crate::spectral::SpectralDecomposition;

/// Variances down to this far below zero are treated as round-off.
pub const VARIANCE_CLAMP: f64 = 1e-9;
const RESIDUE_TOL: f64 = 1e-10;

/// Why a derived quantity has no value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flag {
    Ok,
    /// Signal (mean) vanishes: `t = 0` or a charging turning point.
    ZeroMean,
    /// Cumulative Bhattacharyya angle is zero.
    ZeroAngle,
    /// A Fisher-information term with vanishing probability but nonzero flux.
    Singular,
}

impl Flag {
    pub fn as_str(self) -> &'static str {
        match self {
            Flag::Ok => "ok",
            Flag::ZeroMean => "zero_mean",
            Flag::ZeroAngle => "zero_angle",
            Flag::Singular => "singular",
        }
    }

    /// First non-`Ok` flag.
    pub fn or(self, other: Flag) -> Flag {
        if self == Flag::Ok {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A real value that may be undefined. Undefined values carry `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Flagged {
    pub value: f64,
    pub flag: Flag,
}

impl Flagged {
    pub fn defined(value: f64) -> Self {
        Self { value, flag: Flag::Ok }
    }

    pub fn undefined(flag: Flag) -> Self {
        debug_assert!(flag != Flag::Ok);
        Self { value: f64::INFINITY, flag }
    }

    pub fn is_defined(&self) -> bool {
        self.flag == Flag::Ok
    }

    pub fn get(&self) -> Option<f64> {
        self.is_defined().then_some(self.value)
    }

    pub fn map(self, f: impl FnOnce(f64) -> f64) -> Self {
        if self.is_defined() {
            Self::defined(f(self.value))
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentPair {
    pub mean: f64,
    pub variance: f64,
}

impl MomentPair {
    /// Clamps round-off negatives; larger negatives are kept so they surface.
    pub fn new(mean: f64, variance: f64) -> Self {
        let variance = if (-VARIANCE_CLAMP..0.0).contains(&variance) { 0.0 } else { variance };
        Self { mean, variance }
    }
}

/// `variance / mean^2`, flagged when the mean vanishes.
pub fn nsr(moments: MomentPair) -> Flagged {
    if moments.mean.abs() < 1e-12 * (moments.variance.max(0.0) + 1.0).sqrt() {
        Flagged::undefined(Flag::ZeroMean)
    } else {
        Flagged::defined(moments.variance / (moments.mean * moments.mean))
    }
}

/// Two-time moments of one counting observable in a pure state `psi_0`.
#[derive(Debug, Clone)]
pub struct CountingMoments {
    /// `<O_t - O_0>`.
    pub mean: f64,
    /// `<(O_t - O_0)^2> - <O_t - O_0>^2`.
    pub variance: f64,
    /// `<O_t>`.
    pub mean_t: f64,
    /// `<O_0>`.
    pub mean_0: f64,
    pub var_t: f64,
    pub var_0: f64,
    /// `<{O_t, O_0}> / 2 - <O_t><O_0>`.
    pub covariance: f64,
    /// `(O_t - O_0) psi_0`.
    pub increment: Vec<Complex64>,
}

impl CountingMoments {
    /// From `psi_0`, `O_0 psi_0` and `O_t psi_0`.
    pub fn from_vectors(psi0: &[Complex64], o0_psi0: &[Complex64], ot_psi0: Vec<Complex64>) -> Result<Self> {
        Self::from_shifted_vectors(psi0, o0_psi0, ot_psi0, 0.0)
    }

    /// Same as [`Self::from_vectors`] for `O_0 - shift`. Increments and
    /// (co)variances do not depend on the shift; choosing it as `<O_0>` avoids
    /// cancellation when the increment is small.
    pub fn from_shifted_vectors(
        psi0: &[Complex64],
        o0_psi0: &[Complex64],
        ot_psi0: Vec<Complex64>,
        shift: f64,
    ) -> Result<Self> {
        let n = psi0.len();
        for len in [o0_psi0.len(), ot_psi0.len()] {
            if len != n {
                return Err(Error::DimensionMismatch { expected: n, found: len });
            }
        }
        let increment: Vec<Complex64> = ot_psi0.iter().zip(o0_psi0).map(|(b, c)| b - c).collect();
        let mean_c = inner(psi0, &increment);
        let residue = mean_c.im.abs();
        if residue > RESIDUE_TOL * (1.0 + l2_norm(&increment)) {
            return Err(Error::ImaginaryResidue { residue });
        }
        let mean = mean_c.re;
        let mean_t = inner(psi0, &ot_psi0).re;
        let mean_0 = inner(psi0, o0_psi0).re;
        let sq = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        Ok(Self {
            mean,
            variance: MomentPair::new(mean, sq(&increment) - mean * mean).variance,
            mean_t: mean_t + shift,
            mean_0: mean_0 + shift,
            var_t: MomentPair::new(mean_t, sq(&ot_psi0) - mean_t * mean_t).variance,
            var_0: MomentPair::new(mean_0, sq(o0_psi0) - mean_0 * mean_0).variance,
            covariance: inner(&ot_psi0, o0_psi0).re - mean_t * mean_0,
            increment,
        })
    }

    /// Dense Heisenberg operators.
    pub fn from_operators(o0: &HermitianOperator, o_t: &HermitianOperator, psi0: &StateVector) -> Result<Self> {
        o0.check_dim(o_t.dim())?;
        o0.check_dim(psi0.dim())?;
        let psi = psi0.amplitudes();
        Self::from_vectors(psi, &o0.apply(psi)?, o_t.apply(psi)?)
    }

    pub fn moments(&self) -> MomentPair {
        MomentPair::new(self.mean, self.variance)
    }

    pub fn nsr(&self) -> Flagged {
        nsr(self.moments())
    }

    /// `2 (cov(O_t, O_0) + dO_t dO_0) / <O_t - O_0>^2` with nonnegative
    /// standard deviations.
    pub fn correlation_f(&self) -> Flagged {
        if nsr(self.moments()).flag != Flag::Ok {
            return Flagged::undefined(Flag::ZeroMean);
        }
        let cov = self.covariance;
        let spread = self.var_t.max(0.0).sqrt() * self.var_0.max(0.0).sqrt();
        Flagged::defined(2.0 * (cov + spread) / (self.mean * self.mean))
    }
}

pub fn fcs_mean(o0: &HermitianOperator, o_t: &HermitianOperator, psi0: &StateVector) -> Result<f64> {
    Ok(CountingMoments::from_operators(o0, o_t, psi0)?.mean)
}

pub fn fcs_variance(o0: &HermitianOperator, o_t: &HermitianOperator, psi0: &StateVector) -> Result<f64> {
    Ok(CountingMoments::from_operators(o0, o_t, psi0)?.variance)
}

pub fn correlation_f(o0: &HermitianOperator, o_t: &HermitianOperator, psi0: &StateVector) -> Result<Flagged> {
    Ok(CountingMoments::from_operators(o0, o_t, psi0)?.correlation_f())
}

/// Both sides of the work-power trade-off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffTerms {
    /// `|<[P~, W~]>|^2`.
    pub commutator_term: f64,
    /// `|<{P~, W~}> - 2|^2`.
    pub anticommutator_term: f64,
    /// `(commutator_term + anticommutator_term) / 4`.
    pub rhs: f64,
    /// `NSR_W * NSR_P`.
    pub lhs: f64,
    pub flag: Flag,
}

impl TradeoffTerms {
    fn undefined(flag: Flag) -> Self {
        Self {
            commutator_term: f64::INFINITY,
            anticommutator_term: f64::INFINITY,
            rhs: f64::INFINITY,
            lhs: f64::INFINITY,
            flag,
        }
    }

    pub fn is_defined(&self) -> bool {
        self.flag == Flag::Ok
    }

    /// `lhs - rhs`.
    pub fn slack(&self) -> f64 {
        self.lhs - self.rhs
    }

    /// `NSR_W + NSR_P - 2 sqrt(NSR_W NSR_P)`, nonnegative by AM-GM.
    pub fn sum_slack(nsr_work: f64, nsr_power: f64) -> f64 {
        nsr_work + nsr_power - 2.0 * (nsr_work * nsr_power).sqrt()
    }
}

/// Trade-off terms from the power and work increment moments.
pub fn tradeoff_from_moments(power: &CountingMoments, work: &CountingMoments) -> TradeoffTerms {
    let (nsr_p, nsr_w) = (power.nsr(), work.nsr());
    if !nsr_p.is_defined() || !nsr_w.is_defined() {
        return TradeoffTerms::undefined(Flag::ZeroMean);
    }
    // <P W> over psi_0 = <P psi_0 | W psi_0> for Hermitian increments
    let pw = inner(&power.increment, &work.increment);
    let norm = power.mean * work.mean;
    let commutator = 2.0 * pw.im / norm;
    let anticommutator = 2.0 * pw.re / norm;
    let commutator_term = commutator * commutator;
    let anticommutator_term = (anticommutator - 2.0).powi(2);
    TradeoffTerms {
        commutator_term,
        anticommutator_term,
        rhs: (commutator_term + anticommutator_term) / 4.0,
        lhs: nsr_w.value * nsr_p.value,
        flag: Flag::Ok,
    }
}

pub fn tradeoff_terms(
    p_heis: &HermitianOperator,
    w_heis: &HermitianOperator,
    p0: &HermitianOperator,
    w0: &HermitianOperator,
    psi0: &StateVector,
) -> Result<TradeoffTerms> {
    let power = CountingMoments::from_operators(p0, p_heis, psi0)?;
    let work = CountingMoments::from_operators(w0, w_heis, psi0)?;
    Ok(tradeoff_from_moments(&power, &work))
}

/// `Z(chi, t) = ln <psi_0| e^{-i chi O_0/2} e^{i chi O_t} e^{-i chi O_0/2} |psi_0>`.
#[derive(Debug, Clone)]
pub struct GeneratingFunction<'a> {
    observable: SpectralDecomposition,
    evolution: &'a SpectralDecomposition,
    psi0: Vec<Complex64>,
}

impl<'a> GeneratingFunction<'a> {
    pub fn new(o0: &HermitianOperator, evolution: &'a SpectralDecomposition, psi0: &StateVector) -> Result<Self> {
        o0.check_dim(evolution.dim())?;
        o0.check_dim(psi0.dim())?;
        let observable = SpectralDecomposition::new(o0, crate::par::Execution::Sequential)?;
        Ok(Self { observable, evolution, psi0: psi0.amplitudes().to_vec() })
    }

    pub fn eval(&self, chi: f64, t: f64) -> Result<Complex64> {
        let phase = |a: f64| move |l: f64| Complex64::from_polar(1.0, a * l);
        // e^{i chi O_t} = U^dagger e^{i chi O_0} U
        let half = self.observable.apply_function(&self.psi0, phase(-chi / 2.0))?;
        let forward = self.evolution.apply_function(&half, phase(-t))?;
        let kicked = self.observable.apply_function(&forward, phase(chi))?;
        let back = self.evolution.apply_function(&kicked, phase(t))?;
        // <psi_0| e^{-i chi O_0/2} is the conjugate of e^{+i chi O_0/2} |psi_0>
        let bra = self.observable.apply_function(&self.psi0, phase(chi / 2.0))?;
        let trace = inner(&bra, &back);
        if trace.norm() < 1e-300 {
            return Err(Error::InvalidArgument(format!("generating function trace vanishes at chi = {chi}")));
        }
        Ok(trace.ln())
    }

    /// `dZ/d(i chi)` at 0 by central difference.
    pub fn finite_difference_mean(&self, t: f64, h: f64) -> Result<f64> {
        let d = (self.eval(h, t)? - self.eval(-h, t)?) / (2.0 * h);
        Ok((d / Complex64::i()).re)
    }

    /// `d^2 Z / d(i chi)^2` at 0 by central difference.
    pub fn finite_difference_variance(&self, t: f64, h: f64) -> Result<f64> {
        let d2 = (self.eval(h, t)? - 2.0 * self.eval(0.0, t)? + self.eval(-h, t)?) / (h * h);
        Ok(-d2.re)
    }
}

pub fn generating_function(
    o0: &HermitianOperator,
    spec: &SpectralDecomposition,
    psi0: &StateVector,
    chi: f64,
    t: f64,
) -> Result<Complex64> {
    GeneratingFunction::new(o0, spec, psi0)?.eval(chi, t)
}

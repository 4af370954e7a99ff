//! End-to-end pipeline: one diagonalization of the generator, then a map over
//! grid points producing work and power statistics, bounds and trade-off.

use num_complex::Complex64;

use crate::bounds::{bhattacharyya_angle, nsr_lower_bound, overlap_angle, OutcomeRates};
use crate::dynamics::{inner, propagate, ProjectorFamily, StateVector, TimeGrid};
use crate::error::Result;
use crate::model::{BatteryModel, BatteryOperators, PowerScale};
use crate::operator::SparseOperator;
use crate::par::{map_range, Execution};
use crate::spectral::SpectralDecomposition;
use crate::statistics::{tradeoff_from_moments, CountingMoments, Flag, Flagged, TradeoffTerms};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioOptions {
    pub emit_bounds: bool,
    pub emit_tradeoff: bool,
    pub emit_fidelity: bool,
    /// Keep the outcome distributions of `W_0` and `P_0` at every point.
    pub keep_distributions: bool,
    pub power_scale: PowerScale,
    pub execution: Execution,
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        Self {
            emit_bounds: true,
            emit_tradeoff: true,
            emit_fidelity: true,
            keep_distributions: false,
            power_scale: PowerScale::default(),
            execution: Execution::default(),
        }
    }
}

/// Fisher information, angle, overlap and bound for one counting observable.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundColumns {
    pub fisher: Flagged,
    /// Cumulative Bhattacharyya angle.
    pub angle: f64,
    /// `arccos sum_i sqrt(p_i(t) p_i(0))`.
    pub overlap_angle: f64,
    pub bound: Flagged,
    pub probabilities: Option<Vec<f64>>,
}

/// Everything computed at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct StatisticsRecord {
    pub t: f64,
    pub mean_work: f64,
    pub var_work: f64,
    pub nsr_work: Flagged,
    pub f_work: Flagged,
    pub mean_power: f64,
    pub var_power: f64,
    pub nsr_power: Flagged,
    pub f_power: Flagged,
    pub work_bound: Option<BoundColumns>,
    pub power_bound: Option<BoundColumns>,
    pub tradeoff: Option<TradeoffTerms>,
    pub fidelity: Option<f64>,
}

/// Outcome values of the two counting observables, in projector order.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeValues {
    pub work: Vec<f64>,
    pub power: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub grid: TimeGrid,
    pub records: Vec<StatisticsRecord>,
    /// Present when bounds were computed.
    pub outcomes: Option<OutcomeValues>,
}

pub fn run_scenario(model: &BatteryModel, grid: &TimeGrid, options: &ScenarioOptions) -> Result<ScenarioOutput> {
    let ops = BatteryOperators::build(model, options.power_scale, options.execution)?;
    run_with_operators(&ops, grid, options)
}

/// Runs from prebuilt operators, starting in the ground state of `H_B`.
pub fn run_with_operators(ops: &BatteryOperators, grid: &TimeGrid, options: &ScenarioOptions) -> Result<ScenarioOutput> {
    let exec = options.execution;
    let n = ops.battery.n_qubits();
    let psi0 = StateVector::ground(n);
    let spec = &ops.total.spectrum;
    let w0 = SparseOperator::from(ops.work());
    let p0 = SparseOperator::from(&ops.power);
    let psi = psi0.amplitudes();
    let work0 = ShiftedObservable::new(&w0, psi);
    let power0 = ShiftedObservable::new(&p0, psi);

    let families = if options.emit_bounds {
        Some((
            ProjectorFamily::from_observable(ops.work(), exec)?,
            ProjectorFamily::from_observable(&ops.power, exec)?,
        ))
    } else {
        None
    };
    let initial = match &families {
        Some((wf, pf)) => Some((
            OutcomeRates::new(wf, spec, psi)?.probabilities,
            OutcomeRates::new(pf, spec, psi)?.probabilities,
        )),
        None => None,
    };

    let points: Vec<Result<Point>> = map_range(exec, grid.steps(), |i| {
        let t = grid.t(i);
        let psi_t = propagate(spec, psi, t)?;
        let work = work0.moments(spec, psi, &psi_t, t)?;
        let power = power0.moments(spec, psi, &psi_t, t)?;
        let rates = match &families {
            Some((wf, pf)) => Some((OutcomeRates::new(wf, spec, &psi_t)?, OutcomeRates::new(pf, spec, &psi_t)?)),
            None => None,
        };
        Ok(Point {
            t,
            tradeoff: options.emit_tradeoff.then(|| tradeoff_from_moments(&power, &work)),
            fidelity: options.emit_fidelity.then(|| inner(psi, &psi_t).norm_sqr().min(1.0)),
            work: Summary::of(&work),
            power: Summary::of(&power),
            rates,
        })
    });
    let points: Vec<Point> = points.into_iter().collect::<Result<_>>()?;

    let (work_angles, power_angles) = if options.emit_bounds {
        let series = |pick: fn(&Point) -> &OutcomeRates| {
            let fisher: Vec<Flagged> = points.iter().map(|p| pick(p).fisher_information()).collect();
            bhattacharyya_angle(grid, &fisher)
        };
        (series(|p| &p.rates.as_ref().expect("bounds requested").0), series(|p| &p.rates.as_ref().expect("bounds requested").1))
    } else {
        (Vec::new(), Vec::new())
    };

    let keep = options.keep_distributions;
    let records = points
        .into_iter()
        .enumerate()
        .map(|(i, p)| {
            let (work_bound, power_bound) = match (p.rates, &initial) {
                (Some((wr, pr)), Some((w_init, p_init))) => (
                    Some(bound_columns(wr, w_init, work_angles[i], p.work.f, keep)),
                    Some(bound_columns(pr, p_init, power_angles[i], p.power.f, keep)),
                ),
                _ => (None, None),
            };
            StatisticsRecord {
                t: p.t,
                mean_work: p.work.mean,
                var_work: p.work.variance,
                nsr_work: p.work.nsr,
                f_work: p.work.f,
                mean_power: p.power.mean,
                var_power: p.power.variance,
                nsr_power: p.power.nsr,
                f_power: p.power.f,
                work_bound,
                power_bound,
                tradeoff: p.tradeoff,
                fidelity: p.fidelity,
            }
        })
        .collect();

    let outcomes = families.map(|(wf, pf)| OutcomeValues {
        work: wf.distinct_values().to_vec(),
        power: pf.distinct_values().to_vec(),
    });
    Ok(ScenarioOutput { grid: *grid, records, outcomes })
}

/// `O_0 - <O_0>` and its action on `psi_0`.
struct ShiftedObservable<'a> {
    op: &'a SparseOperator,
    shift: f64,
    applied: Vec<Complex64>,
}

impl<'a> ShiftedObservable<'a> {
    fn new(op: &'a SparseOperator, psi0: &[Complex64]) -> Self {
        let shift = inner(psi0, &op.apply(psi0)).re;
        Self { op, shift, applied: Self::apply(op, shift, psi0) }
    }

    fn apply(op: &SparseOperator, shift: f64, v: &[Complex64]) -> Vec<Complex64> {
        op.apply(v).into_iter().zip(v).map(|(o, x)| o - shift * x).collect()
    }

    /// `O_t psi_0 = U^dagger O_0 psi_t`.
    fn moments(&self, spec: &SpectralDecomposition, psi0: &[Complex64], psi_t: &[Complex64], t: f64) -> Result<CountingMoments> {
        let heisenberg = propagate(spec, &Self::apply(self.op, self.shift, psi_t), -t)?;
        CountingMoments::from_shifted_vectors(psi0, &self.applied, heisenberg, self.shift)
    }
}

struct Summary {
    mean: f64,
    variance: f64,
    nsr: Flagged,
    f: Flagged,
}

impl Summary {
    fn of(m: &CountingMoments) -> Self {
        Self { mean: m.mean, variance: m.variance, nsr: m.nsr(), f: m.correlation_f() }
    }
}

struct Point {
    t: f64,
    work: Summary,
    power: Summary,
    rates: Option<(OutcomeRates, OutcomeRates)>,
    tradeoff: Option<TradeoffTerms>,
    fidelity: Option<f64>,
}

fn bound_columns(rates: OutcomeRates, initial: &[f64], angle: f64, f: Flagged, keep: bool) -> BoundColumns {
    let fisher = rates.fisher_information();
    let overlap_angle = overlap_angle(&rates.probabilities, initial);
    let bound = match fisher.flag {
        Flag::Ok => nsr_lower_bound(angle, f),
        flag => Flagged::undefined(flag),
    };
    BoundColumns { fisher, angle, overlap_angle, bound, probabilities: keep.then_some(rates.probabilities) }
}

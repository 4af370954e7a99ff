//! Acceptance checks, shared by `qbattery verify` and the acceptance tests.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;
use qbattery::analytic::{kbody_charging_period, kbody_closed_form, kbody_scaling, single_qubit_closed_form, ClosedFormRecord, REGIME_FACTOR};
use qbattery::bounds::{distribution_moments, hellinger_check};
use qbattery::dynamics::{heisenberg_observable, StateVector, TimeGrid};
use qbattery::operator::HermitianOperator;
use qbattery::scenario::{run_with_operators, ScenarioOptions, ScenarioOutput, StatisticsRecord};
use qbattery::spectral::SpectralDecomposition;
use qbattery::statistics::{CountingMoments, GeneratingFunction};
use qbattery::{BatteryModel, BatteryOperators, Execution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::figures::{ising_grid, ising_model, ISING_SS};
use crate::manifest::VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Level {
    /// k-body matrix and Ising chain up to N = 8.
    Fast,
    /// k-body matrix up to N = 12, Ising chain at N = 10.
    Full,
}

impl Level {
    pub fn kbody_sizes(self) -> &'static [usize] {
        match self {
            Level::Fast => &[2, 4, 6, 8],
            Level::Full => &[2, 4, 6, 8, 12],
        }
    }

    pub fn ising_size(self) -> usize {
        match self {
            Level::Fast => 8,
            Level::Full => 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    AtLeast,
}

/// One measured quantity against its limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub value: f64,
    pub limit: f64,
    pub comparison: Comparison,
    pub points: usize,
    pub passed: bool,
}

impl Check {
    pub fn at_most(label: impl Into<String>, value: f64, limit: f64, points: usize) -> Self {
        Self { label: label.into(), value, limit, comparison: Comparison::AtMost, points, passed: value <= limit }
    }

    pub fn at_least(label: impl Into<String>, value: f64, limit: f64, points: usize) -> Self {
        Self { label: label.into(), value, limit, comparison: Comparison::AtLeast, points, passed: value >= limit }
    }

    pub fn holds(label: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Self::at_least(label, v, 1.0, 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub seconds: f64,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let failing: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} = {:.3e} (limit {:.1e})", c.label, c.value, c.limit))
            .collect();
        let mut line = format!("{verdict} criterion {:>2}: {} [{:.2} s]", self.id, self.title, self.seconds);
        if !failing.is_empty() {
            line.push_str(" -- ");
            line.push_str(&failing.join("; "));
        }
        line
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub level: Level,
    pub passed: bool,
    pub seconds: f64,
    pub criteria: Vec<CriterionReport>,
}

pub const CRITERIA: [(u8, &str); 11] = [
    (1, "single-qubit closed forms"),
    (2, "single-qubit bound saturation"),
    (3, "single-qubit trade-off saturation"),
    (4, "k-body equivalence"),
    (5, "universal cluster scaling"),
    (6, "k-body trade-off saturation"),
    (7, "Ising bound and trade-off validity"),
    (8, "Ising qualitative orderings"),
    (9, "generating-function oracle"),
    (10, "Hellinger/Bhattacharyya chain"),
    (11, "large-N approximations"),
];

/// Operator perturbations used to check that the suite detects errors.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Mutation {
    /// Replace `P_0` by `-P_0`, as a commutator with the wrong sign would.
    pub flip_power_sign: bool,
}

const SINGLE_STEPS: usize = 500;
const SATURATION_STEPS: usize = 2000;
const KBODY_STEPS: usize = 200;
const MIN_WINDOW: usize = 10;
const RANDOM_PAIRS: usize = 100_000;
const GF_INSTANCES: usize = 50;
const SCALING_SAMPLES: usize = 20;

struct KbodyRun {
    n: usize,
    k: usize,
    out: ScenarioOutput,
}

struct Timed<T> {
    value: Result<T, String>,
    seconds: f64,
}

/// Runs criteria, caching the shared k-body and Ising trajectories.
pub struct Suite {
    level: Level,
    mutation: Mutation,
    kbody: OnceLock<Timed<Vec<KbodyRun>>>,
    kbody_bounds: OnceLock<Timed<Vec<KbodyRun>>>,
    ising: OnceLock<Timed<Vec<(usize, ScenarioOutput)>>>,
}

impl Suite {
    pub fn new(level: Level) -> Self {
        Self::with_mutation(level, Mutation::default())
    }

    pub fn with_mutation(level: Level, mutation: Mutation) -> Self {
        Self { level, mutation, kbody: OnceLock::new(), kbody_bounds: OnceLock::new(), ising: OnceLock::new() }
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn run_all(&self) -> Report {
        self.run_all_filtered(&[])
    }

    /// Runs the listed criteria, or all of them when `only` is empty.
    pub fn run_all_filtered(&self, only: &[u8]) -> Report {
        let start = Instant::now();
        let criteria: Vec<CriterionReport> = CRITERIA
            .iter()
            .filter(|(id, _)| only.is_empty() || only.contains(id))
            .map(|(id, _)| self.criterion(*id))
            .collect();
        Report {
            version: VERSION,
            level: self.level,
            passed: criteria.iter().all(|c| c.passed),
            seconds: start.elapsed().as_secs_f64(),
            criteria,
        }
    }

    pub fn criterion(&self, id: u8) -> CriterionReport {
        let title = CRITERIA.iter().find(|(i, _)| *i == id).map(|(_, t)| *t).unwrap_or("unknown");
        let start = Instant::now();
        let mut notes = Vec::new();
        let result = match id {
            1 => self.single_qubit_closed_forms(&mut notes),
            2 => self.single_qubit_saturation(&mut notes),
            3 => self.single_qubit_tradeoff(&mut notes),
            4 => self.kbody_equivalence(&mut notes),
            5 => self.cluster_scaling(&mut notes),
            6 => self.kbody_tradeoff(&mut notes),
            7 => self.ising_validity(&mut notes),
            8 => self.ising_orderings(&mut notes),
            9 => self.generating_function(&mut notes),
            10 => self.hellinger_chain(&mut notes),
            11 => self.large_n(&mut notes),
            _ => Err(format!("no criterion {id}")),
        };
        let checks = match result {
            Ok(c) => c,
            Err(e) => {
                notes.push(format!("error: {e}"));
                vec![Check::holds("completed", false)]
            }
        };
        CriterionReport {
            id,
            title,
            passed: !checks.is_empty() && checks.iter().all(|c| c.passed),
            seconds: start.elapsed().as_secs_f64(),
            checks,
            notes,
        }
    }

    fn run(&self, model: &BatteryModel, grid: &TimeGrid, options: &ScenarioOptions) -> qbattery::Result<ScenarioOutput> {
        let mut ops = BatteryOperators::build(model, options.power_scale, options.execution)?;
        if self.mutation.flip_power_sign {
            ops.power = ops.power.scaled(-1.0);
        }
        run_with_operators(&ops, grid, options)
    }

    fn single_qubit(&self, steps: usize, keep: bool) -> Result<ScenarioOutput, String> {
        let model = BatteryModel::single_qubit(1.0, 1.0).map_err(s)?;
        let grid = TimeGrid::new(FRAC_PI_2, steps + 2).map_err(s)?;
        let options = ScenarioOptions { keep_distributions: keep, ..Default::default() };
        self.run(&model, &grid, &options).map_err(s)
    }

    fn single_qubit_closed_forms(&self, notes: &mut Vec<String>) -> Result<Vec<Check>, String> {
        let mut checks = Vec::new();
        for (omega0, drive) in [(1.0, 1.0), (0.7, 1.3)] {
            let start = Instant::now();
            let model = BatteryModel::single_qubit(omega0, drive).map_err(s)?;
            let grid = TimeGrid::new(FRAC_PI_2 / drive, SINGLE_STEPS + 2).map_err(s)?;
            let out = self.run(&model, &grid, &ScenarioOptions::default()).map_err(s)?;
            let seconds = start.elapsed().as_secs_f64();
            let interior = &out.records[1..=SINGLE_STEPS];
            let exact: Vec<ClosedFormRecord> = interior.iter().map(|r| single_qubit_closed_form(omega0, drive, r.t)).collect();
            let tag = format!("omega0={omega0},drive={drive}");
            checks.extend(moment_checks(interior, &exact, 1e-9, &tag));
            if (omega0, drive) == (1.0, 1.0) {
                checks.push(Check::at_most("runtime_seconds", seconds, 1.0, 1));
                notes.push(format!("pipeline for {SINGLE_STEPS} interior points took {seconds:.3} s"));
            }
        }
        Ok(checks)
    }

    fn single_qubit_saturation(&self, notes: &mut Vec<String>) -> Result<Vec<Check>, String> {
        let out = self.single_qubit(SATURATION_STEPS, false)?;
        let interior = &out.records[1..=SATURATION_STEPS];
        let mut checks = Vec::new();
        for (name, work) in [("work", true), ("power", false)] {
            let mut worst = 0.0_f64;
            let mut violating = Vec::new();
            for r in interior {
                let b = bound_columns(r, work).and_then(|c| c.bound.get());
                let gap = match (nsr_of(r, work), b) {
                    (Some(n), Some(b)) => (n - b).abs(),
                    _ => f64::INFINITY,
                };
                worst = worst.max(gap);
                if gap > 1e-6 {
                    violating.push(r.t);
                }
            }
            if let (Some(a), Some(b)) = (violating.first(), violating.last()) {
                notes.push(format!("{name}: {} of {} points exceed 1e-6, t in [{a:.6}, {b:.6}]", violating.len(), interior.len()));
            }
            checks.push(Check::at_most(format!("max|nsr_{name} - bound_{name}|"), worst, 1e-6, interior.len()));
            let fisher_err = interior
                .iter()
                .map(|r| bound_columns(r, work).and_then(|c| c.fisher.get()).map_or(f64::INFINITY, |f| (f - 4.0).abs()))
                .fold(0.0, f64::max);
            checks.push(Check::at_most(format!("max|fisher_{name} - 4 Omega_0^2|"), fisher_err, 1e-8, interior.len()));
        }
        Ok(checks)
    }

    fn single_qubit_tradeoff(&self, _notes: &mut Vec<String>) -> Result<Vec<Check>, String> {
        let out = self.single_qubit(SATURATION_STEPS, false)?;
        let interior = &out.records[1..=SATURATION_STEPS];
        let (mut lhs, mut rhs) = (0.0_f64, 0.0_f64);
        for r in interior {
            match r.tradeoff {
                Some(t) if t.is_defined() => {
                    lhs = lhs.max((t.lhs - 1.0).abs());
                    rhs = rhs.max((t.rhs - 1.0).abs());
                }
                _ => {
                    lhs = f64::INFINITY;
                    rhs = f64::INFINITY;
                }
            }
        }
        Ok(vec![
            Check::at_most("max|lhs - 1|", lhs, 1e-8, interior.len()),
            Check::at_most("max|rhs - 1|", rhs, 1e-8, interior.len()),
        ])
    }

    fn kbody_runs(&self) -> &Timed<Vec<KbodyRun>> {
        self.kbody.get_or_init(|| {
            let options = ScenarioOptions { emit_bounds: false, emit_fidelity: false, ..Default::default() };
            timed(|| self.kbody_matrix(&options))
        })
    }

    fn kbody_matrix(&self, options: &ScenarioOptions) -> Result<Vec<KbodyRun>, String> {
        let mut runs = Vec::new();
        for &n in self.level.kbody_sizes() {
            for k in (1..=n).filter(|k| n % k == 0) {
                let model = BatteryModel::kbody(n, k, 1.0, 1.0).map_err(s)?;
                let grid = TimeGrid::new(kbody_charging_period(n, k, 1.0), KBODY_STEPS).map_err(s)?;
                runs.push(KbodyRun { n, k, out: self.run(&model, &grid, options).map_err(s)? });
            }
        }
        Ok(runs)
    }

    fn kbody_equivalence(&self, notes: &mut Vec<String>) -> Result<Vec<Check>, String> {
        let cached = self.kbody_runs();
        let runs = cached.value.as_ref().map_err(Clone::clone)?;
        let mut checks = Vec::new();
        for run in runs {
            let exact: Vec<ClosedFormRecord> = run
                .out
                .records
                .iter()
                .map(|r| kbody_closed_form(run.n, run.k, 1.0, 1.0, r.t))
                .collect::<qbattery::Result<_>>()
                .map_err(s)?;
            checks.extend(moment_checks(&run.out.records, &exact, 1e-8, &format!("N={},k={}", run.n, run.k)));
        }
        notes.push(format!("{} (N, k) pairs, {KBODY_STEPS} points each", runs.len()));
        checks.push(Check::at_most("runtime_seconds", cached.seconds, 120.0, 1));
        Ok(checks)
    }

    fn cluster_scaling(&self, _notes: &mut Vec<String>) -> Result<Vec<Check>, String> {
        let runs = self.kbody_runs().value.as_ref().map_err(Clone::clone)?;
        let mut checks = Vec::new();
        for run in runs {
            let target = (run.k * run.k) as f64 / (run.n * run.n) as f64;
            let products: Vec<f64> = run
                .out
                .records
                .iter()
                .filter_map(|r| Some(r.nsr_work.get()? * r.nsr_power.get()?))
                .collect();
            let tag = format!("N={},k={}", run.n, run.k);
            let err = products.iter().map(|p| (p - target).abs()).fold(0.0, f64::max);
            let spread = products.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - products.iter().cloned().fold(f64::INFINITY, f64::min);
            checks.push(Check::at_least(format!("{tag} defined points"), products.len() as f64, 1.0, products.len()));
            checks.push(Check::at_most(format!("{tag} max|product - k^2/N^2|"), err, 1e-8, products.len()));
            checks.push(Check::at_most(format!("{tag} spread"), spread, 1e-8, products.len()));
            if run.k == 1 || run.k == run.n {
                let endpoint = if run.k == 1 { 1.0 / (run.n * run.n) as f64 } else { 1.0 };
                let worst = products.iter().map(|p| (p - endpoint).abs()).fold(0.0, f64::max);
                checks.push(Check::at_most(format!("{tag} endpoint"), worst, 1e-8, products.len()));
            }
        }
        Ok(checks)
    }

    fn kbody_tradeoff(&self, _notes: &mut Vec<String>) -> Result<Vec<Check>, String> {
        let runs = self.kbody_runs().value.as_ref().map_err(Clone::clone)?;
        let mut checks = Vec::new();
        for run in runs {
            let slacks: Vec<f64> = run
                .out
                .records
                .iter()
                .filter_map(|r| r.tradeoff.filter(|t| t.is_defined()).map(|t| t.slack()))
                .collect();
            let tag = format!("N={},k={}", run.n, run.k);
            let max = slacks.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let min = slacks.iter().cloned().fold(f64::INFINITY, f64::min);
            checks.push(Check::at_most(format!("{tag} max(lhs - rhs)"), max, 1e-8, slacks.len()));
            checks.push(Check::at_least(format!("{tag} min(lhs - rhs)"), min, -1e-8, slacks.len()));
        }
        Ok(checks)
    }

    fn ising_runs(&self) -> &Timed<Vec<(usize, ScenarioOutput)>> {
        self.ising.get_or_init(|| {
            timed(|| {
                let grid = ising_grid().map_err(s)?;
                let options = ScenarioOptions { keep_distributions: true, ..Default::default() };
                ISING_SS
                    .iter()
                    .map(|&sz| {
                        let model = ising_model(self.level.ising_size(), sz).map_err(s)?;
                        Ok((sz, self.run(&model, &grid, &options).map_err(s)?))
                    })
                    .collect()
            })
        })
    }

    fn ising_validity(&self, notes: &mut Vec<String>) -> Result<Vec<Check>, String> {
        let cached = self.ising_runs();
        let runs = cached.value.as_ref().map_err(Clone::clone)?;
        let mut checks = Vec::new();
        for (sz, out) in runs {
            let tag = format!("s={sz}");
            for (name, work) in [("work", true), ("power", false)] {
                let slacks: Vec<f64> = out
                    .records
                    .iter()
                    .filter_map(|r| Some(nsr_of(r, work)? - bound_columns(r, work)?.bound.get()?))
                    .collect();
                let min = slacks.iter().cloned().fold(f64::INFINITY, f64::min);
                checks.push(Check::at_least(format!("{tag} min nsr - bound ({name})"), min, -1e-6, slacks.len()));
                let gaps: Vec<f64> = out
                    .records
                    .iter()
                    .filter_map(|r| bound_columns(r, work).map(|c| c.angle - c.overlap_angle))
                    .collect();
                let min = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
                checks.push(Check::at_least(format!("{tag} min angle - overlap ({name})"), min, -1e-6, gaps.len()));
            }
            let slacks: Vec<f64> = out
                .records
                .iter()
                .filter_map(|r| r.tradeoff.filter(|t| t.is_defined()).map(|t| t.slack()))
                .collect();
            let min = slacks.iter().cloned().fold(f64::INFINITY, f64::min);
            checks.push(Check::at_least(format!("{tag} min trade-off slack"), min, -1e-8, slacks.len()));
            let f0 = out.records[0].fidelity.unwrap_or(f64::NAN);
            checks.push(Check::at_most(format!("{tag} |fidelity(0) - 1|"), (f0 - 1.0).abs(), 1e-12, 1));
        }
        notes.push(format!("N = {}, three 600-point runs", self.level.ising_size()));
        checks.push(Check::at_most("runtime_seconds", cached.seconds, 300.0, 1));
        Ok(checks)
    }

    fn ising_orderings(&self, notes: &mut Vec<String>) -> Result<Vec<Check>, String> {
        let runs = self.ising_runs().value.as_ref().map_err(Clone::clone)?;
        let records: Vec<&[StatisticsRecord]> = runs.iter().map(|(_, o)| o.records.as_slice()).collect();
        let window = largest_ordered_window(&records);
        match window {
            Some(end) => {
                let t_end = records[0][end].t;
                let peaks: Vec<f64> = records.iter().map(|r| peak_power(r, end)).collect();
                notes.push(format!("largest window [t_1, {t_end:.4}] ({end} points); window peak power {peaks:?}"));
                Ok(vec![Check::at_least("window points", end as f64, MIN_WINDOW as f64, end)])
            }
            None => {
                notes.push("no candidate window satisfies every ordering".into());
                Ok(vec![Check::at_least("window points", 0.0, MIN_WINDOW as f64, 0)])
            }
        }
    }

    fn generating_function(&self, _notes: &mut Vec<String>) -> Result<Vec<Check>, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
        let (mut mean_err, mut var_err) = (0.0_f64, 0.0_f64);
        for trial in 0..GF_INSTANCES {
            let dim = 1 << (2 + trial % 2);
            let h = random_hermitian(&mut rng, dim).map_err(s)?;
            let o = unit_frobenius(random_hermitian(&mut rng, dim).map_err(s)?);
            let psi = StateVector::new(random_state(&mut rng, dim)).map_err(s)?;
            let t = rng.random_range(0.1..3.0);
            let spec = SpectralDecomposition::new(&h, Execution::Sequential).map_err(s)?;
            let z = GeneratingFunction::new(&o, &spec, &psi).map_err(s)?;
            let o_t = heisenberg_observable(&spec, &o, t).map_err(s)?;
            let exact = CountingMoments::from_operators(&o, &o_t, &psi).map_err(s)?;
            mean_err = mean_err.max((z.finite_difference_mean(t, 1e-4).map_err(s)? - exact.mean).abs());
            var_err = var_err.max((z.finite_difference_variance(t, 1e-4).map_err(s)? - exact.variance).abs());
        }
        Ok(vec![
            Check::at_most("max|mean_fd - mean_trace|", mean_err, 1e-6, GF_INSTANCES),
            Check::at_most("max|var_fd - var_trace|", var_err, 1e-5, GF_INSTANCES),
        ])
    }

    fn hellinger_chain(&self, notes: &mut Vec<String>) -> Result<Vec<Check>, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0010);
        let dim = 8;
        let mut violations = 0usize;
        let mut closest = f64::INFINITY;
        let mut skipped = 0usize;
        for _ in 0..RANDOM_PAIRS {
            let h = random_hermitian(&mut rng, dim).map_err(s)?;
            let o = random_hermitian(&mut rng, dim).map_err(s)?;
            let psi = random_state(&mut rng, dim);
            let t = rng.random_range(0.0..4.0);
            let h_spec = SpectralDecomposition::new(&h, Execution::Sequential).map_err(s)?;
            let o_spec = SpectralDecomposition::new(&o, Execution::Sequential).map_err(s)?;
            let psi_t = h_spec.apply_function(&psi, |e| Complex64::from_polar(1.0, -e * t)).map_err(s)?;
            let p: Vec<f64> = o_spec.to_eigenbasis(&psi).map_err(s)?.iter().map(|c| c.norm_sqr()).collect();
            let q: Vec<f64> = o_spec.to_eigenbasis(&psi_t).map_err(s)?.iter().map(|c| c.norm_sqr()).collect();
            match hellinger_gap(o_spec.eigenvalues(), &p, &q).map_err(s)? {
                Some(gap) => {
                    closest = closest.min(gap);
                    violations += usize::from(gap < -1e-9);
                }
                None => skipped += 1,
            }
        }
        notes.push(format!("{RANDOM_PAIRS} random 8-outcome pairs, {skipped} skipped with zero spread"));
        let mut checks = vec![Check::at_most("random pairs: violations", violations as f64, 0.0, RANDOM_PAIRS)];
        if closest.is_finite() {
            notes.push(format!("random pairs: smallest lhs - rhs = {closest:.3e}"));
        }

        let single = self.single_qubit(SATURATION_STEPS, true)?;
        let bounded = self.kbody_bounds.get_or_init(|| {
            timed(|| self.kbody_matrix(&ScenarioOptions { keep_distributions: true, ..Default::default() }))
        });
        let bounded = bounded.value.as_ref().map_err(Clone::clone)?;
        let ising = self.ising_runs().value.as_ref().map_err(Clone::clone)?;
        let (mut hell_viol, mut angle_viol, mut points) = (0usize, 0usize, 0usize);
        let mut worst_angle = f64::INFINITY;
        let mut visit = |name: &str, out: &ScenarioOutput| -> Result<(), String> {
            let values = out.outcomes.as_ref().ok_or_else(|| format!("{name}: no outcome values"))?;
            for (work, vals) in [(true, &values.work), (false, &values.power)] {
                let first = bound_columns(&out.records[0], work).and_then(|c| c.probabilities.clone());
                let first = first.ok_or_else(|| format!("{name}: distributions missing"))?;
                for r in &out.records {
                    let c = bound_columns(r, work).ok_or_else(|| format!("{name}: bounds missing"))?;
                    let p = c.probabilities.as_ref().ok_or_else(|| format!("{name}: distributions missing"))?;
                    points += 1;
                    if let Some(gap) = hellinger_gap(vals, &first, p).map_err(s)? {
                        hell_viol += usize::from(gap < -1e-9);
                    }
                    let g = c.angle - c.overlap_angle;
                    worst_angle = worst_angle.min(g);
                    angle_viol += usize::from(g < -1e-9);
                }
            }
            Ok(())
        };
        visit("single", &single)?;
        for run in bounded {
            visit(&format!("kbody N={},k={}", run.n, run.k), &run.out)?;
        }
        for (sz, out) in ising {
            visit(&format!("ising s={sz}"), out)?;
        }
        notes.push(format!("trajectories: {points} distribution pairs; min angle - overlap = {worst_angle:.3e}"));
        checks.push(Check::at_most("trajectories: Hellinger violations", hell_viol as f64, 0.0, points));
        checks.push(Check::at_most("trajectories: angle-overlap violations", angle_viol as f64, 0.0, points));
        Ok(checks)
    }

    fn large_n(&self, notes: &mut Vec<String>) -> Result<Vec<Check>, String> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0011);
        let sizes = [200usize, 500, 1000, 2000, 5000];
        let ks = [1usize, 2, 4, 5, 10];
        let (mut work_err, mut power_err) = (0.0_f64, 0.0_f64);
        for _ in 0..SCALING_SAMPLES {
            let n = sizes[rng.random_range(0..sizes.len())];
            let k = ks[rng.random_range(0..ks.len())];
            let t = rng.random_range(0.05..0.95) * (n / k) as f64 / REGIME_FACTOR;
            let approx = kbody_scaling(n, k, 1.0, t).map_err(s)?;
            let exact = kbody_closed_form(n, k, 1.0, 1.0, t).map_err(s)?;
            let rel = |a: f64, e: Option<f64>| e.map_or(f64::INFINITY, |e| ((a - e) / e).abs());
            work_err = work_err.max(rel(approx.nsr_work, exact.nsr_work.get()));
            power_err = power_err.max(rel(approx.nsr_power, exact.nsr_power.get()));
        }
        notes.push(format!("{SCALING_SAMPLES} samples with N in {sizes:?}, k in {ks:?}"));
        Ok(vec![
            Check::at_most("max relative error (work)", work_err, 0.05, SCALING_SAMPLES),
            Check::at_most("max relative error (power)", power_err, 0.05, SCALING_SAMPLES),
        ])
    }
}

fn s(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn timed<T>(f: impl FnOnce() -> Result<T, String>) -> Timed<T> {
    let start = Instant::now();
    let value = f();
    Timed { value, seconds: start.elapsed().as_secs_f64() }
}

fn nsr_of(r: &StatisticsRecord, work: bool) -> Option<f64> {
    if work {
        r.nsr_work.get()
    } else {
        r.nsr_power.get()
    }
}

fn bound_columns(r: &StatisticsRecord, work: bool) -> Option<&qbattery::scenario::BoundColumns> {
    if work {
        r.work_bound.as_ref()
    } else {
        r.power_bound.as_ref()
    }
}

/// Relative error with a floor of `1e-3` of the series peak, so that zeros of
/// the exact series are compared in absolute terms.
fn series_error(num: &[f64], exact: &[f64]) -> f64 {
    let peak = exact.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    num.iter()
        .zip(exact)
        .map(|(a, b)| (a - b).abs() / (b.abs() + 1e-3 * peak).max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max)
}

fn moment_checks(records: &[StatisticsRecord], exact: &[ClosedFormRecord], tol: f64, tag: &str) -> Vec<Check> {
    type Column = (&'static str, fn(&StatisticsRecord) -> f64, fn(&ClosedFormRecord) -> f64);
    let series: [Column; 4] = [
        ("mean_work", |r| r.mean_work, |e| e.mean_work),
        ("var_work", |r| r.var_work, |e| e.var_work),
        ("mean_power", |r| r.mean_power, |e| e.mean_power),
        ("var_power", |r| r.var_power, |e| e.var_power),
    ];
    series
        .iter()
        .map(|(name, num, ex)| {
            let a: Vec<f64> = records.iter().map(num).collect();
            let b: Vec<f64> = exact.iter().map(ex).collect();
            Check::at_most(format!("{tag} relative error {name}"), series_error(&a, &b), tol, records.len())
        })
        .collect()
}

/// Largest grid index `e` such that every ordering holds on `t_1..=t_e`,
/// with the runs ordered by increasing `s`.
fn largest_ordered_window(runs: &[&[StatisticsRecord]]) -> Option<usize> {
    let len = runs.iter().map(|r| r.len()).min()?;
    let increasing = |xs: &[Option<f64>]| xs.windows(2).all(|w| matches!((w[0], w[1]), (Some(a), Some(b)) if a < b));
    let mut pointwise_ok = true;
    let mut best = None;
    for e in 1..len {
        let at = |f: &dyn Fn(&StatisticsRecord) -> Option<f64>| runs.iter().map(|r| f(&r[e])).collect::<Vec<_>>();
        let power_nsr = at(&|r| r.nsr_power.get());
        let work_nsr: Vec<Option<f64>> = at(&|r| r.nsr_work.get().map(|x| -x));
        let product = at(&|r| Some(r.nsr_work.get()? * r.nsr_power.get()?));
        pointwise_ok &= increasing(&power_nsr) && increasing(&work_nsr) && increasing(&product);
        if !pointwise_ok {
            break;
        }
        let peaks: Vec<Option<f64>> = runs.iter().map(|r| Some(peak_power(r, e))).collect();
        if e >= MIN_WINDOW && increasing(&peaks) {
            best = Some(e);
        }
    }
    best
}

fn peak_power(records: &[StatisticsRecord], end: usize) -> f64 {
    records[..=end].iter().map(|r| r.mean_power).fold(f64::NEG_INFINITY, f64::max)
}

/// `lhs - rhs` of the Hellinger inequality, `None` when both spreads vanish.
fn hellinger_gap(values: &[f64], p: &[f64], q: &[f64]) -> qbattery::Result<Option<f64>> {
    let (mu_p, sd_p) = distribution_moments(values, p);
    let (mu_q, sd_q) = distribution_moments(values, q);
    if sd_p + sd_q <= 1e-12 {
        return Ok(None);
    }
    let c = hellinger_check(p, q, mu_p, mu_q, sd_p, sd_q)?;
    Ok(Some(c.lhs - c.rhs))
}

fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> qbattery::Result<HermitianOperator> {
    let mut a = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        a[r * dim + r] = Complex64::new(rng.sample(StandardNormal), 0.0);
        for c in r + 1..dim {
            let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            a[r * dim + c] = z;
            a[c * dim + r] = z.conj();
        }
    }
    HermitianOperator::from_row_major(dim, a)
}

fn unit_frobenius(o: HermitianOperator) -> HermitianOperator {
    let norm = o.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    o.scaled(1.0 / norm)
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

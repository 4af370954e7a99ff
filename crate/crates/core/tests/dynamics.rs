mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use qbattery::dynamics::{
    evolve_state, fidelity, heisenberg_observable, projective_probabilities, ProjectorFamily, StateVector, TimeGrid,
};
use qbattery::scenario::{run_scenario, ScenarioOptions};
use qbattery::spectral::spectral_decompose;
use qbattery::statistics::CountingMoments;
use qbattery::{BatteryModel, Execution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn instance(seed: u64, n: usize) -> (Dense, Vec<Complex64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = random_hermitian(&mut rng, 1 << n);
    let psi = random_state(&mut rng, 1 << n);
    (h, psi)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn evolution_matches_matrix_exponential(seed in any::<u64>(), n in 1usize..4, t in 0.0..3.0f64) {
        let (h, psi) = instance(seed, n);
        let spec = spectral_decompose(&h.to_operator()).unwrap();
        let got = evolve_state(&spec, &StateVector::new(psi.clone()).unwrap(), t).unwrap();
        let expected = h.scale(Complex64::new(0.0, -t)).expm().apply(&psi);
        prop_assert!(vec_diff(got.amplitudes(), &expected) < 1e-10);
    }

    #[test]
    fn evolution_preserves_norm(seed in any::<u64>(), n in 1usize..4, t in 0.0..50.0f64) {
        let (h, psi) = instance(seed, n);
        let spec = spectral_decompose(&h.to_operator()).unwrap();
        let psi_t = evolve_state(&spec, &StateVector::new(psi).unwrap(), t).unwrap();
        prop_assert!((psi_t.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolution_is_a_one_parameter_group(seed in any::<u64>(), n in 1usize..4, t1 in 0.0..5.0f64, t2 in 0.0..5.0f64) {
        let (h, psi) = instance(seed, n);
        let spec = spectral_decompose(&h.to_operator()).unwrap();
        let psi0 = StateVector::new(psi).unwrap();
        let split = evolve_state(&spec, &evolve_state(&spec, &psi0, t1).unwrap(), t2).unwrap();
        let joint = evolve_state(&spec, &psi0, t1 + t2).unwrap();
        prop_assert!(vec_diff(split.amplitudes(), joint.amplitudes()) < 1e-12);
    }

    #[test]
    fn heisenberg_matches_schrodinger(seed in any::<u64>(), n in 1usize..4, t in 0.0..4.0f64) {
        let (h, psi) = instance(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let o = random_hermitian(&mut rng, 1 << n);
        let spec = spectral_decompose(&h.to_operator()).unwrap();
        let o_t = heisenberg_observable(&spec, &o.to_operator(), t).unwrap();

        let u = h.scale(Complex64::new(0.0, -t)).expm();
        let oracle = u.dagger().mul(&o).mul(&u);
        prop_assert!(Dense::from_operator(&o_t).max_diff(&oracle) < 1e-10);

        let psi_t = evolve_state(&spec, &StateVector::new(psi.clone()).unwrap(), t).unwrap();
        let heis = inner(&psi, &o_t.apply(&psi).unwrap());
        let schr = inner(psi_t.amplitudes(), &o.apply(psi_t.amplitudes()));
        prop_assert!((heis - schr).norm() < 1e-9);
    }

    #[test]
    fn probabilities_are_conserved(seed in any::<u64>(), n in 1usize..4, t in 0.0..10.0f64) {
        let (h, psi) = instance(seed, n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
        let o = random_hermitian(&mut rng, 1 << n);
        let family = ProjectorFamily::from_observable(&o.to_operator(), Execution::Sequential).unwrap();
        let spec = spectral_decompose(&h.to_operator()).unwrap();
        let psi_t = evolve_state(&spec, &StateVector::new(psi).unwrap(), t).unwrap();
        let p = projective_probabilities(&family, &psi_t).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|&x| x >= 0.0));
    }
}

#[test]
fn projectors_resolve_identity_and_are_idempotent() {
    let h = battery_dense(3, 1.0);
    let family = ProjectorFamily::from_observable(&h.to_operator(), Execution::Sequential).unwrap();
    assert_eq!(family.multiplicities(), vec![1, 3, 3, 1]);
    let mut sum = Dense::zeros(8);
    for i in 0..family.len() {
        let p = family.projector(i);
        let dense = Dense { n: 8, a: (0..64).map(|k| p[(k / 8, k % 8)]).collect() };
        assert!(dense.mul(&dense).max_diff(&dense) < 1e-12);
        sum = sum.add(&dense);
    }
    assert!(sum.max_diff(&Dense::identity(8)) < 1e-12);
}

#[test]
fn stationary_state_has_unit_fidelity() {
    let h = battery_dense(2, 1.0);
    let spec = spectral_decompose(&h.to_operator()).unwrap();
    let psi0 = StateVector::ground(2);
    let psi_t = evolve_state(&spec, &psi0, 7.3).unwrap();
    assert!((fidelity(&psi0, &psi_t).unwrap() - 1.0).abs() < 1e-14);
}

#[test]
fn pipeline_moments_match_dense_heisenberg_operators() {
    let model = BatteryModel::ising(4, 2, 1.0, 2.0, true).unwrap();
    let grid = TimeGrid::new(6.0, 13).unwrap();
    let out = run_scenario(&model, &grid, &ScenarioOptions::default()).unwrap();
    let ops = qbattery::BatteryOperators::build(&model, Default::default(), Execution::Sequential).unwrap();
    let psi0 = StateVector::ground(4);
    for r in &out.records {
        let w_t = heisenberg_observable(&ops.total.spectrum, ops.work(), r.t).unwrap();
        let p_t = heisenberg_observable(&ops.total.spectrum, &ops.power, r.t).unwrap();
        let w = CountingMoments::from_operators(ops.work(), &w_t, &psi0).unwrap();
        let p = CountingMoments::from_operators(&ops.power, &p_t, &psi0).unwrap();
        assert!((w.mean - r.mean_work).abs() < 1e-9);
        assert!((w.variance - r.var_work).abs() < 1e-9);
        assert!((p.mean - r.mean_power).abs() < 1e-9);
        assert!((p.variance - r.var_power).abs() < 1e-9);
    }
}

mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use qbattery::model::{
    build_battery_hamiltonian, build_charging_hamiltonian, power_counting_observable, total_hamiltonian,
};
use qbattery::{Axis, BatteryModel, ChargingScheme, Error, HermitianOperator, PauliTerm};

/// Product of two single-site Pauli labels: `a b = phase * c`.
fn site_product(a: char, b: char) -> (Complex64, char) {
    match (a, b) {
        ('I', x) | (x, 'I') => (ONE, x),
        (x, y) if x == y => (ONE, 'I'),
        ('X', 'Y') => (I, 'Z'),
        ('Y', 'Z') => (I, 'X'),
        ('Z', 'X') => (I, 'Y'),
        ('Y', 'X') => (-I, 'Z'),
        ('Z', 'Y') => (-I, 'X'),
        ('X', 'Z') => (-I, 'Y'),
        _ => unreachable!(),
    }
}

type Symbolic = Vec<(Complex64, String)>;

fn symbolic_product(a: &Symbolic, b: &Symbolic) -> Symbolic {
    let mut out = Vec::new();
    for (ca, sa) in a {
        for (cb, sb) in b {
            let mut coef = ca * cb;
            let mut labels = String::new();
            for (x, y) in sa.chars().zip(sb.chars()) {
                let (phase, c) = site_product(x, y);
                coef *= phase;
                labels.push(c);
            }
            out.push((coef, labels));
        }
    }
    out
}

fn symbolic_commutator(a: &Symbolic, b: &Symbolic) -> Symbolic {
    let mut out = symbolic_product(a, b);
    out.extend(symbolic_product(b, a).into_iter().map(|(c, s)| (-c, s)));
    out
}

fn to_dense(n: usize, s: &Symbolic) -> Dense {
    s.iter().fold(Dense::zeros(1 << n), |acc, (c, labels)| acc.add(&kron_string(labels).scale(*c)))
}

fn labels_of(n: usize, term: &[(usize, char)]) -> String {
    (0..n).map(|j| term.iter().find(|(s, _)| *s == j).map_or('I', |(_, a)| *a)).collect()
}

fn axis_char(a: Axis) -> char {
    match a {
        Axis::X => 'X',
        Axis::Y => 'Y',
        Axis::Z => 'Z',
    }
}

fn pauli_term_strategy(n: usize) -> impl Strategy<Value = (f64, Vec<Option<Axis>>)> {
    let axis = prop_oneof![Just(None), Just(Some(Axis::X)), Just(Some(Axis::Y)), Just(Some(Axis::Z))];
    (-3.0..3.0f64, proptest::collection::vec(axis, n))
}

proptest! {
    #[test]
    fn pauli_terms_match_kronecker_products(
        n in 1usize..5,
        raw in proptest::collection::vec(pauli_term_strategy(4), 1..4),
    ) {
        let mut terms = Vec::new();
        let mut oracle = Dense::zeros(1 << n);
        for (coef, axes) in raw {
            let factors: Vec<(usize, Axis)> = axes.iter().take(n).enumerate().filter_map(|(s, a)| a.map(|a| (s, a))).collect();
            let labels = labels_of(n, &factors.iter().map(|&(s, a)| (s, axis_char(a))).collect::<Vec<_>>());
            oracle = oracle.add(&kron_string(&labels).scale(Complex64::new(coef, 0.0)));
            terms.push(PauliTerm::new(coef, factors).unwrap());
        }
        let op = HermitianOperator::from_terms(n, &terms).unwrap();
        prop_assert!(Dense::from_operator(&op).max_diff(&oracle) < 1e-14);
    }

    #[test]
    fn commutator_matches_symbolic_algebra(
        a in proptest::collection::vec(pauli_term_strategy(3), 1..3),
        b in proptest::collection::vec(pauli_term_strategy(3), 1..3),
        scale in 0.1..4.0f64,
    ) {
        let n = 3;
        let build = |raw: &[(f64, Vec<Option<Axis>>)]| {
            let mut terms = Vec::new();
            let mut sym = Symbolic::new();
            for (coef, axes) in raw {
                let factors: Vec<(usize, Axis)> = axes.iter().enumerate().filter_map(|(s, a)| a.map(|a| (s, a))).collect();
                sym.push((Complex64::new(*coef, 0.0), labels_of(n, &factors.iter().map(|&(s, a)| (s, axis_char(a))).collect::<Vec<_>>())));
                terms.push(PauliTerm::new(*coef, factors).unwrap());
            }
            (HermitianOperator::from_terms(n, &terms).unwrap(), sym)
        };
        let (oa, sa) = build(&a);
        let (ob, sb) = build(&b);
        let got = oa.scaled_commutator(&ob, scale).unwrap();
        let expected = to_dense(n, &symbolic_commutator(&sa, &sb)).scale(Complex64::new(0.0, -scale));
        prop_assert!(Dense::from_operator(&got).max_diff(&expected) < 1e-12);
    }
}

#[test]
fn battery_hamiltonian_matches_kronecker_sum() {
    for n in 1..=5 {
        for omega0 in [0.5, 1.0, 2.0] {
            let h = build_battery_hamiltonian(n, omega0).unwrap();
            assert!(Dense::from_operator(&h).max_diff(&battery_dense(n, omega0)) < 1e-15);
            let lo = h.diagonal_values().into_iter().fold(f64::INFINITY, f64::min);
            assert!((lo + n as f64 * omega0 / 2.0).abs() < 1e-15);
        }
    }
}

#[test]
fn kbody_charging_matches_kronecker_oracle() {
    for (n, k) in [(2, 1), (2, 2), (4, 2), (6, 3), (6, 2)] {
        let model = BatteryModel::kbody(n, k, 1.3, 0.7).unwrap();
        let omega_k = k as f64 / n as f64 * 1.3;
        let strings: Vec<(f64, usize, usize)> = (0..n / k).map(|j| (omega_k, j * k, k)).collect();
        let expected = x_strings_dense(n, &strings).add(&battery_dense(n, 0.7).scale(-ONE));
        let hc = build_charging_hamiltonian(&model).unwrap();
        assert!(Dense::from_operator(&hc).max_diff(&expected) < 1e-14, "n={n} k={k}");
    }
}

#[test]
fn ising_charging_matches_kronecker_oracle() {
    for (n, s) in [(4, 2), (5, 3), (4, 4)] {
        let model = BatteryModel::ising(n, s, 0.9, 2.0, false).unwrap();
        let strings: Vec<(f64, usize, usize)> = (0..=n - s).map(|i| (-0.9, i, s)).collect();
        let expected = x_strings_dense(n, &strings).add(&battery_dense(n, 2.0).scale(-ONE));
        let hc = build_charging_hamiltonian(&model).unwrap();
        assert!(Dense::from_operator(&hc).max_diff(&expected) < 1e-14);
    }
}

#[test]
fn kbody_power_observable_matches_symbolic_commutator() {
    let (n, k, drive, omega0) = (4, 2, 1.0, 1.5);
    let model = BatteryModel::kbody(n, k, drive, omega0).unwrap();
    let hb = build_battery_hamiltonian(n, omega0).unwrap();
    let hc = build_charging_hamiltonian(&model).unwrap();
    let p0 = power_counting_observable(&hb, &hc, 1.0).unwrap();

    let omega_k = k as f64 / n as f64 * drive;
    let battery: Symbolic = (0..n)
        .map(|i| (Complex64::new(-omega0 / 2.0, 0.0), labels_of(n, &[(i, 'Z')])))
        .collect();
    let drive_terms: Symbolic = (0..n / k)
        .map(|j| (Complex64::new(omega_k, 0.0), labels_of(n, &(j * k..(j + 1) * k).map(|s| (s, 'X')).collect::<Vec<_>>())))
        .collect();
    let expected = to_dense(n, &symbolic_commutator(&battery, &drive_terms)).scale(-I);
    assert!(Dense::from_operator(&p0).max_diff(&expected) < 1e-14);
}

#[test]
fn single_qubit_power_is_minus_beta_sigma_y() {
    let model = BatteryModel::single_qubit(1.0, 1.0).unwrap();
    let hb = build_battery_hamiltonian(1, 1.0).unwrap();
    let hc = build_charging_hamiltonian(&model).unwrap();
    let p0 = power_counting_observable(&hb, &hc, 1.0).unwrap();
    assert!(Dense::from_operator(&p0).max_diff(&pauli('Y').scale(-ONE)) < 1e-15);
}

#[test]
fn normalized_total_spans_unit_interval() {
    for model in [
        BatteryModel::ising(6, 2, 1.0, 2.0, true).unwrap(),
        BatteryModel::ising(6, 3, 1.0, 2.0, true).unwrap(),
        BatteryModel::new(3, 1.0, ChargingScheme::KBody { k: 3, omega0: 1.0 }, true).unwrap(),
    ] {
        let total = total_hamiltonian(&model).unwrap();
        let spec = &total.spectrum;
        assert!(spec.min_eigenvalue().abs() < 1e-12);
        assert!((spec.max_eigenvalue() - 1.0).abs() < 1e-12);
        assert!(spec.reconstruction_error(&total.h_norm) < 1e-12);
        assert!((total.scale - (total.e_max - total.e_min)).abs() < 1e-15);
    }
}

#[test]
fn unnormalized_kbody_total_is_pure_drive() {
    let model = BatteryModel::kbody(4, 2, 1.0, 1.0).unwrap();
    let total = total_hamiltonian(&model).unwrap();
    let expected = x_strings_dense(4, &[(0.5, 0, 2), (0.5, 2, 2)]);
    assert!(Dense::from_operator(&total.h_norm).max_diff(&expected) < 1e-15);
    assert_eq!(total.scale, 1.0);
}

#[test]
fn construction_errors() {
    let bad = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)];
    assert!(matches!(HermitianOperator::from_row_major(2, bad), Err(Error::NotHermitian { .. })));
    assert!(matches!(
        BatteryModel::new(2, 1.0, ChargingScheme::Custom(vec![PauliTerm::single(1.0, 2, Axis::X)]), false),
        Err(Error::InvalidTerm(_))
    ));
    assert!(matches!(build_battery_hamiltonian(20, 1.0), Err(Error::DimensionCap { .. })));
}

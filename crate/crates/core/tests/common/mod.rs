//! Dense reference linear algebra used as an independent oracle.

#![allow(dead_code)]

use num_complex::Complex64;
use qbattery::HermitianOperator;
use rand::Rng;
use rand_distr::StandardNormal;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub n: usize,
    pub a: Vec<Complex64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[[Complex64; 2]; 2]) -> Self {
        Self { n: 2, a: rows.iter().flatten().copied().collect() }
    }

    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.a[r * self.n + c]
    }

    pub fn kron(&self, other: &Self) -> Self {
        let n = self.n * other.n;
        let mut out = Self::zeros(n);
        for r1 in 0..self.n {
            for c1 in 0..self.n {
                let x = self.at(r1, c1);
                for r2 in 0..other.n {
                    for c2 in 0..other.n {
                        out.a[(r1 * other.n + r2) * n + c1 * other.n + c2] = x * other.at(r2, c2);
                    }
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let x = self.at(r, k);
                if x == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.a[r * n + c] += x * other.at(k, c);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { n: self.n, a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { n: self.n, a: self.a.iter().map(|x| x * s).collect() }
    }

    pub fn dagger(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.a[c * n + r] = self.at(r, c).conj();
            }
        }
        out
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n).map(|r| (0..self.n).map(|c| self.at(r, c) * v[c]).sum()).collect()
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        self.a.iter().zip(&other.a).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    pub fn norm1(&self) -> f64 {
        (0..self.n).map(|c| (0..self.n).map(|r| self.at(r, c).norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `exp(self)` by scaling and squaring with a truncated Taylor series.
    pub fn expm(&self) -> Self {
        let mut squarings = 0;
        let mut norm = self.norm1();
        while norm > 0.25 {
            norm /= 2.0;
            squarings += 1;
        }
        let a = self.scale(Complex64::new(0.5f64.powi(squarings), 0.0));
        let mut term = Self::identity(self.n);
        let mut sum = Self::identity(self.n);
        for k in 1..30 {
            term = term.mul(&a).scale(Complex64::new(1.0 / k as f64, 0.0));
            sum = sum.add(&term);
        }
        for _ in 0..squarings {
            sum = sum.mul(&sum);
        }
        sum
    }

    pub fn to_operator(&self) -> HermitianOperator {
        HermitianOperator::from_row_major(self.n, self.a.clone()).expect("hermitian")
    }

    pub fn from_operator(op: &HermitianOperator) -> Self {
        Self { n: op.dim(), a: op.entries().to_vec() }
    }
}

pub fn pauli(axis: char) -> Dense {
    match axis {
        'I' => Dense::identity(2),
        'X' => Dense::from_rows(&[[ZERO, ONE], [ONE, ZERO]]),
        'Y' => Dense::from_rows(&[[ZERO, -I], [I, ZERO]]),
        'Z' => Dense::from_rows(&[[ONE, ZERO], [ZERO, -ONE]]),
        _ => panic!("unknown axis {axis}"),
    }
}

/// Kronecker product of single-site matrices, site 0 leftmost.
pub fn kron_string(labels: &str) -> Dense {
    labels.chars().map(pauli).reduce(|acc, m| acc.kron(&m)).expect("nonempty")
}

/// `-(omega0/2) sum_i Z_i` via Kronecker products.
pub fn battery_dense(n: usize, omega0: f64) -> Dense {
    let mut h = Dense::zeros(1 << n);
    for i in 0..n {
        let labels: String = (0..n).map(|j| if j == i { 'Z' } else { 'I' }).collect();
        h = h.add(&kron_string(&labels).scale(Complex64::new(-omega0 / 2.0, 0.0)));
    }
    h
}

/// Sum of `coef * X..X` strings on sites `start..start+len`.
pub fn x_strings_dense(n: usize, strings: &[(f64, usize, usize)]) -> Dense {
    let mut h = Dense::zeros(1 << n);
    for &(coef, start, len) in strings {
        let labels: String = (0..n).map(|j| if j >= start && j < start + len { 'X' } else { 'I' }).collect();
        h = h.add(&kron_string(&labels).scale(Complex64::new(coef, 0.0)));
    }
    h
}

pub fn random_state<R: Rng>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

pub fn random_hermitian<R: Rng>(rng: &mut R, dim: usize) -> Dense {
    let mut m = Dense::zeros(dim);
    for r in 0..dim {
        for c in r..dim {
            if r == c {
                m.a[r * dim + c] = Complex64::new(rng.sample(StandardNormal), 0.0);
            } else {
                let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
                m.a[r * dim + c] = z;
                m.a[c * dim + r] = z.conj();
            }
        }
    }
    m
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

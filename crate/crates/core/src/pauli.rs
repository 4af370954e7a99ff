//! Symbolic Pauli strings with real coefficients.
//!
//! Site `i` maps to bit `n - 1 - i` of the computational basis index, so site 0
//! is the leftmost tensor factor. `sigma_z |0> = +|0>`.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    /// Phase picked up by a basis state with bit value `bit` under this Pauli.
    #[inline]
    fn phase(self, bit: bool) -> Complex64 {
        match (self, bit) {
            (Axis::X, _) => Complex64::new(1.0, 0.0),
            (Axis::Y, false) => Complex64::new(0.0, 1.0),
            (Axis::Y, true) => Complex64::new(0.0, -1.0),
            (Axis::Z, false) => Complex64::new(1.0, 0.0),
            (Axis::Z, true) => Complex64::new(-1.0, 0.0),
        }
    }

    #[inline]
    fn flips(self) -> bool {
        !matches!(self, Axis::Z)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        };
        write!(f, "{c}")
    }
}

/// `coefficient * prod_i sigma_{axis_i}^{(site_i)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    coefficient: f64,
    factors: Vec<(usize, Axis)>,
}

impl PauliTerm {
    /// Factors are stored sorted by site. Sites must be distinct.
    pub fn new(coefficient: f64, factors: impl IntoIterator<Item = (usize, Axis)>) -> Result<Self> {
        if !coefficient.is_finite() {
            return Err(Error::InvalidTerm(format!("coefficient {coefficient} is not finite")));
        }
        let mut factors: Vec<(usize, Axis)> = factors.into_iter().collect();
        factors.sort_by_key(|&(site, _)| site);
        if factors.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidTerm("repeated site index".into()));
        }
        Ok(Self { coefficient, factors })
    }

    pub fn single(coefficient: f64, site: usize, axis: Axis) -> Self {
        Self::new(coefficient, [(site, axis)]).expect("single-site term is always valid")
    }

    /// The same axis on every site in `sites`.
    pub fn string(coefficient: f64, sites: impl IntoIterator<Item = usize>, axis: Axis) -> Result<Self> {
        Self::new(coefficient, sites.into_iter().map(|s| (s, axis)))
    }

    pub fn identity(coefficient: f64) -> Self {
        Self { coefficient, factors: Vec::new() }
    }

    pub fn coefficient(&self) -> f64 {
        self.coefficient
    }

    pub fn factors(&self) -> &[(usize, Axis)] {
        &self.factors
    }

    pub fn max_site(&self) -> Option<usize> {
        self.factors.last().map(|&(s, _)| s)
    }

    pub fn check_sites(&self, n_qubits: usize) -> Result<()> {
        match self.max_site() {
            Some(s) if s >= n_qubits => Err(Error::InvalidTerm(format!(
                "site {s} out of range for {n_qubits} qubits"
            ))),
            _ => Ok(()),
        }
    }

    /// Bit mask of basis bits flipped by the string.
    pub fn flip_mask(&self, n_qubits: usize) -> usize {
        self.factors
            .iter()
            .filter(|(_, a)| a.flips())
            .fold(0, |m, &(s, _)| m | (1 << (n_qubits - 1 - s)))
    }

    /// Image of basis state `col`: `term |col> = amplitude |row>`.
    pub fn apply_to_basis(&self, n_qubits: usize, col: usize) -> (usize, Complex64) {
        let mut amp = Complex64::new(self.coefficient, 0.0);
        for &(site, axis) in &self.factors {
            let bit = (col >> (n_qubits - 1 - site)) & 1 == 1;
            amp *= axis.phase(bit);
        }
        (col ^ self.flip_mask(n_qubits), amp)
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coefficient)?;
        for (site, axis) in &self.factors {
            write!(f, " {axis}{site}")?;
        }
        Ok(())
    }
}

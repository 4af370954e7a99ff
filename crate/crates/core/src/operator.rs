//! Dense Hermitian operators on `2^N`-dimensional qubit space.

use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::PauliTerm;

/// Max-entry tolerance for `H == H^dagger`.
pub const HERMITICITY_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense square matrix stored row-major. Every value of this type passed the
/// Hermiticity check at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    dim: usize,
    entries: Vec<Complex64>,
}

impl HermitianOperator {
    pub fn from_row_major(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: entries.len() });
        }
        let op = Self { dim, entries };
        let deviation = op.hermiticity_deviation();
        if deviation > HERMITICITY_TOL * op.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(op)
    }

    /// Row-major real symmetric entries.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::from_row_major(dim, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim.is_power_of_two(), "dimension must be a power of two");
        Self { dim, entries: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        op
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let mut op = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            op.entries[i * values.len() + i] = Complex64::new(v, 0.0);
        }
        op
    }

    /// Sum of Pauli strings on `n_qubits` sites.
    pub fn from_terms(n_qubits: usize, terms: &[PauliTerm]) -> Result<Self> {
        let dim = 1usize << n_qubits;
        let mut op = Self::zeros(dim);
        for term in terms {
            term.check_sites(n_qubits)?;
            for col in 0..dim {
                let (row, amp) = term.apply_to_basis(n_qubits, col);
                op.entries[row * dim + col] += amp;
            }
        }
        Ok(op)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |H_rc - conj(H_cr)|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                let d = (self.entries[r * n + c] - self.entries[c * n + r].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|z| z.im == 0.0)
    }

    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim;
        (0..n).all(|r| (0..n).all(|c| r == c || self.entries[r * n + c] == ZERO))
    }

    pub fn diagonal_values(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.entries[i * self.dim + i].re).collect()
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect();
        Ok(Self { dim: self.dim, entries })
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.check_dim(other.dim)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(Self { dim: self.dim, entries })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|z| z * factor).collect() }
    }

    /// `self + shift * I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.entries[i * self.dim + i] += shift;
        }
        out
    }

    pub fn check_dim(&self, found: usize) -> Result<()> {
        if found == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, found })
        }
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_dim(v.len())?;
        Ok((0..self.dim)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `<u|self|v>`.
    pub fn sandwich(&self, u: &[Complex64], v: &[Complex64]) -> Result<Complex64> {
        let hv = self.apply(v)?;
        self.check_dim(u.len())?;
        Ok(u.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn expectation(&self, psi: &[Complex64]) -> Result<Complex64> {
        self.sandwich(psi, psi)
    }

    /// `-i scale [self, other]`, Hermitian whenever both inputs are.
    pub fn scaled_commutator(&self, other: &Self, scale: f64) -> Result<Self> {
        self.check_dim(other.dim)?;
        // [A, B] = AB - (AB)^dagger for Hermitian A, B; multiply with the sparser one on the left.
        let (left, right, sign) = if SparseOperator::from(self).nnz() <= SparseOperator::from(other).nnz() {
            (self, other, 1.0)
        } else {
            (other, self, -1.0)
        };
        let product = SparseOperator::from(left).mul_dense(right);
        let n = self.dim;
        let factor = Complex64::new(0.0, -scale * sign);
        let mut entries = vec![ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                entries[r * n + c] = factor * (product[r * n + c] - product[c * n + r].conj());
            }
        }
        Self::from_row_major(n, entries)
    }

    pub fn to_faer(&self) -> Mat<Complex64> {
        MatRef::from_row_major_slice(&self.entries, self.dim, self.dim).to_owned()
    }

    /// Symmetrizes away round-off before the Hermiticity check.
    pub fn from_faer(m: MatRef<'_, Complex64>) -> Result<Self> {
        let n = m.nrows();
        let mut entries = vec![ZERO; n * n];
        for r in 0..n {
            for c in 0..n {
                entries[r * n + c] = m[(r, c)];
            }
        }
        let raw = Self { dim: n, entries };
        let deviation = raw.hermiticity_deviation();
        if deviation > HERMITICITY_TOL * raw.max_abs().max(1.0) {
            return Err(Error::NotHermitian { deviation });
        }
        let mut sym = raw.clone();
        for r in 0..n {
            for c in 0..n {
                sym.entries[r * n + c] = 0.5 * (raw.entries[r * n + c] + raw.entries[c * n + r].conj());
            }
        }
        Ok(sym)
    }

    /// Eigenvalues as multiset are unchanged by the similarity `U^dagger self U`.
    pub fn unitary_similarity(&self, u: MatRef<'_, Complex64>) -> Result<Self> {
        self.check_dim(u.nrows())?;
        let a = self.to_faer();
        let out = u.adjoint() * &a * u;
        Self::from_faer(out.as_ref())
    }

    /// Cheap content hash used in error reports.
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for z in &self.entries {
            for bits in [z.re.to_bits(), z.im.to_bits()] {
                h ^= bits;
                h = h.wrapping_mul(0x0100_0000_01b3);
            }
        }
        h
    }
}

/// Compressed-row view used for repeated matrix-vector products.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    dim: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<Complex64>,
}

impl From<&HermitianOperator> for SparseOperator {
    fn from(op: &HermitianOperator) -> Self {
        let n = op.dim;
        let mut row_start = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_start.push(0);
        for r in 0..n {
            for (c, &z) in op.row(r).iter().enumerate() {
                if z != ZERO {
                    cols.push(c);
                    values.push(z);
                }
            }
            row_start.push(cols.len());
        }
        Self { dim: n, row_start, cols, values }
    }
}

impl SparseOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "dimension mismatch");
        (0..self.dim)
            .map(|r| {
                (self.row_start[r]..self.row_start[r + 1])
                    .map(|k| self.values[k] * v[self.cols[k]])
                    .sum()
            })
            .collect()
    }

    /// Row-major `self * dense`.
    fn mul_dense(&self, dense: &HermitianOperator) -> Vec<Complex64> {
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for r in 0..n {
            let out_row = &mut out[r * n..(r + 1) * n];
            for k in self.row_start[r]..self.row_start[r + 1] {
                let a = self.values[k];
                for (o, b) in out_row.iter_mut().zip(dense.row(self.cols[k])) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Nonzero pattern as (row, col) pairs with `row < col`.
    pub fn upper_pattern(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_start[r]..self.row_start[r + 1])
                .map(move |k| (r, self.cols[k]))
                .filter(|&(r, c)| r < c)
        })
    }
}

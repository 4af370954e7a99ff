//! Eigendecomposition of Hermitian operators.
//!
//! The operator is first split into the connected components of its nonzero
//! pattern. Each component is an exactly invariant subspace, so diagonalizing
//! components separately is exact and turns the block-local charging models
//! into many small problems. Real components use the real symmetric solver.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::{HermitianOperator, SparseOperator};
use crate::par::{map_slice, Execution};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone)]
enum Vectors {
    Real(Mat<f64>),
    Complex(Mat<Complex64>),
}

impl Vectors {
    fn size(&self) -> usize {
        match self {
            Vectors::Real(m) => m.nrows(),
            Vectors::Complex(m) => m.nrows(),
        }
    }

    fn entry(&self, row: usize, col: usize) -> Complex64 {
        match self {
            Vectors::Real(m) => Complex64::new(m[(row, col)], 0.0),
            Vectors::Complex(m) => m[(row, col)],
        }
    }

    /// `out[j] = <v_j | x>`.
    fn project(&self, x: &[Complex64], out: &mut [Complex64]) {
        match self {
            Vectors::Real(m) => {
                for (j, o) in out.iter_mut().enumerate() {
                    let col = m.col_as_slice(j);
                    let (mut re, mut im) = (0.0, 0.0);
                    for (v, z) in col.iter().zip(x) {
                        re += v * z.re;
                        im += v * z.im;
                    }
                    *o = Complex64::new(re, im);
                }
            }
            Vectors::Complex(m) => {
                for (j, o) in out.iter_mut().enumerate() {
                    *o = m.col_as_slice(j).iter().zip(x).map(|(v, z)| v.conj() * z).sum();
                }
            }
        }
    }

    /// `out = sum_j c_j v_j`.
    fn combine(&self, coeffs: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = ZERO);
        match self {
            Vectors::Real(m) => {
                for (j, &c) in coeffs.iter().enumerate() {
                    if c == ZERO {
                        continue;
                    }
                    for (o, v) in out.iter_mut().zip(m.col_as_slice(j)) {
                        *o += c * v;
                    }
                }
            }
            Vectors::Complex(m) => {
                for (j, &c) in coeffs.iter().enumerate() {
                    if c == ZERO {
                        continue;
                    }
                    for (o, v) in out.iter_mut().zip(m.col_as_slice(j)) {
                        *o += c * v;
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Block {
    /// Basis indices spanned by this block, ascending.
    indices: Vec<usize>,
    /// Offset of the block's first column in eigen-index space.
    offset: usize,
    vectors: Vectors,
}

/// Eigenvalues and an orthonormal eigenbasis.
///
/// Eigen-indices run block by block; [`Self::ascending_order`] gives the
/// permutation that sorts them by eigenvalue.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    dim: usize,
    blocks: Vec<Block>,
    eigenvalues: Vec<f64>,
    ascending: Vec<usize>,
}

/// Eigendecomposition with the default execution mode.
pub fn spectral_decompose(h: &HermitianOperator) -> Result<SpectralDecomposition> {
    SpectralDecomposition::new(h, Execution::default())
}

impl SpectralDecomposition {
    pub fn new(h: &HermitianOperator, exec: Execution) -> Result<Self> {
        let dim = h.dim();
        let components = connected_components(&SparseOperator::from(h));
        let solved = map_slice(exec, &components, |indices| solve_block(h, indices));

        let mut blocks = Vec::with_capacity(components.len());
        let mut eigenvalues = Vec::with_capacity(dim);
        for (indices, result) in components.into_iter().zip(solved) {
            let (values, vectors) = result.map_err(|block| Error::NoConvergence {
                block,
                fingerprint: h.fingerprint(),
            })?;
            blocks.push(Block { indices, offset: eigenvalues.len(), vectors });
            eigenvalues.extend(values);
        }
        let ascending = ascending_permutation(&eigenvalues);
        Ok(Self { dim, blocks, eigenvalues, ascending })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.indices.len()).collect()
    }

    /// Eigenvalues in eigen-index (block) order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalues_ascending(&self) -> Vec<f64> {
        self.ascending.iter().map(|&i| self.eigenvalues[i]).collect()
    }

    /// Eigen-indices sorted by eigenvalue.
    pub fn ascending_order(&self) -> &[usize] {
        &self.ascending
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[self.ascending[0]]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues[*self.ascending.last().expect("nonempty spectrum")]
    }

    /// `max |lambda|`, the spectral norm.
    pub fn spectral_norm(&self) -> f64 {
        self.min_eigenvalue().abs().max(self.max_eigenvalue().abs())
    }

    /// Same eigenvectors, eigenvalues mapped through `f`.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = self.clone();
        out.eigenvalues.iter_mut().for_each(|l| *l = f(*l));
        out.ascending = ascending_permutation(&out.eigenvalues);
        out
    }

    /// Coefficients `<v_j|psi>` in eigen-index order.
    pub fn to_eigenbasis(&self, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(psi.len())?;
        let mut coeffs = vec![ZERO; self.dim];
        let mut local = Vec::new();
        for block in &self.blocks {
            local.clear();
            local.extend(block.indices.iter().map(|&i| psi[i]));
            let n = block.indices.len();
            block.vectors.project(&local, &mut coeffs[block.offset..block.offset + n]);
        }
        Ok(coeffs)
    }

    /// `sum_j c_j |v_j>`.
    pub fn from_eigenbasis(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(coeffs.len())?;
        let mut psi = vec![ZERO; self.dim];
        let mut local = Vec::new();
        for block in &self.blocks {
            let n = block.indices.len();
            local.resize(n, ZERO);
            block.vectors.combine(&coeffs[block.offset..block.offset + n], &mut local);
            for (&i, &z) in block.indices.iter().zip(&local) {
                psi[i] = z;
            }
        }
        Ok(psi)
    }

    /// `f(H) psi`.
    pub fn apply_function(&self, psi: &[Complex64], f: impl Fn(f64) -> Complex64) -> Result<Vec<Complex64>> {
        let mut coeffs = self.to_eigenbasis(psi)?;
        for (c, &l) in coeffs.iter_mut().zip(&self.eigenvalues) {
            *c *= f(l);
        }
        self.from_eigenbasis(&coeffs)
    }

    /// Dense eigenvector matrix, columns in ascending eigenvalue order.
    pub fn eigenvectors_dense(&self) -> Mat<Complex64> {
        let mut v = Mat::<Complex64>::zeros(self.dim, self.dim);
        let mut position = vec![0; self.dim];
        for (pos, &idx) in self.ascending.iter().enumerate() {
            position[idx] = pos;
        }
        for block in &self.blocks {
            for local_col in 0..block.indices.len() {
                let col = position[block.offset + local_col];
                for (local_row, &row) in block.indices.iter().enumerate() {
                    v[(row, col)] = block.vectors.entry(local_row, local_col);
                }
            }
        }
        v
    }

    /// Dense `V f(Lambda) V^dagger`.
    pub fn dense_function(&self, f: impl Fn(f64) -> Complex64) -> Mat<Complex64> {
        let mut out = Mat::<Complex64>::zeros(self.dim, self.dim);
        for block in &self.blocks {
            let n = block.indices.len();
            for j in 0..n {
                let w = f(self.eigenvalues[block.offset + j]);
                for (a, &ra) in block.indices.iter().enumerate() {
                    let va = block.vectors.entry(a, j) * w;
                    for (b, &rb) in block.indices.iter().enumerate() {
                        out[(ra, rb)] += va * block.vectors.entry(b, j).conj();
                    }
                }
            }
        }
        out
    }

    /// `max |V Lambda V^dagger - H|`.
    pub fn reconstruction_error(&self, h: &HermitianOperator) -> f64 {
        let rebuilt = self.dense_function(|l| Complex64::new(l, 0.0));
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in 0..self.dim {
                worst = worst.max((rebuilt[(r, c)] - h.get(r, c)).norm());
            }
        }
        worst
    }

    /// `max |V^dagger V - I|`, evaluated blockwise.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for block in &self.blocks {
            let n = block.vectors.size();
            for i in 0..n {
                for j in i..n {
                    let dot: Complex64 =
                        (0..n).map(|r| block.vectors.entry(r, i).conj() * block.vectors.entry(r, j)).sum();
                    let target = if i == j { 1.0 } else { 0.0 };
                    worst = worst.max((dot - target).norm());
                }
            }
        }
        worst
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, found: len })
        }
    }
}

fn ascending_permutation(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    order
}

/// Components of the undirected graph with an edge wherever `H_rc != 0`.
fn connected_components(pattern: &SparseOperator) -> Vec<Vec<usize>> {
    let n = pattern.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (r, c) in pattern.upper_pattern() {
        let (a, b) = (find(&mut parent, r), find(&mut parent, c));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut slot = vec![usize::MAX; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = components.len();
            components.push(Vec::new());
        }
        components[slot[root]].push(i);
    }
    components
}

/// Returns the block size on failure.
fn solve_block(h: &HermitianOperator, indices: &[usize]) -> std::result::Result<(Vec<f64>, Vectors), usize> {
    let n = indices.len();
    if n == 1 {
        let i = indices[0];
        return Ok((vec![h.get(i, i).re], Vectors::Real(Mat::from_fn(1, 1, |_, _| 1.0))));
    }
    let real = indices.iter().all(|&r| indices.iter().all(|&c| h.get(r, c).im == 0.0));
    if real {
        let a = Mat::<f64>::from_fn(n, n, |i, j| h.get(indices[i], indices[j]).re);
        let evd = a.self_adjoint_eigen(Side::Lower).map_err(|_| n)?;
        let values = (0..n).map(|i| evd.S().column_vector()[i]).collect();
        Ok((values, Vectors::Real(evd.U().to_owned())))
    } else {
        let a = Mat::<Complex64>::from_fn(n, n, |i, j| h.get(indices[i], indices[j]));
        let evd = a.self_adjoint_eigen(Side::Lower).map_err(|_| n)?;
        let values = (0..n).map(|i| evd.S().column_vector()[i].re).collect();
        Ok((values, Vectors::Complex(evd.U().to_owned())))
    }
}

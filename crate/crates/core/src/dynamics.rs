//! Exact unitary evolution, projective measurement statistics and fidelity.

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::operator::HermitianOperator;
use crate::par::Execution;
use crate::spectral::SpectralDecomposition;

pub const NORM_TOL: f64 = 1e-10;
/// Relative (to spectral range) tolerance for merging eigenvalues.
pub const DEGENERACY_TOL: f64 = 1e-9;
pub const PROBABILITY_TOL: f64 = 1e-9;

/// Normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(Vec<Complex64>);

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if !amplitudes.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(amplitudes.len()));
        }
        let norm = l2_norm(&amplitudes);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self(amplitudes))
    }

    /// Rescales to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = l2_norm(&amplitudes);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm });
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Self::new(amplitudes)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self(amps)
    }

    /// `|0...0>`, the discharged battery.
    pub fn ground(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.0
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.0)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(inner(&self.0, &other.0))
    }
}

pub(crate) fn l2_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a|b>`.
#[inline]
pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Uniform samples `t_0 = 0, ..., t_{steps-1} = t_final`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_final: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, steps: usize) -> Result<Self> {
        if !(t_final.is_finite() && t_final > 0.0) {
            return Err(Error::InvalidGrid(format!("t_final must be positive, got {t_final}")));
        }
        if steps < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 steps, got {steps}")));
        }
        Ok(Self { t_final, steps })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn spacing(&self) -> f64 {
        self.t_final / (self.steps - 1) as f64
    }

    #[inline]
    pub fn t(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            self.t_final
        } else {
            self.t_final * i as f64 / (self.steps - 1) as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.t(i)).collect()
    }

    /// Same interval, step halved.
    pub fn refined(&self) -> Self {
        Self { t_final: self.t_final, steps: 2 * self.steps - 1 }
    }
}

/// Spectral projectors `Pi_i` of an observable, one per distinct eigenvalue.
///
/// Each projector is held implicitly as a group of orthonormal eigenvectors;
/// [`Self::projector`] materializes it.
#[derive(Debug, Clone)]
pub struct ProjectorFamily {
    spectrum: SpectralDecomposition,
    distinct_values: Vec<f64>,
    groups: Vec<Vec<usize>>,
}

impl ProjectorFamily {
    pub fn from_observable(o: &HermitianOperator, exec: Execution) -> Result<Self> {
        Ok(Self::from_spectrum(SpectralDecomposition::new(o, exec)?))
    }

    /// Groups eigenvalues closer than `DEGENERACY_TOL` times the spectral range.
    pub fn from_spectrum(spectrum: SpectralDecomposition) -> Self {
        let range = spectrum.max_eigenvalue() - spectrum.min_eigenvalue();
        let tol = DEGENERACY_TOL * range;
        let values = spectrum.eigenvalues();
        let mut distinct_values = Vec::new();
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut anchor = f64::NEG_INFINITY;
        for &idx in spectrum.ascending_order() {
            let v = values[idx];
            match groups.last_mut() {
                Some(group) if v - anchor <= tol => group.push(idx),
                _ => {
                    anchor = v;
                    distinct_values.push(v);
                    groups.push(vec![idx]);
                }
            }
        }
        for (value, group) in distinct_values.iter_mut().zip(&groups) {
            *value = group.iter().map(|&i| values[i]).sum::<f64>() / group.len() as f64;
        }
        Self { spectrum, distinct_values, groups }
    }

    /// Keeps only the listed projectors; the result may be incomplete.
    pub fn subset(&self, keep: &[usize]) -> Self {
        Self {
            spectrum: self.spectrum.clone(),
            distinct_values: keep.iter().map(|&i| self.distinct_values[i]).collect(),
            groups: keep.iter().map(|&i| self.groups[i].clone()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.spectrum.dim()
    }

    pub fn distinct_values(&self) -> &[f64] {
        &self.distinct_values
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    pub fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectrum
    }

    pub fn is_complete(&self) -> bool {
        self.groups.iter().map(Vec::len).sum::<usize>() == self.spectrum.dim()
    }

    /// Dense `Pi_i`.
    pub fn projector(&self, i: usize) -> Mat<Complex64> {
        let v = self.spectrum.eigenvectors_dense();
        let mut position = vec![0; self.dim()];
        for (pos, &idx) in self.spectrum.ascending_order().iter().enumerate() {
            position[idx] = pos;
        }
        let n = self.dim();
        let mut p = Mat::<Complex64>::zeros(n, n);
        for &idx in &self.groups[i] {
            let col = position[idx];
            for r in 0..n {
                for c in 0..n {
                    p[(r, c)] += v[(r, col)] * v[(c, col)].conj();
                }
            }
        }
        p
    }

    /// `p_i`, `<psi|Pi_i H|psi>` and `||Pi_i H psi||^2` per projector. With
    /// `h_psi = None` the last two are zero.
    pub(crate) fn weights_and_flux(&self, psi: &[Complex64], h_psi: Option<&[Complex64]>) -> Result<Weights> {
        let a = self.spectrum.to_eigenbasis(psi)?;
        let b = h_psi.map(|v| self.spectrum.to_eigenbasis(v)).transpose()?;
        let mut w = Weights {
            probabilities: Vec::with_capacity(self.len()),
            flux: Vec::with_capacity(self.len()),
            generator_weight: Vec::with_capacity(self.len()),
        };
        for group in &self.groups {
            w.probabilities.push(group.iter().map(|&j| a[j].norm_sqr()).sum());
            match &b {
                Some(b) => {
                    w.flux.push(group.iter().map(|&j| a[j].conj() * b[j]).sum());
                    w.generator_weight.push(group.iter().map(|&j| b[j].norm_sqr()).sum());
                }
                None => {
                    w.flux.push(Complex64::new(0.0, 0.0));
                    w.generator_weight.push(0.0);
                }
            }
        }
        Ok(w)
    }
}

pub(crate) struct Weights {
    pub probabilities: Vec<f64>,
    pub flux: Vec<Complex64>,
    pub generator_weight: Vec<f64>,
}

/// `psi_t = exp(-i H t) psi_0`, `t >= 0`.
pub fn evolve_state(spec: &SpectralDecomposition, psi0: &StateVector, t: f64) -> Result<StateVector> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidArgument(format!("evolution time must be nonnegative, got {t}")));
    }
    Ok(StateVector(propagate(spec, psi0.amplitudes(), t)?))
}

/// `exp(-i H t) v` for any real `t`.
pub(crate) fn propagate(spec: &SpectralDecomposition, v: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    spec.apply_function(v, |l| Complex64::from_polar(1.0, -l * t))
}

/// `O_t = U_t^dagger O_0 U_t` as a dense operator.
pub fn heisenberg_observable(spec: &SpectralDecomposition, o0: &HermitianOperator, t: f64) -> Result<HermitianOperator> {
    o0.check_dim(spec.dim())?;
    let u = spec.dense_function(|l| Complex64::from_polar(1.0, -l * t));
    o0.unitary_similarity(u.as_ref())
}

/// `p_i = <psi|Pi_i|psi>`.
pub fn projective_probabilities(family: &ProjectorFamily, psi: &StateVector) -> Result<Vec<f64>> {
    if psi.dim() != family.dim() {
        return Err(Error::DimensionMismatch { expected: family.dim(), found: psi.dim() });
    }
    let probs = family.weights_and_flux(psi.amplitudes(), None)?.probabilities;
    let deficit = 1.0 - probs.iter().sum::<f64>();
    if !family.is_complete() || deficit.abs() > PROBABILITY_TOL {
        return Err(Error::IncompleteProjectors { deficit });
    }
    Ok(probs.into_iter().map(|p| p.max(0.0)).collect())
}

/// `|<psi0|psi_t>|^2`.
pub fn fidelity(psi0: &StateVector, psi_t: &StateVector) -> Result<f64> {
    Ok(psi0.inner(psi_t)?.norm_sqr().min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Axis, PauliTerm};
    use crate::spectral::spectral_decompose;

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(0.0, 10).is_err());
        assert!(TimeGrid::new(1.0, 1).is_err());
        let g = TimeGrid::new(2.0, 5).unwrap();
        assert_eq!(g.points(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(g.refined().steps(), 9);
    }

    #[test]
    fn state_must_be_normalized() {
        let amps = vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)];
        assert!(matches!(StateVector::new(amps.clone()), Err(Error::NotNormalized { .. })));
        assert!((StateVector::normalized(amps).unwrap().norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_time_rejected() {
        let spec = spectral_decompose(&HermitianOperator::identity(2)).unwrap();
        assert!(evolve_state(&spec, &StateVector::ground(1), -1.0).is_err());
    }

    #[test]
    fn incomplete_family_is_an_error() {
        let z = HermitianOperator::from_terms(1, &[PauliTerm::single(1.0, 0, Axis::Z)]).unwrap();
        let family = ProjectorFamily::from_observable(&z, Execution::Sequential).unwrap();
        assert_eq!(family.len(), 2);
        let partial = family.subset(&[0]);
        assert!(matches!(
            projective_probabilities(&partial, &StateVector::ground(1)),
            Err(Error::IncompleteProjectors { .. })
        ));
    }

    #[test]
    fn degenerate_values_grouped() {
        let hb = crate::model::build_battery_hamiltonian(4, 1.0).unwrap();
        let family = ProjectorFamily::from_observable(&hb, Execution::Sequential).unwrap();
        assert_eq!(family.multiplicities(), vec![1, 4, 6, 4, 1]);
        assert_eq!(family.distinct_values(), &[-2.0, -1.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn orthogonal_states_have_zero_fidelity() {
        assert_eq!(fidelity(&StateVector::basis(2, 0), &StateVector::basis(2, 3)).unwrap(), 0.0);
        assert!(fidelity(&StateVector::basis(2, 0), &StateVector::basis(1, 0)).is_err());
    }
}

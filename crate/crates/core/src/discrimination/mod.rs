//! Minimum-error discrimination of pure-state ensembles with von Neumann
//! measurements.
//!
//! A measurement is an orthonormal basis `{f_i}`; outcome `i` is read as
//! "state `i` was sent". Outcomes with no matching state (when the basis is
//! larger than the ensemble) never count as a success.

mod bruteforce;
mod gso;
mod helstrom;
mod search;

pub use bruteforce::{bruteforce_vn_d2, BruteForce};
pub use gso::{gso_error, gso_measurement, GsoMeasurement};
pub use helstrom::{helstrom_success_from_overlap, helstrom_two};
pub use search::{ascend, optimal_vn_search, polish, AscentRun, SearchConfig};

use crate::ensembles::PureEnsemble;
use crate::error::{Error, Result};
use crate::matcore::{canonicalize_phase, is_unitary, ComplexMatrix, ComplexVector, StateVector};
use crate::tolerances::TOL_ORTHO;

/// Rank-one projective measurement, stored as a unitary whose columns are `f_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct VonNeumannMeasurement {
    basis: ComplexMatrix,
}

impl VonNeumannMeasurement {
    pub fn new(basis: ComplexMatrix) -> Result<Self> {
        if !basis.is_square() {
            return Err(Error::NotSquare { rows: basis.nrows(), cols: basis.ncols() });
        }
        if !is_unitary(&basis, TOL_ORTHO) {
            return Err(Error::InvalidMeasurement("basis is not orthonormal".into()));
        }
        Ok(Self { basis })
    }

    pub fn from_vectors(vectors: &[StateVector]) -> Result<Self> {
        Self::new(crate::matcore::columns(vectors)?)
    }

    pub fn computational(dim: usize) -> Self {
        Self { basis: ComplexMatrix::identity(dim, dim) }
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    pub fn vector(&self, i: usize) -> ComplexVector {
        self.basis.column(i).into_owned()
    }

    /// Same projectors, each vector rotated to the canonical global phase.
    pub fn with_canonical_phases(mut self) -> Self {
        for j in 0..self.basis.ncols() {
            let mut col = self.vector(j);
            canonicalize_phase(&mut col);
            self.basis.set_column(j, &col);
        }
        self
    }

    /// Exchanges the outcomes assigned to `i` and `j`.
    pub fn swapped(&self, i: usize, j: usize) -> Self {
        let mut basis = self.basis.clone();
        basis.swap_columns(i, j);
        Self { basis }
    }

    /// `{U f_i}`.
    pub fn rotated(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.nrows() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), found: u.nrows() });
        }
        Self::new(u * &self.basis)
    }

    /// `|<f_i|psi_i>|^2` for each state of `e`.
    pub fn assignment_probabilities(&self, e: &PureEnsemble) -> Result<Vec<f64>> {
        check_dims(e, self)?;
        Ok(e.states()
            .iter()
            .enumerate()
            .map(|(i, psi)| self.basis.column(i).dotc(psi.as_vector()).norm_sqr())
            .collect())
    }
}

fn check_dims(e: &PureEnsemble, m: &VonNeumannMeasurement) -> Result<()> {
    if e.dim() != m.dim() {
        return Err(Error::DimMismatch { expected: m.dim(), found: e.dim() });
    }
    if e.len() > m.dim() {
        return Err(Error::DimMismatch { expected: m.dim(), found: e.len() });
    }
    Ok(())
}

/// `sum_i eta_i |<f_i|psi_i>|^2`.
pub fn success_probability(e: &PureEnsemble, m: &VonNeumannMeasurement) -> Result<f64> {
    let probs = m.assignment_probabilities(e)?;
    let total: f64 = e.priors().iter().zip(probs).map(|(p, q)| p * q).sum();
    Ok(total.clamp(0.0, 1.0))
}

/// Which routine produced a [`DiscriminationResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Helstrom,
    Gso,
    Search,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Helstrom => "helstrom",
            Method::Gso => "gso",
            Method::Search => "search",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// Starting points tried, including the warm start.
    pub restarts_used: usize,
    /// Ascent iterations summed over all starts.
    pub iterations: usize,
    /// Starts that hit the iteration cap.
    pub unconverged: usize,
    /// Dimension the measurement acts on; larger than the state dimension
    /// when the ensemble had more states than dimensions.
    pub working_dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationResult {
    pub success: f64,
    pub error: f64,
    pub measurement: VonNeumannMeasurement,
    pub method: Method,
    pub diagnostics: Diagnostics,
}

impl DiscriminationResult {
    pub(crate) fn new(success: f64, measurement: VonNeumannMeasurement, method: Method, diagnostics: Diagnostics) -> Self {
        Self { success, error: 1.0 - success, measurement, method, diagnostics }
    }
}

/// Dimension the measurement has to act on: ensembles with more states than
/// dimensions are zero-padded so each state can get its own outcome.
pub(crate) fn working_ensemble(e: &PureEnsemble) -> PureEnsemble {
    if e.len() > e.dim() {
        e.embedded(e.len())
    } else {
        e.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn theta_pair(theta: f64) -> PureEnsemble {
        PureEnsemble::uniform(vec![
            StateVector::from_real(&[theta.cos(), theta.sin()]).unwrap(),
            StateVector::from_real(&[theta.cos(), -theta.sin()]).unwrap(),
        ])
        .unwrap()
    }

    fn hadamard_measurement() -> VonNeumannMeasurement {
        VonNeumannMeasurement::from_vectors(&[
            StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap(),
            StateVector::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn perfect_on_own_basis() {
        let basis: Vec<_> = (0..3).map(|i| StateVector::basis(3, i)).collect();
        let e = PureEnsemble::new(vec![0.2, 0.5, 0.3], basis).unwrap();
        let p = success_probability(&e, &VonNeumannMeasurement::computational(3)).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
    }

    #[test]
    fn theta_pair_with_hadamard_basis() {
        for theta in [0.1, 0.3, 0.7] {
            let p = success_probability(&theta_pair(theta), &hadamard_measurement()).unwrap();
            assert!((p - 0.5 * (1.0 + (2.0 * theta).sin())).abs() < 1e-14);
        }
    }

    #[test]
    fn orthogonal_assignment_scores_zero() {
        let e = PureEnsemble::new(vec![0.6, 0.4], vec![StateVector::basis(2, 0), StateVector::basis(2, 1)]).unwrap();
        let swapped = VonNeumannMeasurement::computational(2).swapped(0, 1);
        assert_eq!(success_probability(&e, &swapped).unwrap(), 0.0);
    }

    #[test]
    fn shorter_ensemble_leaves_null_outcomes() {
        let e = PureEnsemble::new(vec![1.0], vec![StateVector::basis(3, 2)]).unwrap();
        let m = VonNeumannMeasurement::computational(3);
        assert_eq!(success_probability(&e, &m).unwrap(), 0.0);
        assert_eq!(success_probability(&e, &m.swapped(0, 2)).unwrap(), 1.0);
    }

    #[test]
    fn dimension_errors() {
        let e = theta_pair(0.2);
        assert!(matches!(
            success_probability(&e, &VonNeumannMeasurement::computational(3)),
            Err(Error::DimMismatch { .. })
        ));
        let bad = ComplexMatrix::from_element(2, 2, crate::matcore::cr(1.0));
        assert!(matches!(VonNeumannMeasurement::new(bad), Err(Error::InvalidMeasurement(_))));
    }
}

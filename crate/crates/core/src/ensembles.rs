//! Pure-state ensembles and the maps between ensembles and density matrices.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::matcore::{
    columns, cr, gram, linear_independence, matrix_sqrt, polar_unitary, ComplexMatrix, DensityMatrix,
    Independence, StateVector,
};
use crate::tolerances::{TOL_ALIGN, TOL_RANK, TOL_TRACE, TOL_ZERO_PRIOR};

/// Unit-norm states `psi_i` with prior probabilities `eta_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureEnsemble {
    priors: Vec<f64>,
    states: Vec<StateVector>,
}

impl PureEnsemble {
    pub fn new(priors: Vec<f64>, states: Vec<StateVector>) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidEnsemble("no states".into()));
        }
        if priors.len() != states.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} priors for {} states",
                priors.len(),
                states.len()
            )));
        }
        if let Some((i, p)) = priors.iter().enumerate().find(|(_, p)| !(p.is_finite() && **p >= 0.0)) {
            return Err(Error::InvalidEnsemble(format!("prior {i} is {p}")));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > TOL_TRACE {
            return Err(Error::InvalidEnsemble(format!("priors sum to {total}")));
        }
        let d = states[0].dim();
        if let Some(i) = states.iter().position(|s| s.dim() != d) {
            return Err(Error::InvalidEnsemble(format!(
                "state {i} has dimension {}, expected {d}",
                states[i].dim()
            )));
        }
        Ok(Self { priors, states })
    }

    /// Equal priors.
    pub fn uniform(states: Vec<StateVector>) -> Result<Self> {
        let n = states.len().max(1);
        Self::new(vec![1.0 / n as f64; states.len()], states)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Dimension of the space the states live in.
    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    /// Columns `sqrt(eta_i) psi_i`.
    pub fn weighted_columns(&self) -> ComplexMatrix {
        let mut m = columns(&self.states).expect("validated dimensions");
        for (j, &p) in self.priors.iter().enumerate() {
            let s = p.sqrt();
            for z in m.column_mut(j).iter_mut() {
                *z *= s;
            }
        }
        m
    }

    pub fn gram(&self) -> ComplexMatrix {
        gram(&self.states).expect("validated dimensions")
    }

    pub fn independence(&self) -> Independence {
        linear_independence(&self.states, TOL_RANK).expect("validated dimensions")
    }

    /// Same ensemble with every state zero-padded into `dim` dimensions.
    pub fn embedded(&self, dim: usize) -> Self {
        Self {
            priors: self.priors.clone(),
            states: self.states.iter().map(|s| s.embedded(dim)).collect(),
        }
    }

    /// `{U psi_i, eta_i}`.
    pub fn rotated(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), found: u.nrows() });
        }
        let states = self
            .states
            .iter()
            .map(|s| StateVector::normalized(u * s.as_vector()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.priors.clone(), states)
    }
}

/// Density matrix with entries `sqrt(eta_i eta_j) <psi_i|psi_j>`.
#[derive(Debug, Clone, PartialEq)]
pub struct QsdState {
    pub matrix: DensityMatrix,
    pub source_gram: ComplexMatrix,
    pub source_priors: Vec<f64>,
}

/// The QSD-state `W^dagger W` where `W` has columns `sqrt(eta_i) psi_i`.
pub fn qsd_state(e: &PureEnsemble) -> Result<QsdState> {
    let w = e.weighted_columns();
    let matrix = DensityMatrix::new(w.adjoint() * w)?;
    Ok(QsdState { matrix, source_gram: e.gram(), source_priors: e.priors.clone() })
}

/// QSD-state of `{psi_i^(x n), eta_i}`, built from the entrywise `n`-th power of
/// the Gram matrix.
pub fn multicopy_qsd_state(e: &PureEnsemble, copies: u32) -> Result<QsdState> {
    if copies == 0 {
        return Err(Error::InvalidEnsemble("number of copies must be positive".into()));
    }
    if copies == 1 {
        return qsd_state(e);
    }
    let n = e.len();
    let g = e.gram();
    let mut powered = g.map(|z| z.powu(copies));
    for i in 0..n {
        powered[(i, i)] = cr(1.0);
    }
    let p = &e.priors;
    let rho = ComplexMatrix::from_fn(n, n, |i, j| powered[(i, j)] * (p[i] * p[j]).sqrt());
    Ok(QsdState { matrix: DensityMatrix::new(rho)?, source_gram: powered, source_priors: p.clone() })
}

/// Induced ensemble together with the basis indices it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedEnsemble {
    pub ensemble: PureEnsemble,
    /// `kept[k]` is the basis index of `ensemble.states()[k]`.
    pub kept: Vec<usize>,
    pub sqrt_rho: ComplexMatrix,
}

/// `{rho_ii, sqrt(rho) e_i / sqrt(rho_ii)}` with indices of vanishing weight removed.
pub fn induced_ensemble(rho: &DensityMatrix) -> Result<PureEnsemble> {
    Ok(induced_ensemble_indexed(rho)?.ensemble)
}

pub fn induced_ensemble_indexed(rho: &DensityMatrix) -> Result<InducedEnsemble> {
    let sqrt_rho = matrix_sqrt(rho.as_matrix())?;
    let mut priors = Vec::new();
    let mut states = Vec::new();
    let mut kept = Vec::new();
    for (i, eta) in rho.diagonal().into_iter().enumerate() {
        if eta <= TOL_ZERO_PRIOR {
            continue;
        }
        let column: DVector<_> = sqrt_rho.column(i).into_owned();
        states.push(StateVector::normalized(column)?);
        priors.push(eta);
        kept.push(i);
    }
    let ensemble = PureEnsemble::new(priors, states)?;
    Ok(InducedEnsemble { ensemble, kept, sqrt_rho })
}

/// Unitary `U` with `a_i = U b_i` for families of equal Gram matrix.
///
/// With `conjugate` set, `b` is conjugated entrywise first, which covers
/// families whose Gram matrix is the complex conjugate of `a`'s. When the
/// Gram matrix is singular the unitary is not unique; only the mapping
/// residual is guaranteed.
pub fn align_unitary(a: &[StateVector], b: &[StateVector], conjugate: bool) -> Result<ComplexMatrix> {
    if a.is_empty() {
        return Err(Error::Empty);
    }
    if a.len() != b.len() {
        return Err(Error::DimMismatch { expected: a.len(), found: b.len() });
    }
    let b: Vec<StateVector> = if conjugate { b.iter().map(StateVector::conjugate).collect() } else { b.to_vec() };
    let (ma, mb) = (columns(a)?, columns(&b)?);
    if ma.nrows() != mb.nrows() {
        return Err(Error::DimMismatch { expected: ma.nrows(), found: mb.nrows() });
    }
    let deviation = (ma.adjoint() * &ma - mb.adjoint() * &mb).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if deviation > TOL_ALIGN {
        return Err(Error::GramMismatch { deviation });
    }
    let u = polar_unitary(&(&ma * mb.adjoint()))?;
    let residual = mapping_residual(&ma, &mb, &u);
    if residual > TOL_ALIGN {
        return Err(Error::GramMismatch { deviation: residual });
    }
    Ok(u)
}

/// `max_i ||a_i - U b_i||` for column families.
pub fn mapping_residual(a: &ComplexMatrix, b: &ComplexMatrix, u: &ComplexMatrix) -> f64 {
    let diff = a - u * b;
    (0..diff.ncols()).map(|j| diff.column(j).norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::is_unitary;
    use crate::random::{haar_unitary, random_density_matrix, random_priors, random_state, seeded};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn real(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows.len(), rows[0].len(), |i, j| cr(rows[i][j]))
    }

    fn theta_pair(theta: f64) -> PureEnsemble {
        PureEnsemble::uniform(vec![
            StateVector::from_real(&[theta.cos(), theta.sin()]).unwrap(),
            StateVector::from_real(&[theta.cos(), -theta.sin()]).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn ensemble_validation() {
        let s = vec![StateVector::basis(2, 0), StateVector::basis(2, 1)];
        assert!(PureEnsemble::new(vec![0.5], s.clone()).is_err());
        assert!(PureEnsemble::new(vec![0.7, 0.7], s.clone()).is_err());
        assert!(PureEnsemble::new(vec![1.5, -0.5], s.clone()).is_err());
        assert!(PureEnsemble::new(vec![], vec![]).is_err());
        let mixed = vec![StateVector::basis(2, 0), StateVector::basis(3, 1)];
        assert!(PureEnsemble::new(vec![0.5, 0.5], mixed).is_err());
        assert!(PureEnsemble::new(vec![0.25, 0.75], s).is_ok());
    }

    #[test]
    fn qsd_state_of_theta_pair() {
        let theta = 0.4_f64;
        let c2 = (2.0 * theta).cos();
        let q = qsd_state(&theta_pair(theta)).unwrap();
        let want = real(&[&[0.5, 0.5 * c2], &[0.5 * c2, 0.5]]);
        assert!((q.matrix.as_matrix() - want).norm() < 1e-15);
    }

    #[test]
    fn qsd_state_orthonormal_and_identical() {
        let basis: Vec<_> = (0..3).map(|i| StateVector::basis(3, i)).collect();
        let eta = vec![0.2, 0.3, 0.5];
        let q = qsd_state(&PureEnsemble::new(eta.clone(), basis).unwrap()).unwrap();
        assert!(q.matrix.is_diagonal(0.0));
        for (x, y) in q.matrix.diagonal().iter().zip(&eta) {
            assert!((x - y).abs() < 1e-15);
        }

        let psi = random_state(&mut seeded(1), 3);
        let q = qsd_state(&PureEnsemble::new(eta.clone(), vec![psi.clone(), psi.clone(), psi]).unwrap()).unwrap();
        let root = DVector::from_iterator(3, eta.iter().map(|p| cr(p.sqrt())));
        assert!((q.matrix.as_matrix() - &root * root.transpose()).norm() < 1e-14);
    }

    #[test]
    fn induced_of_diagonal_and_plus() {
        let e = induced_ensemble(&DensityMatrix::maximally_mixed(2)).unwrap();
        assert_eq!(e.priors(), &[0.5, 0.5]);
        assert!((e.states()[0].as_vector() - StateVector::basis(2, 0).as_vector()).norm() < 1e-15);
        assert!((e.states()[1].as_vector() - StateVector::basis(2, 1).as_vector()).norm() < 1e-15);

        let plus = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
        let e = induced_ensemble(&DensityMatrix::pure(&plus)).unwrap();
        assert!((e.priors()[0] - 0.5).abs() < 1e-15 && (e.priors()[1] - 0.5).abs() < 1e-15);
        for s in e.states() {
            assert!((s.inner(&plus).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn induced_of_qsd_state_has_source_overlaps() {
        let theta = 0.3_f64;
        let q = qsd_state(&theta_pair(theta)).unwrap();
        let e = induced_ensemble(&q.matrix).unwrap();
        assert_eq!(e.len(), 2);
        assert!((e.priors()[0] - 0.5).abs() < 1e-15);
        let overlap = e.states()[0].inner(&e.states()[1]);
        assert!((overlap - cr((2.0 * theta).cos())).norm() < 1e-14);
    }

    #[test]
    fn induced_drops_empty_indices() {
        let rho = DensityMatrix::from_diagonal(&[0.4, 0.0, 0.6]).unwrap();
        let induced = induced_ensemble_indexed(&rho).unwrap();
        assert_eq!(induced.kept, vec![0, 2]);
        assert_eq!(induced.ensemble.len(), 2);
        assert_eq!(induced.ensemble.dim(), 3);
    }

    #[test]
    fn round_trip_full_rank() {
        let mut rng = seeded(11);
        for d in 2..=6 {
            let rho = random_density_matrix(&mut rng, d);
            let back = qsd_state(&induced_ensemble(&rho).unwrap()).unwrap();
            assert!((back.matrix.as_matrix() - rho.as_matrix()).norm() < 1e-8);
        }
    }

    #[test]
    fn align_worked_example() {
        // Induced states of the equal-prior theta pair, mapped back onto the pair.
        let theta = 0.35_f64;
        let (cs, sn) = (theta.cos().abs(), theta.sin().abs());
        let primed = vec![
            StateVector::from_real(&[(cs + sn) * FRAC_1_SQRT_2, (cs - sn) * FRAC_1_SQRT_2]).unwrap(),
            StateVector::from_real(&[(cs - sn) * FRAC_1_SQRT_2, (cs + sn) * FRAC_1_SQRT_2]).unwrap(),
        ];
        let target = theta_pair(theta);
        let u = align_unitary(target.states(), &primed, false).unwrap();
        let want = real(&[&[1.0, 1.0], &[1.0, -1.0]]).scale(FRAC_1_SQRT_2);
        assert!((u - want).norm() < 1e-12);
    }

    #[test]
    fn align_identical_and_rotated() {
        let mut rng = seeded(5);
        let a: Vec<_> = (0..3).map(|_| random_state(&mut rng, 4)).collect();
        let u = align_unitary(&a, &a, false).unwrap();
        assert!(mapping_residual(&columns(&a).unwrap(), &columns(&a).unwrap(), &u) < 1e-12);

        let v = haar_unitary(&mut rng, 4);
        let b: Vec<_> = a.iter().map(|s| StateVector::new(&v * s.as_vector()).unwrap()).collect();
        let u = align_unitary(&a, &b, false).unwrap();
        assert!(is_unitary(&u, 1e-10));
        for (ai, bi) in a.iter().zip(&b) {
            assert!((ai.as_vector() - &u * bi.as_vector()).norm() < 1e-8);
        }
    }

    #[test]
    fn align_conjugate_branch() {
        let mut rng = seeded(6);
        let a: Vec<_> = (0..3).map(|_| random_state(&mut rng, 3)).collect();
        let v = haar_unitary(&mut rng, 3);
        // b_i = conj(V a_i) has Gram conj(Gram(a)).
        let b: Vec<_> = a.iter().map(|s| StateVector::new((&v * s.as_vector()).conjugate()).unwrap()).collect();
        assert!(matches!(align_unitary(&a, &b, false), Err(Error::GramMismatch { .. })));
        let u = align_unitary(&a, &b, true).unwrap();
        for (ai, bi) in a.iter().zip(&b) {
            assert!((ai.as_vector() - &u * bi.conjugate().as_vector()).norm() < 1e-8);
        }
    }

    #[test]
    fn align_singular_gram() {
        let mut rng = seeded(8);
        let x = random_state(&mut rng, 3);
        let y = random_state(&mut rng, 3);
        let z = StateVector::normalized(x.as_vector() + y.as_vector()).unwrap();
        let a = vec![x, y, z];
        let v = haar_unitary(&mut rng, 3);
        let b: Vec<_> = a.iter().map(|s| StateVector::new(v.adjoint() * s.as_vector()).unwrap()).collect();
        let u = align_unitary(&a, &b, false).unwrap();
        assert!(mapping_residual(&columns(&a).unwrap(), &columns(&b).unwrap(), &u) < 1e-8);
    }

    #[test]
    fn multicopy_cases() {
        let mut rng = seeded(9);
        let states: Vec<_> = (0..3).map(|_| random_state(&mut rng, 3)).collect();
        let e = PureEnsemble::new(random_priors(&mut rng, 3), states).unwrap();
        let one = multicopy_qsd_state(&e, 1).unwrap();
        assert!((one.matrix.as_matrix() - qsd_state(&e).unwrap().matrix.as_matrix()).norm() < 1e-14);

        let theta = 0.2_f64;
        let c2 = (2.0 * theta).cos();
        let two = multicopy_qsd_state(&theta_pair(theta), 2).unwrap();
        let want = real(&[&[0.5, 0.5 * c2 * c2], &[0.5 * c2 * c2, 0.5]]);
        assert!((two.matrix.as_matrix() - want).norm() < 1e-15);

        let basis: Vec<_> = (0..3).map(|i| StateVector::basis(3, i)).collect();
        let ortho = PureEnsemble::new(vec![0.1, 0.2, 0.7], basis).unwrap();
        assert!(multicopy_qsd_state(&ortho, 7).unwrap().matrix.is_diagonal(0.0));
        assert!(multicopy_qsd_state(&ortho, 0).is_err());
    }
}

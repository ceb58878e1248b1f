//! Optimal measurement for a linearly independent ensemble, obtained by
//! solving the coherence problem of its QSD-state and rotating the answer
//! back.
//!
//! The induced ensemble of the QSD-state has the input's priors and Gram
//! matrix, so a unitary `U` maps its states onto the input states, and `U`
//! carries its optimal measurement to an optimal measurement for the input.

use crate::coherence::{geometric_coherence, solver_measurement_space, CoherenceConfig};
use crate::discrimination::{success_probability, SearchConfig, VonNeumannMeasurement};
use crate::ensembles::{align_unitary, induced_ensemble_indexed, qsd_state, PureEnsemble, QsdState};
use crate::error::{Error, Result};
use crate::matcore::{fidelity, ComplexMatrix, DensityMatrix};
use crate::tolerances::{TOL_NUM, TOL_ORTHO, TOL_RECOVERY, TOL_ZERO_PRIOR};

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    pub measurement: VonNeumannMeasurement,
    pub success: f64,
    pub qsd: QsdState,
    /// Maps the induced states of the QSD-state onto the input states.
    pub alignment: ComplexMatrix,
    /// `|<f_i|psi_i>|^2` for every input state.
    pub certificate: Vec<f64>,
    /// Fidelity weights `mu_i` read off the measurement found for the QSD-state.
    pub weights: Vec<f64>,
    /// `|F(rho, diag(mu)) - F|`, where `F` is the fidelity the solver reported.
    pub weight_residual: f64,
}

fn check_recoverable(e: &PureEnsemble) -> Result<()> {
    if let Some(p) = e.priors().iter().find(|&&p| p <= TOL_ZERO_PRIOR) {
        return Err(Error::InvalidEnsemble(format!("prior {p:e} is not positive")));
    }
    let independence = e.independence();
    if !independence.independent {
        return Err(Error::DependentEnsemble { rank: independence.rank, len: e.len() });
    }
    Ok(())
}

/// Runs the four steps: QSD-state and its induced ensemble, the aligning
/// unitary, the optimal measurement of the induced ensemble, and the
/// rotation back.
pub fn recover_optimal_measurement(e: &PureEnsemble, config: &SearchConfig) -> Result<RecoveryResult> {
    check_recoverable(e)?;
    let (n, d) = (e.len(), e.dim());

    let qsd = qsd_state(e)?;
    let induced = induced_ensemble_indexed(&qsd.matrix)?;
    let padded: Vec<_> = induced.ensemble.states().iter().map(|s| s.embedded(d)).collect();
    let u = align_unitary(e.states(), &padded, false)?;

    let solution = solver_measurement_space(&qsd.matrix, config)?;
    let overlaps: Vec<f64> = (0..n)
        .map(|i| solution.measurement.basis().column(i).dotc(&induced.sqrt_rho.column(i)).norm_sqr())
        .collect();
    let total: f64 = overlaps.iter().sum();
    let weights: Vec<f64> = overlaps.iter().map(|w| w / total).collect();
    let weight_residual = (fidelity(&qsd.matrix, &DensityMatrix::from_diagonal(&weights)?)? - solution.fidelity).abs();

    let mut lifted = ComplexMatrix::identity(d, d);
    lifted.view_mut((0, 0), (n, n)).copy_from(solution.measurement.basis());
    let measurement = VonNeumannMeasurement::new(&u * lifted)?.with_canonical_phases();
    let success = success_probability(e, &measurement)?;
    let certificate = measurement.assignment_probabilities(e)?;
    Ok(RecoveryResult { measurement, success, qsd, alignment: u, certificate, weights, weight_residual })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    fn new(name: &'static str, residual: f64, tolerance: f64) -> Self {
        Self { name, passed: residual <= tolerance, residual, tolerance }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    /// Set when the ensemble cannot be recovered at all; no checks run then.
    pub error: Option<Error>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.passed)
    }
}

/// Re-derives everything a [`RecoveryResult`] claims from the ensemble.
///
/// Checks the reported success against the measurement, the measurement's
/// orthonormality, the error against the geometric coherence of the
/// QSD-state (computed afresh), and the fidelity weights.
pub fn verify_recovery(e: &PureEnsemble, r: &RecoveryResult, config: &CoherenceConfig) -> VerificationReport {
    if let Err(err) = check_recoverable(e) {
        return VerificationReport { checks: Vec::new(), error: Some(err) };
    }
    let run = || -> Result<Vec<Check>> {
        let recomputed = success_probability(e, &r.measurement)?;
        let f = r.measurement.basis();
        let d = f.nrows();
        let gram_error = (f.adjoint() * f - ComplexMatrix::identity(d, d)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        let qsd = qsd_state(e)?;
        let c_g = geometric_coherence(&qsd.matrix, config)?.c_g;
        Ok(vec![
            Check::new("success", (recomputed - r.success).abs(), TOL_NUM),
            Check::new("orthonormality", gram_error, TOL_ORTHO),
            Check::new("coherence_equality", ((1.0 - recomputed) - c_g).abs(), TOL_RECOVERY),
            Check::new("fidelity_weights", r.weight_residual, TOL_RECOVERY),
        ])
    };
    match run() {
        Ok(checks) => VerificationReport { checks, error: None },
        Err(err) => VerificationReport { checks: Vec::new(), error: Some(err) },
    }
}

/// Recovery followed by verification; a failed recovery ends up in the report.
pub fn recover_and_verify(e: &PureEnsemble, config: &CoherenceConfig) -> (Option<RecoveryResult>, VerificationReport) {
    match recover_optimal_measurement(e, &config.search) {
        Ok(r) => {
            let report = verify_recovery(e, &r, config);
            (Some(r), report)
        }
        Err(err) => (None, VerificationReport { checks: Vec::new(), error: Some(err) }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrimination::{helstrom_two, optimal_vn_search};
    use crate::matcore::StateVector;
    use crate::random::{random_priors, random_state, seeded};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn theta_pair(theta: f64) -> PureEnsemble {
        PureEnsemble::uniform(vec![
            StateVector::from_real(&[theta.cos(), theta.sin()]).unwrap(),
            StateVector::from_real(&[theta.cos(), -theta.sin()]).unwrap(),
        ])
        .unwrap()
    }

    fn random_ensemble(seed: u64, n: usize, d: usize) -> PureEnsemble {
        let mut rng = seeded(seed);
        let states: Vec<_> = (0..n).map(|_| random_state(&mut rng, d)).collect();
        PureEnsemble::new(random_priors(&mut rng, n), states).unwrap()
    }

    #[test]
    fn theta_pair_recovers_the_worked_measurement() {
        for theta in [PI / 12.0, PI / 8.0, PI / 6.0, PI / 4.0] {
            let e = theta_pair(theta);
            let r = recover_optimal_measurement(&e, &SearchConfig::default()).unwrap();
            let c2 = (2.0 * theta).cos();
            assert!((r.success - 0.5 * (1.0 + (1.0 - c2 * c2).sqrt())).abs() < 1e-9);
            let f1 = StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap();
            let f2 = StateVector::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]).unwrap();
            for (i, f) in [f1, f2].iter().enumerate() {
                let want = f.inner(&e.states()[i]).norm();
                let got = r.measurement.vector(i).dotc(e.states()[i].as_vector()).norm();
                assert!((want - got).abs() < 1e-7, "theta {theta}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn orthonormal_ensemble_is_measured_in_its_own_basis() {
        let states: Vec<_> = [2, 0, 1].iter().map(|&i| StateVector::basis(3, i)).collect();
        let e = PureEnsemble::new(vec![0.5, 0.3, 0.2], states).unwrap();
        let r = recover_optimal_measurement(&e, &SearchConfig::default()).unwrap();
        assert!((r.success - 1.0).abs() < 1e-12);
        for p in &r.certificate {
            assert!((p - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn agrees_with_direct_search() {
        for seed in 0..5 {
            let e = random_ensemble(seed, 3, 3);
            let r = recover_optimal_measurement(&e, &SearchConfig::default()).unwrap();
            let direct = optimal_vn_search(&e, &SearchConfig::default()).unwrap();
            assert!((r.success - direct.success).abs() < 1e-6);
            assert!((r.success - success_probability(&e, &r.measurement).unwrap()).abs() < 1e-12);
            assert!(r.weight_residual < 1e-6);
        }
    }

    #[test]
    fn fewer_states_than_dimensions() {
        let e = random_ensemble(8, 2, 4);
        let r = recover_optimal_measurement(&e, &SearchConfig::default()).unwrap();
        assert_eq!(r.measurement.dim(), 4);
        assert!((r.success - helstrom_two(&e).unwrap().success).abs() < 1e-8);
    }

    #[test]
    fn valid_result_verifies() {
        let e = random_ensemble(3, 3, 3);
        let (r, report) = recover_and_verify(&e, &CoherenceConfig::default());
        assert!(r.is_some());
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.checks.len(), 4);
        assert!(report.checks.iter().all(|c| c.residual < 1e-6));
    }

    #[test]
    fn swapped_measurement_fails_the_success_check() {
        let e = random_ensemble(4, 3, 3);
        let mut r = recover_optimal_measurement(&e, &SearchConfig::default()).unwrap();
        r.measurement = r.measurement.swapped(0, 1);
        let report = verify_recovery(&e, &r, &CoherenceConfig::default());
        assert!(!report.passed());
        assert!(!report.checks.iter().find(|c| c.name == "success").unwrap().passed);
    }

    #[test]
    fn dependent_ensembles_are_refused() {
        let e = random_ensemble(5, 4, 3);
        assert!(matches!(
            recover_optimal_measurement(&e, &SearchConfig::default()),
            Err(Error::DependentEnsemble { rank: 3, len: 4 })
        ));
        let (r, report) = recover_and_verify(&e, &CoherenceConfig::default());
        assert!(r.is_none());
        assert!(matches!(report.error, Some(Error::DependentEnsemble { .. })));
        assert!(!report.passed());
    }
}

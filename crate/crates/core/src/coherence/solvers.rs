//! Numerical maximization of the incoherent fidelity `F(rho)`.
//!
//! Both solvers maximize `sum_i |<f_i| sqrt(rho) |i>|^2`, one over
//! orthonormal bases `{f_i}` and the other over diagonal states `mu` through
//! `||sqrt(rho) sqrt(mu)||_1^2`. At a common optimum the weights are
//! `mu_i = |<f_i| sqrt(rho) |i>|^2 / F`.

use crate::discrimination::{optimal_vn_search, Diagnostics, SearchConfig, VonNeumannMeasurement};
use crate::ensembles::induced_ensemble_indexed;
use crate::error::{Error, Result};
use crate::matcore::{matrix_sqrt, svd, ComplexMatrix, DensityMatrix};
use crate::random::{random_priors, stream};

/// Offset separating the state-space random streams from the search streams.
const STATE_STREAM_BASE: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSpaceSolution {
    pub fidelity: f64,
    /// Column `i` pairs with basis index `i`.
    pub measurement: VonNeumannMeasurement,
    pub diagnostics: Diagnostics,
}

/// Maximizes over measurements by discriminating the induced ensemble.
pub fn solver_measurement_space(rho: &DensityMatrix, config: &SearchConfig) -> Result<MeasurementSpaceSolution> {
    let induced = induced_ensemble_indexed(rho)?;
    let r = optimal_vn_search(&induced.ensemble, config)?;
    let measurement = realign_measurement(&r.measurement, &induced.kept)?;
    Ok(MeasurementSpaceSolution { fidelity: r.success, measurement, diagnostics: r.diagnostics })
}

/// Moves column `k` of `m` to column `kept[k]`; indices missing from `kept`
/// take the remaining columns in order.
pub(crate) fn realign_measurement(m: &VonNeumannMeasurement, kept: &[usize]) -> Result<VonNeumannMeasurement> {
    let d = m.dim();
    let mut basis = ComplexMatrix::zeros(d, d);
    let mut used = vec![false; d];
    for (k, &i) in kept.iter().enumerate() {
        basis.set_column(i, &m.basis().column(k));
        used[i] = true;
    }
    let mut spare = kept.len();
    for (i, _) in used.iter().enumerate().filter(|(_, &u)| !u) {
        basis.set_column(i, &m.basis().column(spare));
        spare += 1;
    }
    VonNeumannMeasurement::new(basis)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StateSpaceDiagnostics {
    pub starts: usize,
    pub iterations: usize,
    pub unconverged: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceSolution {
    pub fidelity: f64,
    /// Diagonal of the best incoherent state found.
    pub weights: Vec<f64>,
    /// Polar factor of `sqrt(rho) sqrt(diag(weights))`.
    pub measurement: VonNeumannMeasurement,
    pub diagnostics: StateSpaceDiagnostics,
}

struct Evaluation {
    value: f64,
    basis: ComplexMatrix,
    next: Vec<f64>,
}

fn evaluate(sqrt_rho: &ComplexMatrix, mu: &[f64]) -> Result<Evaluation> {
    let mut x = sqrt_rho.clone();
    for (j, &w) in mu.iter().enumerate() {
        x.column_mut(j).scale_mut(w.max(0.0).sqrt());
    }
    let decomposition = svd(&x)?;
    let root: f64 = decomposition.singular_values.iter().sum();
    let basis = decomposition.u * decomposition.v_t;
    let overlaps: Vec<f64> = (0..mu.len()).map(|i| basis.column(i).dotc(&sqrt_rho.column(i)).norm_sqr()).collect();
    let total: f64 = overlaps.iter().sum();
    let next = overlaps.iter().map(|w| w / total).collect();
    Ok(Evaluation { value: root * root, basis, next })
}

/// Maximizes `||sqrt(rho) sqrt(mu)||_1^2` over the simplex by alternating the
/// polar factor and the reweighting `mu_i ~ |<f_i| sqrt(rho) |i>|^2`.
///
/// Starts from `mu ~ (sqrt(rho))_ii^2`, `diag(rho)`, uniform weights, and
/// `config.restarts` random points. The first start already certifies
/// `F >= sum_i (sqrt(rho))_ii^2`. Fails only if every start hits the cap.
pub fn solver_state_space(rho: &DensityMatrix, config: &SearchConfig) -> Result<StateSpaceSolution> {
    let d = rho.dim();
    let sqrt_rho = matrix_sqrt(rho.as_matrix())?;
    let root_diag: Vec<f64> = (0..d).map(|i| sqrt_rho[(i, i)].re.powi(2)).collect();
    let root_total: f64 = root_diag.iter().sum();
    let mut starts = vec![root_diag.iter().map(|w| w / root_total).collect::<Vec<_>>(), rho.diagonal(), vec![1.0 / d as f64; d]];
    for r in 0..config.restarts {
        starts.push(random_priors(&mut stream(config.seed, STATE_STREAM_BASE + r as u64), d));
    }

    let mut diagnostics = StateSpaceDiagnostics { starts: starts.len(), ..Default::default() };
    let mut best: Option<(Evaluation, Vec<f64>)> = None;
    for mut mu in starts {
        let mut current = evaluate(&sqrt_rho, &mu)?;
        let mut converged = false;
        for _ in 0..config.max_iters {
            diagnostics.iterations += 1;
            let candidate = evaluate(&sqrt_rho, &current.next)?;
            let gain = candidate.value - current.value;
            if gain > 0.0 {
                mu = current.next.clone();
                current = candidate;
            }
            if gain < config.tol_opt {
                converged = true;
                break;
            }
        }
        if !converged {
            diagnostics.unconverged += 1;
        }
        // Ties go to the earlier start, so flat optima report the deterministic weights.
        if best.as_ref().map_or(true, |(b, _)| current.value > b.value + config.tol_opt) {
            best = Some((current, mu));
        }
    }
    if diagnostics.unconverged == diagnostics.starts {
        return Err(Error::NoConvergence { what: "state-space fidelity solver", iterations: config.max_iters });
    }
    let (best, weights) = best.expect("at least one start ran");
    Ok(StateSpaceSolution {
        fidelity: best.value.clamp(0.0, 1.0),
        weights,
        measurement: VonNeumannMeasurement::new(best.basis)?.with_canonical_phases(),
        diagnostics,
    })
}

/// Diagonal state with weights `|<f_i| sqrt(rho) |i>|^2`, normalized.
///
/// For the optimal measurement this is the closest incoherent state; for any
/// other measurement its fidelity with `rho` is at least the measurement's
/// objective value.
pub fn closest_incoherent_state(rho: &DensityMatrix, measurement: &VonNeumannMeasurement) -> Result<DensityMatrix> {
    if measurement.dim() != rho.dim() {
        return Err(Error::InvalidMeasurement(format!(
            "measurement acts on dimension {}, state has dimension {}",
            measurement.dim(),
            rho.dim()
        )));
    }
    let sqrt_rho = matrix_sqrt(rho.as_matrix())?;
    let weights: Vec<f64> =
        (0..rho.dim()).map(|i| measurement.basis().column(i).dotc(&sqrt_rho.column(i)).norm_sqr()).collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidMeasurement("measurement has no overlap with the state".into()));
    }
    DensityMatrix::from_diagonal(&weights.iter().map(|w| w / total).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{fidelity, StateVector};
    use crate::random::{random_density_matrix, seeded};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn qubit_closed_form(rho: &DensityMatrix) -> f64 {
        0.5 * (1.0 + (1.0 - 4.0 * rho.get(0, 1).norm_sqr()).sqrt())
    }

    fn plus() -> DensityMatrix {
        DensityMatrix::pure(&StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap().with_canonical_phase())
    }

    #[test]
    fn diagonal_states_are_fixed() {
        let rho = DensityMatrix::from_diagonal(&[0.1, 0.6, 0.3]).unwrap();
        let cfg = SearchConfig::default();
        assert!((solver_measurement_space(&rho, &cfg).unwrap().fidelity - 1.0).abs() < 1e-12);
        let s = solver_state_space(&rho, &cfg).unwrap();
        assert!((s.fidelity - 1.0).abs() < 1e-12);
        for (w, p) in s.weights.iter().zip([0.1, 0.6, 0.3]) {
            assert!((w - p).abs() < 1e-9);
        }
        let cis = closest_incoherent_state(&rho, &VonNeumannMeasurement::computational(3)).unwrap();
        assert!((cis.as_matrix() - rho.as_matrix()).norm() < 1e-12);
    }

    #[test]
    fn plus_state() {
        let s = solver_state_space(&plus(), &SearchConfig::default()).unwrap();
        assert!((s.fidelity - 0.5).abs() < 1e-12);
        assert!((s.weights[0] - 0.5).abs() < 1e-9 && (s.weights[1] - 0.5).abs() < 1e-9, "{:?}", s);
        let m = solver_measurement_space(&plus(), &SearchConfig::default()).unwrap();
        assert!((m.fidelity - 0.5).abs() < 1e-12);
    }

    #[test]
    fn worked_measurement_on_the_plus_state() {
        // Every diagonal state is closest to |+><+|; the formula picks the
        // one the measurement singles out.
        let h = FRAC_1_SQRT_2;
        let m = VonNeumannMeasurement::from_vectors(&[
            StateVector::from_real(&[h, h]).unwrap(),
            StateVector::from_real(&[h, -h]).unwrap(),
        ])
        .unwrap();
        let cis = closest_incoherent_state(&plus(), &m).unwrap();
        assert!((cis.get(0, 0).re - 1.0).abs() < 1e-12);
        assert!((fidelity(&plus(), &cis).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn theta_state_cis_is_maximally_mixed() {
        for theta in [0.2_f64, 0.5, 0.7] {
            let c2 = (2.0 * theta).cos();
            let rho = DensityMatrix::new(ComplexMatrix::from_fn(2, 2, |i, j| {
                crate::matcore::cr(if i == j { 0.5 } else { 0.5 * c2 })
            }))
            .unwrap();
            let m = solver_measurement_space(&rho, &SearchConfig::default()).unwrap();
            let cis = closest_incoherent_state(&rho, &m.measurement).unwrap();
            let dev = (cis.as_matrix() - DensityMatrix::maximally_mixed(2).as_matrix()).norm();
            assert!(dev < 1e-6, "{dev}");
            let s = solver_state_space(&rho, &SearchConfig::default()).unwrap();
            assert!((s.weights[0] - 0.5).abs() < 1e-6, "{:?}", s);
        }
    }

    #[test]
    fn qubits_match_the_closed_form() {
        let mut rng = seeded(21);
        let cfg = SearchConfig::default();
        for _ in 0..30 {
            let rho = random_density_matrix(&mut rng, 2);
            let want = qubit_closed_form(&rho);
            let m = solver_measurement_space(&rho, &cfg).unwrap();
            let s = solver_state_space(&rho, &cfg).unwrap();
            assert!((m.fidelity - want).abs() < 1e-7, "{} vs {want}", m.fidelity);
            assert!((s.fidelity - want).abs() < 1e-7, "{} vs {want}", s.fidelity);
            let cis = closest_incoherent_state(&rho, &m.measurement).unwrap();
            assert!((fidelity(&rho, &cis).unwrap() - want).abs() < 1e-7);
        }
    }

    #[test]
    fn solvers_agree_in_higher_dimensions() {
        let mut rng = seeded(22);
        let cfg = SearchConfig::default();
        for d in [3, 4, 5] {
            for _ in 0..5 {
                let rho = random_density_matrix(&mut rng, d);
                let m = solver_measurement_space(&rho, &cfg).unwrap();
                let s = solver_state_space(&rho, &cfg).unwrap();
                assert!((m.fidelity - s.fidelity).abs() < 1e-6, "d={d}: {} vs {}", m.fidelity, s.fidelity);
                let cis = DensityMatrix::from_diagonal(&s.weights).unwrap();
                assert!((fidelity(&rho, &cis).unwrap() - s.fidelity).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn state_space_is_monotone_from_every_start() {
        let rho = random_density_matrix(&mut seeded(23), 4);
        let sqrt_rho = matrix_sqrt(rho.as_matrix()).unwrap();
        let mut current = evaluate(&sqrt_rho, &[0.25; 4]).unwrap();
        for _ in 0..50 {
            let next = evaluate(&sqrt_rho, &current.next).unwrap();
            assert!(next.value >= current.value - 1e-14);
            current = next;
        }
    }

    #[test]
    fn dropped_indices_keep_their_slots() {
        let psi = StateVector::from_real(&[0.6, 0.0, 0.8]).unwrap();
        let rho = DensityMatrix::pure(&psi);
        let m = solver_measurement_space(&rho, &SearchConfig::default()).unwrap();
        assert!((m.fidelity - 0.64).abs() < 1e-9);
        let cis = closest_incoherent_state(&rho, &m.measurement).unwrap();
        assert!(cis.get(1, 1).re.abs() < 1e-12);
        assert!((fidelity(&rho, &cis).unwrap() - 0.64).abs() < 1e-9);
    }

    #[test]
    fn wrong_dimension_is_rejected() {
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(
            closest_incoherent_state(&rho, &VonNeumannMeasurement::computational(2)),
            Err(Error::InvalidMeasurement(_))
        ));
    }
}

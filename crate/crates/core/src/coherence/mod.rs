//! Geometric coherence `C_g(rho) = 1 - max_sigma F(rho, sigma)` over diagonal
//! `sigma`, its closest incoherent state, and bounds on it.

mod solvers;
mod xstate;

pub use solvers::{
    closest_incoherent_state, solver_measurement_space, solver_state_space, MeasurementSpaceSolution,
    StateSpaceDiagnostics, StateSpaceSolution,
};
pub use xstate::{block_success, detect_generalized_x, x_state_fidelity, x_state_measurement, XBlockStructure};

use crate::discrimination::{gso_error, optimal_vn_search, Diagnostics, SearchConfig, VonNeumannMeasurement};
use crate::ensembles::induced_ensemble_indexed;
use crate::error::{Error, Result};
use crate::matcore::{matrix_sqrt, DensityMatrix};
use crate::tolerances::TOL_XSOLVER;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceConfig {
    /// Settings of the measurement-space solver.
    pub search: SearchConfig,
    /// Random starts of the state-space solver, on top of its three fixed ones.
    pub state_restarts: usize,
    /// Iteration cap per start of the state-space solver. Optima with a
    /// vanishing weight are approached slowly, so this is well above the
    /// measurement-space cap.
    pub state_max_iters: usize,
    /// Skip the closed forms and always run both numerical solvers.
    pub force_numerical: bool,
}

impl CoherenceConfig {
    /// Settings handed to [`solver_state_space`].
    pub fn state_search(&self) -> SearchConfig {
        SearchConfig { restarts: self.state_restarts, max_iters: self.state_max_iters, ..self.search }
    }
}

impl Default for CoherenceConfig {
    fn default() -> Self {
        Self { search: SearchConfig::default(), state_restarts: 5, state_max_iters: 5000, force_numerical: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherenceMethod {
    QubitClosedForm,
    XBlock,
    Numerical,
}

impl CoherenceMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            CoherenceMethod::QubitClosedForm => "qubit_closed_form",
            CoherenceMethod::XBlock => "x_block",
            CoherenceMethod::Numerical => "numerical",
        }
    }
}

/// Upper bounds on `C_g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    /// `1 - max_i rho_ii`.
    pub l1: f64,
    /// `1 - sum_i (sqrt(rho))_ii^2`.
    pub l2: f64,
    /// Gram-Schmidt error of the induced ensemble.
    pub l3: f64,
    /// `C_l1(rho) / (d' - 1)` over the `d'` populated levels; only when the
    /// induced ensemble is linearly independent.
    pub l4: Option<f64>,
}

impl Bounds {
    pub fn tightest(&self) -> f64 {
        self.l4.into_iter().fold(self.l1.min(self.l2).min(self.l3), f64::min)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CoherenceDiagnostics {
    pub measurement_space: Option<Diagnostics>,
    pub state_space: Option<StateSpaceDiagnostics>,
    /// `|F_measurement - F_state|` when both numerical solvers ran.
    pub solver_gap: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport {
    pub c_g: f64,
    /// Closest incoherent state.
    pub cis: DensityMatrix,
    /// Optimal measurement for the induced ensemble; column `i` belongs to level `i`.
    pub measurement: VonNeumannMeasurement,
    pub method: CoherenceMethod,
    pub bounds: Bounds,
    pub diagnostics: CoherenceDiagnostics,
}

/// Sum of the moduli of the off-diagonal entries.
pub fn c_l1(rho: &DensityMatrix) -> f64 {
    let d = rho.dim();
    (0..d).flat_map(|i| (0..d).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| rho.get(i, j).norm()).sum()
}

pub fn bounds(rho: &DensityMatrix) -> Result<Bounds> {
    let sqrt_rho = matrix_sqrt(rho.as_matrix())?;
    let diagonal = rho.diagonal();
    let l1 = 1.0 - diagonal.iter().cloned().fold(0.0, f64::max);
    let l2 = 1.0 - (0..rho.dim()).map(|i| sqrt_rho[(i, i)].norm_sqr()).sum::<f64>();
    let induced = induced_ensemble_indexed(rho)?;
    let l3 = gso_error(&induced.ensemble)?;
    let levels = induced.kept.len();
    let l4 = (levels >= 2 && induced.ensemble.independence().independent).then(|| c_l1(rho) / (levels - 1) as f64);
    Ok(Bounds { l1: l1.max(0.0), l2: l2.max(0.0), l3: l3.max(0.0), l4 })
}

/// Geometric coherence with closest incoherent state and bounds.
///
/// Qubits and generalized X-states use closed forms. Everything else runs
/// the measurement-space and the state-space solver and keeps the larger
/// fidelity; a gap above `TOL_XSOLVER` between them is reported as a warning.
pub fn geometric_coherence(rho: &DensityMatrix, config: &CoherenceConfig) -> Result<CoherenceReport> {
    let bounds = bounds(rho)?;
    let mut diagnostics = CoherenceDiagnostics::default();
    let x = if config.force_numerical { None } else { detect_generalized_x(rho) };

    let (fidelity, measurement, method) = match x {
        Some(x) if rho.dim() == 2 => {
            let f = 0.5 * (1.0 + (1.0 - 4.0 * rho.get(0, 1).norm_sqr()).max(0.0).sqrt());
            (f, x_state_measurement(rho, &x)?, CoherenceMethod::QubitClosedForm)
        }
        Some(x) => (x_state_fidelity(rho, &x), x_state_measurement(rho, &x)?, CoherenceMethod::XBlock),
        None => {
            let m = solver_measurement_space(rho, &config.search)?;
            let state_config = config.state_search();
            let s = solver_state_space(rho, &state_config)?;
            let gap = (m.fidelity - s.fidelity).abs();
            if gap > TOL_XSOLVER {
                diagnostics.warnings.push(format!(
                    "solvers disagree: measurement space {:.12}, state space {:.12}",
                    m.fidelity, s.fidelity
                ));
            }
            diagnostics.measurement_space = Some(m.diagnostics);
            diagnostics.state_space = Some(s.diagnostics);
            diagnostics.solver_gap = Some(gap);
            if m.fidelity >= s.fidelity {
                (m.fidelity, m.measurement, CoherenceMethod::Numerical)
            } else {
                (s.fidelity, s.measurement, CoherenceMethod::Numerical)
            }
        }
    };
    let cis = closest_incoherent_state(rho, &measurement)?;
    Ok(CoherenceReport { c_g: (1.0 - fidelity).clamp(0.0, 1.0), cis, measurement, method, bounds, diagnostics })
}

/// `C_g` of `rho` next to the optimal success `D_q` of discriminating its
/// induced ensemble. For independent ensembles the two add up to one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Duality {
    pub c_g: f64,
    pub d_q: f64,
    pub sum: f64,
}

pub fn duality_check(rho: &DensityMatrix, config: &CoherenceConfig) -> Result<Duality> {
    let induced = induced_ensemble_indexed(rho)?;
    let independence = induced.ensemble.independence();
    if !independence.independent {
        return Err(Error::DependentEnsemble { rank: independence.rank, len: induced.ensemble.len() });
    }
    let c_g = geometric_coherence(rho, config)?.c_g;
    let d_q = optimal_vn_search(&induced.ensemble, &config.search)?.success;
    Ok(Duality { c_g, d_q, sum: c_g + d_q })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrimination::helstrom_two;
    use crate::ensembles::induced_ensemble;
    use crate::matcore::{cr, fidelity, ComplexMatrix, StateVector};
    use crate::random::{random_density_matrix, seeded};
    use std::f64::consts::FRAC_1_SQRT_2;
    use crate::tolerances::TOL_CIS;

    fn plus() -> DensityMatrix {
        DensityMatrix::pure(&StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]).unwrap())
    }

    fn qsd_theta(theta: f64) -> DensityMatrix {
        let c2 = (2.0 * theta).cos();
        DensityMatrix::new(ComplexMatrix::from_fn(2, 2, |i, j| cr(if i == j { 0.5 } else { 0.5 * c2 }))).unwrap()
    }

    fn check_invariants(rho: &DensityMatrix, r: &CoherenceReport) {
        assert!((0.0..=1.0).contains(&r.c_g));
        assert!(r.cis.is_diagonal(0.0));
        assert!((r.cis.diagonal().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(r.c_g <= r.bounds.tightest() + 1e-7, "{} > {:?}", r.c_g, r.bounds);
        assert!((fidelity(rho, &r.cis).unwrap() - (1.0 - r.c_g)).abs() < TOL_CIS);
    }

    #[test]
    fn l1_norm() {
        assert_eq!(c_l1(&DensityMatrix::from_diagonal(&[0.3, 0.7]).unwrap()), 0.0);
        assert!((c_l1(&plus()) - 1.0).abs() < 1e-15);
        for theta in [0.1, 0.5, 1.2] {
            assert!((c_l1(&qsd_theta(theta)) - (2.0 * theta).cos().abs()).abs() < 1e-15);
        }
    }

    #[test]
    fn plus_state_is_half() {
        let r = geometric_coherence(&plus(), &CoherenceConfig::default()).unwrap();
        assert_eq!(r.method, CoherenceMethod::QubitClosedForm);
        assert!((r.c_g - 0.5).abs() < 1e-15);
        check_invariants(&plus(), &r);
    }

    #[test]
    fn diagonal_states_are_incoherent() {
        for p in [vec![1.0], vec![0.5, 0.5], vec![0.2, 0.3, 0.5], vec![0.1, 0.2, 0.3, 0.4]] {
            let rho = DensityMatrix::from_diagonal(&p).unwrap();
            let r = geometric_coherence(&rho, &CoherenceConfig::default()).unwrap();
            assert!(r.c_g.abs() < 1e-15);
            assert!((r.cis.as_matrix() - rho.as_matrix()).norm() < 1e-12);
            let forced = geometric_coherence(&rho, &CoherenceConfig { force_numerical: true, ..Default::default() }).unwrap();
            assert!(forced.c_g.abs() < 1e-12);
        }
    }

    #[test]
    fn worked_x_state() {
        let rho = xstate_example();
        let r = geometric_coherence(&rho, &CoherenceConfig::default()).unwrap();
        assert_eq!(r.method, CoherenceMethod::XBlock);
        let want = 1.0 - 0.5 * ((0.6 + (0.36f64 - 0.16).sqrt()) + (0.4 + (0.16f64 - 0.04).sqrt()));
        assert!((r.c_g - want).abs() < 1e-14);
        check_invariants(&rho, &r);
        let numerical = geometric_coherence(&rho, &CoherenceConfig { force_numerical: true, ..Default::default() }).unwrap();
        assert_eq!(numerical.method, CoherenceMethod::Numerical);
        assert!((numerical.c_g - want).abs() < 1e-7);
    }

    fn xstate_example() -> DensityMatrix {
        let mut m = ComplexMatrix::zeros(4, 4);
        for (i, j, v) in [(0, 0, 0.3), (3, 3, 0.3), (0, 3, 0.2), (3, 0, 0.2), (1, 1, 0.2), (2, 2, 0.2), (1, 2, 0.1), (2, 1, 0.1)] {
            m[(i, j)] = cr(v);
        }
        DensityMatrix::new(m).unwrap()
    }

    #[test]
    fn qubit_closed_form_matches_helstrom_on_induced_ensemble() {
        let mut rng = seeded(31);
        for _ in 0..50 {
            let rho = random_density_matrix(&mut rng, 2);
            let r = geometric_coherence(&rho, &CoherenceConfig::default()).unwrap();
            let h = helstrom_two(&induced_ensemble(&rho).unwrap()).unwrap();
            assert!((r.c_g - (1.0 - h.success)).abs() < 1e-9);
            check_invariants(&rho, &r);
        }
    }

    #[test]
    fn bounds_of_simple_states() {
        let b = bounds(&DensityMatrix::from_diagonal(&[0.2, 0.5, 0.3]).unwrap()).unwrap();
        assert!((b.l1 - 0.5).abs() < 1e-15);
        assert!(b.l2.abs() < 1e-12 && b.l3.abs() < 1e-12);
        assert_eq!(b.l4, Some(0.0));

        let b = bounds(&plus()).unwrap();
        assert!((b.l1 - 0.5).abs() < 1e-12);
        assert!((b.l2 - 0.5).abs() < 1e-12);
        assert!((b.l3 - 0.5).abs() < 1e-12);
        assert_eq!(b.l4, None);
    }

    #[test]
    fn numerical_path_respects_bounds_and_cis() {
        let mut rng = seeded(32);
        for d in [3, 4, 5] {
            for _ in 0..4 {
                let rho = random_density_matrix(&mut rng, d);
                let r = geometric_coherence(&rho, &CoherenceConfig::default()).unwrap();
                assert_eq!(r.method, CoherenceMethod::Numerical);
                assert!(r.diagnostics.warnings.is_empty(), "{:?}", r.diagnostics.warnings);
                assert!(r.c_g <= 1.0 - 1.0 / d as f64 + 1e-9);
                assert!(r.bounds.l4.is_some());
                assert!(r.bounds.l3 < r.bounds.l1);
                check_invariants(&rho, &r);
            }
        }
    }

    #[test]
    fn duality_sums_to_one() {
        let mut rng = seeded(33);
        let cfg = CoherenceConfig::default();
        let diag = duality_check(&DensityMatrix::from_diagonal(&[0.25, 0.75]).unwrap(), &cfg).unwrap();
        assert!(diag.c_g.abs() < 1e-15 && (diag.d_q - 1.0).abs() < 1e-12);
        for d in [2, 4] {
            for _ in 0..5 {
                let dual = duality_check(&random_density_matrix(&mut rng, d), &cfg).unwrap();
                assert!((dual.sum - 1.0).abs() < if d == 2 { 1e-7 } else { 1e-6 });
            }
        }
    }

    #[test]
    fn duality_needs_independence() {
        assert!(matches!(duality_check(&plus(), &CoherenceConfig::default()), Err(Error::DependentEnsemble { rank: 1, len: 2 })));
    }
}

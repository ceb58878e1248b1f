//! Numerical search for the best von Neumann measurement.
//!
//! The objective `sum_i |<f_i|a_i>|^2` with `a_i = sqrt(eta_i) psi_i` is convex
//! in the basis matrix, so linearizing it at the current basis gives a lower
//! bound that touches at the current point. Maximizing that linear bound over
//! unitaries is an orthogonal Procrustes problem whose solution is the polar
//! factor of `B = [a_i conj(<f_i|a_i>)]`. Iterating never decreases the
//! objective.

use super::gso::gso_measurement;
use super::{success_probability, working_ensemble, Diagnostics, DiscriminationResult, Method, VonNeumannMeasurement};
use crate::ensembles::PureEnsemble;
use crate::error::{Error, Result};
use crate::matcore::{eigh, hermitian_part, polar_unitary, ComplexMatrix};
use crate::random::{haar_unitary, stream};
use crate::tolerances::TOL_OPT;

const POLISH_SWEEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Random starting bases, in addition to the Gram-Schmidt warm start.
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once one step gains less than this.
    pub tol_opt: f64,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { restarts: 20, max_iters: 500, tol_opt: TOL_OPT, seed: 0xC0FFEE }
    }
}

/// One ascent run from a fixed starting basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AscentRun {
    pub basis: ComplexMatrix,
    pub objective: f64,
    /// Objective at the start and after every step.
    pub history: Vec<f64>,
    pub converged: bool,
}

impl AscentRun {
    pub fn iterations(&self) -> usize {
        self.history.len() - 1
    }
}

fn objective(basis: &ComplexMatrix, targets: &ComplexMatrix) -> f64 {
    (0..targets.ncols()).map(|i| basis.column(i).dotc(&targets.column(i)).norm_sqr()).sum()
}

/// Runs the majorize-maximize iteration on `targets` (columns `a_i`, at most
/// as many as rows) from the unitary `start`.
pub fn ascend(targets: &ComplexMatrix, start: ComplexMatrix, max_iters: usize, tol_opt: f64) -> Result<AscentRun> {
    let d = targets.nrows();
    if targets.ncols() > d || start.nrows() != d || start.ncols() != d {
        return Err(Error::DimMismatch { expected: d, found: start.nrows() });
    }
    let mut basis = start;
    let mut value = objective(&basis, targets);
    let mut history = vec![value];
    let mut b = ComplexMatrix::zeros(d, d);
    for _ in 0..max_iters {
        for i in 0..targets.ncols() {
            let overlap = basis.column(i).dotc(&targets.column(i));
            b.set_column(i, &(targets.column(i) * overlap.conj()));
        }
        let next = polar_unitary(&b)?;
        let next_value = objective(&next, targets);
        let gain = next_value - value;
        if gain < 0.0 {
            // Rounding only; keep the better point.
            history.push(value);
            return Ok(AscentRun { basis, objective: value, history, converged: true });
        }
        basis = next;
        value = next_value;
        history.push(value);
        if gain < tol_opt {
            return Ok(AscentRun { basis, objective: value, history, converged: true });
        }
    }
    Ok(AscentRun { basis, objective: value, history, converged: false })
}

/// Improves `basis` by exact maximization over each pair of its columns.
///
/// Restricted to the plane of `f_i, f_j`, the objective is
/// `Tr B + <g|A - B|g>` with `A`, `B` the projected rank-one targets, so the
/// best pair is the eigenbasis of `A - B`. Sweeps stop once a full sweep
/// gains less than `tol_opt` or after `max_sweeps`. Unlike the polar step this
/// keeps converging quickly when an optimal overlap tends to zero.
pub fn polish(targets: &ComplexMatrix, mut basis: ComplexMatrix, max_sweeps: usize, tol_opt: f64) -> Result<ComplexMatrix> {
    let d = basis.ncols();
    let n = targets.ncols();
    let mut value = objective(&basis, targets);
    for _ in 0..max_sweeps {
        let before = value;
        for i in 0..n {
            for j in i + 1..d {
                let plane = ComplexMatrix::from_columns(&[basis.column(i), basis.column(j)]);
                let xi = plane.adjoint() * targets.column(i);
                let mut diff = &xi * xi.adjoint();
                if j < n {
                    let xj = plane.adjoint() * targets.column(j);
                    diff -= &xj * xj.adjoint();
                }
                let spectrum = eigh(&hermitian_part(&diff))?;
                let rotated = &plane * &spectrum.vectors;
                let old = (basis.column(i).into_owned(), basis.column(j).into_owned());
                basis.set_column(i, &rotated.column(1));
                basis.set_column(j, &rotated.column(0));
                let next = objective(&basis, targets);
                if next < value {
                    basis.set_column(i, &old.0);
                    basis.set_column(j, &old.1);
                } else {
                    value = next;
                }
            }
        }
        if value - before < tol_opt {
            break;
        }
    }
    Ok(basis)
}

/// Best von Neumann measurement found by ascent from the Gram-Schmidt
/// measurement and `config.restarts` Haar-random bases.
///
/// The returned success is a lower bound on the von Neumann optimum. An
/// ensemble with more states than dimensions is zero-padded first, so the
/// measurement then acts on the larger space. Fails only when every start
/// hits the iteration cap.
pub fn optimal_vn_search(e: &PureEnsemble, config: &SearchConfig) -> Result<DiscriminationResult> {
    let work = working_ensemble(e);
    let d = work.dim();
    let targets = work.weighted_columns();

    let mut starts = vec![gso_measurement(&work)?.measurement.basis().clone()];
    for r in 0..config.restarts {
        starts.push(haar_unitary(&mut stream(config.seed, r as u64), d));
    }

    let mut best: Option<AscentRun> = None;
    let mut diagnostics = Diagnostics { restarts_used: starts.len(), working_dim: d, ..Default::default() };
    for start in starts {
        let run = ascend(&targets, start, config.max_iters, config.tol_opt)?;
        diagnostics.iterations += run.iterations();
        if !run.converged {
            diagnostics.unconverged += 1;
        }
        if best.as_ref().map_or(true, |b| run.objective > b.objective) {
            best = Some(run);
        }
    }
    if diagnostics.unconverged == diagnostics.restarts_used {
        return Err(Error::NoConvergence { what: "measurement search", iterations: config.max_iters });
    }
    let best = best.expect("at least the warm start ran");
    let basis = polish(&targets, best.basis, POLISH_SWEEPS, config.tol_opt)?;
    let measurement = VonNeumannMeasurement::new(basis)?.with_canonical_phases();
    let success = success_probability(&work, &measurement)?;
    Ok(DiscriminationResult::new(success, measurement, Method::Search, diagnostics))
}

use super::{working_ensemble, VonNeumannMeasurement};
use crate::ensembles::PureEnsemble;
use crate::error::Result;
use crate::matcore::{complete_orthonormal_basis, ComplexMatrix, ComplexVector};
use crate::tolerances::TOL_RANK;

/// Gram-Schmidt measurement together with the order it was built in.
#[derive(Debug, Clone, PartialEq)]
pub struct GsoMeasurement {
    /// Column `i` targets state `i`. Unselected states get completion vectors,
    /// which are orthogonal to every state.
    pub measurement: VonNeumannMeasurement,
    /// Original indices of the selected states in orthogonalization order.
    pub order: Vec<usize>,
    /// Orthonormalized vector for each entry of `order`.
    pub vectors: Vec<ComplexVector>,
}

impl GsoMeasurement {
    /// Number of linearly independent states selected.
    pub fn selected(&self) -> usize {
        self.order.len()
    }
}

/// Squared residual below which a state counts as lying in the span of the
/// states already selected. Matches the relative Gram-eigenvalue cut of the
/// rank test for unit vectors.
const RESIDUAL_CUT: f64 = TOL_RANK;

/// Builds the measurement from the Gram-Schmidt orthogonalization of the
/// states taken in descending prior order (lower index first on ties),
/// skipping states that are dependent on those already taken.
pub fn gso_measurement(e: &PureEnsemble) -> Result<GsoMeasurement> {
    let e = working_ensemble(e);
    let d = e.dim();
    let mut by_prior: Vec<usize> = (0..e.len()).collect();
    by_prior.sort_by(|&a, &b| e.priors()[b].total_cmp(&e.priors()[a]).then(a.cmp(&b)));

    let mut order = Vec::new();
    let mut vectors: Vec<ComplexVector> = Vec::new();
    for i in by_prior {
        if vectors.len() == d {
            break;
        }
        let mut r = e.states()[i].as_vector().clone();
        for _ in 0..2 {
            for q in &vectors {
                let overlap = q.dotc(&r);
                r -= q * overlap;
            }
        }
        let norm = r.norm();
        if norm * norm > RESIDUAL_CUT {
            vectors.push(r.unscale(norm));
            order.push(i);
        }
    }

    let completion = complete_orthonormal_basis(&vectors, d);
    let mut basis = ComplexMatrix::zeros(d, d);
    let mut slot_used = vec![false; d];
    for (k, &i) in order.iter().enumerate() {
        basis.set_column(i, &vectors[k]);
        slot_used[i] = true;
    }
    let mut next = vectors.len();
    for slot in 0..d {
        if !slot_used[slot] {
            basis.set_column(slot, &completion.column(next));
            next += 1;
        }
    }
    Ok(GsoMeasurement { measurement: VonNeumannMeasurement::new(basis)?, order, vectors })
}

/// Error of the Gram-Schmidt measurement:
/// `sum_k xi_k sum_{j<k} |<phi_j|varphi_k>|^2` over the selected states,
/// plus the prior mass of states that were not selected (those land on
/// completion vectors and are never identified).
pub fn gso_error(e: &PureEnsemble) -> Result<f64> {
    let g = gso_measurement(e)?;
    let mut error = 0.0;
    for (k, &i) in g.order.iter().enumerate() {
        let psi = e.states()[i].as_vector();
        let leaked: f64 = (0..k).map(|j| g.vectors[j].rows(0, psi.len()).dotc(psi).norm_sqr()).sum();
        error += e.priors()[i] * leaked;
    }
    let unselected: f64 = (0..e.len()).filter(|i| !g.order.contains(i)).map(|i| e.priors()[i]).sum();
    Ok(error + unselected)
}

/// `1 - gso_error`, evaluated directly from the measurement.
#[cfg(test)]
pub(crate) fn gso_success(e: &PureEnsemble) -> Result<f64> {
    super::success_probability(&working_ensemble(e), &gso_measurement(e)?.measurement)
}

//! States whose off-diagonal support is a partial matching of the basis.
//!
//! Under a basis permutation such a state is block diagonal with 2x2 and 1x1
//! blocks. The induced ensemble then splits into orthogonal pairs, and each
//! pair is a two-state Helstrom problem with conditional priors.

use super::solvers::realign_measurement;
use crate::discrimination::{helstrom_two, VonNeumannMeasurement};
use crate::ensembles::induced_ensemble_indexed;
use crate::error::Result;
use crate::matcore::{c, ComplexMatrix, DensityMatrix};
use crate::tolerances::{TOL_X, TOL_ZERO_PRIOR};

/// Self-inverse pairing `i <-> pairing[i]` of basis indices (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XBlockStructure {
    pub pairing: Vec<usize>,
}

impl XBlockStructure {
    /// Pairs `(i, j)` with `i < j`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.pairing.iter().enumerate().filter(|&(i, &j)| i < j).map(|(i, &j)| (i, j)).collect()
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        self.pairing.iter().enumerate().filter(|&(i, &j)| i == j).map(|(i, _)| i).collect()
    }
}

/// Pairing of `rho`'s off-diagonal support, if every row has at most one
/// entry above `TOL_X` off the diagonal. Qubits are always paired.
pub fn detect_generalized_x(rho: &DensityMatrix) -> Option<XBlockStructure> {
    let d = rho.dim();
    if d == 2 {
        return Some(XBlockStructure { pairing: vec![1, 0] });
    }
    let mut pairing: Vec<usize> = (0..d).collect();
    for i in 0..d {
        let mut partners = (0..d).filter(|&j| j != i && rho.get(i, j).norm() > TOL_X);
        if let Some(j) = partners.next() {
            if partners.next().is_some() {
                return None;
            }
            pairing[i] = j;
        }
    }
    // A Hermitian input always gives a symmetric pattern; this guards
    // entries that straddle the threshold after rounding.
    if (0..d).any(|i| pairing[pairing[i]] != i) {
        return None;
    }
    Some(XBlockStructure { pairing })
}

/// Success `(p + sqrt(p^2 - 4 |rho_ij|^2)) / 2` of one block with `p = rho_ii + rho_jj`.
pub fn block_success(rho_ii: f64, rho_jj: f64, off_abs: f64) -> f64 {
    let p = rho_ii + rho_jj;
    0.5 * (p + (p * p - 4.0 * off_abs * off_abs).max(0.0).sqrt())
}

/// Maximal incoherent fidelity of a generalized X-state: the block successes
/// plus `rho_ii` for every fixed point.
pub fn x_state_fidelity(rho: &DensityMatrix, x: &XBlockStructure) -> f64 {
    let pairs: f64 = x.pairs().iter().map(|&(i, j)| block_success(rho.get(i, i).re, rho.get(j, j).re, rho.get(i, j).norm())).sum();
    let fixed: f64 = x.fixed_points().iter().map(|&i| rho.get(i, i).re).sum();
    pairs + fixed
}

/// Optimal measurement for the induced ensemble, assembled blockwise from
/// Helstrom measurements. Column `i` belongs to basis index `i`.
pub fn x_state_measurement(rho: &DensityMatrix, x: &XBlockStructure) -> Result<VonNeumannMeasurement> {
    let d = rho.dim();
    let mut basis = ComplexMatrix::identity(d, d);
    for (i, j) in x.pairs() {
        let (a, b) = (rho.get(i, i).re, rho.get(j, j).re);
        if a <= TOL_ZERO_PRIOR || b <= TOL_ZERO_PRIOR {
            continue;
        }
        let block = ComplexMatrix::from_fn(2, 2, |r, s| rho.get([i, j][r], [i, j][s]) / c(a + b, 0.0));
        let induced = induced_ensemble_indexed(&DensityMatrix::new(block)?)?;
        let local = realign_measurement(&helstrom_two(&induced.ensemble)?.measurement, &induced.kept)?;
        for (r, &row) in [i, j].iter().enumerate() {
            for (s, &col) in [i, j].iter().enumerate() {
                basis[(row, col)] = local.basis()[(r, s)];
            }
        }
    }
    VonNeumannMeasurement::new(basis)
}

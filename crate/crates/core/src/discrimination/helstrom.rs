use super::{success_probability, working_ensemble, Diagnostics, DiscriminationResult, Method, VonNeumannMeasurement};
use crate::ensembles::PureEnsemble;
use crate::error::{Error, Result};
use crate::matcore::{complete_orthonormal_basis, eigh, hermitian_part, trace_norm, ComplexMatrix, ComplexVector};

/// `(1 + sqrt(1 - 4 eta_1 eta_2 |<psi_1|psi_2>|^2)) / 2`.
pub fn helstrom_success_from_overlap(eta1: f64, eta2: f64, overlap_abs: f64) -> f64 {
    let disc = (1.0 - 4.0 * eta1 * eta2 * overlap_abs * overlap_abs).max(0.0);
    0.5 * (1.0 + disc.sqrt())
}

/// Optimal discrimination of two pure states.
///
/// The success probability is `(1 + ||Lambda||_1) / 2` with
/// `Lambda = eta_1 |psi_1><psi_1| - eta_2 |psi_2><psi_2|`. The first outcome
/// is the eigenvector of `Lambda` with the largest eigenvalue and the second
/// the one with the smallest, both taken inside the span of the two states;
/// the rest of the basis is a null completion.
pub fn helstrom_two(e: &PureEnsemble) -> Result<DiscriminationResult> {
    if e.len() != 2 {
        return Err(Error::WrongArity { expected: 2, found: e.len() });
    }
    let e = working_ensemble(e);
    let d = e.dim();
    let (eta1, eta2) = (e.priors()[0], e.priors()[1]);
    let (psi1, psi2) = (e.states()[0].as_vector(), e.states()[1].as_vector());

    let lambda = (psi1 * psi1.adjoint()).scale(eta1) - (psi2 * psi2.adjoint()).scale(eta2);
    let success = 0.5 * (1.0 + trace_norm(&lambda)?);

    // Orthonormal basis of span{psi1, psi2}.
    let mut span: Vec<ComplexVector> = vec![psi1.clone()];
    let mut r = psi2 - psi1 * psi1.dotc(psi2);
    r -= psi1 * psi1.dotc(&r);
    if r.norm() > 1e-12 {
        span.push(r.unscale(r.norm()));
    }
    let q = ComplexMatrix::from_columns(&span);
    let reduced = eigh(&hermitian_part(&(q.adjoint() * &lambda * &q)))?;

    let (first, second) = if span.len() == 2 {
        (Some(&q * reduced.vectors.column(1)), Some(&q * reduced.vectors.column(0)))
    } else if reduced.values[0] >= 0.0 {
        (Some(psi1.clone()), None)
    } else {
        (None, Some(psi1.clone()))
    };
    // Missing outcomes are filled from the completion; order the known ones first.
    let mut known: Vec<ComplexVector> = Vec::new();
    known.extend(first.iter().cloned());
    known.extend(second.iter().cloned());
    let completed = complete_orthonormal_basis(&known, d);
    let mut basis = ComplexMatrix::zeros(d, d);
    let mut next_free = known.len();
    let mut take_free = |basis: &mut ComplexMatrix, slot: usize| {
        basis.set_column(slot, &completed.column(next_free));
        next_free += 1;
    };
    match (&first, &second) {
        (Some(f1), Some(f2)) => {
            basis.set_column(0, f1);
            basis.set_column(1, f2);
        }
        (Some(f1), None) => {
            basis.set_column(0, f1);
            take_free(&mut basis, 1);
        }
        (None, Some(f2)) => {
            basis.set_column(1, f2);
            take_free(&mut basis, 0);
        }
        (None, None) => unreachable!("span is never empty"),
    }
    for slot in 2..d {
        take_free(&mut basis, slot);
    }
    let measurement = VonNeumannMeasurement::new(basis)?.with_canonical_phases();
    debug_assert!((success_probability(&e, &measurement)? - success).abs() < 1e-9);
    Ok(DiscriminationResult::new(
        success,
        measurement,
        Method::Helstrom,
        Diagnostics { restarts_used: 0, iterations: 0, unconverged: 0, working_dim: d },
    ))
}

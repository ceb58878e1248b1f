//! Dense complex linear algebra shared by the rest of the crate.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Two validated newtypes sit on
//! top: [`DensityMatrix`] (Hermitian, PSD, unit trace) and [`StateVector`]
//! (unit norm). Eigen- and singular value decompositions come from nalgebra;
//! everything here wraps them with the validation and sign/phase conventions
//! the other modules rely on.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances::{DECOMP_MAX_ITERS, TOL_HERM, TOL_NORM, TOL_PSD, TOL_TRACE};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

#[inline]
pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[inline]
pub(crate) fn cr(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// A unit-norm vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(ComplexVector);

impl StateVector {
    pub fn new(v: ComplexVector) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(row) = v.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { row, col: 0 });
        }
        let norm = v.norm();
        if (norm - 1.0).abs() > TOL_NORM {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self(v))
    }

    /// Scales `v` to unit norm.
    pub fn normalized(v: ComplexVector) -> Result<Self> {
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(v.unscale(norm))
    }

    pub fn from_amplitudes(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::DimMismatch { expected: re.len(), found: im.len() });
        }
        Self::new(ComplexVector::from_iterator(
            re.len(),
            re.iter().zip(im).map(|(&a, &b)| c(a, b)),
        ))
    }

    pub fn from_real(re: &[f64]) -> Result<Self> {
        Self::new(ComplexVector::from_iterator(re.len(), re.iter().map(|&a| cr(a))))
    }

    /// The computational basis vector `e_index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = ComplexVector::zeros(dim);
        v[index] = cr(1.0);
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &ComplexVector {
        &self.0
    }

    pub fn into_vector(self) -> ComplexVector {
        self.0
    }

    /// `<self|other>`, antilinear in `self`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.0.dotc(&other.0)
    }

    /// Zero-pads the vector into a larger space.
    pub fn embedded(&self, dim: usize) -> Self {
        assert!(dim >= self.dim(), "cannot embed into a smaller space");
        let mut v = ComplexVector::zeros(dim);
        v.rows_mut(0, self.dim()).copy_from(&self.0);
        Self(v)
    }

    /// Entrywise complex conjugate.
    pub fn conjugate(&self) -> Self {
        Self(self.0.conjugate())
    }

    pub fn with_canonical_phase(mut self) -> Self {
        canonicalize_phase(&mut self.0);
        self
    }
}

/// Rotates `v` so that its first entry of largest modulus is real and nonnegative.
pub fn canonicalize_phase(v: &mut ComplexVector) {
    let mut best = 0;
    let mut best_abs = -1.0;
    for (i, z) in v.iter().enumerate() {
        // Slack keeps the choice stable when two entries tie up to rounding.
        if z.norm() > best_abs + 1e-12 {
            best = i;
            best_abs = z.norm();
        }
    }
    if best_abs > 0.0 {
        let phase = v[best].conj() / best_abs;
        for z in v.iter_mut() {
            *z *= phase;
        }
        v[best] = cr(v[best].re);
    }
}

fn canonicalize_columns(m: &mut ComplexMatrix) {
    for j in 0..m.ncols() {
        let mut col: ComplexVector = m.column(j).into_owned();
        canonicalize_phase(&mut col);
        m.set_column(j, &col);
    }
}

/// A Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates `m` and stores its Hermitian part.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        check_square(&m)?;
        if m.nrows() == 0 {
            return Err(Error::Empty);
        }
        check_finite(&m)?;
        check_hermitian(&m, TOL_HERM)?;
        let m = hermitian_part(&m);
        let trace = m.trace().re;
        if (trace - 1.0).abs() > TOL_TRACE {
            return Err(Error::TraceNotOne { trace });
        }
        let spectrum = eigh(&m)?;
        if let Some(&lowest) = spectrum.values.first() {
            if lowest < -TOL_PSD {
                return Err(Error::NotPsd { eigenvalue: lowest });
            }
        }
        Ok(Self(m))
    }

    pub fn from_diagonal(p: &[f64]) -> Result<Self> {
        let d = p.len();
        Self::new(ComplexMatrix::from_fn(d, d, |i, j| if i == j { cr(p[i]) } else { cr(0.0) }))
    }

    /// `|psi><psi|`.
    pub fn pure(psi: &StateVector) -> Self {
        let v = psi.as_vector();
        Self(v * v.adjoint())
    }

    /// Maximally mixed state `I/d`.
    pub fn maximally_mixed(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim, dim).unscale(dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[(i, j)]
    }

    /// Real diagonal `rho_ii`.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.0[(i, j)].norm() <= tol))
    }

    /// `P rho P^T` for the permutation sending basis index `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let d = self.dim();
        if perm.len() != d {
            return Err(Error::DimMismatch { expected: d, found: perm.len() });
        }
        let mut out = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                out[(perm[i], perm[j])] = self.0[(i, j)];
            }
        }
        Ok(Self(out))
    }

    /// `U rho U^dagger` for unitary `u`.
    pub fn conjugated_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimMismatch { expected: self.dim(), found: u.nrows() });
        }
        Self::new(u * &self.0 * u.adjoint())
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl Spectrum {
    pub fn eigenvector(&self, k: usize) -> StateVector {
        StateVector(self.vectors.column(k).into_owned())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|x| x)
    }

    /// `V f(diag(values)) V^dagger`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let s = f(lambda);
            for z in scaled.column_mut(j).iter_mut() {
                *z *= s;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

pub fn check_square(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    Ok(())
}

pub fn check_finite(m: &ComplexMatrix) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Fails with the first entry where `|m_ij - conj(m_ji)| > tol`.
pub fn check_hermitian(m: &ComplexMatrix, tol: f64) -> Result<()> {
    check_square(m)?;
    let d = m.nrows();
    for i in 0..d {
        for j in i..d {
            let deviation = (m[(i, j)] - m[(j, i)].conj()).norm();
            if !(deviation <= tol) {
                return Err(Error::NonHermitian { row: i, col: j, deviation });
            }
        }
    }
    Ok(())
}

/// `(m + m^dagger) / 2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).unscale(2.0)
}

pub fn is_unitary(u: &ComplexMatrix, tol: f64) -> bool {
    u.is_square() && (u.adjoint() * u - ComplexMatrix::identity(u.nrows(), u.ncols())).norm() <= tol
}

/// Hermitian eigendecomposition with ascending eigenvalues.
///
/// Each eigenvector is phase-normalized (see [`canonicalize_phase`]); within a
/// degenerate eigenspace the basis is whatever the solver returns.
pub fn eigh(h: &ComplexMatrix) -> Result<Spectrum> {
    check_hermitian(h, TOL_HERM)?;
    let d = h.nrows();
    if d == 0 {
        return Ok(Spectrum { values: vec![], vectors: ComplexMatrix::zeros(0, 0) });
    }
    let eig = SymmetricEigen::try_new(hermitian_part(h), f64::EPSILON, DECOMP_MAX_ITERS)
        .ok_or(Error::NoConvergence { what: "Hermitian eigensolver", iterations: DECOMP_MAX_ITERS })?;
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = ComplexMatrix::zeros(d, d);
    for (j, &k) in order.iter().enumerate() {
        vectors.set_column(j, &eig.eigenvectors.column(k));
    }
    canonicalize_columns(&mut vectors);
    Ok(Spectrum { values, vectors })
}

/// Principal square root of a PSD matrix.
///
/// Eigenvalues in `[-TOL_PSD, 0)` are clipped to zero.
pub fn matrix_sqrt(p: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spectrum = eigh(p)?;
    if let Some(&lowest) = spectrum.values.first() {
        if lowest < -TOL_PSD {
            return Err(Error::NotPsd { eigenvalue: lowest });
        }
    }
    Ok(hermitian_part(&spectrum.apply(|x| x.max(0.0).sqrt())))
}

pub(crate) struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v_t: ComplexMatrix,
}

/// Singular values below this fraction of the largest are treated as zero
/// when building singular vectors.
const SVD_NULL_CUT: f64 = 1e-10;

/// SVD of a square matrix through the Hermitian dilation `[[0, M], [M^dagger, 0]]`,
/// whose eigenvalues are `+-sigma_i` with eigenvectors `(u_i, v_i) / sqrt(2)`.
///
/// nalgebra's complex SVD returns wrong singular values for rank-deficient
/// inputs, while its Hermitian eigensolver is reliable. Singular vectors of
/// (numerically) zero singular values are an orthonormal completion.
pub(crate) fn svd(m: &ComplexMatrix) -> Result<Svd> {
    check_square(m)?;
    check_finite(m)?;
    let n = m.nrows();
    let mut h = ComplexMatrix::zeros(2 * n, 2 * n);
    h.view_mut((0, n), (n, n)).copy_from(m);
    h.view_mut((n, 0), (n, n)).copy_from(&m.adjoint());
    let spectrum = eigh(&h)?;

    let singular_values: Vec<f64> = (n..2 * n).rev().map(|k| spectrum.values[k].max(0.0)).collect();
    let cut = SVD_NULL_CUT * singular_values.first().copied().unwrap_or(0.0);
    let mut us: Vec<ComplexVector> = Vec::new();
    let mut vs: Vec<ComplexVector> = Vec::new();
    for (j, &sigma) in singular_values.iter().enumerate() {
        if sigma <= cut || sigma == 0.0 {
            break;
        }
        let w = spectrum.vectors.column(2 * n - 1 - j);
        us.push(orthonormalized_against(w.rows(0, n).into_owned(), &us));
        vs.push(orthonormalized_against(w.rows(n, n).into_owned(), &vs));
    }
    let u = complete_orthonormal_basis(&us, n);
    let v = complete_orthonormal_basis(&vs, n);
    Ok(Svd { u, singular_values, v_t: v.adjoint() })
}

/// Two-pass Gram-Schmidt of `r` against orthonormal `basis`, then normalized.
fn orthonormalized_against(mut r: ComplexVector, basis: &[ComplexVector]) -> ComplexVector {
    for _ in 0..2 {
        for q in basis {
            let overlap = q.dotc(&r);
            r -= q * overlap;
        }
    }
    let norm = r.norm();
    r.unscale(norm)
}

/// Sum of singular values of a square matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    check_square(m)?;
    if m.nrows() == 0 {
        return Ok(0.0);
    }
    Ok(svd(m)?.singular_values.iter().sum())
}

/// Uhlmann fidelity `(Tr sqrt(sqrt(sigma) rho sqrt(sigma)))^2`.
///
/// Evaluated as `||sqrt(rho) sqrt(sigma)||_1^2`, which is the same quantity and
/// is symmetric in its arguments by construction.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let a = matrix_sqrt(rho.as_matrix())?;
    let b = matrix_sqrt(sigma.as_matrix())?;
    let root = trace_norm(&(a * b))?;
    Ok((root * root).clamp(0.0, 1.0))
}

/// Unitary factor `U` of the polar decomposition `M = U |M|`.
///
/// Computed as `U_L U_R^dagger` from the SVD; for singular `M` the factor maps
/// a completion of the row space onto a completion of the column space.
pub fn polar_unitary(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_square(m)?;
    if m.nrows() == 0 {
        return Ok(ComplexMatrix::zeros(0, 0));
    }
    let Svd { u, v_t, .. } = svd(m)?;
    Ok(u * v_t)
}

/// Matrix whose `j`-th column is `states[j]`.
pub fn columns(states: &[StateVector]) -> Result<ComplexMatrix> {
    let Some(first) = states.first() else {
        return Ok(ComplexMatrix::zeros(0, 0));
    };
    let d = first.dim();
    if let Some(bad) = states.iter().find(|s| s.dim() != d) {
        return Err(Error::DimMismatch { expected: d, found: bad.dim() });
    }
    let mut m = ComplexMatrix::zeros(d, states.len());
    for (j, s) in states.iter().enumerate() {
        m.set_column(j, s.as_vector());
    }
    Ok(m)
}

/// Extends orthonormal columns `partial` to a basis of `dim` dimensions.
///
/// New vectors come from Gram-Schmidt on the computational basis, taking at
/// each step the basis vector with the largest residual.
pub fn complete_orthonormal_basis(partial: &[ComplexVector], dim: usize) -> ComplexMatrix {
    let mut basis: Vec<ComplexVector> = partial.to_vec();
    while basis.len() < dim {
        let mut best: Option<ComplexVector> = None;
        let mut best_norm = 0.0;
        for k in 0..dim {
            let mut r = ComplexVector::zeros(dim);
            r[k] = cr(1.0);
            for _ in 0..2 {
                for q in &basis {
                    let overlap = q.dotc(&r);
                    r -= q * overlap;
                }
            }
            let norm = r.norm();
            if norm > best_norm + 1e-12 {
                best_norm = norm;
                best = Some(r);
            }
        }
        let r = best.expect("a proper subspace leaves a nonzero residual");
        basis.push(r.unscale(best_norm));
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (j, v) in basis.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

/// Gram matrix `G_ij = <psi_i|psi_j>`.
pub fn gram(states: &[StateVector]) -> Result<ComplexMatrix> {
    let s = columns(states)?;
    Ok(s.adjoint() * s)
}

/// Outcome of a numerical linear independence test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Independence {
    pub independent: bool,
    pub rank: usize,
}

/// Counts Gram eigenvalues above `tol_rank * max_eigenvalue`.
pub fn linear_independence(states: &[StateVector], tol_rank: f64) -> Result<Independence> {
    if states.is_empty() {
        return Ok(Independence { independent: true, rank: 0 });
    }
    let spectrum = eigh(&hermitian_part(&gram(states)?))?;
    let max = spectrum.values.last().copied().unwrap_or(0.0);
    let rank = if max <= 0.0 {
        0
    } else {
        spectrum.values.iter().filter(|&&x| x > tol_rank * max).count()
    };
    Ok(Independence { independent: rank == states.len(), rank })
}

//! Numerical tolerances shared across the crate.
//!
//! Input validation is loose enough to accept matrices that went through a
//! text round trip; the decomposition checks are close to machine precision
//! for dimensions up to about 16.

/// Hermiticity check on input matrices, entrywise.
pub const TOL_HERM: f64 = 1e-8;
/// Unit-trace check on density matrices and prior sums.
pub const TOL_TRACE: f64 = 1e-8;
/// Eigenvalues in `[-TOL_PSD, 0)` are clipped to zero; anything lower is rejected.
pub const TOL_PSD: f64 = 1e-10;
/// Relative reconstruction error allowed for eigendecompositions and square roots.
pub const TOL_EIG: f64 = 1e-10;
/// Relative eigenvalue cut-off used for numerical rank.
pub const TOL_RANK: f64 = 1e-8;
/// Unit-norm check on state vectors.
pub const TOL_NORM: f64 = 1e-8;
/// Generic agreement between two computations of the same quantity.
pub const TOL_NUM: f64 = 1e-9;
/// Orthonormality check on measurement bases.
pub const TOL_ORTHO: f64 = 1e-8;

/// Priors at or below this are treated as absent states.
pub const TOL_ZERO_PRIOR: f64 = 1e-12;
/// Gram equality and mapping residual for unitary alignment.
pub const TOL_ALIGN: f64 = 1e-7;

/// Stopping threshold on the objective gain of the ascent solvers.
pub const TOL_OPT: f64 = 1e-12;

/// Off-diagonal magnitude above which an entry counts as nonzero in X-pattern detection.
pub const TOL_X: f64 = 1e-12;
/// Fidelity of the closest incoherent state against `1 - C_g`.
pub const TOL_CIS: f64 = 1e-6;
/// `C_g + D_q = 1` check.
pub const TOL_DUALITY: f64 = 1e-6;
/// Disagreement between the two numerical solvers that triggers a warning.
pub const TOL_XSOLVER: f64 = 1e-6;
/// Recovered success against `1 - C_g` of the QSD-state.
pub const TOL_RECOVERY: f64 = 1e-6;

/// Iteration cap of the Hermitian eigensolver and SVD.
pub const DECOMP_MAX_ITERS: usize = 10_000;

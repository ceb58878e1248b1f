//! Geometric coherence of finite-dimensional states and minimum-error
//! discrimination of pure-state ensembles.
//!
//! The two problems are two views of one optimization: the geometric
//! coherence of `rho` is the minimum von Neumann error for discriminating the
//! ensemble `{rho_ii, sqrt(rho) e_i / sqrt(rho_ii)}`, and conversely every
//! pure-state ensemble has a "QSD-state" built from its Gram matrix whose
//! coherence bounds (and, for independent states, equals) its minimum error.

pub mod coherence;
pub mod discrimination;
pub mod ensembles;
pub mod error;
pub mod matcore;
pub mod random;
pub mod recovery;
pub mod reproduce;
pub mod tolerances;

pub use error::{Error, Result};
pub use matcore::{ComplexMatrix, ComplexVector, DensityMatrix, Spectrum, StateVector};

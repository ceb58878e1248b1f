//! JSON input and output formats.
//!
//! Matrices are `{"dim": d, "re": [[..], ..], "im": [[..], ..]}` with rows
//! in order; ensembles are `{"priors": [..], "states": [{"re": [..], "im": [..]}, ..]}`.
//! An omitted `im` means a real matrix or vector.

use std::fs;
use std::path::Path;

use geocoh::ensembles::PureEnsemble;
use geocoh::{ComplexMatrix, ComplexVector, DensityMatrix, StateVector};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorFile {
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub priors: Vec<f64>,
    pub states: Vec<VectorFile>,
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("cannot parse {}: {e}", path.display())))
}

fn invalid(what: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("invalid input: {what}"))
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let rows = |f: fn(&Complex64) -> f64| (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect()).collect();
        Self { dim: m.nrows(), re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        let d = self.dim;
        if d == 0 {
            return Err(invalid("dim must be positive"));
        }
        let check = |name: &str, rows: &[Vec<f64>]| -> Result<(), CliError> {
            if rows.len() != d {
                return Err(invalid(format!("`{name}` has {} rows, expected {d}", rows.len())));
            }
            if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != d) {
                return Err(invalid(format!("row {i} of `{name}` has {} entries, expected {d}", row.len())));
            }
            Ok(())
        };
        check("re", &self.re)?;
        if !self.im.is_empty() {
            check("im", &self.im)?;
        }
        Ok(ComplexMatrix::from_fn(d, d, |i, j| {
            Complex64::new(self.re[i][j], self.im.get(i).map_or(0.0, |row| row[j]))
        }))
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix, CliError> {
        DensityMatrix::new(self.to_matrix()?).map_err(invalid)
    }
}

impl VectorFile {
    pub fn from_vector(v: &ComplexVector) -> Self {
        Self { re: v.iter().map(|z| z.re).collect(), im: v.iter().map(|z| z.im).collect() }
    }

    fn to_state(&self, index: usize) -> Result<StateVector, CliError> {
        if !self.im.is_empty() && self.im.len() != self.re.len() {
            return Err(invalid(format!("state {index}: `re` has {} entries, `im` has {}", self.re.len(), self.im.len())));
        }
        let im = if self.im.is_empty() { vec![0.0; self.re.len()] } else { self.im.clone() };
        StateVector::from_amplitudes(&self.re, &im).map_err(|e| invalid(format!("state {index}: {e}")))
    }
}

impl EnsembleFile {
    pub fn to_ensemble(&self) -> Result<PureEnsemble, CliError> {
        let states = self.states.iter().enumerate().map(|(i, s)| s.to_state(i)).collect::<Result<Vec<_>, _>>()?;
        PureEnsemble::new(self.priors.clone(), states).map_err(invalid)
    }
}

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use geocoh::coherence::{geometric_coherence, CoherenceConfig, StateSpaceDiagnostics};
use geocoh::discrimination::{
    gso_error, gso_measurement, helstrom_two, optimal_vn_search, Diagnostics, SearchConfig, VonNeumannMeasurement,
};
use geocoh::ensembles::multicopy_qsd_state;
use geocoh::recovery::{recover_and_verify, VerificationReport};
use geocoh::reproduce::{multicopy_ensemble, multicopy_table, run_all, worked_example_table, ReproduceConfig, WORKED_THETAS};
use serde::Serialize;

use crate::error::CliError;
use crate::files::{read_json, EnsembleFile, MatrixFile, VectorFile};
use crate::MethodArg;

pub struct Options {
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub output: Option<PathBuf>,
}

impl Options {
    fn search(&self) -> Result<SearchConfig, CliError> {
        let mut config = SearchConfig::default();
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(tol) = self.tol {
            if !(tol.is_finite() && tol >= 0.0) {
                return Err(CliError::Input(format!("--tol must be a nonnegative number, got {tol}")));
            }
            config.tol_opt = tol;
        }
        Ok(config)
    }

    fn coherence(&self, force_numerical: bool) -> Result<CoherenceConfig, CliError> {
        Ok(CoherenceConfig { search: self.search()?, force_numerical, ..Default::default() })
    }

    fn emit(&self, report: &impl Serialize) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
        text.push('\n');
        match &self.output {
            Some(path) => fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Input(format!("cannot write to standard output: {e}"))),
        }
    }
}

#[derive(Serialize)]
struct SearchDiagnosticsOut {
    restarts_used: usize,
    iterations: usize,
    unconverged: usize,
    working_dim: usize,
}

impl From<&Diagnostics> for SearchDiagnosticsOut {
    fn from(d: &Diagnostics) -> Self {
        Self { restarts_used: d.restarts_used, iterations: d.iterations, unconverged: d.unconverged, working_dim: d.working_dim }
    }
}

#[derive(Serialize)]
struct StateDiagnosticsOut {
    starts: usize,
    iterations: usize,
    unconverged: usize,
}

impl From<&StateSpaceDiagnostics> for StateDiagnosticsOut {
    fn from(d: &StateSpaceDiagnostics) -> Self {
        Self { starts: d.starts, iterations: d.iterations, unconverged: d.unconverged }
    }
}

fn vectors(m: &VonNeumannMeasurement) -> Vec<VectorFile> {
    (0..m.dim()).map(|i| VectorFile::from_vector(&m.vector(i))).collect()
}

#[derive(Serialize)]
struct BoundsOut {
    l1: f64,
    l2: f64,
    l3: f64,
    l4: Option<f64>,
}

#[derive(Serialize)]
struct CoherenceDiagnosticsOut {
    measurement_space: Option<SearchDiagnosticsOut>,
    state_space: Option<StateDiagnosticsOut>,
    solver_gap: Option<f64>,
    warnings: Vec<String>,
}

#[derive(Serialize)]
struct CoherenceOut {
    command: &'static str,
    dim: usize,
    c_g: f64,
    method: &'static str,
    cis_diagonal: Vec<f64>,
    bounds: BoundsOut,
    measurement: Vec<VectorFile>,
    diagnostics: CoherenceDiagnosticsOut,
}

pub fn coherence(opts: &Options, input: &Path, numerical: bool) -> Result<(), CliError> {
    let rho = read_json::<MatrixFile>(input)?.to_density_matrix()?;
    let r = geometric_coherence(&rho, &opts.coherence(numerical)?)?;
    opts.emit(&CoherenceOut {
        command: "coherence",
        dim: rho.dim(),
        c_g: r.c_g,
        method: r.method.as_str(),
        cis_diagonal: r.cis.diagonal(),
        bounds: BoundsOut { l1: r.bounds.l1, l2: r.bounds.l2, l3: r.bounds.l3, l4: r.bounds.l4 },
        measurement: vectors(&r.measurement),
        diagnostics: CoherenceDiagnosticsOut {
            measurement_space: r.diagnostics.measurement_space.as_ref().map(Into::into),
            state_space: r.diagnostics.state_space.as_ref().map(Into::into),
            solver_gap: r.diagnostics.solver_gap,
            warnings: r.diagnostics.warnings.clone(),
        },
    })
}

#[derive(Serialize)]
struct DiscriminateOut {
    command: &'static str,
    method: &'static str,
    success: f64,
    error: f64,
    measurement: Vec<VectorFile>,
    diagnostics: SearchDiagnosticsOut,
}

pub fn discriminate(opts: &Options, input: &Path, method: MethodArg) -> Result<(), CliError> {
    let e = read_json::<EnsembleFile>(input)?.to_ensemble()?;
    let report = match method {
        MethodArg::Helstrom | MethodArg::Search => {
            let r = if method == MethodArg::Helstrom { helstrom_two(&e)? } else { optimal_vn_search(&e, &opts.search()?)? };
            DiscriminateOut {
                command: "discriminate",
                method: r.method.as_str(),
                success: r.success,
                error: r.error,
                measurement: vectors(&r.measurement),
                diagnostics: (&r.diagnostics).into(),
            }
        }
        MethodArg::Gso => {
            let g = gso_measurement(&e)?;
            let error = gso_error(&e)?;
            DiscriminateOut {
                command: "discriminate",
                method: "gso",
                success: 1.0 - error,
                error,
                measurement: vectors(&g.measurement),
                diagnostics: SearchDiagnosticsOut { restarts_used: 0, iterations: 0, unconverged: 0, working_dim: g.measurement.dim() },
            }
        }
    };
    opts.emit(&report)
}

pub fn qsd_state(opts: &Options, input: &Path, copies: u32) -> Result<(), CliError> {
    let e = read_json::<EnsembleFile>(input)?.to_ensemble()?;
    let qsd = multicopy_qsd_state(&e, copies).map_err(|err| CliError::Input(format!("invalid input: {err}")))?;
    opts.emit(&MatrixFile::from_matrix(qsd.matrix.as_matrix()))
}

#[derive(Serialize)]
struct CheckOut {
    name: &'static str,
    passed: bool,
    residual: f64,
    tolerance: f64,
}

#[derive(Serialize)]
struct VerificationOut {
    passed: bool,
    checks: Vec<CheckOut>,
}

impl From<&VerificationReport> for VerificationOut {
    fn from(v: &VerificationReport) -> Self {
        Self {
            passed: v.passed(),
            checks: v
                .checks
                .iter()
                .map(|c| CheckOut { name: c.name, passed: c.passed, residual: c.residual, tolerance: c.tolerance })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct RecoverOut {
    command: &'static str,
    success: f64,
    measurement: Vec<VectorFile>,
    certificate: Vec<f64>,
    weights: Vec<f64>,
    alignment: MatrixFile,
    qsd_state: MatrixFile,
    verification: VerificationOut,
}

pub fn recover(opts: &Options, input: &Path) -> Result<(), CliError> {
    let e = read_json::<EnsembleFile>(input)?.to_ensemble()?;
    let (result, verification) = recover_and_verify(&e, &opts.coherence(false)?);
    let Some(r) = result else {
        return Err(verification.error.expect("a failed recovery carries its error").into());
    };
    if let Some(err) = verification.error.clone() {
        return Err(err.into());
    }
    opts.emit(&RecoverOut {
        command: "recover",
        success: r.success,
        measurement: vectors(&r.measurement),
        certificate: r.certificate.clone(),
        weights: r.weights.clone(),
        alignment: MatrixFile::from_matrix(&r.alignment),
        qsd_state: MatrixFile::from_matrix(r.qsd.matrix.as_matrix()),
        verification: (&verification).into(),
    })?;
    if verification.passed() {
        Ok(())
    } else {
        Err(CliError::ChecksFailed("recovered measurement failed verification".into()))
    }
}

#[derive(Serialize)]
struct CriterionOut {
    id: u32,
    name: &'static str,
    passed: bool,
    worst: f64,
    tolerance: f64,
    samples: usize,
    detail: String,
}

#[derive(Serialize)]
struct WorkedRowOut {
    theta: f64,
    success: f64,
    closed_form: f64,
    overlap_deviation: f64,
}

#[derive(Serialize)]
struct MulticopyRowOut {
    copies: u32,
    gso_error: f64,
    c_g: f64,
    l1_half: f64,
}

#[derive(Serialize)]
struct ReproduceOut {
    command: &'static str,
    seed: u64,
    quick: bool,
    passed: bool,
    elapsed_seconds: f64,
    criteria: Vec<CriterionOut>,
    worked_example: Vec<WorkedRowOut>,
    multicopy: Vec<MulticopyRowOut>,
}

pub fn reproduce(opts: &Options, quick: bool) -> Result<(), CliError> {
    let started = Instant::now();
    let mut cfg = ReproduceConfig { quick, coherence: opts.coherence(false)?, ..Default::default() };
    if let Some(seed) = opts.seed {
        cfg.seed = seed;
    }
    let outcomes = run_all(&cfg);
    for o in &outcomes {
        eprintln!("{} {:>2} {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.id, o.name, o.detail);
    }
    let worked = worked_example_table(&WORKED_THETAS, &cfg.coherence.search)?;
    let multicopy = multicopy_table(&multicopy_ensemble(cfg.seed), if quick { 10 } else { 50 }, &cfg.coherence)?;
    let passed = outcomes.iter().all(|o| o.passed);
    opts.emit(&ReproduceOut {
        command: "reproduce",
        seed: cfg.seed,
        quick,
        passed,
        elapsed_seconds: started.elapsed().as_secs_f64(),
        criteria: outcomes
            .into_iter()
            .map(|o| CriterionOut {
                id: o.id,
                name: o.name,
                passed: o.passed,
                worst: o.worst,
                tolerance: o.tolerance,
                samples: o.samples,
                detail: o.detail,
            })
            .collect(),
        worked_example: worked
            .iter()
            .map(|r| WorkedRowOut { theta: r.theta, success: r.success, closed_form: r.closed_form, overlap_deviation: r.overlap_deviation })
            .collect(),
        multicopy: multicopy
            .iter()
            .map(|r| MulticopyRowOut { copies: r.copies, gso_error: r.gso_error, c_g: r.c_g, l1_half: r.l1_half })
            .collect(),
    })?;
    if passed {
        Ok(())
    } else {
        Err(CliError::ChecksFailed("some checks failed".into()))
    }
}

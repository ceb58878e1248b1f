//! Numerical checks of the library's headline identities, one function per
//! acceptance criterion, plus the tables the `reproduce` command prints.
//!
//! Every check draws from its own random stream of the configured seed, so a
//! check's verdict does not depend on which other checks ran.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::coherence::{
    c_l1, duality_check, geometric_coherence, solver_measurement_space, solver_state_space,
    x_state_fidelity, CoherenceConfig, XBlockStructure,
};
use crate::discrimination::{bruteforce_vn_d2, gso_error, helstrom_two, optimal_vn_search, SearchConfig};
use crate::ensembles::{align_unitary, induced_ensemble, mapping_residual, multicopy_qsd_state, qsd_state, PureEnsemble};
use crate::error::Result;
use crate::matcore::{columns, DensityMatrix, StateVector};
use crate::random::{
    haar_unitary, random_density_matrix, random_pairing, random_priors, random_state, random_x_state, stream, SeededRng,
};
use crate::recovery::recover_optimal_measurement;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReproduceConfig {
    pub seed: u64,
    /// Smaller sample counts for a smoke run.
    pub quick: bool,
    pub coherence: CoherenceConfig,
}

impl Default for ReproduceConfig {
    fn default() -> Self {
        Self { seed: 20_240_601, quick: false, coherence: CoherenceConfig::default() }
    }
}

impl ReproduceConfig {
    fn count(&self, full: usize, quick: usize) -> usize {
        if self.quick {
            quick
        } else {
            full
        }
    }

    fn rng(&self, criterion: u32) -> SeededRng {
        stream(self.seed, u64::from(criterion))
    }

    fn search(&self) -> SearchConfig {
        self.coherence.search
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    /// Worst value of the checked quantity over all samples.
    pub worst: f64,
    pub tolerance: f64,
    pub samples: usize,
    pub detail: String,
}

/// Tracks the worst deviation of a sampled quantity against a tolerance.
struct Worst {
    value: f64,
    extra_failures: Vec<String>,
}

impl Worst {
    fn new() -> Self {
        Self { value: f64::NEG_INFINITY, extra_failures: Vec::new() }
    }

    fn see(&mut self, v: f64) {
        if v.is_nan() || v > self.value {
            self.value = if v.is_nan() { f64::INFINITY } else { v };
        }
    }

    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.extra_failures.push(what());
        }
    }

    fn finish(self, id: u32, name: &'static str, tolerance: f64, samples: usize, what: &str) -> CriterionOutcome {
        let passed = self.value <= tolerance && self.extra_failures.is_empty();
        let mut detail = format!("{what}: worst {:.3e} (tolerance {:.0e}) over {samples} samples", self.value, tolerance);
        if let Some(first) = self.extra_failures.first() {
            detail.push_str(&format!("; {} failed side checks, first: {first}", self.extra_failures.len()));
        }
        CriterionOutcome { id, name, passed, worst: self.value, tolerance, samples, detail }
    }
}

fn errored(id: u32, name: &'static str, tolerance: f64, err: crate::Error) -> CriterionOutcome {
    CriterionOutcome { id, name, passed: false, worst: f64::INFINITY, tolerance, samples: 0, detail: format!("error: {err}") }
}

fn qubit_fidelity(rho: &DensityMatrix) -> f64 {
    0.5 * (1.0 + (1.0 - 4.0 * rho.get(0, 1).norm_sqr()).sqrt())
}

fn theta_pair(theta: f64) -> PureEnsemble {
    PureEnsemble::uniform(vec![
        StateVector::from_real(&[theta.cos(), theta.sin()]).expect("unit vector"),
        StateVector::from_real(&[theta.cos(), -theta.sin()]).expect("unit vector"),
    ])
    .expect("two states with equal priors")
}

fn random_ensemble(rng: &mut SeededRng, n: usize, d: usize) -> Result<PureEnsemble> {
    let states: Vec<_> = (0..n).map(|_| random_state(rng, d)).collect();
    PureEnsemble::new(random_priors(rng, n), states)
}

/// Numerical `C_g` of random qubits against `(1 - sqrt(1 - 4|rho_12|^2)) / 2`.
pub fn qubit_closed_form(cfg: &ReproduceConfig) -> CriterionOutcome {
    const ID: u32 = 1;
    const NAME: &str = "qubit closed form";
    let tol = 1e-7;
    let samples = cfg.count(1000, 50);
    let mut rng = cfg.rng(ID);
    let numerical = CoherenceConfig { force_numerical: true, ..cfg.coherence };
    let mut worst = Worst::new();
    for _ in 0..samples {
        let rho = random_density_matrix(&mut rng, 2);
        match geometric_coherence(&rho, &numerical) {
            Ok(r) => worst.see((r.c_g - (1.0 - qubit_fidelity(&rho))).abs()),
            Err(e) => return errored(ID, NAME, tol, e),
        }
    }
    worst.finish(ID, NAME, tol, samples, "|numerical C_g - closed form|")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkedExampleRow {
    pub theta: f64,
    pub success: f64,
    pub closed_form: f64,
    /// Largest `| |<f_i|psi_i>| - |<f^ref_i|psi_i>| |` against `(1, +-1)/sqrt(2)`.
    pub overlap_deviation: f64,
}

/// Recovery of the two-state example `(cos t, +-sin t)` with equal priors.
pub fn worked_example_table(thetas: &[f64], search: &SearchConfig) -> Result<Vec<WorkedExampleRow>> {
    let reference = [
        StateVector::from_real(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2])?,
        StateVector::from_real(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2])?,
    ];
    thetas
        .iter()
        .map(|&theta| {
            let e = theta_pair(theta);
            let r = recover_optimal_measurement(&e, search)?;
            let c2 = (2.0 * theta).cos();
            let overlap_deviation = (0..2)
                .map(|i| {
                    let got = r.measurement.vector(i).dotc(e.states()[i].as_vector()).norm();
                    (got - reference[i].inner(&e.states()[i]).norm()).abs()
                })
                .fold(0.0, f64::max);
            Ok(WorkedExampleRow { theta, success: r.success, closed_form: 0.5 * (1.0 + (1.0 - c2 * c2).sqrt()), overlap_deviation })
        })
        .collect()
}

pub const WORKED_THETAS: [f64; 4] = [PI / 12.0, PI / 8.0, PI / 6.0, PI / 4.0];

pub fn worked_example(cfg: &ReproduceConfig) -> CriterionOutcome {
    const ID: u32 = 2;
    const NAME: &str = "worked two-state example";
    let tol = 1e-9;
    let rows = match worked_example_table(&WORKED_THETAS, &cfg.search()) {
        Ok(rows) => rows,
        Err(e) => return errored(ID, NAME, tol, e),
    };
    let mut worst = Worst::new();
    for row in &rows {
        worst.see((row.success - row.closed_form).abs());
        worst.require(row.overlap_deviation <= 1e-7, || {
            format!("theta {:.4}: measurement overlaps off by {:.2e}", row.theta, row.overlap_deviation)
        });
    }
    worst.require((rows[1].success - 0.8535533906).abs() < 1e-10, || format!("pi/8 success {}", rows[1].success));
    worst.finish(ID, NAME, tol, rows.len(), "|recovered success - closed form|")
}

/// Helstrom success against an exhaustive search over qubit bases.
pub fn helstrom_oracle(cfg: &ReproduceConfig) -> CriterionOutcome {
    const ID: u32 = 3;
    const NAME: &str = "Helstrom vs brute force";
    let tol = 1e-6;
    let samples = cfg.count(200, 10);
    let mut rng = cfg.rng(ID);
    let mut worst = Worst::new();
    for _ in 0..samples {
        let outcome = random_ensemble(&mut rng, 2, 2)
            .and_then(|e| Ok((helstrom_two(&e)?.success, bruteforce_vn_d2(&e, 2000)?.success)));
        match outcome {
            Ok((h, b)) => {
                worst.see((h - b).abs());
                worst.require(b <= h + 1e-12, || format!("grid point {b} beats Helstrom {h}"));
            }
            Err(e) => return errored(ID, NAME, tol, e),
        }
    }
    worst.finish(ID, NAME, tol, samples, "|Helstrom - brute force|")
}

/// Blockwise closed form on random generalized X-states against the numerical solvers.
pub fn x_block_closed_form(cfg: &ReproduceConfig) -> CriterionOutcome {
    const ID: u32 = 4;
    const NAME: &str = "generalized X-state closed form";
    let tol = 1e-6;
    let samples = cfg.count(100, 10);
    let mut rng = cfg.rng(ID);
    let numerical = CoherenceConfig { force_numerical: true, ..cfg.coherence };
    let mut worst = Worst::new();
    for _ in 0..samples {
        let pairing = random_pairing(&mut rng, 4);
        let rho = random_x_state(&mut rng, &pairing);
        let closed = 1.0 - x_state_fidelity(&rho, &XBlockStructure { pairing });
        match geometric_coherence(&rho, &numerical) {
            Ok(r) => worst.see((r.c_g - closed).abs()),
            Err(e) => return errored(ID, NAME, tol, e),
        }
    }
    worst.finish(ID, NAME, tol, samples, "|numerical C_g - blockwise formula|")
}

/// `C_g <= l3 < l1`, `C_g <= l2`, `C_g <= l4` on random full-rank states.
pub fn bound_chain(cfg: &ReproduceConfig) -> CriterionOutcome {
    const ID: u32 = 5;
    const NAME: &str = "bound chain";
    let tol = 1e-7;
    let samples = cfg.count(200, 15);
    let mut rng = cfg.rng(ID);
    let mut worst = Worst::new();
    for k in 0..samples {
        let d = 3 + k % 3;
        let rho = random_density_matrix(&mut rng, d);
        let r = match geometric_coherence(&rho, &cfg.coherence) {
            Ok(r) => r,
            Err(e) => return errored(ID, NAME, tol, e),
        };
        let b = r.bounds;
        worst.see(r.c_g - b.l3);
        worst.see(r.c_g - b.l2);
        match b.l4 {
            Some(l4) => worst.see(r.c_g - l4),
            None => worst.require(false, || format!("l4 missing for a full-rank d={d} state")),
        }
        worst.require(b.l3 < b.l1, || format!("l3 = {} is not below l1 = {} (d={d})", b.l3, b.l1));
    }
    worst.finish(ID, NAME, tol, samples, "max(C_g - bound)")
}

/// `C_g + D_q = 1` on random full-rank states.
pub fn duality(cfg: &ReproduceConfig) -> CriterionOutcome {
    const ID: u32 = 6;
    const NAME: &str = "coherence/distinguishability duality";
    let tol = 1e-6;
    let samples = cfg.count(200, 15);
    let mut rng = cfg.rng(ID);
    let mut worst = Worst::new();
    for k in 0..samples {
        let rho = random_density_matrix(&mut rng, 2 + k % 3);
        match duality_check(&rho, &cfg.coherence) {
            Ok(dual) => worst.see((dual.sum - 1.0).abs()),
            Err(e) => return errored(ID, NAME, tol, e),
        }
    }
    worst.finish(ID, NAME, tol, samples, "|C_g + D_q - 1|")
}

/// `C_g(rho)` against the optimal error for the induced ensemble, and the two
/// numerical solvers against each other.
pub fn coherence_discrimination_equivalence(cfg: &ReproduceConfig) -> CriterionOutcome {
    const ID: u32 = 7;
    const NAME: &str = "coherence equals minimum error";
    let tol = 1e-6;
    let samples = cfg.count(200, 15);
    let mut rng = cfg.rng(ID);
    let state_search = cfg.coherence.state_search();
    let mut worst = Worst::new();
    for k in 0..samples {
        let rho = random_density_matrix(&mut rng, 2 + k % 3);
        let outcome = (|| -> Result<(f64, f64, f64, f64)> {
            let c_g = geometric_coherence(&rho, &cfg.coherence)?.c_g;
            let search = optimal_vn_search(&induced_ensemble(&rho)?, &cfg.search())?.success;
            let m = solver_measurement_space(&rho, &cfg.search())?.fidelity;
            let s = solver_state_space(&rho, &state_search)?.fidelity;
            Ok((c_g, search, m, s))
        })();
        match outcome {
            Ok((c_g, search, m, s)) => {
                worst.see((c_g - (1.0 - search)).abs());
                worst.see((m - s).abs());
            }
            Err(e) => return errored(ID, NAME, tol, e),
        }
    }
    worst.finish(ID, NAME, tol, samples, "max(|C_g - (1 - P_opt)|, |F_measurement - F_state|)")
}

/// Unitary alignment of random families with rotated (and conjugated-rotated) copies.
pub fn alignment(cfg: &ReproduceConfig) -> CriterionOutcome {
    const ID: u32 = 8;
    const NAME: &str = "unitary alignment";
    let tol = 1e-8;
    let samples = cfg.count(200, 20);
    let mut rng = cfg.rng(ID);
    let mut worst = Worst::new();
    for k in 0..samples {
        let d = 2 + k % 4;
        let n = 1 + (k / 4) % (d + 1);
        let conjugate = k % 2 == 1;
        let outcome = (|| -> Result<f64> {
            let phi: Vec<_> = (0..n).map(|_| random_state(&mut rng, d)).collect();
            let v = haar_unitary(&mut rng, d);
            let psi = phi
                .iter()
                .map(|s| StateVector::new(&v * if conjugate { s.conjugate() } else { s.clone() }.as_vector()))
                .collect::<Result<Vec<_>>>()?;
            let u = align_unitary(&psi, &phi, conjugate)?;
            let source: Vec<_> = if conjugate { phi.iter().map(StateVector::conjugate).collect() } else { phi };
            Ok(mapping_residual(&columns(&psi)?, &columns(&source)?, &u))
        })();
        match outcome {
            Ok(r) => worst.see(r),
            Err(e) => return errored(ID, NAME, tol, e),
        }
    }
    worst.finish(ID, NAME, tol, samples, "max_i ||psi_i - U phi_i||")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MulticopyRow {
    pub copies: u32,
    /// Gram-Schmidt error of `n` copies.
    pub gso_error: f64,
    /// Minimum error of `n` copies, `C_g` of the multi-copy QSD-state.
    pub c_g: f64,
    /// `C_l1(rho^(n)) / 2`.
    pub l1_half: f64,
    pub full_rank: bool,
}

/// Three states in dimension three with every pairwise overlap modulus in
/// `[0.5, 0.8]`, drawn from stream 9 of `seed`.
pub fn multicopy_ensemble(seed: u64) -> PureEnsemble {
    let mut rng = stream(seed, 9);
    loop {
        let e = random_ensemble(&mut rng, 3, 3).expect("valid random ensemble");
        let g = e.gram();
        let ok = (0..3).all(|i| (0..3).filter(|&j| j != i).all(|j| (0.5..=0.8).contains(&g[(i, j)].norm())));
        if ok {
            return e;
        }
    }
}

pub fn multicopy_table(e: &PureEnsemble, max_copies: u32, cfg: &CoherenceConfig) -> Result<Vec<MulticopyRow>> {
    (1..=max_copies)
        .map(|copies| {
            let rho = multicopy_qsd_state(e, copies)?.matrix;
            let induced = induced_ensemble(&rho)?;
            Ok(MulticopyRow {
                copies,
                gso_error: gso_error(&induced)?,
                c_g: geometric_coherence(&rho, cfg)?.c_g,
                l1_half: c_l1(&rho) / 2.0,
                full_rank: induced.len() == rho.dim() && induced.independence().independent,
            })
        })
        .collect()
}

/// Error of the Gram-Schmidt measurement on `n` copies: non-increasing in
/// `n`, negligible by 50 copies, and the optimal error below `C_l1 / 2`.
pub fn multicopy_convergence(cfg: &ReproduceConfig) -> CriterionOutcome {
    const ID: u32 = 9;
    const NAME: &str = "multi-copy convergence";
    let tol = 1e-6;
    let rows = match multicopy_table(&multicopy_ensemble(cfg.seed), 50, &cfg.coherence) {
        Ok(rows) => rows,
        Err(e) => return errored(ID, NAME, tol, e),
    };
    let mut worst = Worst::new();
    worst.see(rows.last().expect("50 rows").gso_error);
    for pair in rows.windows(2) {
        worst.require(pair[1].gso_error <= pair[0].gso_error + 1e-12, || {
            format!("GSO error rises from {:.3e} to {:.3e} at n = {}", pair[0].gso_error, pair[1].gso_error, pair[1].copies)
        });
    }
    for row in rows.iter().filter(|r| r.full_rank) {
        worst.require(row.c_g <= row.l1_half + 1e-9, || {
            format!("n = {}: error {:.3e} exceeds C_l1/2 = {:.3e}", row.copies, row.c_g, row.l1_half)
        });
    }
    worst.finish(ID, NAME, tol, rows.len(), "GSO error at n = 50")
}

/// `1 - P_opt <= C_g(QSD-state)` for four states in dimension three.
pub fn dependent_inequality(cfg: &ReproduceConfig) -> CriterionOutcome {
    const ID: u32 = 10;
    const NAME: &str = "dependent ensembles";
    let tol = 1e-6;
    let samples = cfg.count(100, 10);
    let mut rng = cfg.rng(ID);
    let mut worst = Worst::new();
    for _ in 0..samples {
        let outcome = (|| -> Result<f64> {
            let e = random_ensemble(&mut rng, 4, 3)?;
            let error = 1.0 - optimal_vn_search(&e, &cfg.search())?.success;
            Ok(error - geometric_coherence(&qsd_state(&e)?.matrix, &cfg.coherence)?.c_g)
        })();
        match outcome {
            Ok(excess) => worst.see(excess),
            Err(e) => return errored(ID, NAME, tol, e),
        }
    }
    worst.finish(ID, NAME, tol, samples, "max(1 - P_opt - C_g)")
}

/// Runs criteria 1 to 10 in order.
pub fn run_all(cfg: &ReproduceConfig) -> Vec<CriterionOutcome> {
    let checks: [fn(&ReproduceConfig) -> CriterionOutcome; 10] = [
        qubit_closed_form,
        worked_example,
        helstrom_oracle,
        x_block_closed_form,
        bound_chain,
        duality,
        coherence_discrimination_equivalence,
        alignment,
        multicopy_convergence,
        dependent_inequality,
    ];
    checks.iter().map(|check| check(cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_run_passes() {
        let cfg = ReproduceConfig { quick: true, ..Default::default() };
        for outcome in run_all(&cfg) {
            assert!(outcome.passed, "{} {}: {}", outcome.id, outcome.name, outcome.detail);
        }
    }

    #[test]
    fn multicopy_ensemble_meets_the_overlap_window() {
        let e = multicopy_ensemble(1);
        let g = e.gram();
        assert!((0..3).all(|i| (0..3).all(|j| i == j || g[(i, j)].norm() <= 0.8)));
    }

    #[test]
    fn verdicts_do_not_depend_on_order() {
        let cfg = ReproduceConfig { quick: true, seed: 11, ..Default::default() };
        assert_eq!(alignment(&cfg), run_all(&cfg)[7]);
    }
}

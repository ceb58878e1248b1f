//! Exhaustive grid search over qubit bases, used as a test oracle.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::ensembles::PureEnsemble;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForce {
    pub success: f64,
    /// `success` is within this much of the true von Neumann optimum.
    pub resolution: f64,
    /// Basis parameters of the best point.
    pub angle: f64,
    pub phase: f64,
}

/// Scans `f_1 = (cos t, e^{i phi} sin t)`, `f_2 = (-e^{-i phi} sin t, cos t)`
/// on a `grid_n`-point grid per axis (`t` in `[0, pi/2]`, `phi` in `[0, 2 pi)`),
/// then zooms in around the best cell.
///
/// The reported resolution is the coarse-grid bound: the objective has
/// Hessian norm at most 5, so the optimum is within `2.5 (dt^2 + dphi^2) / 4`
/// of the best grid point, and refinement only moves upward from there.
pub fn bruteforce_vn_d2(e: &PureEnsemble, grid_n: usize) -> Result<BruteForce> {
    if e.dim() != 2 || e.len() > 2 {
        return Err(Error::DimMismatch { expected: 2, found: e.dim().max(e.len()) });
    }
    let grid_n = grid_n.max(2);
    let eta1 = e.priors()[0];
    let eta2 = e.priors().get(1).copied().unwrap_or(0.0);
    let a = e.states()[0].as_vector();
    let (a1, b1) = (a[0], a[1]);
    let (a2, b2) = match e.states().get(1) {
        Some(s) => (s.as_vector()[0], s.as_vector()[1]),
        None => (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
    };

    let value = |t: f64, phi: f64| {
        let (s, c) = t.sin_cos();
        let w = Complex64::from_polar(1.0, phi);
        // <f_1|psi_1> and <f_2|psi_2>.
        let first = a1 * c + b1 * w.conj() * s;
        let second = b2 * c - a2 * w * s;
        eta1 * first.norm_sqr() + eta2 * second.norm_sqr()
    };

    let dt = FRAC_PI_2 / grid_n as f64;
    let dphi = 2.0 * PI / grid_n as f64;
    let phases: Vec<Complex64> = (0..grid_n).map(|l| Complex64::from_polar(1.0, l as f64 * dphi)).collect();
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for k in 0..=grid_n {
        let t = k as f64 * dt;
        let (s, c) = t.sin_cos();
        let (p1, q1) = (a1 * c, b1 * s);
        let (p2, q2) = (b2 * c, a2 * s);
        for (l, w) in phases.iter().enumerate() {
            let first = p1 + q1 * w.conj();
            let second = p2 - q2 * w;
            let v = eta1 * first.norm_sqr() + eta2 * second.norm_sqr();
            if v > best.0 {
                best = (v, t, l as f64 * dphi);
            }
        }
    }

    let (mut ht, mut hphi) = (dt, dphi);
    for _ in 0..20 {
        let (_, t0, phi0) = best;
        for k in -10..=10 {
            let t = (t0 + ht * k as f64 / 10.0).clamp(0.0, FRAC_PI_2);
            for l in -10..=10 {
                let phi = phi0 + hphi * l as f64 / 10.0;
                let v = value(t, phi);
                if v > best.0 {
                    best = (v, t, phi);
                }
            }
        }
        ht /= 4.0;
        hphi /= 4.0;
    }

    let resolution = 2.5 * (dt * dt + dphi * dphi) / 4.0;
    Ok(BruteForce { success: best.0.min(1.0), resolution, angle: best.1, phase: best.2.rem_euclid(2.0 * PI) })
}

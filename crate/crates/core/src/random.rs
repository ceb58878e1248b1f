//! Seeded sampling of unitaries, states and density matrices.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::matcore::{ComplexMatrix, DensityMatrix, StateVector};

pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream number `index` derived from `seed`.
pub fn stream(seed: u64, index: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

pub fn ginibre(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-distributed unitary via QR of a Ginibre matrix with the phases of
/// `R`'s diagonal pushed into `Q`.
pub fn haar_unitary(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let qr = ginibre(rng, dim, dim).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for z in q.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    q
}

/// Uniformly random pure state.
pub fn random_state(rng: &mut impl Rng, dim: usize) -> StateVector {
    let v = DVector::from_fn(dim, |_, _| gaussian(rng));
    StateVector::normalized(v).expect("gaussian vector is nonzero")
}

/// Full-rank density matrix `G G^dagger / Tr(G G^dagger)` from a square Ginibre `G`.
pub fn random_density_matrix(rng: &mut impl Rng, dim: usize) -> DensityMatrix {
    let g = ginibre(rng, dim, dim);
    let m = &g * g.adjoint();
    let trace = m.trace().re;
    DensityMatrix::new(m.unscale(trace)).expect("Ginibre product is a valid state")
}

/// Uniform point of the probability simplex.
pub fn random_priors(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

/// Random self-inverse pairing of `0..dim`: a shuffled order split into
/// consecutive pairs, each kept with probability 3/4 (otherwise both are
/// fixed points).
pub fn random_pairing(rng: &mut impl Rng, dim: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dim).collect();
    order.shuffle(rng);
    let mut pairing: Vec<usize> = (0..dim).collect();
    for pair in order.chunks_exact(2) {
        if rng.random_bool(0.75) {
            pairing[pair[0]] = pair[1];
            pairing[pair[1]] = pair[0];
        }
    }
    pairing
}

/// Full-rank state supported on the diagonal and the entries `(i, pairing[i])`,
/// with a Ginibre-product block per pair.
pub fn random_x_state(rng: &mut impl Rng, pairing: &[usize]) -> DensityMatrix {
    let d = pairing.len();
    let mut m = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        let j = pairing[i];
        if j < i {
            continue;
        }
        if j == i {
            m[(i, i)] = Complex64::new(gaussian(rng).norm_sqr(), 0.0);
            continue;
        }
        let g = ginibre(rng, 2, 2);
        let block = &g * g.adjoint();
        for (r, &row) in [i, j].iter().enumerate() {
            for (c, &col) in [i, j].iter().enumerate() {
                m[(row, col)] = block[(r, c)];
            }
        }
    }
    let trace = m.trace().re;
    DensityMatrix::new(m.unscale(trace)).expect("blockwise Ginibre products form a valid state")
}

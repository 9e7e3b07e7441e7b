//! Seeded random matrices, states and maps for tests, oracles and examples.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::LinearMapRep;
use crate::linalg::{c, hermitize, CMatrix, PsdOperator, C64};

/// Deterministic generator used everywhere a seed is accepted.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    hermitize(&ginibre(d, d, rng))
}

/// Haar-random unitary through the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let z = r[(k, k)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { c(1.0) };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Density matrix `GG*/Tr[GG*]` with `G` a `d × rank` Ginibre matrix.
pub fn random_state<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, rank.max(1), rng);
    let w = &g * g.adjoint();
    let t = w.trace().re;
    hermitize(&(w * c(1.0 / t)))
}

/// Unit vector, uniformly distributed on the complex sphere.
pub fn random_pure_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, 1, rng);
    let n = g.norm();
    g * c(1.0 / n)
}

/// Strictly positive state mixed with `I/d` at weight `floor`.
pub fn random_full_rank_state<R: Rng + ?Sized>(d: usize, floor: f64, rng: &mut R) -> PsdOperator {
    let rho = random_state(d, d, rng) * c(1.0 - floor) + CMatrix::identity(d, d) * c(floor / d as f64);
    PsdOperator::project(&rho)
}

/// CP map with `rank` Ginibre Kraus operators, scaled so that `‖Φ(I)‖_∞ = 1`.
pub fn random_cp_map<R: Rng + ?Sized>(n: usize, m: usize, rank: usize, rng: &mut R) -> LinearMapRep {
    let ops: Vec<CMatrix> = (0..rank.max(1)).map(|_| ginibre(m, n, rng)).collect();
    let map = LinearMapRep::kraus(ops).expect("shapes are consistent");
    let s = crate::linalg::max_eigenvalue(&map.apply(&CMatrix::identity(n, n)).expect("dimension"));
    map.scaled(1.0 / s)
}

/// Trace-preserving CP map with `rank` Kraus operators `K_i S^{-1/2}`, `S = ΣK_i*K_i`.
pub fn random_channel<R: Rng + ?Sized>(n: usize, m: usize, rank: usize, rng: &mut R) -> LinearMapRep {
    let ops: Vec<CMatrix> = (0..rank.max(1)).map(|_| ginibre(m, n, rng)).collect();
    let s: CMatrix = ops.iter().map(|k| k.adjoint() * k).fold(CMatrix::zeros(n, n), |a, b| a + b);
    let s_inv_half = PsdOperator::project(&s).pinv_power(0.5, 1e-14).matrix();
    LinearMapRep::kraus(ops.iter().map(|k| k * &s_inv_half).collect()).expect("shapes are consistent")
}

/// Mixed-unitary (hence unital and trace-preserving) channel with `count` Haar unitaries.
pub fn random_unital_channel<R: Rng + ?Sized>(d: usize, count: usize, rng: &mut R) -> LinearMapRep {
    let mut weights: Vec<f64> = (0..count.max(1)).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let ops = weights.iter().map(|w| random_unitary(d, rng) * c(w.sqrt())).collect();
    LinearMapRep::kraus(ops).expect("shapes are consistent")
}

/// CP map with full-rank Choi matrix `GG* + floor·I`, normalized so `‖Φ(I)‖_∞ = 1`.
pub fn random_positivity_improving_map<R: Rng + ?Sized>(d: usize, floor: f64, rng: &mut R) -> LinearMapRep {
    let g = ginibre(d * d, d * d, rng);
    let j = &g * g.adjoint() * c(1.0 / (d * d) as f64) + CMatrix::identity(d * d, d * d) * c(floor);
    let map = LinearMapRep::choi_map(hermitize(&j), d, d).expect("square Choi");
    let s = crate::linalg::max_eigenvalue(&map.apply(&CMatrix::identity(d, d)).expect("dimension"));
    map.scaled(1.0 / s)
}

/// Entrywise nonnegative matrix with entries uniform in `[0, 1)`.
pub fn random_nonneg_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> nalgebra::DMatrix<f64> {
    nalgebra::DMatrix::from_fn(rows, cols, |_, _| rng.random::<f64>())
}

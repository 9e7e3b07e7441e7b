//! Two-indexed norms and completely bounded norms.

mod common;

use common::*;
use schatten_maps::cb::{
    cb_norm_1p, cb_norm_22, cb_norm_qp_cp, cb_objective, subgradient_cb, two_indexed_norm, two_indexed_upper_bound,
    Regime, TwoIndexedProblem,
};
use schatten_maps::linalg::{c, hs_inner, kron, schatten_norm};
use schatten_maps::oracle::{brute_two_indexed, diamond_lower_bound, norm_22, BruteOptions};
use schatten_maps::random::{ginibre, random_channel, random_cp_map, random_hermitian, random_state, rng_from_seed};
use schatten_maps::{CMatrix, LinearMapRep, PsdOperator, SchattenIndex};

fn full_rank_state(d: usize, rng: &mut rand_chacha::ChaCha8Rng) -> CMatrix {
    random_state(d, d, rng) * c(0.8) + CMatrix::identity(d, d) * c(0.2 / d as f64)
}

#[test]
fn equal_indices_give_the_schatten_norm() {
    let mut rng = rng_from_seed(1);
    let x = ginibre(6, 6, &mut rng);
    for p in ["1", "2", "3"] {
        let p = idx(p);
        let prob = TwoIndexedProblem::new(x.clone(), (2, 3), p, p).unwrap();
        assert_eq!(prob.regime(), Regime::Equal);
        let r = two_indexed_norm(&prob, 1e-3).unwrap();
        assert_close(r.value_lo, schatten_norm(&x, p).unwrap(), 1e-12, "q = p");
        let brute = brute_two_indexed(&x, (2, 3), p, p, &BruteOptions::default()).unwrap();
        assert_close(brute, schatten_norm(&x, p).unwrap(), 1e-12, "brute q = p");
    }
}

#[test]
fn identity_operator() {
    let opts = BruteOptions { restarts: 8, steps: 300, seed: 0 };
    for (d, dp) in [(2, 2), (2, 3), (3, 2)] {
        for p in ["1", "2", "3"] {
            let p = idx(p);
            let x = CMatrix::identity(d * dp, d * dp);
            let want = (dp as f64).powf(p.reciprocal());
            let prob = TwoIndexedProblem::new(x.clone(), (d, dp), SchattenIndex::INFINITY, p).unwrap();
            let r = two_indexed_norm(&prob, 1e-4).unwrap();
            assert!(r.contains(want, 1e-6), "I on {d}x{dp}, p={p}: {r:?}");
            let brute = brute_two_indexed(&x, (d, dp), SchattenIndex::INFINITY, p, &opts).unwrap();
            assert_close(brute, want, 1e-4, "ascent over pure weights");
        }
    }
}

#[test]
fn product_operator() {
    let mut rng = rng_from_seed(2);
    let a0 = random_hermitian(2, &mut rng);
    let b0 = ginibre(3, 3, &mut rng);
    let x = kron(&a0, &b0);
    for p in ["1", "3/2", "3"] {
        let p = idx(p);
        let want = schatten_norm(&a0, SchattenIndex::INFINITY).unwrap() * schatten_norm(&b0, p).unwrap();
        let prob = TwoIndexedProblem::new(x.clone(), (2, 3), SchattenIndex::INFINITY, p).unwrap();
        let r = two_indexed_norm(&prob, 1e-4).unwrap();
        assert!(r.contains(want, 1e-6), "p={p}: {r:?} vs {want}");
        let opts = BruteOptions { restarts: 8, steps: 300, seed: 0 };
        let brute = brute_two_indexed(&x, (2, 3), SchattenIndex::INFINITY, p, &opts).unwrap();
        assert_close(brute, want, 1e-4, "ascent");
    }
}

#[test]
fn factorization_upper_bound() {
    let mut rng = rng_from_seed(3);
    let (a, b, y) = (random_state(2, 2, &mut rng), random_state(2, 2, &mut rng), ginibre(4, 4, &mut rng));
    let id = CMatrix::identity(2, 2);
    let x = kron(&a, &id) * &y * kron(&b, &id);
    let prob = TwoIndexedProblem::new(x.clone(), (2, 2), SchattenIndex::ONE, SchattenIndex::TWO).unwrap();
    assert_eq!(prob.regime(), Regime::Inf);
    let ub = two_indexed_upper_bound(&prob, &a, &b, &y).unwrap();
    assert!(ub >= schatten_norm(&x, SchattenIndex::TWO).unwrap() - 1e-12);
    assert!(two_indexed_upper_bound(&prob, &a, &b, &(&y * c(2.0))).is_err(), "not a factorization");
}

#[test]
fn cb_one_to_p_examples() {
    let mut rng = rng_from_seed(4);
    let ch = random_channel(2, 2, 2, &mut rng);
    let r = cb_norm_1p(&ch, SchattenIndex::ONE, 1e-4, false).unwrap();
    assert!(r.contains(1.0, 1e-6), "channel: {r:?}");

    let id = cb_norm_1p(&LinearMapRep::identity(2), SchattenIndex::TWO, 1e-4, false).unwrap();
    assert!(id.contains(2f64.sqrt(), 1e-6), "identity p=2: {id:?}");

    let diff = LinearMapRep::difference(&LinearMapRep::identity(2), &LinearMapRep::unitary(pauli_z()).unwrap()).unwrap();
    let dn = cb_norm_1p(&diff, SchattenIndex::ONE, 1e-4, false).unwrap();
    let lb = diamond_lower_bound(&diff, 2, &BruteOptions { restarts: 8, ..Default::default() }).unwrap();
    assert!(dn.contains(2.0, 1e-6), "{dn:?}");
    assert_close(lb, 2.0, 1e-6, "ancilla-assisted ascent");

    let inf = cb_norm_1p(&diff, SchattenIndex::INFINITY, 1e-4, false).unwrap();
    assert_close(inf.value_lo, schatten_norm(&diff.choi().unwrap(), SchattenIndex::INFINITY).unwrap(), 1e-12, "p = inf");
}

#[test]
fn cb_of_cp_maps_with_q_at_least_p() {
    for d in [2, 3] {
        for (q, p) in [("2", "1"), ("inf", "3/2"), ("3", "3")] {
            let (q, p) = (idx(q), idx(p));
            let r = cb_norm_qp_cp(&LinearMapRep::depolarizing(d), q, p, 1e-4).unwrap();
            assert!(r.contains(dimension_factor(d, q, p), 1e-6), "d={d} ({q},{p}): {r:?}");
        }
    }
    let one = SchattenIndex::ONE;
    let id = cb_norm_qp_cp(&LinearMapRep::identity(2), one, one, 1e-4).unwrap();
    assert!(id.contains(1.0, 1e-6));
    let mut rng = rng_from_seed(5);
    let ch = random_channel(2, 3, 2, &mut rng);
    let a = cb_norm_qp_cp(&ch, one, one, 1e-4).unwrap();
    let b = cb_norm_1p(&ch, one, 1e-4, false).unwrap();
    assert!(a.contains(1.0, 1e-6) && b.contains(1.0, 1e-6));
    assert!(cb_norm_qp_cp(&ch, idx("3/2"), idx("3"), 1e-3).is_err());
}

#[test]
fn cb_two_to_two_examples() {
    assert_close(cb_norm_22(&LinearMapRep::identity(3)).unwrap().value_lo, 1.0, 1e-12, "identity");
    // X ↦ Tr[X]·I/2 has the single singular value ‖vec I‖·‖vec I/2‖ = √2·(1/√2) = 1.
    assert_close(cb_norm_22(&LinearMapRep::depolarizing(2)).unwrap().value_lo, 1.0, 1e-12, "depolarizing");
    let a = nalgebra::DMatrix::from_row_slice(2, 3, &[1.0, 0.5, 0.0, 2.0, 0.0, 1.0]);
    let m = LinearMapRep::classical_embedding(&a).unwrap();
    assert_close(cb_norm_22(&m).unwrap().value_lo, norm_22(&m).unwrap(), 1e-12, "embedding");
    let mut rng = rng_from_seed(6);
    let cp = random_cp_map(3, 2, 2, &mut rng);
    assert_close(cb_norm_22(&cp).unwrap().value_lo, norm_22(&cp).unwrap(), 1e-12, "random CP");
}

#[test]
fn cb_gradient_matches_finite_differences() {
    let mut rng = rng_from_seed(7);
    let map = random_cp_map(2, 2, 2, &mut rng);
    let j = map.choi().unwrap();
    for p in ["3/2", "2", "3"] {
        let p = idx(p);
        let (a, b) = (full_rank_state(2, &mut rng), full_rank_state(2, &mut rng));
        let (ga, gb) = subgradient_cb(&j, (2, 2), &PsdOperator::new(&a).unwrap(), &PsdOperator::new(&b).unwrap(), p).unwrap();
        let f0 = cb_objective(&j, (2, 2), &a, &b, p).unwrap();
        let t = 1e-6;
        let h = random_hermitian(2, &mut rng);
        let fa = cb_objective(&j, (2, 2), &(&a + &h * c(t)), &b, p).unwrap();
        let fb = cb_objective(&j, (2, 2), &a, &(&b + &h * c(t)), p).unwrap();
        assert!(((fa - f0) / t - hs_inner(&ga, &h)).abs() < 1e-4, "A-gradient p={p}");
        assert!(((fb - f0) / t - hs_inner(&gb, &h)).abs() < 1e-4, "B-gradient p={p}");
    }
}

#[test]
fn cb_gradient_is_symmetric_for_cp_maps() {
    let mut rng = rng_from_seed(8);
    let map = random_cp_map(2, 3, 2, &mut rng);
    let j = map.choi().unwrap();
    let a = PsdOperator::new(&full_rank_state(2, &mut rng)).unwrap();
    let (ga, gb) = subgradient_cb(&j, (2, 3), &a, &a, idx("3/2")).unwrap();
    // J is Hermitian, so exchanging A and B transposes the weighted operator; the two partial
    // gradients coincide at A = B.
    assert!((ga - gb).norm() < 1e-10);
}

#[test]
fn p_two_objective_is_a_quadratic_form() {
    // At p = 2, F(A, B) = −Tr[J*(A^{1/2}⊗1)J(B^{1/2}⊗1)] with no outer power.
    let mut rng = rng_from_seed(9);
    let map = random_cp_map(2, 2, 2, &mut rng);
    let j = map.choi().unwrap();
    let (a, b) = (full_rank_state(2, &mut rng), full_rank_state(2, &mut rng));
    let id = CMatrix::identity(2, 2);
    let ra = kron(&PsdOperator::new(&a).unwrap().power(0.5).unwrap().matrix(), &id);
    let rb = kron(&PsdOperator::new(&b).unwrap().power(0.5).unwrap().matrix(), &id);
    let want = -(j.adjoint() * &ra * &j * &rb).trace().re;
    assert_close(cb_objective(&j, (2, 2), &a, &b, SchattenIndex::TWO).unwrap(), want, 1e-12, "p = 2");
}

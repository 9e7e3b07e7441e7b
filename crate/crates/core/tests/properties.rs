//! Property tests for the invariants the solvers rely on.
//!
//! Matrix-valued inputs are drawn from seeded generators so that proptest shrinks over the
//! seed and the scalar parameters.

mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use schatten_maps::boyd::{boyd_iterate, BoydOptions};
use schatten_maps::cb::cb_norm_1p;
use schatten_maps::dispatch::{dispatch, route, Mode, Route, SolveRequest};
use schatten_maps::ellipsoid::{
    ellipsoid_minimize, herm_to_vec, qp_root_objective, separation_oracle_box, separation_oracle_states, vec_to_herm,
    EllipsoidProblem, Separation,
};
use schatten_maps::io::{map_to_json, parse_map};
use schatten_maps::linalg::{c, hilbert_metric, hs_inner, kron, matrix_power_psd};
use schatten_maps::random::{
    random_channel, random_cp_map, random_full_rank_state, random_hermitian, random_positivity_improving_map,
    random_state, random_unitary, rng_from_seed,
};
use schatten_maps::sat::{build_gadget_channels, gadget_bound, product_value, TwoOutOfFourInstance};
use schatten_maps::{CMatrix, LinearMapRep, PsdOperator, SchattenIndex};

const ORDERED: [(&str, &str); 6] = [("2", "1"), ("3", "3/2"), ("4", "2"), ("3/2", "4/3"), ("2", "2"), ("5", "3")];

fn ordered_pair() -> impl Strategy<Value = (SchattenIndex, SchattenIndex)> {
    (0..ORDERED.len()).prop_map(|i| (idx(ORDERED[i].0), idx(ORDERED[i].1)))
}

fn any_index() -> impl Strategy<Value = SchattenIndex> {
    prop_oneof![
        Just(SchattenIndex::INFINITY),
        Just(SchattenIndex::ONE),
        Just(SchattenIndex::TWO),
        (1.0f64..12.0).prop_map(|v| SchattenIndex::new(v).unwrap()),
    ]
}

/// A feasible point of `{Y ≥ 0, Tr Y ≤ 1}`.
fn subnormalized_state(d: usize, t: f64, rng: &mut impl rand::Rng) -> CMatrix {
    random_state(d, d, rng) * c(t)
}

/// A feasible point of `{0 ≤ Y ≤ I}`.
fn box_point(d: usize, rng: &mut impl rand::Rng) -> CMatrix {
    let u = random_unitary(d, rng);
    let vals: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
    &u * diag(&vals) * u.adjoint()
}

fn cut_respects(w: &CMatrix, x: &CMatrix, y: &CMatrix) -> bool {
    hs_inner(w, &(y - x)) <= 1e-9 * (1.0 + w.norm() * (y - x).norm())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn state_cuts_keep_the_feasible_set(seed in any::<u64>(), scale in 0.05f64..3.0, t in 0.0f64..1.0) {
        let mut rng = rng_from_seed(seed);
        let d = 3;
        let x = random_hermitian(d, &mut rng) * c(scale);
        if let Separation::Cut(w) = separation_oracle_states(&x, 1e-12) {
            for _ in 0..8 {
                let y = subnormalized_state(d, t, &mut rng);
                prop_assert!(cut_respects(&w, &x, &y));
            }
            // The cut must also strictly separate X itself from something feasible.
            prop_assert!(hs_inner(&w, &(CMatrix::zeros(d, d) - &x)) < 0.0 || hs_inner(&w, &(CMatrix::identity(d, d) * c(1.0 / d as f64) - &x)) < 0.0);
        }
    }

    #[test]
    fn box_cuts_keep_the_feasible_set(seed in any::<u64>(), scale in 0.05f64..3.0) {
        let mut rng = rng_from_seed(seed);
        let d = 3;
        let x = random_hermitian(d, &mut rng) * c(scale) + CMatrix::identity(d, d) * c(0.5);
        if let Separation::Cut(w) = separation_oracle_box(&x, 1e-12) {
            for _ in 0..8 {
                let y = box_point(d, &mut rng);
                prop_assert!(cut_respects(&w, &x, &y));
            }
        }
    }

    #[test]
    fn root_objective_is_concave_on_states(seed in any::<u64>(), (q, p) in ordered_pair()) {
        let mut rng = rng_from_seed(seed);
        let map = random_cp_map(2, 3, 2, &mut rng);
        let adj = map.adjoint();
        let a = random_state(2, 2, &mut rng);
        let b = random_state(2, 2, &mut rng);
        let mid = (&a + &b) * c(0.5);
        let g = |x: &CMatrix| -qp_root_objective(&map, &adj, x, q, p).unwrap().0;
        prop_assert!(g(&mid) >= 0.5 * (g(&a) + g(&b)) - 1e-10 * g(&mid).max(1.0));
    }

    #[test]
    fn subgradient_inequality(seed in any::<u64>(), (q, p) in ordered_pair()) {
        let mut rng = rng_from_seed(seed);
        let map = random_cp_map(2, 2, 2, &mut rng);
        let adj = map.adjoint();
        let x = random_full_rank_state(2, 0.05, &mut rng).matrix();
        let y = random_state(2, 2, &mut rng);
        let (fx, gx) = qp_root_objective(&map, &adj, &x, q, p).unwrap();
        let (fy, _) = qp_root_objective(&map, &adj, &y, q, p).unwrap();
        // Convex F: F(Y) ≥ F(X) + ⟨∇F(X), Y − X⟩.
        prop_assert!(fy >= fx + hs_inner(&gx, &(&y - &x)) - 1e-9, "{fy} < {fx} + ...");
    }

    #[test]
    fn hilbert_metric_contracts_under_positive_maps(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let map = random_positivity_improving_map(3, 0.05, &mut rng);
        let a = random_full_rank_state(3, 0.01, &mut rng);
        let b = random_full_rank_state(3, 0.01, &mut rng);
        let fa = PsdOperator::new(&map.apply(&a.matrix()).unwrap()).unwrap();
        let fb = PsdOperator::new(&map.apply(&b.matrix()).unwrap()).unwrap();
        prop_assert!(hilbert_metric(&fa, &fb) <= hilbert_metric(&a, &b) * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn hilbert_metric_is_projective(seed in any::<u64>(), s in 0.1f64..10.0, r in 0.2f64..3.0) {
        let mut rng = rng_from_seed(seed);
        let a = random_full_rank_state(3, 0.01, &mut rng);
        let b = random_full_rank_state(3, 0.01, &mut rng);
        let base = hilbert_metric(&a, &b);
        prop_assert!((hilbert_metric(&a.scaled(s), &b) - base).abs() <= 1e-8 * base.max(1.0));
        // Operator powers r ≤ 1 contract the metric by at least the factor r.
        if r <= 1.0 {
            let ar = matrix_power_psd(&a, r).unwrap();
            let br = matrix_power_psd(&b, r).unwrap();
            prop_assert!(hilbert_metric(&ar, &br) <= r * base * (1.0 + 1e-8) + 1e-10);
        }
    }

    #[test]
    fn routing_is_total(q in any_index(), p in any_index(), mode_id in 0usize..4, cp in any::<bool>()) {
        let mode = [Mode::Norm, Mode::NormPositive, Mode::Cb, Mode::CbPositive][mode_id];
        let r = route(mode, q, p, cp);
        let (qv, pv) = (q.value(), p.value());
        if cp && mode == Mode::Norm && pv <= 2.0 && qv >= 2.0 && !(qv == 2.0 && pv == 2.0) {
            prop_assert_eq!(r, Route::Boyd);
        } else if mode.is_cb() && qv == 1.0 && !(pv == 2.0 && qv == 2.0) {
            prop_assert_eq!(r, Route::Cb1p);
        } else if !cp && mode == Mode::Norm && !(qv == 2.0 && pv == 2.0) {
            prop_assert!(matches!(r, Route::Refuse(_)));
        }
    }

    #[test]
    fn map_files_round_trip(seed in any::<u64>(), n in 1usize..4, m in 1usize..4, rank in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        let map = random_cp_map(n, m, rank, &mut rng);
        let back = parse_map(&map_to_json(&map).unwrap()).unwrap();
        prop_assert_eq!((back.in_dim(), back.out_dim()), (n, m));
        let diff = (map.choi().unwrap() - back.choi().unwrap()).norm();
        prop_assert!(diff <= 1e-12 * map.choi().unwrap().norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn ellipsoid_volume_shrinks(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let d = 2;
        let h = random_hermitian(d, &mut rng);
        let gh = h.clone();
        let mut problem = EllipsoidProblem {
            center: herm_to_vec(&(CMatrix::identity(d, d) * c(0.5 / d as f64))),
            shape: None,
            outer_radius: 1.0,
            inner_radius: 0.5 / d as f64,
            eps: 1e-4,
            max_iter: Some(200),
            separation: Box::new(move |v| {
                Ok(match separation_oracle_states(&vec_to_herm(v.as_slice(), d), 1e-12) {
                    Separation::Feasible => None,
                    Separation::Cut(w) => Some(herm_to_vec(&w)),
                })
            }),
            objective: Box::new(move |v| Ok((hs_inner(&gh, &vec_to_herm(v.as_slice(), d)), herm_to_vec(&gh)))),
            seed,
            track_volume: true,
        };
        let out = ellipsoid_minimize(&mut problem).unwrap();
        let n = 4.0;
        for w in out.log_det_history.windows(2) {
            prop_assert!(0.5 * (w[1] - w[0]) <= -1.0 / (2.0 * n) + 1e-9);
        }
        // The minimum of Tr[HX] over subnormalized states is min(0, λ_min(H)).
        let lmin = h.symmetric_eigenvalues().min().min(0.0);
        prop_assert!(out.value >= lmin - 1e-9);
        prop_assert!(out.value <= lmin + 1e-2);
    }

    #[test]
    fn power_iteration_brackets_are_monotone(seed in any::<u64>(), (q, p) in (0usize..3).prop_map(|i| [("2", "1"), ("4", "3/2"), ("inf", "2")][i])) {
        let mut rng = rng_from_seed(seed);
        let map = random_positivity_improving_map(2, 0.05, &mut rng);
        let (q, p) = (idx(q), idx(p));
        let run = boyd_iterate(&map, q, p, &BoydOptions { rel_tol: 1e-9, ..Default::default() }, false).unwrap();
        let mut lo = 0.0_f64;
        let mut hi = f64::INFINITY;
        for b in &run.history {
            prop_assert!(b.lower <= b.upper * (1.0 + 1e-10));
            if !q.is_infinite() {
                prop_assert!(b.m() >= lo * (1.0 - 1e-9) && b.big_m() <= hi * (1.0 + 1e-9));
                lo = b.m();
                hi = b.big_m();
            }
        }
        prop_assert!(run.result.value_lo <= run.result.value_hi * (1.0 + 1e-12));
    }

    #[test]
    fn sat_gadgets_respect_the_bound_on_symmetric_products(seed in any::<u64>(), eta in 0.25f64..16.0, rank in 1usize..5) {
        let mut rng = rng_from_seed(seed);
        let signs: Vec<String> = (0..3).map(|_| (0..4).map(|_| if rng.random::<bool>() { '+' } else { '-' }).collect()).collect();
        let inst = TwoOutOfFourInstance::from_signed(
            5,
            &[([1, 2, 3, 4], signs[0].as_str()), ([2, 3, 4, 5], signs[1].as_str()), ([1, 3, 4, 5], signs[2].as_str())],
        ).unwrap();
        let g = build_gadget_channels(&inst, eta).unwrap();
        let rho = random_state(5, rank, &mut rng);
        let doubled = kron(&rho, &rho);
        let factors: Vec<LinearMapRep> = g.factors().into_iter().cloned().collect();
        let inputs = vec![doubled.clone(), doubled.clone(), doubled.clone(), doubled];
        for p in [SchattenIndex::ONE, SchattenIndex::TWO, idx("3")] {
            let v = product_value(&factors, &inputs, p).unwrap();
            prop_assert!(v <= gadget_bound(eta, 5, p) * (1.0 + 1e-9), "{v} > f at p = {p}");
        }
    }

    #[test]
    fn dispatch_is_deterministic(seed in any::<u64>(), (q, p) in ordered_pair()) {
        let mut rng = rng_from_seed(seed);
        let ch = random_channel(2, 2, 2, &mut rng);
        let mut req = SolveRequest::new(q, p, Mode::Norm);
        req.seed = seed;
        let a = dispatch(&ch, &req).unwrap().result;
        let b = dispatch(&ch, &req).unwrap().result;
        prop_assert_eq!(a.value_lo.to_bits(), b.value_lo.to_bits());
        prop_assert_eq!(a.value_hi.to_bits(), b.value_hi.to_bits());
        prop_assert_eq!(a.iterations, b.iterations);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 4, ..ProptestConfig::default() })]

    #[test]
    fn cb_norms_decrease_in_p_and_positive_inputs_do_not_exceed(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let a = random_channel(2, 2, 2, &mut rng);
        let b = random_channel(2, 2, 2, &mut rng);
        let diff = LinearMapRep::difference(&a, &b).unwrap();
        let mut prev_lo = f64::INFINITY;
        for p in ["1", "2", "4"] {
            let general = cb_norm_1p(&diff, idx(p), 1e-3, false).unwrap();
            let positive = cb_norm_1p(&diff, idx(p), 1e-3, true).unwrap();
            prop_assert!(positive.value_lo <= general.value_hi * (1.0 + 1e-6));
            prop_assert!(general.value_lo <= prev_lo * (1.0 + 1e-6));
            prev_lo = general.value_hi;
        }
    }
}

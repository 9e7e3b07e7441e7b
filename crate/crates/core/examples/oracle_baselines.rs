//! Independent baselines: classical mixed norms, random-restart ascent and the
//! superoperator 2→2 norm.
//!
//! ```bash
//! cargo run --example oracle_baselines
//! ```

use schatten_maps::ellipsoid::norm_qp_cp;
use schatten_maps::oracle::{brute_norm_qp, classical_mixed_norm, norm_22, BruteOptions};
use schatten_maps::random::{random_cp_map, random_nonneg_matrix, rng_from_seed};
use schatten_maps::{LinearMapRep, Result, SchattenIndex};

pub fn run_example() -> Result<()> {
    let mut rng = rng_from_seed(5);
    let a = random_nonneg_matrix(3, 3, &mut rng);
    let (q, p) = (SchattenIndex::new(3.0)?, SchattenIndex::new(1.5)?);
    let classical = classical_mixed_norm(&a, q, p)?;
    let embedded = norm_qp_cp(&LinearMapRep::classical_embedding(&a)?, q, p, 1e-5)?;
    println!(
        "classical ||A||_(3 -> 3/2) = {:.8} via {:?}; embedded map [{:.8}, {:.8}]",
        classical.value, classical.method, embedded.value_lo, embedded.value_hi
    );

    let map = random_cp_map(2, 2, 2, &mut rng);
    let opts = BruteOptions { restarts: 16, ..Default::default() };
    let brute = brute_norm_qp(&map, q, p, &opts)?;
    let solver = norm_qp_cp(&map, q, p, 1e-5)?;
    println!("random CP map: ascent {:.8}, ellipsoid [{:.8}, {:.8}]", brute.value, solver.value_lo, solver.value_hi);
    assert!(brute.value <= solver.value_hi * (1.0 + 1e-6));

    let two = SchattenIndex::TWO;
    println!("2->2: superoperator {:.10}, ascent {:.10}", norm_22(&map)?, brute_norm_qp(&map, two, two, &opts)?.value);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

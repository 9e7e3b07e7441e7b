//! Ellipsoid method for q→p norms of CP maps with p ≤ q, cross-checked against the
//! power iteration where both apply.
//!
//! ```bash
//! cargo run --example ellipsoid_norm
//! ```

use schatten_maps::boyd::boyd_solve_general;
use schatten_maps::ellipsoid::norm_qp_cp;
use schatten_maps::random::{random_channel, rng_from_seed};
use schatten_maps::{Result, SchattenIndex};

pub fn run_example() -> Result<()> {
    let mut rng = rng_from_seed(11);
    let map = random_channel(2, 2, 2, &mut rng);
    for (q, p) in [("4", "2"), ("2", "1"), ("3", "3/2"), ("inf", "1")] {
        let (q, p): (SchattenIndex, SchattenIndex) = (q.parse()?, p.parse()?);
        let e = norm_qp_cp(&map, q, p, 1e-4)?;
        let b = boyd_solve_general(&map, q, p, 1e-6)?;
        println!(
            "({q}, {p}): ellipsoid [{:.8}, {:.8}] ({} iters), power iteration [{:.8}, {:.8}]",
            e.value_lo, e.value_hi, e.iterations, b.value_lo, b.value_hi
        );
        assert!(e.value_lo <= b.value_hi * (1.0 + 1e-6) && b.value_lo <= e.value_hi * (1.0 + 1e-6));
    }
    // p <= q outside p <= 2 <= q is the ellipsoid method's own territory.
    let (q, p) = (SchattenIndex::new(1.5)?, SchattenIndex::new(1.2)?);
    let e = norm_qp_cp(&map, q, p, 1e-4)?;
    println!("({q}, {p}): ellipsoid [{:.8}, {:.8}]", e.value_lo, e.value_hi);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

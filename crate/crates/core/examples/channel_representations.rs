//! Kraus, Choi and measure-and-prepare forms of the same map, plus structural flags.
//!
//! ```bash
//! cargo run --example channel_representations
//! ```

use schatten_maps::linalg::c;
use schatten_maps::random::{random_channel, random_state, rng_from_seed};
use schatten_maps::{CMatrix, LinearMapRep, Result};

pub fn run_example() -> Result<()> {
    let mut rng = rng_from_seed(7);
    let kraus = random_channel(2, 3, 2, &mut rng);
    let choi = LinearMapRep::choi_map(kraus.choi()?, 2, 3)?;
    let rho = random_state(2, 2, &mut rng);
    let gap = (kraus.apply(&rho)? - choi.apply(&rho)?).norm();
    println!("Kraus vs Choi action mismatch: {gap:.2e}");
    assert!(gap < 1e-12);

    let flags = kraus.flags()?;
    println!("random channel: cp={:?} tp={:?} floor={:?}", flags.is_cp, flags.is_tp, flags.positivity_floor);

    // Completely dephasing map as measure-and-prepare: measure Z, prepare the outcome.
    let proj = |k: usize| CMatrix::from_fn(2, 2, |i, j| if i == k && j == k { c(1.0) } else { c(0.0) });
    let dephase = LinearMapRep::measure_prepare(vec![(proj(0), proj(0)), (proj(1), proj(1))])?;
    let plus = CMatrix::from_element(2, 2, c(0.5));
    println!("dephased |+><+| = {:?}", dephase.apply(&plus)?.map(|z| z.re).as_slice());

    // A difference of channels is Hermiticity preserving but not CP.
    let diff = LinearMapRep::difference(&LinearMapRep::identity(2), &dephase)?;
    println!("identity - dephasing: cp={} tp={}", diff.is_cp()?, diff.is_tp()?);
    assert!(!diff.is_cp()?);

    // The adjoint satisfies <Y, Phi(X)> = <Phi*(Y), X>.
    let y = random_state(3, 3, &mut rng);
    let lhs = (y.adjoint() * kraus.apply(&rho)?).trace();
    let rhs = (kraus.adjoint().apply(&y)?.adjoint() * &rho).trace();
    println!("adjoint identity residual: {:.2e}", (lhs - rhs).norm());
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

//! Nonlinear power iteration with its certified bracket `[m(ω), M(ω)]` for p ≤ 2 ≤ q.
//!
//! ```bash
//! cargo run --example power_iteration_bracket
//! ```

use schatten_maps::boyd::{boyd_iterate, BoydOptions};
use schatten_maps::random::{random_positivity_improving_map, rng_from_seed};
use schatten_maps::{Result, SchattenIndex};

pub fn run_example() -> Result<()> {
    let mut rng = rng_from_seed(3);
    let map = random_positivity_improving_map(3, 0.05, &mut rng);
    let (q, p): (SchattenIndex, SchattenIndex) = ("4".parse()?, "3/2".parse()?);
    let run = boyd_iterate(&map, q, p, &BoydOptions { rel_tol: 1e-12, ..Default::default() }, false)?;
    println!("iter  lower          upper          gap");
    for (k, b) in run.history.iter().enumerate().take(12) {
        println!("{k:>4}  {:.10}  {:.10}  {:.2e}", b.value_lo(p), b.value_hi(p), b.gap());
    }
    let r = &run.result;
    println!("||map||+_(4 -> 3/2) in [{:.12}, {:.12}] after {} iterations", r.value_lo, r.value_hi, r.iterations);
    // The lower end never decreases and the upper end never increases.
    for w in run.history.windows(2) {
        assert!(w[1].value_lo(p) >= w[0].value_lo(p) * (1.0 - 1e-12));
        assert!(w[1].value_hi(p) <= w[0].value_hi(p) * (1.0 + 1e-12));
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

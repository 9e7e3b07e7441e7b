//! Depolarizing smoothing makes any channel positivity improving; the smoothed norm brackets
//! the original one.
//!
//! ```bash
//! cargo run --example smoothing
//! ```

use schatten_maps::boyd::{boyd_solve, smoothing_kappa, BoydOptions};
use schatten_maps::random::{random_unital_channel, rng_from_seed};
use schatten_maps::{Result, SchattenIndex};

pub fn run_example() -> Result<()> {
    let mut rng = rng_from_seed(2);
    let map = random_unital_channel(3, 2, &mut rng);
    let (q, p) = (SchattenIndex::INFINITY, SchattenIndex::new(1.5)?);
    let kappa = smoothing_kappa(3, 3, q, p, Some(1.0));
    for delta in [1e-1, 1e-2, 1e-3] {
        let smoothed = map.smooth(delta)?;
        let r = boyd_solve(&smoothed, q, p, &BoydOptions::default())?;
        let lo = r.value_lo / (1.0 - delta + delta * kappa);
        let hi = r.value_hi / (1.0 - delta - delta * kappa);
        println!("delta = {delta:.0e}: smoothed norm {:.10}, original in [{lo:.10}, {hi:.10}]", r.value_lo);
    }
    // A unital channel attains ||I||_p / ||I||_inf = 3^(1/p).
    println!("closed form 3^(2/3) = {:.10}", 3f64.powf(1.0 / p.value()));
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

//! The routing table: which (mode, q, p, CP) combinations run a solver and which are refused.
//!
//! ```bash
//! cargo run --example dispatch_routing
//! ```

use schatten_maps::dispatch::{dispatch, route, Method, Mode, Route, SolveRequest};
use schatten_maps::random::{random_channel, rng_from_seed};
use schatten_maps::{Error, LinearMapRep, Result, SchattenIndex};

pub fn run_example() -> Result<()> {
    let indices = ["1", "3/2", "2", "4", "inf"];
    for mode in [Mode::Norm, Mode::Cb] {
        for cp in [true, false] {
            println!("mode {mode:?}, CP = {cp} (rows q, columns p)");
            for q in indices {
                let row: Vec<String> = indices
                    .iter()
                    .map(|p| {
                        let r = route(mode, q.parse().unwrap(), p.parse().unwrap(), cp);
                        match r {
                            Route::Refuse(f) => format!("{:?}", f.kind).to_lowercase(),
                            other => format!("{other:?}").to_lowercase(),
                        }
                    })
                    .collect();
                println!("  q = {q:<4} {}", row.iter().map(|s| format!("{s:<13}")).collect::<String>());
            }
        }
    }

    let mut rng = rng_from_seed(1);
    let channel = random_channel(2, 2, 2, &mut rng);
    let req = SolveRequest::new("4".parse()?, SchattenIndex::TWO, Mode::Norm);
    let sol = dispatch(&channel, &req)?;
    println!("channel, 4 -> 2: [{:.8}, {:.8}] via {:?}", sol.result.value_lo, sol.result.value_hi, sol.provenance.route);

    let diff = LinearMapRep::difference(&channel, &LinearMapRep::identity(2))?;
    let mut req = SolveRequest::new(SchattenIndex::ONE, SchattenIndex::ONE, Mode::NormPositive);
    match dispatch(&diff, &req) {
        Err(e @ Error::Hardness(_)) => println!("refused (exit code {}): {e}", e.exit_code()),
        other => panic!("expected a refusal, got {other:?}"),
    }
    req.method = Method::Oracle;
    let lb = dispatch(&diff, &req)?;
    println!("oracle fallback: value >= {:.8}", lb.result.value_lo);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

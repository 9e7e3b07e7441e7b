//! 2-out-of-4 SAT instances, the four gadget channels and the certificate gap.
//!
//! ```bash
//! cargo run --example sat_gadgets
//! ```

use schatten_maps::sat::{
    build_gadget_channels, certificate_value, exhaustive_sat, gadget_bound, gap_certify, CertificateVariant,
    TwoOutOfFourInstance,
};
use schatten_maps::{Result, SchattenIndex};

pub fn run_example() -> Result<()> {
    let p = SchattenIndex::TWO;
    let sat = TwoOutOfFourInstance::from_signed(4, &[([1, 2, 3, 4], "++++")])?;
    let witness = exhaustive_sat(&sat)?.expect("a single clause is satisfiable");
    println!("d = {}, m = {}, witness {witness}", sat.d(), sat.m());

    let g = build_gadget_channels(&sat, 1.0)?;
    for (name, map) in ["trace", "swap", "cube", "H"].iter().zip(g.factors()) {
        println!("phi_{name:<5} {} -> {}", map.in_dim(), map.out_dim());
    }
    // eta = d^2 normalizes the bound to 1.
    let v = certificate_value(&sat, 16.0, p, &witness, CertificateVariant::OneToP)?;
    println!("certificate value at eta = d^2: {v:.12} (bound {:.12})", gadget_bound(16.0, 4, p));

    // Both sign patterns of one clause cannot hold at once.
    let unsat = TwoOutOfFourInstance::from_signed(4, &[([1, 2, 3, 4], "++++"), ([1, 2, 3, 4], "+++-")])?;
    for inst in [&sat, &unsat] {
        let r = gap_certify(inst, 1.0, p)?;
        println!(
            "satisfiable={} bound={:.9} best={:.9} gap={:.3e} verified={}",
            r.satisfiable, r.gadget_bound, r.max_certificate_value, r.delta_gap, r.verified
        );
        assert!(r.verified);
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

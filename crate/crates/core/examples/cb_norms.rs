//! Completely bounded norms: diamond distance of two unitary channels, the cb 1→p norm via
//! the two-indexed norm of the Choi matrix, and the exact 2→2 case.
//!
//! ```bash
//! cargo run --example cb_norms
//! ```

use schatten_maps::cb::{cb_norm_1p, cb_norm_22, two_indexed_norm, TwoIndexedProblem};
use schatten_maps::linalg::{c, kron};
use schatten_maps::oracle::{diamond_lower_bound, BruteOptions};
use schatten_maps::{CMatrix, LinearMapRep, Result, SchattenIndex};

pub fn run_example() -> Result<()> {
    // Identity versus conjugation by Z: the channels are perfectly distinguishable
    // with entanglement, so the diamond distance is 2.
    let z = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(-1.0)]));
    let diff = LinearMapRep::difference(&LinearMapRep::identity(2), &LinearMapRep::unitary(z.clone())?)?;
    let diamond = cb_norm_1p(&diff, SchattenIndex::ONE, 1e-4, false)?;
    let lower = diamond_lower_bound(&diff, 2, &BruteOptions { restarts: 8, ..Default::default() })?;
    println!("||id - Z.Z||_diamond in [{:.6}, {:.6}], ascent lower bound {lower:.6}", diamond.value_lo, diamond.value_hi);
    assert!(diamond.contains(2.0, 1e-3));

    // The cb 2->2 norm is exact: the largest singular value of the superoperator.
    println!("||id - Z.Z||_cb,2->2 = {:.12}", cb_norm_22(&diff)?.value_lo);

    // Product operator: ||A ⊗ B||_(inf, p) = ||A||_inf ||B||_p.
    let a = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(0.25)]));
    let b = CMatrix::from_row_slice(2, 2, &[c(2.0), c(1.0), c(1.0), c(1.0)]);
    let p = SchattenIndex::new(3.0)?;
    let prob = TwoIndexedProblem::new(kron(&a, &b), (2, 2), SchattenIndex::INFINITY, p)?;
    let r = two_indexed_norm(&prob, 1e-4)?;
    let expected = schatten_maps::linalg::schatten_norm(&b, p)?;
    println!("||A (x) B||_(inf,3) in [{:.8}, {:.8}], closed form {expected:.8}", r.value_lo, r.value_hi);
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

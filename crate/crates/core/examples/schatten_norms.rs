//! Schatten norms, index parsing, Hölder duals and the Hilbert projective metric.
//!
//! ```bash
//! cargo run --example schatten_norms
//! ```

use schatten_maps::linalg::{c, hilbert_metric, schatten_norm};
use schatten_maps::{CMatrix, PsdOperator, Result, SchattenIndex};

pub fn run_example() -> Result<()> {
    // diag(3, 4): trace norm 7, Frobenius 5, operator norm 4.
    let x = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0), c(-4.0)]));
    for spelled in ["1", "4/3", "2", "3", "inf"] {
        let p: SchattenIndex = spelled.parse()?;
        println!("||diag(3,-4)||_{:<4} = {:.6}   (dual index {})", spelled, schatten_norm(&x, p)?, p.dual());
    }
    assert!((schatten_norm(&x, SchattenIndex::TWO)? - 5.0).abs() < 1e-12);
    assert!("0.5".parse::<SchattenIndex>().is_err());

    // Matrix powers contract the Hilbert metric: d(A^r, B^r) <= r d(A, B).
    let a = PsdOperator::new(&CMatrix::from_row_slice(2, 2, &[c(2.0), c(0.5), c(0.5), c(1.0)]))?;
    let b = PsdOperator::new(&CMatrix::from_row_slice(2, 2, &[c(1.0), c(-0.3), c(-0.3), c(3.0)]))?;
    let d = hilbert_metric(&a, &b);
    for r in [0.25, 0.5, 0.75] {
        let dr = hilbert_metric(&a.power(r)?, &b.power(r)?);
        println!("r = {r:.2}: d(A^r, B^r) = {dr:.6} <= r d(A, B) = {:.6}", r * d);
        assert!(dr <= r * d + 1e-12);
    }
    Ok(())
}

fn main() -> Result<()> {
    run_example()
}

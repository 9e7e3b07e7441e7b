//! Mixed Schatten norms `‖Φ‖_{q→p}`, their positive-restricted variants and completely
//! bounded norms of linear maps between matrix algebras.
//!
//! Solvers:
//! - [`boyd`]: a nonlinear power iteration with a certified two-sided bracket, for
//!   positive maps with `1 ≤ p ≤ 2 ≤ q ≤ ∞`.
//! - [`ellipsoid`]: a central-cut ellipsoid method on a concave reformulation, for CP maps
//!   with `p ≤ q`.
//! - [`cb`]: completely bounded `1→p` norms through the Choi matrix, the `2→2` fast path
//!   and CP maps with `q ≥ p`.
//!
//! [`sat`] builds the 2-out-of-4-SAT gadget channels used as hardness witnesses, and
//! [`oracle`] holds independent brute-force baselines.

pub mod channel;
pub mod error;
pub mod linalg;
pub mod random;
pub mod result;
pub mod boyd;
pub mod ellipsoid;
pub mod cb;
pub mod sat;
pub mod oracle;
pub mod io;
pub mod dispatch;
pub mod validation;

pub use channel::{LinearMapRep, MapFlags, Tri};
pub use error::{Error, Result};
pub use linalg::{CMatrix, PsdOperator, SchattenIndex, C64};
pub use result::{NormResult, Witness};

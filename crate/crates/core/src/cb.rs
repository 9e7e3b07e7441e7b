//! Two-indexed Schatten norms and completely bounded norms.
//!
//! For `q > p` the two-indexed norm of `X` on `C^n ⊗ C^m` is
//!
//! ```text
//! ‖X‖_{(q,p)} = sup_{A,B ∈ D} ‖(A^{1/2r} ⊗ 1) X (B^{1/2r} ⊗ 1)‖_p,     1/r = 1/p − 1/q
//! ```
//!
//! with `D` the subnormalized states on `C^n`. The objective is jointly concave in `(A, B)`
//! and is maximized with the ellipsoid method in `2n²` real coordinates. The cb `1→p` norm of
//! any linear map equals the `(∞, p)` norm of its Choi matrix.

use nalgebra::DVector;

use crate::boyd::boyd_solve_general;
use crate::channel::LinearMapRep;
use crate::ellipsoid::{
    ellipsoid_minimize, frechet_power_adjoint, herm_to_vec, norm_qp_cp_with, separation_oracle_states, vec_to_herm,
    EllipsoidOptions, EllipsoidProblem, Separation, PSD_TOL, SPECTRAL_FLOOR,
};
use crate::error::{Error, Result};
use crate::linalg::{self, c, eigh, kron, partial_trace_second, CMatrix, PsdOperator, SchattenIndex};
use crate::result::{NormResult, Witness};

/// Relative threshold below which eigenvalues of `W` count as zero in negative powers.
const KERNEL_RTOL: f64 = 1e-12;

/// Which of the three formulas defines `‖X‖_{(q,p)}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// `q < p`: infimum over factorizations.
    Inf,
    /// `q = p`: the Schatten norm.
    Equal,
    /// `q > p`: supremum over weights.
    Sup,
}

#[derive(Clone, Debug)]
pub struct TwoIndexedProblem {
    pub x: CMatrix,
    /// `(n_A, n_B)`; the weights act on the first factor.
    pub dims: (usize, usize),
    pub q: SchattenIndex,
    pub p: SchattenIndex,
}

impl TwoIndexedProblem {
    pub fn new(x: CMatrix, dims: (usize, usize), q: SchattenIndex, p: SchattenIndex) -> Result<Self> {
        let (n, m) = dims;
        if n == 0 || m == 0 || x.nrows() != n * m || x.ncols() != n * m {
            return Err(Error::Input(format!(
                "operator of size {}x{} does not split as {n} x {m}",
                x.nrows(),
                x.ncols()
            )));
        }
        linalg::ensure_finite(&x)?;
        Ok(TwoIndexedProblem { x, dims, q, p })
    }

    pub fn regime(&self) -> Regime {
        let (q, p) = (self.q.value(), self.p.value());
        if q == p {
            Regime::Equal
        } else if q < p {
            Regime::Inf
        } else {
            Regime::Sup
        }
    }

    /// `r` with `1/r = |1/q − 1/p|` (infinite when `q = p`).
    pub fn r(&self) -> f64 {
        1.0 / (self.q.reciprocal() - self.p.reciprocal()).abs()
    }
}

/// Evaluation of the weighted objective at `(A, B)`.
struct WeightedParts {
    /// `‖(A^{1/2r} ⊗ 1) X (B^{1/2r} ⊗ 1)‖_p`.
    root: f64,
    /// Root-form gradients `(∇_A, ∇_B)` of the value above.
    grad_root: (CMatrix, CMatrix),
    /// Gradients of `H = root^p`.
    grad_power: (CMatrix, CMatrix),
}

/// `U((U*KU) ∘ L)U*` for one argument, where `K = Tr_2[Z Ŵ^{p/2−1} Z*]` and
/// `Z = X(B^{1/2r} ⊗ 1)`, `W = Z*(A^{1/r} ⊗ 1)Z = w_max·Ŵ`.
///
/// Returns `(Ĥ = Tr Ŵ^{p/2}, w_max, adjoint-derivative of K)`.
fn one_side(
    x: &CMatrix,
    dims: (usize, usize),
    a: &(DVector<f64>, CMatrix),
    b: &(DVector<f64>, CMatrix),
    s: f64,
    p: f64,
) -> (f64, f64, CMatrix) {
    let (n, m) = dims;
    let id_m = CMatrix::identity(m, m);
    let a_pow = linalg::from_spectrum(&a.0.map(|v| v.powf(s)), &a.1);
    let b_half = linalg::from_spectrum(&b.0.map(|v| v.powf(0.5 * s)), &b.1);
    let z = x * kron(&b_half, &id_m);
    let w = linalg::hermitize(&(z.adjoint() * kron(&a_pow, &id_m) * &z));
    let (wv, wu) = eigh(&w);
    let wmax = wv.iter().fold(0.0_f64, |acc, v| acc.max(*v));
    if wmax <= 0.0 {
        return (0.0, 0.0, CMatrix::zeros(n, n));
    }
    let thr = KERNEL_RTOL * wmax;
    let e = 0.5 * p;
    let h_hat: f64 = wv.iter().map(|&v| if v > thr { (v / wmax).powf(e) } else { 0.0 }).sum();
    let inner = linalg::from_spectrum(&wv.map(|v| if v > thr { (v / wmax).powf(e - 1.0) } else { 0.0 }), &wu);
    let k = partial_trace_second(&(&z * inner * z.adjoint()), (n, m)).expect("bipartite dims");
    (h_hat, wmax, frechet_power_adjoint(&a.0, &a.1, s, &k))
}

fn floored(a: &CMatrix) -> (DVector<f64>, CMatrix) {
    let (vals, vecs) = eigh(a);
    let top = vals.iter().fold(0.0_f64, |acc, v| acc.max(*v));
    (vals.map(|v| v.max(SPECTRAL_FLOOR * top)), vecs)
}

fn weighted_parts(x: &CMatrix, dims: (usize, usize), a: &CMatrix, b: &CMatrix, r: f64, p: f64) -> WeightedParts {
    let s = 1.0 / r;
    let (ae, be) = (floored(a), floored(b));
    let (h_hat, wmax, ka) = one_side(x, dims, &ae, &be, s, p);
    let (_, _, kb) = one_side(&x.adjoint(), dims, &be, &ae, s, p);
    let n = dims.0;
    if h_hat == 0.0 {
        let z = CMatrix::zeros(n, n);
        return WeightedParts { root: 0.0, grad_root: (z.clone(), z.clone()), grad_power: (z.clone(), z) };
    }
    let root = wmax.sqrt() * h_hat.powf(1.0 / p);
    let f_root = 0.5 * root / (wmax * h_hat);
    let f_power = 0.5 * p * wmax.powf(0.5 * p - 1.0);
    WeightedParts {
        root,
        grad_root: (&ka * c(f_root), &kb * c(f_root)),
        grad_power: (ka * c(f_power), kb * c(f_power)),
    }
}

/// `F(A, B) = −Tr[((B^{1/2p} ⊗ 1) J*(A^{1/p} ⊗ 1) J (B^{1/2p} ⊗ 1))^{p/2}]`.
pub fn cb_objective(j: &CMatrix, dims: (usize, usize), a: &CMatrix, b: &CMatrix, p: SchattenIndex) -> Result<f64> {
    check_cb_args(j, dims, a, b, p)?;
    let wp = weighted_parts(j, dims, a, b, p.value(), p.value());
    Ok(-wp.root.powf(p.value()))
}

/// Partial gradients `(∇_A F, ∇_B F)` of [`cb_objective`].
pub fn subgradient_cb(
    j: &CMatrix,
    dims: (usize, usize),
    a: &PsdOperator,
    b: &PsdOperator,
    p: SchattenIndex,
) -> Result<(CMatrix, CMatrix)> {
    let (am, bm) = (a.matrix(), b.matrix());
    check_cb_args(j, dims, &am, &bm, p)?;
    let wp = weighted_parts(j, dims, &am, &bm, p.value(), p.value());
    Ok((-wp.grad_power.0, -wp.grad_power.1))
}

fn check_cb_args(j: &CMatrix, dims: (usize, usize), a: &CMatrix, b: &CMatrix, p: SchattenIndex) -> Result<()> {
    if p.is_infinite() {
        return Err(Error::Unsupported("the weighted objective needs finite p".into()));
    }
    let (n, m) = dims;
    if j.nrows() != n * m || a.nrows() != n || b.nrows() != n {
        return Err(Error::Dimension(format!("weights must act on the first factor of {n} x {m}")));
    }
    Ok(())
}

/// Maximizes the weighted objective over `D × D` (or the diagonal `A = B`).
fn sup_regime(
    x: &CMatrix,
    dims: (usize, usize),
    r: f64,
    p: f64,
    symmetric: bool,
    opts: &EllipsoidOptions,
) -> Result<NormResult> {
    let n = dims.0;
    let scale = linalg::spectral_norm(x);
    if scale == 0.0 {
        return Ok(NormResult::exact(0.0, "ellipsoid"));
    }
    let xs = x * c(1.0 / scale);
    let k = n * n;
    let blocks = if symmetric { 1 } else { 2 };
    let half = herm_to_vec(&(CMatrix::identity(n, n) * c(0.5 / n as f64)));
    let center = DVector::from_iterator(blocks * k, (0..blocks).flat_map(|_| half.iter().copied()));
    let split = move |v: &DVector<f64>| -> (CMatrix, CMatrix) {
        let a = vec_to_herm(&v.as_slice()[..k], n);
        let b = if symmetric { a.clone() } else { vec_to_herm(&v.as_slice()[k..], n) };
        (a, b)
    };
    let xs2 = xs.clone();
    let mut problem = EllipsoidProblem {
        center,
        shape: None,
        outer_radius: (blocks as f64).sqrt(),
        inner_radius: 0.5 / n as f64,
        eps: opts.eps,
        max_iter: opts.max_iter,
        separation: Box::new(move |v| {
            for blk in 0..blocks {
                let xb = vec_to_herm(&v.as_slice()[blk * k..(blk + 1) * k], n);
                if let Separation::Cut(w) = separation_oracle_states(&xb, PSD_TOL) {
                    let mut g = DVector::zeros(blocks * k);
                    g.rows_mut(blk * k, k).copy_from(&herm_to_vec(&w));
                    return Ok(Some(g));
                }
            }
            Ok(None)
        }),
        objective: Box::new(move |v| {
            let (a, b) = split(v);
            let wp = weighted_parts(&xs2, dims, &a, &b, r, p);
            let g = if symmetric {
                herm_to_vec(&(-(&wp.grad_root.0 + &wp.grad_root.1)))
            } else {
                let mut g = DVector::zeros(2 * k);
                g.rows_mut(0, k).copy_from(&herm_to_vec(&(-&wp.grad_root.0)));
                g.rows_mut(k, k).copy_from(&herm_to_vec(&(-&wp.grad_root.1)));
                g
            };
            Ok((-wp.root, g))
        }),
        seed: opts.seed,
        track_volume: false,
    };
    let out = ellipsoid_minimize(&mut problem)?;
    drop(problem);
    let v = out
        .minimizer
        .ok_or_else(|| Error::Degenerate("no feasible center was visited".into()))?;
    let (a, b) = split(&v);
    let normalize = |m: CMatrix| {
        let op = PsdOperator::project(&m);
        let t = op.trace();
        if t > 0.0 { op.scaled(1.0 / t) } else { PsdOperator::maximally_mixed(n) }
    };
    let (a, b) = (normalize(a), normalize(b));
    let lo = weighted_parts(&xs, dims, &a.matrix(), &b.matrix(), r, p).root;
    Ok(NormResult {
        value_lo: lo,
        value_hi: lo / (1.0 - opts.eps),
        optimizer: Some(Witness::Pair(a, b)),
        iterations: out.iterations,
        method: "ellipsoid".into(),
        converged: out.converged,
        certified_upper: false,
        diagnostics: Vec::new(),
    }
    .scaled(scale))
}

/// `‖X‖_{(q,p)}` for `q ≥ p`.
pub fn two_indexed_norm(problem: &TwoIndexedProblem, eps: f64) -> Result<NormResult> {
    two_indexed_norm_with(problem, &EllipsoidOptions { eps, ..Default::default() })
}

pub fn two_indexed_norm_with(problem: &TwoIndexedProblem, opts: &EllipsoidOptions) -> Result<NormResult> {
    match problem.regime() {
        Regime::Equal => Ok(NormResult::exact(linalg::schatten_norm(&problem.x, problem.p)?, "exact")),
        Regime::Inf => Err(Error::Unsupported(
            "the infimum regime q < p has no solver; use two_indexed_upper_bound with an explicit factorization".into(),
        )),
        Regime::Sup => {
            if !(opts.eps > 0.0 && opts.eps <= 0.5) {
                return Err(Error::Input(format!("relative tolerance must lie in (0, 0.5], got {}", opts.eps)));
            }
            sup_regime(&problem.x, problem.dims, problem.r(), problem.p.value(), false, opts)
        }
    }
}

/// Upper bound `‖A‖_{2r}‖B‖_{2r}‖Y‖_p ≥ ‖X‖_{(q,p)}` in the regime `q < p`, for a
/// factorization `X = (A ⊗ 1) Y (B ⊗ 1)`.
pub fn two_indexed_upper_bound(problem: &TwoIndexedProblem, a: &CMatrix, b: &CMatrix, y: &CMatrix) -> Result<f64> {
    if problem.regime() != Regime::Inf {
        return Err(Error::Input("factorization bounds apply to the regime q < p".into()));
    }
    let (n, m) = problem.dims;
    let id = CMatrix::identity(m, m);
    let rebuilt = kron(a, &id) * y * kron(b, &id);
    let tol = 1e-9 * (1.0 + problem.x.norm());
    if a.nrows() != n || b.nrows() != n || y.nrows() != n * m || (rebuilt - &problem.x).norm() > tol {
        return Err(Error::Input("(A, B, Y) is not a factorization of X".into()));
    }
    let two_r = SchattenIndex::new(2.0 * problem.r())?;
    Ok(linalg::schatten_norm(a, two_r)? * linalg::schatten_norm(b, two_r)? * linalg::schatten_norm(y, problem.p)?)
}

/// `‖Ψ‖_{cb,1→p} = ‖J_Ψ‖_{(∞,p)}` for any linear map.
///
/// `positive_only` restricts the inputs to positive semidefinite operators, which forces
/// `A = B`. At `p = ∞` both variants equal `‖J_Ψ‖_∞`.
pub fn cb_norm_1p(map: &LinearMapRep, p: SchattenIndex, eps: f64, positive_only: bool) -> Result<NormResult> {
    cb_norm_1p_with(map, p, &EllipsoidOptions { eps, ..Default::default() }, positive_only)
}

pub fn cb_norm_1p_with(
    map: &LinearMapRep,
    p: SchattenIndex,
    opts: &EllipsoidOptions,
    positive_only: bool,
) -> Result<NormResult> {
    if !(opts.eps > 0.0 && opts.eps <= 0.5) {
        return Err(Error::Input(format!("relative tolerance must lie in (0, 0.5], got {}", opts.eps)));
    }
    let j = map.choi()?;
    let dims = (map.in_dim(), map.out_dim());
    if p.is_infinite() {
        let mut r = NormResult::exact(linalg::spectral_norm(&j), "exact");
        r.diagnostics.push("p = inf: the (inf, inf) norm of the Choi matrix is its operator norm".into());
        return Ok(r);
    }
    let mut r = sup_regime(&j, dims, p.value(), p.value(), positive_only, opts)?;
    r.diagnostics.push(format!("Choi matrix (inf, {p}) norm{}", if positive_only { ", A = B" } else { "" }));
    Ok(r)
}

/// `‖Φ‖_{cb,q→p}` for a CP map with `q ≥ p`, which equals `‖Φ‖_{q→p}`.
pub fn cb_norm_qp_cp(map: &LinearMapRep, q: SchattenIndex, p: SchattenIndex, eps: f64) -> Result<NormResult> {
    if q.value() < p.value() {
        return Err(Error::Unsupported(format!(
            "cb norms with q < p have no known efficient algorithm, got (q, p) = ({q}, {p})"
        )));
    }
    map.positivity_floor()?;
    let mut r = if p.value() <= 2.0 && q.value() >= 2.0 {
        boyd_solve_general(map, q, p, eps)?
    } else {
        norm_qp_cp_with(map, q, p, &EllipsoidOptions { eps, ..Default::default() })?
    };
    r.diagnostics.push("cb norm of a CP map with q >= p equals the plain norm".into());
    Ok(r)
}

/// `‖Φ‖_{cb,2→2} = ‖Φ‖_{2→2}`, the largest singular value of the superoperator
/// (the realigned Choi matrix).
pub fn cb_norm_22(map: &LinearMapRep) -> Result<NormResult> {
    let j = map.choi()?;
    let r = linalg::realign(&j, (map.in_dim(), map.out_dim()))?;
    let mut out = NormResult::exact(linalg::spectral_norm(&r), "exact22");
    out.iterations = 1;
    Ok(out)
}

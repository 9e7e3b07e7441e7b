//! Central-cut ellipsoid method over Hermitian matrices.
//!
//! Hermitian `d × d` matrices are identified with `R^{d²}` through the isometry
//! `X ↦ (X_kk; √2·Re X_ij, √2·Im X_ij for i < j)`, so that `Re Tr[WX]` becomes a dot product.
//! Feasible sets are the subnormalized states `D = {X ≥ 0, Tr X ≤ 1}` and the box
//! `{0 ≤ ω ≤ I}`.
//!
//! The `q→p` objective of a CP map `Φ` is `X ↦ ‖Φ(X^{1/q})‖_p` on `D`. It is concave for
//! `p ≤ q`; the solver minimizes its negation. Gradients come from the Daleckii–Krein
//! formula for the Fréchet derivative of `X ↦ X^{1/q}`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::channel::LinearMapRep;
use crate::error::{Error, Result};
use crate::linalg::{c, eigh, power_divided_difference, CMatrix, PsdOperator, SchattenIndex};
use crate::random::rng_from_seed;
use crate::result::{NormResult, Witness};

/// Absolute eigenvalue tolerance of the membership tests.
pub const PSD_TOL: f64 = 1e-12;

/// Relative spectral floor applied before taking fractional powers.
pub const SPECTRAL_FLOOR: f64 = 1e-14;

/// Relative width `gᵀPg/(‖g‖²·tr P)` below which the shape update is no longer accurate.
pub const PRECISION_FLOOR: f64 = 1e-13;

/// Maximum number of restarts after a loss of positive definiteness in the shape matrix.
pub const MAX_RESTARTS: usize = 3;

/// Number of real coordinates of a Hermitian `d × d` matrix.
pub fn hermitian_dim(d: usize) -> usize {
    d * d
}

/// Real coordinates of a Hermitian matrix; only the diagonal and upper triangle are read.
pub fn herm_to_vec(x: &CMatrix) -> DVector<f64> {
    let d = x.nrows();
    let s = std::f64::consts::SQRT_2;
    let mut v = DVector::zeros(d * d);
    let mut k = d;
    for i in 0..d {
        v[i] = x[(i, i)].re;
        for j in (i + 1)..d {
            v[k] = s * x[(i, j)].re;
            v[k + 1] = s * x[(i, j)].im;
            k += 2;
        }
    }
    v
}

/// Inverse of [`herm_to_vec`].
pub fn vec_to_herm(v: &[f64], d: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut x = CMatrix::zeros(d, d);
    let mut k = d;
    for i in 0..d {
        x[(i, i)] = c(v[i]);
        for j in (i + 1)..d {
            let z = crate::C64::new(s * v[k], s * v[k + 1]);
            x[(i, j)] = z;
            x[(j, i)] = z.conj();
            k += 2;
        }
    }
    x
}

/// Answer of a separation oracle.
#[derive(Clone, Debug)]
pub enum Separation {
    Feasible,
    /// Normal `W` with `Re Tr[W(Y − X)] ≤ 0` for every feasible `Y`.
    Cut(CMatrix),
}

/// Separation oracle for `D = {X ≥ 0, Tr X ≤ 1}`.
///
/// Returns `W = P₊ − I` when `X` has an eigenvalue below `−psd_tol`, `W = I` when `X` is
/// positive semidefinite with trace above `1 + psd_tol`, and `Feasible` otherwise.
pub fn separation_oracle_states(x: &CMatrix, psd_tol: f64) -> Separation {
    let d = x.nrows();
    let (vals, vecs) = eigh(x);
    if vals[0] < -psd_tol {
        let p_plus = spectral_projector(&vals, &vecs, |v| v >= -psd_tol);
        return Separation::Cut(p_plus - CMatrix::identity(d, d));
    }
    if vals.sum() > 1.0 + psd_tol {
        return Separation::Cut(CMatrix::identity(d, d));
    }
    Separation::Feasible
}

/// Separation oracle for the operator interval `{0 ≤ ω ≤ I}`.
///
/// The upper constraint is cut with the projector onto the eigenvectors above `1 + psd_tol`.
pub fn separation_oracle_box(x: &CMatrix, psd_tol: f64) -> Separation {
    let d = x.nrows();
    let (vals, vecs) = eigh(x);
    if vals[0] < -psd_tol {
        let p_plus = spectral_projector(&vals, &vecs, |v| v >= -psd_tol);
        return Separation::Cut(p_plus - CMatrix::identity(d, d));
    }
    if vals[d - 1] > 1.0 + psd_tol {
        return Separation::Cut(spectral_projector(&vals, &vecs, |v| v > 1.0 + psd_tol));
    }
    Separation::Feasible
}

fn spectral_projector(vals: &DVector<f64>, vecs: &CMatrix, keep: impl Fn(f64) -> bool) -> CMatrix {
    let d = vals.len();
    let mut p = CMatrix::zeros(d, d);
    for k in 0..d {
        if keep(vals[k]) {
            let v = vecs.column(k);
            p += v * v.adjoint();
        }
    }
    p
}

type SeparationFn<'a> = Box<dyn FnMut(&DVector<f64>) -> Result<Option<DVector<f64>>> + 'a>;
type ObjectiveFn<'a> = Box<dyn FnMut(&DVector<f64>) -> Result<(f64, DVector<f64>)> + 'a>;

/// Convex minimization problem `min F` over a convex body `K` given by oracles.
///
/// `K` must lie in the ball of radius `outer_radius` around `center` and contain the ball of
/// radius `inner_radius` around some point.
pub struct EllipsoidProblem<'a> {
    pub center: DVector<f64>,
    /// Initial shape matrix `P` of `{x : (x − c)ᵀP⁻¹(x − c) ≤ 1}`; `None` means `R²·I`.
    pub shape: Option<DMatrix<f64>>,
    pub outer_radius: f64,
    pub inner_radius: f64,
    pub eps: f64,
    /// Override of the iteration count `⌈2n²·ln(4R/(rε))⌉`.
    pub max_iter: Option<usize>,
    /// `None` for feasible points, the cut normal otherwise.
    pub separation: SeparationFn<'a>,
    /// Objective value and a subgradient at a feasible point.
    pub objective: ObjectiveFn<'a>,
    pub seed: u64,
    /// Record `ln det P` after every update.
    pub track_volume: bool,
}

#[derive(Clone, Debug)]
pub struct EllipsoidOutcome {
    /// Best feasible point found (`None` when no center was ever feasible).
    pub minimizer: Option<DVector<f64>>,
    pub value: f64,
    pub iterations: usize,
    pub restarts: usize,
    pub converged: bool,
    pub log_det_history: Vec<f64>,
}

/// `⌈2n²·ln(4R/(rε))⌉`.
pub fn iteration_bound(n: usize, outer: f64, inner: f64, eps: f64) -> usize {
    let nf = n as f64;
    (2.0 * nf * nf * (4.0 * outer / (inner * eps)).ln()).ceil().max(1.0) as usize
}

fn log_det(p: &DMatrix<f64>) -> f64 {
    match p.clone().cholesky() {
        Some(ch) => 2.0 * ch.l().diagonal().iter().map(|v| v.ln()).sum::<f64>(),
        None => f64::NEG_INFINITY,
    }
}

/// Runs the central-cut ellipsoid method and returns the best feasible point.
pub fn ellipsoid_minimize(problem: &mut EllipsoidProblem<'_>) -> Result<EllipsoidOutcome> {
    let n = problem.center.len();
    if n == 0 {
        return Err(Error::Input("empty problem".into()));
    }
    if !(problem.outer_radius >= problem.inner_radius && problem.inner_radius > 0.0) {
        return Err(Error::Input("radii must satisfy R >= r > 0".into()));
    }
    if !(problem.eps > 0.0 && problem.eps < 1.0) {
        return Err(Error::Input(format!("relative tolerance must lie in (0, 1), got {}", problem.eps)));
    }
    let budget = problem
        .max_iter
        .unwrap_or_else(|| iteration_bound(n, problem.outer_radius, problem.inner_radius, problem.eps));
    let nf = n as f64;
    let r0 = problem.outer_radius;
    let mut x = problem.center.clone();
    let mut p = problem.shape.clone().unwrap_or_else(|| DMatrix::identity(n, n) * (r0 * r0));
    let mut rng = rng_from_seed(problem.seed);
    let mut best: Option<(f64, DVector<f64>)> = None;
    let mut restarts = 0;
    let mut history = Vec::new();
    if problem.track_volume {
        history.push(log_det(&p));
    }
    let mut iterations = 0;
    let mut converged = true;
    // Certified lower bound on min F: the minimizer stays inside every ellipsoid, so
    // F* ≥ F(x) − √(gᵀPg) at each feasible center.
    let mut lower = f64::NEG_INFINITY;
    while iterations < budget {
        iterations += 1;
        let (g, feasible_value) = match (problem.separation)(&x)? {
            Some(w) => (w, None),
            None => {
                let (f, g) = (problem.objective)(&x)?;
                if best.as_ref().is_none_or(|(bf, _)| f < *bf) {
                    best = Some((f, x.clone()));
                }
                (g, Some(f))
            }
        };
        let pg = &p * &g;
        let gpg = g.dot(&pg);
        if gpg == 0.0 && g.iter().all(|v| *v == 0.0) {
            // Zero subgradient at a feasible point: x minimizes F.
            break;
        }
        if let Some(f) = feasible_value {
            if gpg > 0.0 {
                lower = lower.max(f - gpg.sqrt());
            }
            let fb = best.as_ref().map_or(f, |(bf, _)| *bf);
            if fb - lower <= problem.eps * fb.abs() {
                break;
            }
        }
        // Below this width the rank-one update is dominated by round-off in P.
        if gpg.is_finite() && gpg > 0.0 && gpg <= PRECISION_FLOOR * g.norm_squared() * p.trace() {
            break;
        }
        if gpg.is_nan() || gpg <= 0.0 || !gpg.is_finite() {
            if restarts == MAX_RESTARTS {
                converged = false;
                break;
            }
            restarts += 1;
            let anchor = best.as_ref().map(|(_, b)| b.clone()).unwrap_or_else(|| problem.center.clone());
            x = anchor.map(|v| v + 1e-9 * (rng.random::<f64>() - 0.5));
            p = DMatrix::identity(n, n) * (4.0 * r0 * r0);
            continue;
        }
        let b = pg / gpg.sqrt();
        if n == 1 {
            x -= &b * 0.5;
            p *= 0.25;
        } else {
            x -= &b * (1.0 / (nf + 1.0));
            p = (&p - &b * b.transpose() * (2.0 / (nf + 1.0))) * (nf * nf / (nf * nf - 1.0));
            p = (&p + p.transpose()) * 0.5;
        }
        if problem.track_volume {
            history.push(log_det(&p));
        }
    }
    let (value, minimizer) = match best {
        Some((f, x)) => (f, Some(x)),
        None => (f64::INFINITY, None),
    };
    Ok(EllipsoidOutcome {
        minimizer,
        value,
        iterations,
        restarts,
        converged: converged && value.is_finite(),
        log_det_history: history,
    })
}

/// Hermitian matrix `U((U*GU) ∘ L)U*` with `L_ij` the divided differences of `t ↦ t^s`
/// at the eigenvalues of `X = U diag(λ) U*`.
///
/// This is the adjoint of the Fréchet derivative of `X ↦ X^s` applied to `G`.
pub fn frechet_power_adjoint(vals: &DVector<f64>, vecs: &CMatrix, s: f64, g: &CMatrix) -> CMatrix {
    let d = vals.len();
    let scale = vals.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let mut inner = vecs.adjoint() * g * vecs;
    for i in 0..d {
        for j in 0..d {
            inner[(i, j)] *= c(power_divided_difference(vals[i], vals[j], s, scale));
        }
    }
    vecs * inner * vecs.adjoint()
}

/// Eigendecomposition of a feasible point with the spectral floor applied.
fn floored_eig(x: &CMatrix, floor: bool) -> (DVector<f64>, CMatrix) {
    let (vals, vecs) = eigh(x);
    let top = vals.iter().fold(0.0_f64, |a, v| a.max(*v));
    let lo = if floor { SPECTRAL_FLOOR * top } else { 0.0 };
    (vals.map(|v| v.max(lo)), vecs)
}

/// `Y^{p−1}` for PSD `Y`, with `Y^0 = I`.
fn output_power(y: &PsdOperator, p: f64) -> Result<CMatrix> {
    if p == 1.0 {
        Ok(CMatrix::identity(y.dim(), y.dim()))
    } else {
        Ok(y.power(p - 1.0)?.matrix())
    }
}

/// `Tr[Φ(X^{1/q})^p]` and the Hermitian matrix `U((U*Φ*(Φ(X^{1/q})^{p−1})U) ∘ L)U*`,
/// both with the output normalized by its largest eigenvalue `μ`. Returns `(T̂, Ĝ, μ)`
/// where `T = μ^p·T̂`.
fn qp_parts(
    map: &LinearMapRep,
    adj: &LinearMapRep,
    x: &CMatrix,
    q: SchattenIndex,
    p: SchattenIndex,
) -> Result<(f64, CMatrix, f64)> {
    let s = q.reciprocal();
    let (vals, vecs) = floored_eig(x, s < 1.0);
    let omega = crate::linalg::from_spectrum(&vals.map(|v| v.powf(s)), &vecs);
    let y = PsdOperator::project(&map.apply(&omega)?);
    let mu = y.max_eigenvalue();
    if mu <= 0.0 {
        return Ok((0.0, CMatrix::zeros(x.nrows(), x.nrows()), 0.0));
    }
    let yn = y.scaled(1.0 / mu);
    let t_hat: f64 = yn.eigenvalues().iter().map(|v| v.powf(p.value())).sum();
    let g = adj.apply(&output_power(&yn, p.value())?)?;
    Ok((t_hat, frechet_power_adjoint(&vals, &vecs, s, &g), mu))
}

/// `F(X) = −Tr[Φ(X^{1/q})^p]` for PSD `X`.
pub fn qp_objective(map: &LinearMapRep, x: &CMatrix, q: SchattenIndex, p: SchattenIndex) -> Result<f64> {
    let (t_hat, _, mu) = qp_parts(map, &map.adjoint(), x, q, p)?;
    Ok(-mu.powf(p.value()) * t_hat)
}

/// Gradient of `F(X) = −Tr[Φ(X^{1/q})^p]`:
/// `∇F(X) = −p·U((U*Φ*(Φ(X^{1/q})^{p−1})U) ∘ L)U*` with `L` the divided differences of
/// `t^{1/q}`.
pub fn subgradient_qp(map: &LinearMapRep, x: &PsdOperator, q: SchattenIndex, p: SchattenIndex) -> Result<CMatrix> {
    map.positivity_floor()?;
    if q.is_infinite() {
        return Err(Error::Unsupported("the q -> p objective needs finite q".into()));
    }
    let (_, g, mu) = qp_parts(map, &map.adjoint(), &x.matrix(), q, p)?;
    Ok(g * c(-p.value() * mu.powf(p.value() - 1.0)))
}

/// Root-form objective `−‖Φ(X^{1/q})‖_p` and its gradient, as consumed by the solver.
pub fn qp_root_objective(
    map: &LinearMapRep,
    adj: &LinearMapRep,
    x: &CMatrix,
    q: SchattenIndex,
    p: SchattenIndex,
) -> Result<(f64, CMatrix)> {
    let (t_hat, g, mu) = qp_parts(map, adj, x, q, p)?;
    if mu == 0.0 || t_hat == 0.0 {
        return Ok((0.0, g));
    }
    let pv = p.value();
    let value = mu * t_hat.powf(1.0 / pv);
    Ok((-value, g * c(-t_hat.powf(1.0 / pv - 1.0))))
}

/// Solver settings for [`norm_qp_cp_with`].
#[derive(Clone, Debug)]
pub struct EllipsoidOptions {
    pub eps: f64,
    pub max_iter: Option<usize>,
    pub seed: u64,
}

impl Default for EllipsoidOptions {
    fn default() -> Self {
        EllipsoidOptions { eps: 1e-3, max_iter: None, seed: 0 }
    }
}

fn state_problem<'a>(
    d: usize,
    eps: f64,
    opts: &EllipsoidOptions,
    objective: impl FnMut(&CMatrix) -> Result<(f64, CMatrix)> + 'a,
) -> EllipsoidProblem<'a> {
    let mut objective = objective;
    EllipsoidProblem {
        center: herm_to_vec(&(CMatrix::identity(d, d) * c(0.5 / d as f64))),
        shape: None,
        outer_radius: 1.0,
        inner_radius: 0.5 / d as f64,
        eps,
        max_iter: opts.max_iter,
        separation: Box::new(move |v| {
            Ok(match separation_oracle_states(&vec_to_herm(v.as_slice(), d), PSD_TOL) {
                Separation::Feasible => None,
                Separation::Cut(w) => Some(herm_to_vec(&w)),
            })
        }),
        objective: Box::new(move |v| {
            let (f, g) = objective(&vec_to_herm(v.as_slice(), d))?;
            Ok((f, herm_to_vec(&g)))
        }),
        seed: opts.seed,
        track_volume: false,
    }
}

/// Checks the index region and complete positivity for the ellipsoid route.
pub(crate) fn check_cp_region(map: &LinearMapRep, q: SchattenIndex, p: SchattenIndex) -> Result<()> {
    if q.value() < p.value() {
        return Err(Error::Unsupported(format!(
            "(q, p) = ({q}, {p}) lies in the hypercontractive region q < p: the matrix version of this \
             problem is NP-hard and no efficient algorithm is known for CP maps; only oracle lower \
             bounds are available"
        )));
    }
    map.positivity_floor()?;
    Ok(())
}

/// `‖Φ‖_{q→p}` of a CP map for `1 ≤ p ≤ q ≤ ∞` to relative error `ε`.
pub fn norm_qp_cp(map: &LinearMapRep, q: SchattenIndex, p: SchattenIndex, eps: f64) -> Result<NormResult> {
    norm_qp_cp_with(map, q, p, &EllipsoidOptions { eps, ..Default::default() })
}

pub fn norm_qp_cp_with(map: &LinearMapRep, q: SchattenIndex, p: SchattenIndex, opts: &EllipsoidOptions) -> Result<NormResult> {
    let eps = opts.eps;
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::Input(format!("relative tolerance must lie in (0, 0.5], got {eps}")));
    }
    check_cp_region(map, q, p)?;
    let s = map.unit_image_norm()?;
    if s == 0.0 {
        return Ok(NormResult::exact(0.0, "ellipsoid"));
    }
    let lam = map.scaled(1.0 / s);
    if q.is_infinite() {
        if p.value() == 1.0 {
            return Ok(box_linear(&lam, opts)?.scaled(s));
        }
        // ‖Φ‖_{∞→p} = ‖Φ*‖_{p′→1}; the dual problem has a finite input index.
        let (dual, q2, p2) = lam.holder_dual_problem(q, p);
        let r = norm_qp_cp_with(&dual, q2, p2, opts)?;
        let mut r = r.scaled(s).note(format!("solved through the dual problem ({q2}, {p2}) of the adjoint"));
        r.optimizer = None;
        return Ok(r);
    }
    let n = lam.in_dim();
    let adj = lam.adjoint();
    let mut problem = state_problem(n, eps, opts, |x| qp_root_objective(&lam, &adj, x, q, p));
    let out = ellipsoid_minimize(&mut problem)?;
    drop(problem);
    let x = out
        .minimizer
        .ok_or_else(|| Error::Degenerate("no feasible center was visited".into()))?;
    let x = PsdOperator::project(&vec_to_herm(x.as_slice(), n));
    // Lower end from the witness ω = X^{1/q}, which has ‖ω‖_q ≤ 1.
    let omega = x.power(q.reciprocal())?;
    let wq = omega.schatten_norm(q);
    let lo = if wq > 0.0 { crate::linalg::schatten_norm(&lam.apply(&omega.matrix())?, p)? / wq } else { 0.0 };
    Ok(NormResult {
        value_lo: lo,
        value_hi: lo / (1.0 - eps),
        optimizer: Some(Witness::State(omega.scaled(1.0 / wq.max(f64::MIN_POSITIVE)))),
        iterations: out.iterations,
        method: "ellipsoid".into(),
        converged: out.converged,
        certified_upper: false,
        diagnostics: if out.restarts > 0 { vec![format!("{} restarts after shape-matrix breakdown", out.restarts)] } else { Vec::new() },
    }
    .scaled(s))
}

/// `max Tr[Φ*(I)ω]` over `0 ≤ ω ≤ I` by the ellipsoid method on the box.
fn box_linear(map: &LinearMapRep, opts: &EllipsoidOptions) -> Result<NormResult> {
    let n = map.in_dim();
    let w = map.adjoint().apply(&CMatrix::identity(map.out_dim(), map.out_dim()))?;
    let neg = herm_to_vec(&(-&w));
    let mut problem = EllipsoidProblem {
        center: herm_to_vec(&(CMatrix::identity(n, n) * c(0.5))),
        shape: None,
        outer_radius: 0.5 * (n as f64).sqrt(),
        inner_radius: 0.5,
        eps: opts.eps,
        max_iter: opts.max_iter,
        separation: Box::new(move |v| {
            Ok(match separation_oracle_box(&vec_to_herm(v.as_slice(), n), PSD_TOL) {
                Separation::Feasible => None,
                Separation::Cut(w) => Some(herm_to_vec(&w)),
            })
        }),
        objective: Box::new(move |v| Ok((neg.dot(v), neg.clone()))),
        seed: opts.seed,
        track_volume: false,
    };
    let out = ellipsoid_minimize(&mut problem)?;
    let x = out
        .minimizer
        .ok_or_else(|| Error::Degenerate("no feasible center was visited".into()))?;
    let omega = PsdOperator::project(&vec_to_herm(x.as_slice(), n));
    let wi = omega.max_eigenvalue().max(f64::MIN_POSITIVE);
    let lo = map.apply(&omega.matrix())?.trace().re / wi;
    Ok(NormResult {
        value_lo: lo,
        value_hi: lo / (1.0 - opts.eps),
        optimizer: Some(Witness::State(omega.scaled(1.0 / wi))),
        iterations: out.iterations,
        method: "ellipsoid".into(),
        converged: out.converged,
        certified_upper: false,
        diagnostics: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::*;

    fn idx(v: f64) -> SchattenIndex {
        SchattenIndex::new(v).unwrap()
    }

    #[test]
    fn coordinates_are_an_isometry() {
        let mut rng = rng_from_seed(1);
        let a = random_hermitian(3, &mut rng);
        let b = random_hermitian(3, &mut rng);
        let (va, vb) = (herm_to_vec(&a), herm_to_vec(&b));
        assert!((va.dot(&vb) - crate::linalg::hs_inner(&a, &b)).abs() < 1e-12);
        assert!((vec_to_herm(va.as_slice(), 3) - a).norm() < 1e-14);
    }

    #[test]
    fn state_oracle_examples() {
        let d = 3;
        assert!(matches!(separation_oracle_states(&(CMatrix::identity(d, d) * c(1.0 / 3.0)), PSD_TOL), Separation::Feasible));
        match separation_oracle_states(&(CMatrix::identity(d, d) * c(2.0 / 3.0)), PSD_TOL) {
            Separation::Cut(w) => assert!((w - CMatrix::identity(d, d)).norm() < 1e-14),
            _ => panic!(),
        }
        let x = CMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0), c(-0.5)]));
        match separation_oracle_states(&x, PSD_TOL) {
            Separation::Cut(w) => {
                let want = CMatrix::from_diagonal(&DVector::from_vec(vec![c(0.0), c(-1.0)]));
                assert!((w - want).norm() < 1e-14);
            }
            _ => panic!(),
        }
    }

    #[test]
    fn linear_and_quadratic_examples() {
        let d = 2;
        let e = herm_to_vec(&crate::linalg::matrix_unit(d, 0, 0));
        let opts = EllipsoidOptions { eps: 1e-6, ..Default::default() };
        let e2 = e.clone();
        let mut pr = state_problem(d, 1e-6, &opts, move |x| {
            let v = herm_to_vec(x);
            Ok((-e2.dot(&v), vec_to_herm((-&e2).as_slice(), d)))
        });
        let out = ellipsoid_minimize(&mut pr).unwrap();
        assert!((out.value + 1.0).abs() < 1e-5, "{}", out.value);
        let mut pr = state_problem(d, 1e-6, &opts, |x| {
            let t = x.trace().re;
            Ok((-t * t, CMatrix::identity(d, d) * c(-2.0 * t)))
        });
        let out = ellipsoid_minimize(&mut pr).unwrap();
        assert!((out.value + 1.0).abs() < 1e-5, "{}", out.value);
    }

    #[test]
    fn one_dimensional_bisection() {
        let mut pr = EllipsoidProblem {
            center: DVector::from_vec(vec![0.0]),
            shape: None,
            outer_radius: 2.0,
            inner_radius: 1.0,
            eps: 1e-8,
            max_iter: None,
            separation: Box::new(|v| Ok(if v[0].abs() > 1.0 { Some(DVector::from_vec(vec![v[0].signum()])) } else { None })),
            objective: Box::new(|v| Ok(((v[0] - 0.3).powi(2), DVector::from_vec(vec![2.0 * (v[0] - 0.3)])))),
            seed: 0,
            track_volume: false,
        };
        let out = ellipsoid_minimize(&mut pr).unwrap();
        assert!((out.minimizer.unwrap()[0] - 0.3).abs() < 1e-6);
    }

    #[test]
    fn p_equals_q_equals_one_gradient_is_constant() {
        let mut rng = rng_from_seed(3);
        let map = random_cp_map(2, 3, 2, &mut rng);
        let x = random_full_rank_state(2, 0.2, &mut rng);
        let g = subgradient_qp(&map, &x, SchattenIndex::ONE, SchattenIndex::ONE).unwrap();
        let want = -map.adjoint().apply(&CMatrix::identity(3, 3)).unwrap();
        assert!((g - want).norm() < 1e-12);
    }

    #[test]
    fn depolarizing_and_identity() {
        for d in [2usize, 3] {
            for map in [LinearMapRep::depolarizing(d), LinearMapRep::identity(d)] {
                for (q, p) in [(f64::INFINITY, 1.0), (2.0, 1.0), (f64::INFINITY, 2.0), (4.0, 2.0), (2.0, 2.0)] {
                    let r = norm_qp_cp(&map, idx(q), idx(p), 1e-3).unwrap();
                    let want = (d as f64).powf(1.0 / p - 1.0 / q);
                    assert!(r.contains(want, 1e-6), "d={d} q={q} p={p}: {r:?}");
                }
            }
        }
    }

    #[test]
    fn hypercontractive_is_refused() {
        let map = LinearMapRep::identity(2);
        assert!(matches!(norm_qp_cp(&map, idx(1.5), idx(2.0), 1e-3), Err(Error::Unsupported(_))));
    }

    #[test]
    fn non_cp_is_rejected() {
        let map = LinearMapRep::difference(&LinearMapRep::identity(2), &LinearMapRep::depolarizing(2)).unwrap();
        assert!(matches!(norm_qp_cp(&map, idx(2.0), idx(1.0), 1e-3), Err(Error::NotCompletelyPositive(_))));
    }
}

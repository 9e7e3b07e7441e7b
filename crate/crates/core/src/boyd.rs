//! Nonlinear power iteration for `‖Λ‖⁺_{q→p}` of positive maps.
//!
//! The iteration map is `S(ω) = Λ*(Λ(ω)^{p−1})^{1/(q−1)}`, renormalized in the `q`-norm.
//! Every iterate yields a certified bracket: with `G = Λ*(Λ(ω)^{p−1})` and
//! `W = ω^{q−1}` (for `‖ω‖_q = 1`),
//!
//! ```text
//! λ_min(W^{-1/2} G W^{-1/2}) ≤ ‖Λ‖^p_{q→p} ≤ λ_max(W^{-1/2} G W^{-1/2})
//! ```
//!
//! which is `m^{q−1} ≤ ‖Λ‖^p ≤ M^{q−1}` in terms of the usual `m(ω)`, `M(ω)`. The bracket
//! closes geometrically for positivity-improving maps in the region `1 ≤ p ≤ 2 ≤ q ≤ ∞`.
//! Maps that are not positivity improving are first smoothed with a small depolarizing
//! component, and the result is transferred back through a two-sided continuity bound.

use crate::channel::LinearMapRep;
use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, PsdOperator, SchattenIndex};
use crate::result::{NormResult, Witness};

/// Hard cap on the number of iterations.
pub const MAX_ITER_CAP: usize = 1_000_000;

#[derive(Clone, Debug)]
pub struct BoydOptions {
    /// Stop once `M/m − 1 ≤ rel_tol`.
    pub rel_tol: f64,
    /// Iteration budget; `None` uses the worst-case bound `N²d²√d` capped at [`MAX_ITER_CAP`].
    pub max_iter: Option<usize>,
    /// Certified `c > 0` with `Λ(ω) ≥ c·I·Tr ω`. Required for maps that are positive but not CP.
    pub positivity_floor: Option<f64>,
    /// Treat a non-CP map as positive. Only the positive-restricted norm is computed then.
    pub assume_positive: bool,
    /// Run outside `1 ≤ p ≤ 2 ≤ q` without guarantees.
    pub experimental: bool,
}

impl Default for BoydOptions {
    fn default() -> Self {
        BoydOptions { rel_tol: 1e-10, max_iter: None, positivity_floor: None, assume_positive: false, experimental: false }
    }
}

/// Certified enclosure of `‖Λ‖^p_{q→p}` at one iterate.
///
/// `lower = m^{q−1}` and `upper = M^{q−1}`. For `q = ∞` the enclosure comes from
/// monotonicity instead: `lower = ‖Λ(ω)‖_p^p/‖ω‖_∞^p` and `upper = ‖Λ(I)‖_p^p`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoydBracket {
    pub lower: f64,
    pub upper: f64,
    q: SchattenIndex,
}

impl BoydBracket {
    /// `m(ω)`; for `q = ∞` this is the lower end itself.
    pub fn m(&self) -> f64 {
        self.root(self.lower)
    }

    /// `M(ω)`; for `q = ∞` this is the upper end itself.
    pub fn big_m(&self) -> f64 {
        self.root(self.upper)
    }

    fn root(&self, v: f64) -> f64 {
        if self.q.is_infinite() {
            v
        } else {
            v.powf(1.0 / (self.q.value() - 1.0))
        }
    }

    /// Lower bound on `‖Λ‖_{q→p}`.
    pub fn value_lo(&self, p: SchattenIndex) -> f64 {
        self.lower.powf(1.0 / p.value())
    }

    /// Upper bound on `‖Λ‖_{q→p}`.
    pub fn value_hi(&self, p: SchattenIndex) -> f64 {
        self.upper.powf(1.0 / p.value())
    }

    /// `M/m − 1`.
    pub fn gap(&self) -> f64 {
        self.big_m() / self.m() - 1.0
    }
}

/// Outcome of [`boyd_iterate`]: the result plus the bracket after every iteration.
#[derive(Clone, Debug)]
pub struct BoydRun {
    pub result: NormResult,
    /// Brackets in the caller's scale, one per visited iterate, starting with `ω₀`.
    pub history: Vec<BoydBracket>,
    /// Normalized iterates matching `history`, kept only when requested.
    pub iterates: Vec<PsdOperator>,
}

fn check_region(q: SchattenIndex, p: SchattenIndex, experimental: bool) -> Result<()> {
    if p.is_infinite() {
        return Err(Error::Unsupported("the power iteration needs a finite output index p".into()));
    }
    let inside = p.value() <= 2.0 && q.value() >= 2.0;
    if !inside && !experimental {
        return Err(Error::Unsupported(format!(
            "(q, p) = ({q}, {p}) lies outside 1 <= p <= 2 <= q where the iteration is certified; \
             use the ellipsoid solver or enable the experimental flag"
        )));
    }
    if !inside && q.value() <= 1.0 {
        return Err(Error::Unsupported("the iteration needs q > 1".into()));
    }
    Ok(())
}

fn positive_image(map: &LinearMapRep, x: &CMatrix) -> Result<PsdOperator> {
    let y = map.apply(x)?;
    PsdOperator::new(&y).map_err(|e| match e {
        Error::NotPsd(v) => Error::Input(format!("map is not positive on the iterate (eigenvalue {v:e})")),
        other => other,
    })
}

/// `G(ω) = Λ*(Λ(ω)^{p−1})`, i.e. `S(ω)^{q−1}`.
fn g_operator(map: &LinearMapRep, adj: &LinearMapRep, omega: &PsdOperator, p: SchattenIndex) -> Result<PsdOperator> {
    let out = positive_image(map, &omega.matrix())?;
    let inner = out.power(p.value() - 1.0)?;
    positive_image(adj, &inner.matrix())
}

/// One step `ω ↦ S(ω)/‖S(ω)‖_q`.
pub fn boyd_step(map: &LinearMapRep, omega: &PsdOperator, q: SchattenIndex, p: SchattenIndex) -> Result<PsdOperator> {
    step_with_adjoint(map, &map.adjoint(), omega, q, p)
}

fn step_with_adjoint(
    map: &LinearMapRep,
    adj: &LinearMapRep,
    omega: &PsdOperator,
    q: SchattenIndex,
    p: SchattenIndex,
) -> Result<PsdOperator> {
    let g = g_operator(map, adj, omega, p)?;
    let s = if q.is_infinite() { g.power(0.0)? } else { g.power(1.0 / (q.value() - 1.0))? };
    let norm = s.schatten_norm(q);
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::Degenerate("S(omega) vanishes; the map annihilates the iterate".into()));
    }
    Ok(s.scaled(1.0 / norm))
}

/// The certified bracket at `ω` (normalized internally to `‖ω‖_q = 1`).
pub fn boyd_bracket(map: &LinearMapRep, omega: &PsdOperator, q: SchattenIndex, p: SchattenIndex) -> Result<BoydBracket> {
    bracket_with_adjoint(map, &map.adjoint(), omega, q, p)
}

fn bracket_with_adjoint(
    map: &LinearMapRep,
    adj: &LinearMapRep,
    omega: &PsdOperator,
    q: SchattenIndex,
    p: SchattenIndex,
) -> Result<BoydBracket> {
    let qn = omega.schatten_norm(q);
    if qn == 0.0 {
        return Err(Error::Singular("zero iterate".into()));
    }
    let omega = omega.scaled(1.0 / qn);
    if q.is_infinite() {
        let d = map.in_dim();
        let at = positive_image(map, &omega.matrix())?.schatten_norm(p);
        let top = positive_image(map, &CMatrix::identity(d, d))?.schatten_norm(p);
        return Ok(BoydBracket { lower: at.powf(p.value()), upper: top.powf(p.value()), q });
    }
    if omega.min_eigenvalue() <= 0.0 {
        return Err(Error::Singular("the iterate is singular; smooth the map or perturb the iterate".into()));
    }
    let g = g_operator(map, adj, &omega, p)?;
    let w_inv_half = omega.inverse_power(0.5 * (q.value() - 1.0))?.matrix();
    let k = &w_inv_half * g.matrix() * &w_inv_half;
    let (vals, _) = crate::linalg::eigh(&k);
    Ok(BoydBracket { lower: vals[0].max(0.0), upper: vals[vals.len() - 1], q })
}

fn default_max_iter(floor: f64, d: usize) -> usize {
    let df = d as f64;
    let n = 1.0 / (floor * df);
    let bound = n * n * df * df * df.sqrt();
    if bound.is_finite() {
        (bound.ceil() as usize).clamp(1000, MAX_ITER_CAP)
    } else {
        MAX_ITER_CAP
    }
}

/// Runs the iteration on a positivity-improving map, recording every bracket.
///
/// The map is rescaled internally by `s = ‖Λ(I)‖_∞` so that `‖Λ‖_{∞→∞} = 1`; results and
/// brackets are reported in the original scale.
pub fn boyd_iterate(
    map: &LinearMapRep,
    q: SchattenIndex,
    p: SchattenIndex,
    opts: &BoydOptions,
    keep_iterates: bool,
) -> Result<BoydRun> {
    check_region(q, p, opts.experimental)?;
    let cp = map.is_cp()?;
    if !cp && !opts.assume_positive {
        return Err(Error::Input("map is not completely positive; set assume_positive for positive maps".into()));
    }
    let floor = match opts.positivity_floor {
        Some(f) => f,
        None if cp => map.positivity_floor()?,
        None => return Err(Error::Input("positive non-CP maps need a user-supplied positivity floor".into())),
    };
    let s = map.unit_image_norm()?;
    if s == 0.0 {
        return Ok(BoydRun { result: NormResult::exact(0.0, "boyd"), history: Vec::new(), iterates: Vec::new() });
    }
    let floor = floor / s;
    if (floor.is_nan() || floor <= 0.0) && !q.is_infinite() {
        return Err(Error::Domain(
            "map is not positivity improving (floor 0); use boyd_solve_general, which smooths first".into(),
        ));
    }
    let lam = map.scaled(1.0 / s);
    let adj = lam.adjoint();
    let d = map.in_dim();
    let ps = s.powf(p.value());
    let rescale = |b: BoydBracket| BoydBracket { lower: b.lower * ps, upper: b.upper * ps, q };

    if q.is_infinite() {
        // Exponent 0 on the outer power: one step sends any positive-definite iterate to I,
        // which maximizes ‖Λ(ω)‖_p over 0 ≤ ω ≤ I by monotonicity.
        let omega = PsdOperator::identity(d);
        let b = bracket_with_adjoint(&lam, &adj, &omega, q, p)?;
        let mut result = NormResult::exact(b.value_hi(p) * s, "boyd");
        result.iterations = 1;
        result.optimizer = Some(Witness::State(omega.clone()));
        return Ok(BoydRun {
            result,
            history: vec![rescale(b)],
            iterates: if keep_iterates { vec![omega] } else { Vec::new() },
        });
    }

    let max_iter = opts.max_iter.unwrap_or_else(|| default_max_iter(floor, d));
    let mut omega = PsdOperator::identity(d).scaled(1.0 / (d as f64).powf(q.reciprocal()));
    let mut history = Vec::new();
    let mut iterates = Vec::new();
    let mut best = bracket_with_adjoint(&lam, &adj, &omega, q, p)?;
    history.push(rescale(best));
    if keep_iterates {
        iterates.push(omega.clone());
    }
    let mut iterations = 0;
    let mut converged = best.gap() <= opts.rel_tol;
    while !converged && iterations < max_iter {
        omega = step_with_adjoint(&lam, &adj, &omega, q, p)?;
        iterations += 1;
        let b = bracket_with_adjoint(&lam, &adj, &omega, q, p)?;
        history.push(rescale(b));
        if keep_iterates {
            iterates.push(omega.clone());
        }
        // Every bracket is valid; keep the tightest ends seen so far.
        best = BoydBracket { lower: best.lower.max(b.lower), upper: best.upper.min(b.upper), q };
        converged = best.gap() <= opts.rel_tol;
    }
    let mut result = NormResult {
        value_lo: best.value_lo(p) * s,
        value_hi: best.value_hi(p) * s,
        optimizer: Some(Witness::State(omega)),
        iterations,
        method: "boyd".into(),
        converged,
        certified_upper: true,
        diagnostics: Vec::new(),
    };
    if !converged {
        result.diagnostics.push(format!("iteration budget {max_iter} exhausted; bracket is still certified"));
    }
    if opts.experimental && !(p.value() <= 2.0 && q.value() >= 2.0) {
        result.diagnostics.push("experimental run outside 1 <= p <= 2 <= q; bracket still holds, convergence not guaranteed".into());
    }
    Ok(BoydRun { result, history, iterates })
}

/// Solves `‖Λ‖⁺_{q→p}` for a positivity-improving positive map.
pub fn boyd_solve(map: &LinearMapRep, q: SchattenIndex, p: SchattenIndex, opts: &BoydOptions) -> Result<NormResult> {
    Ok(boyd_iterate(map, q, p, opts, false)?.result)
}

/// Two-sided bound relating `‖Λ‖` and `‖Λ_δ‖` for `Λ_δ = (1−δ)Λ + δ·Tr[·]I/m`.
///
/// Returns `κ` such that `‖Λ_δ‖/(1−δ+δκ) ≤ ‖Λ‖ ≤ ‖Λ_δ‖/(1−δ−δκ)` for a positive map `Λ`
/// with `‖Λ(I)‖_∞ = 1`. `unit_tp_scale` is `Some(s)` when `s·Λ` is trace preserving.
pub fn smoothing_kappa(n: usize, m: usize, q: SchattenIndex, p: SchattenIndex, unit_tp_scale: Option<f64>) -> f64 {
    let (nf, mf) = (n as f64, m as f64);
    // δ·‖Tr[ω]·I/m‖_p ≤ δ·m^{1/p−1}·n^{1−1/q} on the unit q-ball.
    let term = mf.powf(p.reciprocal() - 1.0) * nf.powf(1.0 - q.reciprocal());
    // ‖Λ‖ ≥ ‖Λ(I)‖_p/‖I‖_q ≥ n^{-1/q}, and for trace-preserving s·Λ also ≥ m^{1/p−1}/s.
    let mut lower = nf.powf(-q.reciprocal());
    if let Some(s) = unit_tp_scale {
        lower = lower.max(mf.powf(p.reciprocal() - 1.0) / s);
    }
    term / lower
}

/// Solves `‖Λ‖⁺_{q→p}` for any positive map to relative accuracy `ε`.
///
/// The map is rescaled to `‖Λ‖_{∞→∞} = 1`, smoothed with `δ = ε/(4κ)`, solved with the
/// power iteration to relative bracket width `ε/2`, and transferred back.
pub fn boyd_solve_general(map: &LinearMapRep, q: SchattenIndex, p: SchattenIndex, eps: f64) -> Result<NormResult> {
    boyd_solve_general_with(map, q, p, eps, &BoydOptions::default())
}

pub fn boyd_solve_general_with(
    map: &LinearMapRep,
    q: SchattenIndex,
    p: SchattenIndex,
    eps: f64,
    opts: &BoydOptions,
) -> Result<NormResult> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::Input(format!("relative tolerance must lie in (0, 0.5], got {eps}")));
    }
    check_region(q, p, opts.experimental)?;
    let cp = map.is_cp()?;
    if !cp && !opts.assume_positive {
        return Err(Error::Input("map is not completely positive; set assume_positive for positive maps".into()));
    }
    let s = map.unit_image_norm()?;
    if s == 0.0 {
        return Ok(NormResult::exact(0.0, "boyd"));
    }
    let (n, m) = (map.in_dim(), map.out_dim());
    if q.is_infinite() {
        let top = positive_image(map, &CMatrix::identity(n, n))?.schatten_norm(p);
        let mut r = NormResult::exact(top, "boyd");
        r.iterations = 1;
        r.optimizer = Some(Witness::State(PsdOperator::identity(n)));
        return Ok(r.note("q = inf: the identity input is optimal for positive maps"));
    }
    let lam = map.scaled(1.0 / s);
    let tp_scale = if map.is_tp()? { Some(s) } else { None };
    let kappa = smoothing_kappa(n, m, q, p, tp_scale);
    let delta = eps / (4.0 * kappa);
    let smoothed = lam.smooth(delta)?;
    let floor = if cp { smoothed.positivity_floor()?.max(delta / m as f64) } else { delta / m as f64 };
    // Relative value width (1 + t)^{(q−1)/p} − 1 ≤ ε/2.
    let inner_tol = (1.0 + 0.5 * eps).powf(p.value() / (q.value() - 1.0)) - 1.0;
    let inner = BoydOptions {
        rel_tol: inner_tol,
        max_iter: opts.max_iter,
        positivity_floor: Some(floor),
        assume_positive: true,
        experimental: opts.experimental,
    };
    let r = boyd_solve(&smoothed, q, p, &inner)?;
    let lo = r.value_lo / (1.0 - delta + delta * kappa);
    let hi = r.value_hi / (1.0 - delta - delta * kappa);
    Ok(NormResult {
        value_lo: lo,
        value_hi: hi,
        optimizer: r.optimizer,
        iterations: r.iterations,
        method: "boyd".into(),
        converged: r.converged,
        certified_upper: true,
        diagnostics: vec![format!("smoothed with delta = {delta:.3e} (kappa = {kappa:.4})")],
    }
    .scaled(s))
}

/// Residual of the stationarity condition
/// `‖ω‖_q^{1−q}‖Λ(ω)‖_p·ω^{q−1} = ‖Λ(ω)‖_p^{1−p}‖ω‖_q·Λ*(Λ(ω)^{p−1})` in Hilbert–Schmidt norm.
pub fn stationarity_residual(map: &LinearMapRep, omega: &PsdOperator, q: SchattenIndex, p: SchattenIndex) -> Result<f64> {
    let adj = map.adjoint();
    let out = positive_image(map, &omega.matrix())?;
    let np = out.schatten_norm(p);
    let nq = omega.schatten_norm(q);
    let g = g_operator(map, &adj, omega, p)?.matrix();
    let w = omega.power(q.value() - 1.0)?.matrix();
    let lhs = w * c(nq.powf(1.0 - q.value()) * np);
    let rhs = g * c(np.powf(1.0 - p.value()) * nq);
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::*;

    fn q(v: f64) -> SchattenIndex {
        SchattenIndex::new(v).unwrap()
    }

    #[test]
    fn depolarizing_closed_form() {
        for d in [2usize, 3] {
            let map = LinearMapRep::depolarizing(d);
            for (qq, pp) in [(2.0, 1.0), (4.0, 2.0), (3.0, 1.5)] {
                let r = boyd_solve(&map, q(qq), q(pp), &BoydOptions::default()).unwrap();
                let want = (d as f64).powf(1.0 / pp - 1.0 / qq);
                assert!(r.contains(want, 1e-9), "{d} {qq} {pp}: {r:?}");
            }
        }
    }

    #[test]
    fn depolarizing_fixed_point_is_start() {
        let map = LinearMapRep::depolarizing(2);
        let w0 = PsdOperator::identity(2).scaled(1.0 / 2f64.sqrt());
        let w1 = boyd_step(&map, &w0, SchattenIndex::TWO, SchattenIndex::TWO).unwrap();
        assert!((w1.matrix() - w0.matrix()).norm() < 1e-14);
        let b = boyd_bracket(&map, &w0, SchattenIndex::TWO, SchattenIndex::TWO).unwrap();
        assert!((b.m() - b.big_m()).abs() < 1e-14);
        // ‖Λ‖_{2→2} = 1 for the fully depolarizing qubit map.
        assert!((b.lower - 1.0).abs() < 1e-14);
    }

    #[test]
    fn p_one_converges_in_one_step() {
        let mut rng = rng_from_seed(11);
        let map = random_positivity_improving_map(3, 0.1, &mut rng);
        let run = boyd_iterate(&map, q(3.0), SchattenIndex::ONE, &BoydOptions::default(), true).unwrap();
        assert!(run.result.iterations <= 2, "{}", run.result.iterations);
        assert!(run.result.relative_width() < 1e-9);
    }

    #[test]
    fn general_identity_channel() {
        let map = LinearMapRep::identity(2);
        let r = boyd_solve_general(&map, SchattenIndex::INFINITY, SchattenIndex::ONE, 1e-3).unwrap();
        assert!((r.estimate() - 2.0).abs() < 2e-3);
        let r = boyd_solve_general(&map, q(4.0), SchattenIndex::TWO, 1e-3).unwrap();
        assert!(r.contains(2f64.powf(0.25), 0.0), "{r:?}");
        assert!(r.relative_width() <= 1e-3 * 1.01);
    }

    #[test]
    fn classical_embedding_smoothed() {
        let a = nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 0.0]);
        let map = LinearMapRep::classical_embedding(&a).unwrap();
        let r = boyd_solve_general(&map, SchattenIndex::INFINITY, SchattenIndex::ONE, 1e-3).unwrap();
        assert!((r.estimate() - 3.0).abs() < 0.03);
    }

    #[test]
    fn outside_region_refused() {
        let map = LinearMapRep::depolarizing(2);
        assert!(matches!(boyd_solve(&map, q(1.5), q(1.2), &BoydOptions::default()), Err(Error::Unsupported(_))));
    }

    #[test]
    fn not_positivity_improving_is_reported() {
        let map = LinearMapRep::identity(2);
        assert!(matches!(boyd_solve(&map, q(3.0), q(1.5), &BoydOptions::default()), Err(Error::Domain(_))));
    }

    #[test]
    fn scale_homogeneity() {
        let mut rng = rng_from_seed(12);
        let map = random_cp_map(2, 2, 2, &mut rng);
        let r1 = boyd_solve_general(&map, q(4.0), q(1.5), 1e-4).unwrap();
        let r2 = boyd_solve_general(&map.scaled(7.0), q(4.0), q(1.5), 1e-4).unwrap();
        assert!((r2.value_lo / r1.value_lo - 7.0).abs() < 1e-9);
        assert!((r2.value_hi / r1.value_hi - 7.0).abs() < 1e-9);
    }
}

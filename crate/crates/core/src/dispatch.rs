//! Routing of norm requests to solvers.
//!
//! [`route`] is a pure function of `(mode, q, p, CP?)` and returns either a solver path or a
//! principled refusal. [`dispatch`] executes the route (or an explicitly requested method)
//! and attaches a provenance record naming the result the path relies on.

use serde::Serialize;

use crate::boyd::boyd_solve_general;
use crate::cb::{cb_norm_1p_with, cb_norm_22, cb_norm_qp_cp};
use crate::channel::LinearMapRep;
use crate::ellipsoid::{norm_qp_cp_with, EllipsoidOptions};
use crate::error::{Error, Result};
use crate::linalg::SchattenIndex;
use crate::oracle::{brute_norm_qp_inputs, BruteOptions};
use crate::result::NormResult;

/// Which norm is requested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `‖Φ‖_{q→p}` over all inputs.
    Norm,
    /// `‖Φ‖⁺_{q→p}`, inputs restricted to PSD operators.
    #[value(name = "norm_positive", alias = "norm-positive")]
    NormPositive,
    /// `‖Φ‖_{cb,q→p}`.
    Cb,
    /// The cb norm with PSD inputs on the extended system.
    #[value(name = "cb_positive", alias = "cb-positive")]
    CbPositive,
}

impl Mode {
    pub fn is_cb(self) -> bool {
        matches!(self, Mode::Cb | Mode::CbPositive)
    }

    pub fn is_positive(self) -> bool {
        matches!(self, Mode::NormPositive | Mode::CbPositive)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Auto,
    Boyd,
    Ellipsoid,
    Exact22,
    /// Random-restart ascent; a lower bound only.
    Oracle,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveRequest {
    pub q: SchattenIndex,
    pub p: SchattenIndex,
    pub mode: Mode,
    pub method: Method,
    pub eps: f64,
    pub seed: u64,
}

impl SolveRequest {
    pub fn new(q: SchattenIndex, p: SchattenIndex, mode: Mode) -> Self {
        SolveRequest { q, p, mode, method: Method::Auto, eps: 1e-3, seed: 0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 0.5) {
            return Err(Error::Input(format!("eps must lie in (0, 0.5], got {}", self.eps)));
        }
        if self.method == Method::Exact22 && !is_22(self.q, self.p) {
            return Err(Error::Input(format!("method exact22 requires (q, p) = (2, 2), got ({}, {})", self.q, self.p)));
        }
        Ok(())
    }
}

fn is_22(q: SchattenIndex, p: SchattenIndex) -> bool {
    q.value() == 2.0 && p.value() == 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RefusalKind {
    /// The problem is NP-hard; no solver runs.
    Hardness,
    /// No efficient algorithm is known and no hardness result either.
    Open,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Refusal {
    pub kind: RefusalKind,
    pub reason: String,
}

impl Refusal {
    fn hard(reason: &str) -> Self {
        Refusal { kind: RefusalKind::Hardness, reason: reason.into() }
    }

    fn open(reason: &str) -> Self {
        Refusal { kind: RefusalKind::Open, reason: reason.into() }
    }

    pub fn into_error(self) -> Error {
        let msg = format!("{}; rerun with --method oracle for a random-restart lower bound", self.reason);
        match self.kind {
            RefusalKind::Hardness => Error::Hardness(msg),
            RefusalKind::Open => Error::Unsupported(msg),
        }
    }
}

/// Solver path chosen by [`route`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "path")]
pub enum Route {
    Exact22,
    /// Positive-restricted `2→2` of a non-CP map: oracle lower bound and the `2→2` norm above.
    Exact22Upper,
    Boyd,
    Ellipsoid,
    Cb1p,
    CbCp,
    Refuse(Refusal),
}

const HARD_GENERAL: &str = "computing q->p norms of general linear maps is NP-hard for every (q, p) other than (2, 2), \
    already for maps that embed classical mixed matrix norms";
const HARD_1P_CP: &str = "computing 1->p norms (p > 1) is NP-complete already for entanglement-breaking channels";
const HARD_11_POS: &str = "computing the positive-input 1->1 norm is NP-complete already for differences of \
    entanglement-breaking channels";
const OPEN_HYPER: &str = "no efficient algorithm is known for q->p norms of CP maps with 1 < q < p (hypercontractive region)";
const OPEN_POS: &str = "no efficient algorithm is known for positive-input norms of non-CP maps at this (q, p)";
const OPEN_CB: &str = "no efficient algorithm is known for this completely bounded norm outside q = 1, (2, 2) \
    and CP maps with q >= p";

/// The routing table. Total: every input yields exactly one route.
pub fn route(mode: Mode, q: SchattenIndex, p: SchattenIndex, is_cp: bool) -> Route {
    let (qv, pv) = (q.value(), p.value());
    if is_22(q, p) {
        return if mode.is_positive() && !is_cp { Route::Exact22Upper } else { Route::Exact22 };
    }
    if mode.is_cb() {
        return if qv == 1.0 {
            Route::Cb1p
        } else if is_cp && qv >= pv {
            Route::CbCp
        } else {
            Route::Refuse(Refusal::open(OPEN_CB))
        };
    }
    if !is_cp {
        return Route::Refuse(match mode {
            Mode::NormPositive if qv == 1.0 && pv == 1.0 => Refusal::hard(HARD_11_POS),
            Mode::NormPositive => Refusal::open(OPEN_POS),
            _ => Refusal::hard(HARD_GENERAL),
        });
    }
    if pv <= 2.0 && qv >= 2.0 {
        Route::Boyd
    } else if pv <= qv {
        Route::Ellipsoid
    } else if qv == 1.0 {
        Route::Refuse(Refusal::hard(HARD_1P_CP))
    } else {
        Route::Refuse(Refusal::open(OPEN_HYPER))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub route: Route,
    pub method: Method,
    /// The result the computed value rests on.
    pub basis: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Solution {
    pub result: NormResult,
    pub provenance: Provenance,
}

fn basis(route: &Route) -> &'static str {
    match route {
        Route::Exact22 => "the 2->2 norm (and its cb version) is the largest singular value of the superoperator",
        Route::Exact22Upper => "the 2->2 norm bounds the positive-input 2->2 norm from above",
        Route::Boyd => "nonlinear power iteration with a certified bracket for positive maps and p <= 2 <= q",
        Route::Ellipsoid => "ellipsoid method on a concave reformulation for CP maps with p <= q",
        Route::Cb1p => "the cb 1->p norm equals the (inf, p) two-indexed norm of the Choi matrix, a concave program",
        Route::CbCp => "the cb q->p norm of a CP map with q >= p equals its plain q->p norm",
        Route::Refuse(_) => "refused",
    }
}

/// `‖Φ‖_{q→p} ≤ m^{max(0, 1/p−1/2)} · n^{max(0, 1/2−1/q)} · ‖Φ‖_{2→2}` from Schatten norm
/// comparisons on the input and output spaces.
pub fn equivalence_upper_bound(map: &LinearMapRep, q: SchattenIndex, p: SchattenIndex) -> Result<f64> {
    let n22 = cb_norm_22(map)?.value_hi;
    let out = (map.out_dim() as f64).powf((p.reciprocal() - 0.5).max(0.0));
    let inp = (map.in_dim() as f64).powf((0.5 - q.reciprocal()).max(0.0));
    Ok(out * inp * n22)
}

fn oracle(map: &LinearMapRep, req: &SolveRequest) -> Result<NormResult> {
    let opts = BruteOptions { seed: req.seed, ..Default::default() };
    let (target, hi) = if req.mode.is_cb() {
        // Ancilla of the input dimension; the upper end is left open.
        let ext = LinearMapRep::tensor(vec![LinearMapRep::identity(map.in_dim()), map.clone()])?;
        (ext, f64::INFINITY)
    } else {
        let hi = equivalence_upper_bound(map, req.q, req.p)?;
        (map.clone(), hi)
    };
    let b = brute_norm_qp_inputs(&target, req.q, req.p, &opts, req.mode.is_positive() || target.is_cp()?)?;
    let mut r = NormResult {
        value_lo: b.value,
        value_hi: hi.max(b.value),
        optimizer: None,
        iterations: opts.restarts * opts.steps,
        method: "oracle".into(),
        converged: true,
        certified_upper: hi.is_finite(),
        diagnostics: vec!["random-restart ascent: value_lo is a lower bound".into()],
    };
    if hi.is_finite() {
        r.diagnostics.push("value_hi from Schatten norm comparisons with the 2->2 norm".into());
    } else {
        r.diagnostics.push("no upper bound is available for this cb norm".into());
    }
    Ok(r)
}

fn run_route(map: &LinearMapRep, req: &SolveRequest, route: &Route) -> Result<NormResult> {
    let eopts = EllipsoidOptions { eps: req.eps, seed: req.seed, ..Default::default() };
    match route {
        Route::Exact22 => cb_norm_22(map),
        Route::Exact22Upper => {
            let hi = cb_norm_22(map)?.value_hi;
            let lo = brute_norm_qp_inputs(map, req.q, req.p, &BruteOptions { seed: req.seed, ..Default::default() }, true)?;
            let mut r = NormResult::exact(lo.value, "exact22+oracle");
            r.value_hi = hi.max(lo.value);
            r.converged = r.relative_width() <= req.eps;
            Ok(r.note("positive inputs on a non-CP map: the 2->2 norm is only an upper bound"))
        }
        Route::Boyd => boyd_solve_general(map, req.q, req.p, req.eps),
        Route::Ellipsoid => norm_qp_cp_with(map, req.q, req.p, &eopts),
        Route::Cb1p => cb_norm_1p_with(map, req.p, &eopts, req.mode == Mode::CbPositive),
        Route::CbCp => cb_norm_qp_cp(map, req.q, req.p, req.eps),
        Route::Refuse(r) => Err(r.clone().into_error()),
    }
}

/// Solves `req` for `map`.
///
/// With `Method::Auto` the route comes from [`route`]. An explicit solver method runs only
/// where the automatic route would run some solver; refusals stand unless the oracle is
/// requested.
pub fn dispatch(map: &LinearMapRep, req: &SolveRequest) -> Result<Solution> {
    req.validate()?;
    let cp = map.is_cp()?;
    let auto = route(req.mode, req.q, req.p, cp);
    let (route_taken, result) = match req.method {
        Method::Oracle => (auto.clone(), oracle(map, req)?),
        _ if matches!(auto, Route::Refuse(_)) => {
            let Route::Refuse(r) = auto else { unreachable!() };
            return Err(r.into_error());
        }
        Method::Auto => (auto.clone(), run_route(map, req, &auto)?),
        Method::Exact22 => (Route::Exact22, run_route(map, req, &auto)?),
        Method::Boyd | Method::Ellipsoid => {
            let chosen = if req.method == Method::Boyd { Route::Boyd } else { Route::Ellipsoid };
            let plain_equals_cb = cp && req.q.value() >= req.p.value();
            let r = match (&auto, req.method) {
                (Route::Cb1p, Method::Ellipsoid) => run_route(map, req, &Route::Cb1p)?,
                (Route::Cb1p | Route::CbCp, _) if !plain_equals_cb => {
                    return Err(Error::Input(format!(
                        "method {:?} computes plain norms, which differ from the cb norm here",
                        req.method
                    )))
                }
                _ => run_route(map, req, &chosen)?,
            };
            (chosen, r)
        }
    };
    let basis = if req.method == Method::Oracle {
        "random-restart projected ascent (lower bound only)".to_string()
    } else {
        basis(&route_taken).to_string()
    };
    Ok(Solution { result, provenance: Provenance { route: route_taken, method: req.method, basis } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, CMatrix};
    use crate::random::{random_channel, rng_from_seed};

    fn idx(v: f64) -> SchattenIndex {
        SchattenIndex::new(v).unwrap()
    }

    fn z_difference() -> LinearMapRep {
        let z = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(-1.0)]));
        LinearMapRep::difference(&LinearMapRep::identity(2), &LinearMapRep::unitary(z).unwrap()).unwrap()
    }

    #[test]
    fn routing_table() {
        let inf = SchattenIndex::INFINITY;
        assert_eq!(route(Mode::Norm, idx(2.0), idx(2.0), false), Route::Exact22);
        assert_eq!(route(Mode::Norm, idx(4.0), idx(2.0), true), Route::Boyd);
        assert_eq!(route(Mode::Norm, idx(1.5), idx(1.2), true), Route::Ellipsoid);
        assert_eq!(route(Mode::Cb, idx(1.0), idx(3.0), false), Route::Cb1p);
        assert_eq!(route(Mode::Cb, inf, idx(3.0), true), Route::CbCp);
        assert!(matches!(route(Mode::Norm, idx(1.0), idx(2.0), true), Route::Refuse(Refusal { kind: RefusalKind::Hardness, .. })));
        assert!(matches!(route(Mode::Norm, idx(2.0), idx(3.0), true), Route::Refuse(Refusal { kind: RefusalKind::Open, .. })));
        assert!(matches!(route(Mode::NormPositive, idx(1.0), idx(1.0), false), Route::Refuse(Refusal { kind: RefusalKind::Hardness, .. })));
    }

    #[test]
    fn boyd_path_for_channel() {
        let mut rng = rng_from_seed(8);
        let ch = random_channel(2, 2, 3, &mut rng);
        let s = dispatch(&ch, &SolveRequest::new(idx(4.0), idx(2.0), Mode::Norm)).unwrap();
        assert_eq!(s.provenance.route, Route::Boyd);
        let mut req = SolveRequest::new(idx(4.0), idx(2.0), Mode::Norm);
        req.method = Method::Ellipsoid;
        let e = dispatch(&ch, &req).unwrap();
        assert!(e.result.value_lo <= s.result.value_hi * (1.0 + 1e-6));
        assert!(s.result.value_lo <= e.result.value_hi * (1.0 + 1e-6));
    }

    #[test]
    fn refusal_and_oracle_fallback() {
        let diff = z_difference();
        let mut req = SolveRequest::new(idx(1.0), idx(1.0), Mode::NormPositive);
        let err = dispatch(&diff, &req).unwrap_err();
        assert!(matches!(err, Error::Hardness(ref m) if m.contains("NP-complete")), "{err}");
        req.method = Method::Oracle;
        let s = dispatch(&diff, &req).unwrap();
        // Positive inputs: ρ − ZρZ has trace norm at most 2, reached at |+⟩⟨+|.
        assert!((s.result.value_lo - 2.0).abs() < 1e-6, "{:?}", s.result);
        assert!(s.result.value_hi >= s.result.value_lo);
    }

    #[test]
    fn diamond_of_difference() {
        let s = dispatch(&z_difference(), &SolveRequest::new(idx(1.0), idx(1.0), Mode::Cb)).unwrap();
        assert_eq!(s.provenance.route, Route::Cb1p);
        assert!(s.result.contains(2.0, 1e-6));
    }

    #[test]
    fn exact22_requires_22() {
        let mut req = SolveRequest::new(idx(3.0), idx(2.0), Mode::Norm);
        req.method = Method::Exact22;
        assert!(matches!(dispatch(&LinearMapRep::identity(2), &req), Err(Error::Input(_))));
    }
}

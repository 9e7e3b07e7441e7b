//! Independent baselines for validating the solvers.
//!
//! Everything here produces lower bounds (random-restart ascent) or exact values on small
//! cases (vertex enumeration, superoperator singular values). None of it is used by the
//! solvers themselves.

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::channel::LinearMapRep;
use crate::error::{Error, Result};
use crate::linalg::{self, c, eigh, from_spectrum, hermitize, kron, CMatrix, SchattenIndex, C64};
use crate::random::{ginibre, random_hermitian, random_pure_vector, random_state, rng_from_seed};

/// Largest total dimension `n·m` accepted by the ascent oracles.
pub const MAX_BRUTE_DIM: usize = 1 << 10;

/// Armijo sufficient-increase constant.
pub const ARMIJO: f64 = 1e-4;

#[derive(Clone, Debug)]
pub struct BruteOptions {
    pub restarts: usize,
    pub steps: usize,
    pub seed: u64,
}

impl Default for BruteOptions {
    fn default() -> Self {
        BruteOptions { restarts: 64, steps: 500, seed: 0 }
    }
}

/// Best value found and the input attaining it.
#[derive(Clone, Debug)]
pub struct BruteResult {
    pub value: f64,
    pub witness: CMatrix,
}

/// Gradient of `Y ↦ ‖Y‖_p` with respect to `Re Tr[G*·dY]`, scaled to be safe for large `p`.
fn schatten_gradient(y: &CMatrix, p: SchattenIndex) -> (f64, CMatrix) {
    let svd = y.clone().svd(true, true);
    let (u, vt) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let s = &svd.singular_values;
    let top = s.iter().fold(0.0_f64, |a, v| a.max(*v));
    let k = s.len();
    if top == 0.0 {
        return (0.0, CMatrix::zeros(y.nrows(), y.ncols()));
    }
    let (norm, weights): (f64, Vec<f64>) = if p.is_infinite() {
        (top, (0..k).map(|i| if s[i] >= top * (1.0 - 1e-12) { 1.0 } else { 0.0 }).collect())
    } else {
        let pv = p.value();
        let sum: f64 = s.iter().map(|v| (v / top).powf(pv)).sum();
        let norm = top * sum.powf(1.0 / pv);
        // ∂‖Y‖_p = U diag(σ^{p−1}) V* / ‖Y‖_p^{p−1}.
        (norm, s.iter().map(|v| if pv == 1.0 { if *v > 1e-12 * top { 1.0 } else { 0.0 } } else { (v / norm).powf(pv - 1.0) }).collect())
    };
    let w = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(k, weights.into_iter().map(c)));
    (norm, u * w * vt)
}

fn retract_q(x: &CMatrix, q: SchattenIndex, positive: bool) -> Option<CMatrix> {
    let h = hermitize(x);
    let (vals, vecs) = eigh(&h);
    let vals = if positive { vals.map(|v| v.max(0.0)) } else { vals };
    let nq = linalg::vector_p_norm(vals.as_slice(), q);
    if nq == 0.0 || !nq.is_finite() {
        return None;
    }
    Some(from_spectrum(&vals.map(|v| v / nq), &vecs))
}

/// Gradient ascent with Armijo backtracking from `x`.
///
/// `grad` returns an ascent direction and its squared norm, `retract` maps `x + t·g` back to
/// the feasible set. After an accepted step the half step is also tried, which stops the
/// iteration from bouncing across a narrow ridge with a step that never shrinks.
fn armijo_ascent<T>(
    mut x: T,
    steps: usize,
    mut step: f64,
    mut eval: impl FnMut(&T) -> Result<f64>,
    mut grad: impl FnMut(&T) -> Result<(T, f64)>,
    retract: impl Fn(&T, &T, f64) -> Option<T>,
) -> Result<(T, f64)> {
    let mut fx = eval(&x)?;
    for _ in 0..steps {
        let (g, g2) = grad(&x)?;
        if g2.is_nan() || g2 <= 1e-28 {
            break;
        }
        let mut accepted = None;
        let mut backtracked = false;
        while step > 1e-12 {
            if let Some(cand) = retract(&x, &g, step) {
                let fc = eval(&cand)?;
                if fc >= fx + ARMIJO * step * g2 {
                    accepted = Some((cand, fc));
                    break;
                }
            }
            step *= 0.5;
            backtracked = true;
        }
        let Some((mut cand, mut fc)) = accepted else { break };
        if let Some(half) = retract(&x, &g, 0.5 * step) {
            let fh = eval(&half)?;
            if fh > fc {
                cand = half;
                fc = fh;
                step *= 0.5;
                backtracked = true;
            }
        }
        x = cand;
        fx = fc;
        if !backtracked {
            step *= 2.0;
        }
    }
    Ok((x, fx))
}

/// Projected gradient ascent of `‖Φ(ω)‖_p` on the unit `q`-sphere.
///
/// Inputs are PSD when `Φ` is CP and Hermitian otherwise. The best value over all restarts
/// is a lower bound on `‖Φ‖_{q→p}` (on `‖Φ‖⁺_{q→p}` for PSD inputs).
pub fn brute_norm_qp(map: &LinearMapRep, q: SchattenIndex, p: SchattenIndex, opts: &BruteOptions) -> Result<BruteResult> {
    let positive = map.is_cp()?;
    brute_norm_qp_inputs(map, q, p, opts, positive)
}

/// [`brute_norm_qp`] with the input cone chosen explicitly.
pub fn brute_norm_qp_inputs(
    map: &LinearMapRep,
    q: SchattenIndex,
    p: SchattenIndex,
    opts: &BruteOptions,
    positive: bool,
) -> Result<BruteResult> {
    let n = map.in_dim();
    if n * map.out_dim() > MAX_BRUTE_DIM {
        return Err(Error::Resource(format!("brute force is limited to n*m <= {MAX_BRUTE_DIM}")));
    }
    let adj = map.adjoint();
    let eval = |w: &CMatrix| -> Result<f64> { linalg::schatten_norm(&map.apply(w)?, p) };
    let mut best = BruteResult { value: f64::NEG_INFINITY, witness: CMatrix::zeros(n, n) };
    for r in 0..opts.restarts.max(1) {
        let mut rng = rng_from_seed(opts.seed.wrapping_add(r as u64));
        let start = match (r, positive) {
            (0, _) => CMatrix::identity(n, n),
            (_, true) => random_state(n, 1 + rng.random_range(0..n), &mut rng),
            (_, false) => random_hermitian(n, &mut rng),
        };
        let w0 = retract_q(&start, q, positive).unwrap_or_else(|| CMatrix::identity(n, n));
        let (w, f) = armijo_ascent(
            w0,
            opts.steps,
            1.0,
            |w| eval(w),
            |w| {
                // Gradient of the scale-invariant ratio ‖Φ(ω)‖_p/‖ω‖_q at ‖ω‖_q = 1, so that
                // the ascent direction has no radial part.
                let (a, gy) = schatten_gradient(&map.apply(w)?, p);
                let (_, gw) = schatten_gradient(w, q);
                let g = hermitize(&adj.apply(&gy)?) - hermitize(&gw) * c(a);
                let g2 = g.norm_squared();
                Ok((g, g2))
            },
            |w, g, t| retract_q(&(w + g * c(t)), q, positive),
        )?;
        let (w, f) = if positive && !q.is_infinite() { polish_factor(map, &adj, w, f, q, p, opts.steps)? } else { (w, f) };
        if f > best.value {
            best = BruteResult { value: f, witness: w };
        }
    }
    Ok(best)
}

/// Smooth ascent of `‖Φ(GG*)‖_p / ‖GG*‖_q` in the factor `G`, started from `ω = GG*`.
///
/// Clamped eigenvalue retractions move slowly along faces of the PSD cone; the factor form
/// has no boundary and recovers the fast local rate when the maximizer is rank deficient.
fn polish_factor(
    map: &LinearMapRep,
    adj: &LinearMapRep,
    w: CMatrix,
    f: f64,
    q: SchattenIndex,
    p: SchattenIndex,
    steps: usize,
) -> Result<(CMatrix, f64)> {
    let qv = q.value();
    let omega = |g: &CMatrix| hermitize(&(g * g.adjoint()));
    let value = |g: &CMatrix| -> Result<f64> {
        let om = omega(g);
        let nq = linalg::schatten_norm_hermitian(&om, q);
        if nq <= 0.0 {
            return Ok(0.0);
        }
        Ok(linalg::schatten_norm(&map.apply(&om)?, p)? / nq)
    };
    let g0 = linalg::herm_fn(&w, |v| v.max(0.0).sqrt());
    let (g, fg) = armijo_ascent(
        g0,
        steps,
        1.0,
        value,
        |g| {
            let om = omega(g);
            let nq = linalg::schatten_norm_hermitian(&om, q);
            let (a, gy) = schatten_gradient(&map.apply(&om)?, p);
            let grad_a = hermitize(&adj.apply(&gy)?);
            // ∇‖ω‖_q = ω^{q−1}/‖ω‖_q^{q−1}; at q = 1 this is the identity.
            let grad_b = if qv == 1.0 {
                CMatrix::identity(om.nrows(), om.nrows())
            } else {
                linalg::herm_fn(&om, |v| (v.max(0.0) / nq).powf(qv - 1.0))
            };
            let grad_w = grad_a * c(1.0 / nq) - grad_b * c(a / (nq * nq));
            let grad = grad_w * g * c(2.0);
            let g2 = grad.norm_squared();
            Ok((grad, g2))
        },
        |g, d, t| {
            let cand = g + d * c(t);
            let nq = linalg::schatten_norm_hermitian(&omega(&cand), q);
            (nq > 0.0 && nq.is_finite()).then(|| cand * c(1.0 / nq.sqrt()))
        },
    )?;
    if fg > f {
        let om = omega(&g);
        let nq = linalg::schatten_norm_hermitian(&om, q);
        Ok((om * c(1.0 / nq), fg))
    } else {
        Ok((w, f))
    }
}

/// How [`classical_mixed_norm`] obtained its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassicalMethod {
    Vertex,
    Boyd,
    /// Random-restart ascent; a lower bound only.
    Search,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalNorm {
    pub value: f64,
    pub method: ClassicalMethod,
    /// `false` when the value is a search estimate.
    pub exact: bool,
}

/// Largest `n` for vertex enumeration.
pub const MAX_VERTEX_N: usize = 20;

/// `‖A‖_{q→p} = max ‖Ax‖_p/‖x‖_q` for a real matrix.
///
/// `q = ∞` enumerates sign vertices. Entrywise nonnegative `A` with `q ≥ p` uses the scalar
/// power iteration. Anything else falls back to random-restart ascent.
pub fn classical_mixed_norm(a: &DMatrix<f64>, q: SchattenIndex, p: SchattenIndex) -> Result<ClassicalNorm> {
    let n = a.ncols();
    if q.is_infinite() {
        if n > MAX_VERTEX_N {
            return Err(Error::Resource(format!("vertex enumeration is limited to n <= {MAX_VERTEX_N}")));
        }
        let mut best = 0.0_f64;
        for bits in 0u64..(1u64 << n) {
            let x = nalgebra::DVector::from_fn(n, |i, _| if bits >> i & 1 == 1 { -1.0 } else { 1.0 });
            let y = a * x;
            best = best.max(linalg::vector_p_norm(y.as_slice(), p));
        }
        return Ok(ClassicalNorm { value: best, method: ClassicalMethod::Vertex, exact: true });
    }
    let nonneg = a.iter().all(|v| *v >= 0.0);
    if nonneg && q.value() >= p.value() && q.value() > 1.0 && !p.is_infinite() {
        if let Some(v) = scalar_boyd(a, q.value(), p.value(), 1e-8, 200_000) {
            return Ok(ClassicalNorm { value: v, method: ClassicalMethod::Boyd, exact: true });
        }
    }
    Ok(ClassicalNorm { value: vector_search(a, q, p, 64, 400, 0), method: ClassicalMethod::Search, exact: false })
}

/// Scalar power iteration `x ← (Aᵀ(Ax)^{p−1})^{1/(q−1)}` on the positive orthant, stopped by
/// the ratio bracket `min_i r_i ≤ ‖A‖^p ≤ max_i r_i`, `r_i = (Aᵀ(Ax)^{p−1})_i / x_i^{q−1}`.
fn scalar_boyd(a: &DMatrix<f64>, q: f64, p: f64, tol: f64, max_iter: usize) -> Option<f64> {
    let n = a.ncols();
    let norm_q = |x: &nalgebra::DVector<f64>| x.iter().map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q);
    let mut x = nalgebra::DVector::from_element(n, 1.0);
    x /= norm_q(&x);
    let mut lo = 0.0_f64;
    for _ in 0..max_iter {
        let y = a * &x;
        let yp = y.map(|v| if v > 0.0 { v.powf(p - 1.0) } else { 0.0 });
        let g = a.transpose() * yp;
        if g.iter().any(|v| *v <= 0.0) || x.iter().any(|v| *v <= 0.0) {
            return None;
        }
        let ratios: Vec<f64> = (0..n).map(|i| g[i] / x[i].powf(q - 1.0)).collect();
        let rmin = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let rmax = ratios.iter().cloned().fold(0.0, f64::max);
        lo = lo.max(linalg::vector_p_norm(y.as_slice(), SchattenIndex::new(p).ok()?));
        if rmax / rmin - 1.0 <= tol {
            return Some(lo.max(rmin.powf(1.0 / p)));
        }
        x = g.map(|v| v.powf(1.0 / (q - 1.0)));
        x /= norm_q(&x);
    }
    None
}

fn vector_search(a: &DMatrix<f64>, q: SchattenIndex, p: SchattenIndex, restarts: usize, steps: usize, seed: u64) -> f64 {
    let n = a.ncols();
    let normalize = |x: nalgebra::DVector<f64>| {
        let nq = linalg::vector_p_norm(x.as_slice(), q);
        if nq > 0.0 { x / nq } else { x }
    };
    let f = |x: &nalgebra::DVector<f64>| linalg::vector_p_norm((a * x).as_slice(), p);
    let mut best = 0.0_f64;
    for r in 0..restarts {
        let mut rng = rng_from_seed(seed.wrapping_add(r as u64));
        let mut x = normalize(nalgebra::DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5));
        let mut fx = f(&x);
        let mut step = 0.5;
        for _ in 0..steps {
            let cand = normalize(&x + nalgebra::DVector::from_fn(n, |_, _| step * (rng.random::<f64>() - 0.5)));
            let fc = f(&cand);
            if fc > fx {
                x = cand;
                fx = fc;
            } else {
                step *= 0.97;
            }
        }
        best = best.max(fx);
    }
    best
}

/// `‖Φ‖_{2→2}` as the largest singular value of the superoperator, assembled column by
/// column from `Φ(|i⟩⟨j|)`.
pub fn norm_22(map: &LinearMapRep) -> Result<f64> {
    let (n, m) = (map.in_dim(), map.out_dim());
    let mut sup = CMatrix::zeros(m * m, n * n);
    for i in 0..n {
        for j in 0..n {
            let out = map.apply(&linalg::matrix_unit(n, i, j))?;
            for a in 0..m {
                for b in 0..m {
                    sup[(a * m + b, i * n + j)] = out[(a, b)];
                }
            }
        }
    }
    Ok(linalg::spectral_norm(&sup))
}

/// `‖(A^{1/2r} ⊗ 1) X (B^{1/2r} ⊗ 1)‖_p` for unit-trace PSD `A = GG*/Tr`, `B = KK*/Tr`.
fn weighted_value(x: &CMatrix, dims: (usize, usize), ga: &CMatrix, gb: &CMatrix, r: f64, p: SchattenIndex) -> f64 {
    let id = CMatrix::identity(dims.1, dims.1);
    let pw = |g: &CMatrix| {
        let a = g * g.adjoint();
        let t = a.trace().re;
        linalg::herm_fn(&(a * c(1.0 / t)), |v| v.max(0.0).powf(0.5 / r))
    };
    let z = kron(&pw(ga), &id) * x * kron(&pw(gb), &id);
    linalg::schatten_norm(&z, p).unwrap_or(0.0)
}

/// Random-restart ascent for `‖X‖_{(q,p)}` in the regime `q > p` over unit-trace PSD
/// weights, with forward-difference gradients in the factor parametrization `A = GG*/Tr`.
pub fn brute_two_indexed(
    x: &CMatrix,
    dims: (usize, usize),
    q: SchattenIndex,
    p: SchattenIndex,
    opts: &BruteOptions,
) -> Result<f64> {
    let (n, m) = dims;
    if x.nrows() != n * m || n * m > 1 << 8 {
        return Err(Error::Input("two-indexed brute force needs a valid split with n*m <= 256".into()));
    }
    if q.value() == p.value() {
        return linalg::schatten_norm(x, p);
    }
    if q.value() < p.value() {
        return Err(Error::Unsupported("brute force covers the regime q > p only".into()));
    }
    let r = 1.0 / (p.reciprocal() - q.reciprocal());
    let k = 2 * n * n;
    let unpack = |v: &[f64]| -> (CMatrix, CMatrix) {
        let g = |off: usize| CMatrix::from_fn(n, n, |i, j| C64::new(v[off + 2 * (i * n + j)], v[off + 2 * (i * n + j) + 1]));
        (g(0), g(k))
    };
    let f = |v: &[f64]| {
        let (ga, gb) = unpack(v);
        weighted_value(x, dims, &ga, &gb, r, p)
    };
    let mut best = 0.0_f64;
    for rs in 0..opts.restarts.max(1) {
        let mut rng = rng_from_seed(opts.seed.wrapping_add(rs as u64));
        let v: Vec<f64> = if rs == 0 {
            let id = CMatrix::identity(n, n);
            let mut v = vec![0.0; 2 * k];
            for i in 0..n {
                v[2 * (i * n + i)] = id[(i, i)].re;
                v[k + 2 * (i * n + i)] = 1.0;
            }
            v
        } else {
            let ga = ginibre(n, n, &mut rng);
            let gb = ginibre(n, n, &mut rng);
            ga.iter().chain(gb.iter()).flat_map(|z| [z.re, z.im]).collect()
        };
        let h = 1e-7;
        let (_, fv) = armijo_ascent(
            v,
            opts.steps,
            0.1,
            |v| Ok(f(v)),
            |v| {
                let fv = f(v);
                let grad: Vec<f64> = (0..v.len())
                    .map(|i| {
                        let mut w = v.clone();
                        w[i] += h;
                        (f(&w) - fv) / h
                    })
                    .collect();
                let g2 = grad.iter().map(|g| g * g).sum();
                Ok((grad, g2))
            },
            |v, g, t| Some(v.iter().zip(g).map(|(a, g)| a + t * g).collect()),
        )?;
        best = best.max(fv);
    }
    Ok(best)
}

/// `(id_k ⊗ Ψ)(|φ⟩⟨φ|)` for `φ` on `C^k ⊗ C^n`, assembled blockwise.
fn extended_output(map: &LinearMapRep, phi: &CMatrix, k: usize) -> Result<CMatrix> {
    let (n, m) = (map.in_dim(), map.out_dim());
    let part = |i: usize| phi.rows(i * n, n).into_owned();
    let mut out = CMatrix::zeros(k * m, k * m);
    for i in 0..k {
        for j in 0..k {
            let block = map.apply(&(part(i) * part(j).adjoint()))?;
            out.view_mut((i * m, j * m), (m, m)).copy_from(&block);
        }
    }
    Ok(out)
}

/// `(id_k ⊗ Ψ*)(G)` applied to `φ`.
fn extended_adjoint_times(adj: &LinearMapRep, g: &CMatrix, phi: &CMatrix, k: usize, n: usize, m: usize) -> Result<CMatrix> {
    let mut out = CMatrix::zeros(k * n, 1);
    for i in 0..k {
        let mut acc = CMatrix::zeros(n, 1);
        for j in 0..k {
            let block = adj.apply(&g.view((i * m, j * m), (m, m)).into_owned())?;
            acc += block * phi.rows(j * n, n);
        }
        out.rows_mut(i * n, n).copy_from(&acc);
    }
    Ok(out)
}

/// Lower bound on the diamond norm `sup ‖(id_k ⊗ Ψ)(|φ⟩⟨φ|)‖_1` over unit `φ`, tight for
/// `k = in_dim`.
pub fn diamond_lower_bound(map: &LinearMapRep, ancilla_dim: usize, opts: &BruteOptions) -> Result<f64> {
    let (n, m) = (map.in_dim(), map.out_dim());
    let k = ancilla_dim.max(1);
    if k > n {
        return Err(Error::Input(format!("ancilla dimension {k} exceeds the input dimension {n}")));
    }
    if k * n * k * m > MAX_BRUTE_DIM * 4 {
        return Err(Error::Resource("extended map too large for brute force".into()));
    }
    let adj = map.adjoint();
    let f = |phi: &CMatrix| -> Result<f64> { linalg::schatten_norm(&extended_output(map, phi, k)?, SchattenIndex::ONE) };
    let mut best = 0.0_f64;
    for r in 0..opts.restarts.max(1) {
        let mut rng = rng_from_seed(opts.seed.wrapping_add(r as u64));
        let phi = random_pure_vector(k * n, &mut rng);
        let (_, fv) = armijo_ascent(
            phi,
            opts.steps,
            0.5,
            |phi| f(phi),
            |phi| {
                let (_, g) = schatten_gradient(&extended_output(map, phi, k)?, SchattenIndex::ONE);
                let grad = extended_adjoint_times(&adj, &g, phi, k, n, m)? + extended_adjoint_times(&adj, &g.adjoint(), phi, k, n, m)?;
                // Tangent component only.
                let radial = (phi.adjoint() * &grad)[(0, 0)];
                let grad = &grad - phi * radial;
                let g2 = grad.norm_squared();
                Ok((grad, g2))
            },
            |phi, g, t| {
                let cand = phi + g * c(t);
                let nrm = cand.norm();
                (nrm > 0.0).then(|| cand * c(1.0 / nrm))
            },
        )?;
        best = best.max(fv);
    }
    Ok(best)
}

//! Linear maps `Φ: C^{n×n} → C^{m×m}` and their structural operations.
//!
//! A map is stored in one of four forms: signed Kraus operators (so differences of CP maps
//! are first-class), a Choi matrix `J = Σ_{ij} |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`, a measure-and-prepare
//! list `X ↦ Σ Tr[M_k X] σ_k`, or a lazy tensor product of other maps.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    self, c, eigh, ensure_finite, hermitian, kron, partial_trace_second, CMatrix, SchattenIndex, C64,
};

/// Dense joint Choi matrices of tensor maps are only formed up to this total dimension `n·m`.
pub const DENSE_TENSOR_LIMIT: usize = 1 << 12;
/// Tolerance on `‖Tr_2 J − I‖_∞` for declaring a map trace preserving.
pub const TP_TOL: f64 = 1e-8;
/// Relative tolerance on the most negative Choi eigenvalue for declaring a map CP.
pub const CP_RTOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub enum MapBody {
    /// `X ↦ Σ s_k K_k X K_k*` with `s_k = ±1`.
    Kraus { ops: Vec<CMatrix>, signs: Vec<f64> },
    Choi(CMatrix),
    /// Pairs `(M_k, σ_k)` acting as `X ↦ Σ Tr[M_k X] σ_k`.
    MeasurePrepare(Vec<(CMatrix, CMatrix)>),
    /// Lazy tensor product; factor `k` acts on the `k`-th tensor factor of the input.
    Tensor(Vec<LinearMapRep>),
}

#[derive(Clone, Debug)]
pub struct LinearMapRep {
    in_dim: usize,
    out_dim: usize,
    body: MapBody,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl From<bool> for Tri {
    fn from(b: bool) -> Self {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }
}

/// Structural facts about a map that the solvers rely on.
#[derive(Clone, Debug, Serialize)]
pub struct MapFlags {
    pub is_cp: Tri,
    pub is_tp: Tri,
    /// `c ≥ 0` with `Λ(ω) ≥ c·I·Tr ω` for all `ω ≥ 0`.
    pub positivity_floor: Option<f64>,
    /// Upper bound on `‖Λ‖_{∞→∞}`; exact (`‖Λ(I)‖_∞`) for positive maps.
    pub sup_norm_bound: Option<f64>,
}

impl LinearMapRep {
    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn body(&self) -> &MapBody {
        &self.body
    }

    pub fn kraus(ops: Vec<CMatrix>) -> Result<Self> {
        let signs = vec![1.0; ops.len()];
        Self::signed_kraus(ops, signs)
    }

    pub fn signed_kraus(ops: Vec<CMatrix>, signs: Vec<f64>) -> Result<Self> {
        let first = ops.first().ok_or_else(|| Error::Input("a Kraus map needs at least one operator".into()))?;
        let (m, n) = first.shape();
        if m == 0 || n == 0 {
            return Err(Error::Input("empty Kraus operator".into()));
        }
        if ops.len() != signs.len() {
            return Err(Error::Input(format!("{} Kraus operators but {} signs", ops.len(), signs.len())));
        }
        for k in &ops {
            if k.shape() != (m, n) {
                return Err(Error::Input(format!("Kraus operators of mixed shapes {:?} and {:?}", (m, n), k.shape())));
            }
            ensure_finite(k)?;
        }
        if signs.iter().any(|&s| s != 1.0 && s != -1.0) {
            return Err(Error::Input("Kraus signs must be +1 or -1".into()));
        }
        Ok(LinearMapRep { in_dim: n, out_dim: m, body: MapBody::Kraus { ops, signs } })
    }

    /// Map given by its Choi matrix on `C^n ⊗ C^m` (input factor first).
    pub fn choi_map(j: CMatrix, n: usize, m: usize) -> Result<Self> {
        if j.nrows() != n * m || j.ncols() != n * m || n == 0 || m == 0 {
            return Err(Error::Dimension(format!("Choi matrix is {}x{}, expected {}", j.nrows(), j.ncols(), n * m)));
        }
        ensure_finite(&j)?;
        Ok(LinearMapRep { in_dim: n, out_dim: m, body: MapBody::Choi(j) })
    }

    /// Measure-and-prepare map `X ↦ Σ Tr[M_k X] σ_k` with Hermitian `M_k`, `σ_k`.
    pub fn measure_prepare(pairs: Vec<(CMatrix, CMatrix)>) -> Result<Self> {
        let (m0, s0) = pairs.first().ok_or_else(|| Error::Input("measure-prepare map needs an element".into()))?;
        let (n, m) = (m0.nrows(), s0.nrows());
        let mut clean = Vec::with_capacity(pairs.len());
        for (effect, output) in &pairs {
            if effect.shape() != (n, n) || output.shape() != (m, m) {
                return Err(Error::Input("measure-prepare elements of mixed shapes".into()));
            }
            clean.push((hermitian(effect)?, hermitian(output)?));
        }
        Ok(LinearMapRep { in_dim: n, out_dim: m, body: MapBody::MeasurePrepare(clean) })
    }

    pub fn tensor(maps: Vec<LinearMapRep>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::Input("tensor product of an empty list".into()));
        }
        let in_dim = maps.iter().map(|f| f.in_dim).product();
        let out_dim = maps.iter().map(|f| f.out_dim).product();
        Ok(LinearMapRep { in_dim, out_dim, body: MapBody::Tensor(maps) })
    }

    pub fn identity(d: usize) -> Self {
        Self::kraus(vec![CMatrix::identity(d, d)]).expect("identity is well formed")
    }

    /// `X ↦ U X U*`.
    pub fn unitary(u: CMatrix) -> Result<Self> {
        Self::kraus(vec![u])
    }

    /// Fully depolarizing map `X ↦ Tr[X]·I/d`.
    pub fn depolarizing(d: usize) -> Self {
        Self::measure_prepare(vec![(CMatrix::identity(d, d), CMatrix::identity(d, d) * c(1.0 / d as f64))])
            .expect("depolarizing is well formed")
    }

    /// Replacement map `X ↦ Tr[X]·I_m/m` from `C^{n×n}`.
    pub fn completely_depolarizing(n: usize, m: usize) -> Self {
        Self::measure_prepare(vec![(CMatrix::identity(n, n), CMatrix::identity(m, m) * c(1.0 / m as f64))])
            .expect("replacement map is well formed")
    }

    /// `Φ − Ψ` for CP maps, as a signed Kraus list.
    pub fn difference(a: &LinearMapRep, b: &LinearMapRep) -> Result<Self> {
        if a.in_dim != b.in_dim || a.out_dim != b.out_dim {
            return Err(Error::Dimension("difference of maps with different shapes".into()));
        }
        let (ka, sa) = a.kraus_list()?;
        let (kb, sb) = b.kraus_list()?;
        let mut ops = ka;
        let mut signs = sa;
        ops.extend(kb);
        signs.extend(sb.into_iter().map(|s| -s));
        Self::signed_kraus(ops, signs)
    }

    /// The classical embedding `ρ ↦ Σ_{ij} A_ij |i⟩⟨j| ρ |j⟩⟨i|` of an entrywise nonnegative
    /// `m × n` matrix. Its mixed norms equal the mixed `ℓ_q → ℓ_p` norms of `A`.
    pub fn classical_embedding(a: &nalgebra::DMatrix<f64>) -> Result<Self> {
        let (m, n) = a.shape();
        if m == 0 || n == 0 {
            return Err(Error::Input("empty matrix".into()));
        }
        if let Some(bad) = a.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Input(format!("classical embedding needs nonnegative entries, found {bad}")));
        }
        let mut ops = Vec::new();
        for i in 0..m {
            for j in 0..n {
                if a[(i, j)] > 0.0 {
                    let mut k = CMatrix::zeros(m, n);
                    k[(i, j)] = c(a[(i, j)].sqrt());
                    ops.push(k);
                }
            }
        }
        if ops.is_empty() {
            ops.push(CMatrix::zeros(m, n));
        }
        Self::kraus(ops)
    }

    fn check_input(&self, x: &CMatrix) -> Result<()> {
        if x.nrows() != self.in_dim || x.ncols() != self.in_dim {
            return Err(Error::Dimension(format!(
                "map expects {}x{} inputs, got {}x{}",
                self.in_dim,
                self.in_dim,
                x.nrows(),
                x.ncols()
            )));
        }
        Ok(())
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        self.check_input(x)?;
        let (n, m) = (self.in_dim, self.out_dim);
        Ok(match &self.body {
            MapBody::Kraus { ops, signs } => {
                let mut out = CMatrix::zeros(m, m);
                for (k, s) in ops.iter().zip(signs) {
                    let t = k * x * k.adjoint();
                    if *s > 0.0 {
                        out += t;
                    } else {
                        out -= t;
                    }
                }
                out
            }
            MapBody::Choi(j) => {
                let mut out = CMatrix::zeros(m, m);
                for i in 0..n {
                    for jj in 0..n {
                        let xij = x[(i, jj)];
                        if xij == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for a in 0..m {
                            for b in 0..m {
                                out[(a, b)] += xij * j[(i * m + a, jj * m + b)];
                            }
                        }
                    }
                }
                out
            }
            MapBody::MeasurePrepare(pairs) => {
                let mut out = CMatrix::zeros(m, m);
                for (effect, output) in pairs {
                    out += output * linalg::trace_product(effect, x);
                }
                out
            }
            MapBody::Tensor(_) => {
                let dense = self.to_choi_body()?;
                return dense.apply(x);
            }
        })
    }

    /// Applies a tensor map to a product input `X₁ ⊗ X₂ ⊗ …`, returning the factor outputs.
    ///
    /// Non-tensor maps accept a single factor.
    pub fn apply_product(&self, factors: &[CMatrix]) -> Result<Vec<CMatrix>> {
        match &self.body {
            MapBody::Tensor(maps) => {
                if maps.len() != factors.len() {
                    return Err(Error::Dimension(format!("{} factors for a {}-fold tensor map", factors.len(), maps.len())));
                }
                maps.iter().zip(factors).map(|(f, x)| f.apply(x)).collect()
            }
            _ => {
                if factors.len() != 1 {
                    return Err(Error::Dimension("product input for a non-tensor map".into()));
                }
                Ok(vec![self.apply(&factors[0])?])
            }
        }
    }

    /// Choi matrix `Σ_{ij} |i⟩⟨j| ⊗ Φ(|i⟩⟨j|)`.
    pub fn choi(&self) -> Result<CMatrix> {
        let (n, m) = (self.in_dim, self.out_dim);
        match &self.body {
            MapBody::Choi(j) => Ok(j.clone()),
            MapBody::Kraus { ops, signs } => {
                let mut j = CMatrix::zeros(n * m, n * m);
                for (k, s) in ops.iter().zip(signs) {
                    let v = CMatrix::from_fn(n * m, 1, |r, _| k[(r % m, r / m)]);
                    j += &v * v.adjoint() * c(*s);
                }
                Ok(j)
            }
            MapBody::MeasurePrepare(pairs) => {
                let mut j = CMatrix::zeros(n * m, n * m);
                for (effect, output) in pairs {
                    j += kron(&effect.transpose(), output);
                }
                Ok(j)
            }
            MapBody::Tensor(maps) => {
                if n * m > DENSE_TENSOR_LIMIT {
                    return Err(Error::Resource(format!(
                        "dense Choi of a tensor map with n*m = {} exceeds {DENSE_TENSOR_LIMIT}",
                        n * m
                    )));
                }
                let mut acc = maps[0].choi()?;
                let (mut an, mut am) = (maps[0].in_dim, maps[0].out_dim);
                for f in &maps[1..] {
                    let jf = f.choi()?;
                    acc = tensor_choi(&acc, (an, am), &jf, (f.in_dim, f.out_dim));
                    an *= f.in_dim;
                    am *= f.out_dim;
                }
                Ok(acc)
            }
        }
    }

    fn to_choi_body(&self) -> Result<LinearMapRep> {
        LinearMapRep::choi_map(self.choi()?, self.in_dim, self.out_dim)
    }

    /// Hilbert–Schmidt adjoint `Φ*` with `Tr[Φ*(Y) X] = Tr[Y Φ(X)]`.
    pub fn adjoint(&self) -> LinearMapRep {
        let (n, m) = (self.in_dim, self.out_dim);
        let body = match &self.body {
            MapBody::Kraus { ops, signs } => {
                MapBody::Kraus { ops: ops.iter().map(|k| k.adjoint()).collect(), signs: signs.clone() }
            }
            MapBody::Choi(j) => MapBody::Choi(CMatrix::from_fn(n * m, n * m, |r, s| {
                let (b, jj) = (r / n, r % n);
                let (a, i) = (s / n, s % n);
                j[(i * m + a, jj * m + b)]
            })),
            MapBody::MeasurePrepare(pairs) => {
                MapBody::MeasurePrepare(pairs.iter().map(|(e, o)| (o.clone(), e.clone())).collect())
            }
            MapBody::Tensor(maps) => MapBody::Tensor(maps.iter().map(|f| f.adjoint()).collect()),
        };
        LinearMapRep { in_dim: m, out_dim: n, body }
    }

    /// `s·Φ` for `s ≥ 0`.
    pub fn scaled(&self, s: f64) -> LinearMapRep {
        assert!(s >= 0.0 && s.is_finite(), "scale must be finite and nonnegative");
        let body = match &self.body {
            MapBody::Kraus { ops, signs } => {
                MapBody::Kraus { ops: ops.iter().map(|k| k * c(s.sqrt())).collect(), signs: signs.clone() }
            }
            MapBody::Choi(j) => MapBody::Choi(j * c(s)),
            MapBody::MeasurePrepare(pairs) => {
                MapBody::MeasurePrepare(pairs.iter().map(|(e, o)| (e.clone(), o * c(s))).collect())
            }
            MapBody::Tensor(maps) => {
                let mut maps = maps.clone();
                maps[0] = maps[0].scaled(s);
                MapBody::Tensor(maps)
            }
        };
        LinearMapRep { in_dim: self.in_dim, out_dim: self.out_dim, body }
    }

    /// Kraus operators and signs. Choi bodies are decomposed spectrally (signs from the
    /// eigenvalue signs); tensor bodies are expanded.
    pub fn kraus_list(&self) -> Result<(Vec<CMatrix>, Vec<f64>)> {
        let (n, m) = (self.in_dim, self.out_dim);
        match &self.body {
            MapBody::Kraus { ops, signs } => Ok((ops.clone(), signs.clone())),
            MapBody::Tensor(maps) => {
                let mut acc: Vec<(CMatrix, f64)> = vec![(CMatrix::identity(1, 1), 1.0)];
                for f in maps {
                    let (ks, ss) = f.kraus_list()?;
                    let mut next = Vec::with_capacity(acc.len() * ks.len());
                    for (a, sa) in &acc {
                        for (k, sk) in ks.iter().zip(&ss) {
                            next.push((kron(a, k), sa * sk));
                        }
                    }
                    acc = next;
                }
                Ok(acc.into_iter().unzip())
            }
            _ => {
                let j = hermitian(&self.choi()?)
                    .map_err(|_| Error::Input("only Hermiticity-preserving maps have a signed Kraus form".into()))?;
                let (vals, vecs) = eigh(&j);
                let scale = vals.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
                let mut ops = Vec::new();
                let mut signs = Vec::new();
                for (k, &lam) in vals.iter().enumerate() {
                    if lam.abs() <= 1e-14 * scale {
                        continue;
                    }
                    let col = vecs.column(k);
                    ops.push(CMatrix::from_fn(m, n, |a, i| col[i * m + a] * lam.abs().sqrt()));
                    signs.push(lam.signum());
                }
                if ops.is_empty() {
                    ops.push(CMatrix::zeros(m, n));
                    signs.push(1.0);
                }
                Ok((ops, signs))
            }
        }
    }

    /// Whether the map is completely positive (Choi matrix PSD within `CP_RTOL`).
    pub fn is_cp(&self) -> Result<bool> {
        match &self.body {
            MapBody::Kraus { signs, .. } if signs.iter().all(|&s| s > 0.0) => Ok(true),
            MapBody::Tensor(maps) if n_all(maps, |f| f.is_cp())? => Ok(true),
            _ => {
                let j = match hermitian(&self.choi()?) {
                    Ok(j) => j,
                    Err(Error::NotHermitian(_)) => return Ok(false),
                    Err(e) => return Err(e),
                };
                let (vals, _) = eigh(&j);
                let scale = vals.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
                Ok(vals[0] >= -CP_RTOL * scale)
            }
        }
    }

    /// Whether `Tr Φ(X) = Tr X` (i.e. `Tr_2 J = I`) within `TP_TOL`.
    pub fn is_tp(&self) -> Result<bool> {
        if let MapBody::Tensor(maps) = &self.body {
            if n_all(maps, |f| f.is_tp())? {
                return Ok(true);
            }
        }
        let n = self.in_dim;
        let pt = match &self.body {
            MapBody::Kraus { ops, signs } => ops
                .iter()
                .zip(signs)
                .map(|(k, s)| k.adjoint() * k * c(*s))
                .fold(CMatrix::zeros(n, n), |a, b| a + b),
            MapBody::MeasurePrepare(pairs) => {
                pairs.iter().map(|(e, o)| e * o.trace()).fold(CMatrix::zeros(n, n), |a, b| a + b)
            }
            _ => partial_trace_second(&self.choi()?, (n, self.out_dim))?,
        };
        Ok(linalg::spectral_norm(&(pt - CMatrix::identity(n, n))) <= TP_TOL)
    }

    /// `λ_min(J)`, a certified `c` with `Λ(ω) ≥ c·I·Tr ω`.
    pub fn positivity_floor(&self) -> Result<f64> {
        let j = hermitian(&self.choi()?)?;
        let lmin = linalg::min_eigenvalue(&j);
        let scale = linalg::spectral_norm(&j);
        if lmin < -CP_RTOL * scale {
            return Err(Error::NotCompletelyPositive(lmin));
        }
        Ok(lmin.max(0.0))
    }

    /// `‖Λ(I)‖_∞`, which equals `‖Λ‖_{∞→∞}` for positive maps.
    pub fn unit_image_norm(&self) -> Result<f64> {
        let out = self.apply(&CMatrix::identity(self.in_dim, self.in_dim))?;
        Ok(linalg::spectral_norm(&out))
    }

    pub fn flags(&self) -> Result<MapFlags> {
        let cp = self.is_cp()?;
        let tp = self.is_tp()?;
        Ok(MapFlags {
            is_cp: cp.into(),
            is_tp: tp.into(),
            positivity_floor: if cp { Some(self.positivity_floor()?) } else { None },
            sup_norm_bound: if cp { Some(self.unit_image_norm()?) } else { None },
        })
    }

    /// Depolarizing smoothing `(1−δ)Λ + δ·Tr[·]·I_m/m`.
    pub fn smooth(&self, delta: f64) -> Result<LinearMapRep> {
        if !(0.0..=1.0).contains(&delta) || delta.is_nan() {
            return Err(Error::Input(format!("smoothing parameter must lie in [0, 1], got {delta}")));
        }
        let (n, m) = (self.in_dim, self.out_dim);
        if delta == 0.0 {
            return Ok(self.clone());
        }
        let body = match &self.body {
            MapBody::Kraus { ops, signs } => {
                let mut ops: Vec<CMatrix> = ops.iter().map(|k| k * c((1.0 - delta).sqrt())).collect();
                let mut signs = signs.clone();
                let w = (delta / m as f64).sqrt();
                for a in 0..m {
                    for x in 0..n {
                        let mut k = CMatrix::zeros(m, n);
                        k[(a, x)] = c(w);
                        ops.push(k);
                        signs.push(1.0);
                    }
                }
                MapBody::Kraus { ops, signs }
            }
            MapBody::MeasurePrepare(pairs) => {
                let mut pairs: Vec<(CMatrix, CMatrix)> =
                    pairs.iter().map(|(e, o)| (e.clone(), o * c(1.0 - delta))).collect();
                pairs.push((CMatrix::identity(n, n), CMatrix::identity(m, m) * c(delta / m as f64)));
                MapBody::MeasurePrepare(pairs)
            }
            _ => {
                let j = self.choi()? * c(1.0 - delta) + CMatrix::identity(n * m, n * m) * c(delta / m as f64);
                MapBody::Choi(j)
            }
        };
        Ok(LinearMapRep { in_dim: n, out_dim: m, body })
    }

    /// The equivalent problem `‖Φ*‖_{p′→q′}` for `‖Φ‖_{q→p}`.
    pub fn holder_dual_problem(&self, q: SchattenIndex, p: SchattenIndex) -> (LinearMapRep, SchattenIndex, SchattenIndex) {
        (self.adjoint(), p.dual(), q.dual())
    }
}

fn n_all(maps: &[LinearMapRep], f: impl Fn(&LinearMapRep) -> Result<bool>) -> Result<bool> {
    for m in maps {
        if !f(m)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Choi matrix of `Φ₁ ⊗ Φ₂` from the factor Choi matrices.
fn tensor_choi(j1: &CMatrix, d1: (usize, usize), j2: &CMatrix, d2: (usize, usize)) -> CMatrix {
    let (n1, m1) = d1;
    let (n2, m2) = d2;
    let (n, m) = (n1 * n2, m1 * m2);
    CMatrix::from_fn(n * m, n * m, |r, s| {
        let (i, a) = (r / m, r % m);
        let (j, b) = (s / m, s % m);
        let (i1, i2, a1, a2) = (i / n2, i % n2, a / m2, a % m2);
        let (j1i, j2i, b1, b2) = (j / n2, j % n2, b / m2, b % m2);
        j1[(i1 * m1 + a1, j1i * m1 + b1)] * j2[(i2 * m2 + a2, j2i * m2 + b2)]
    })
}

/// Recovers Kraus operators from a PSD Choi matrix.
///
/// Fails with [`Error::NotCompletelyPositive`] when an eigenvalue lies below `−tol`.
pub fn kraus_from_choi(j: &CMatrix, n: usize, m: usize, tol: f64) -> Result<LinearMapRep> {
    let map = LinearMapRep::choi_map(hermitian(j)?, n, m)?;
    let (vals, _) = eigh(j);
    if vals[0] < -tol {
        return Err(Error::NotCompletelyPositive(vals[0]));
    }
    let (ops, signs) = map.kraus_list()?;
    let ops = ops.into_iter().zip(signs).filter(|(_, s)| *s > 0.0).map(|(k, _)| k).collect::<Vec<_>>();
    if ops.is_empty() {
        return LinearMapRep::kraus(vec![CMatrix::zeros(m, n)]);
    }
    LinearMapRep::kraus(ops)
}

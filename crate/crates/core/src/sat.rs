//! 2-out-of-4-SAT gadget channels.
//!
//! An instance on `K = C^d` is a list of clause vectors `|A_k⟩ = ½Σ s_i|i⟩` with exactly four
//! signed entries. It is satisfiable iff some proper state `|ψ̃⟩ = d^{-1/2}Σ x_i|i⟩`,
//! `x ∈ {±1}^d`, is orthogonal to every `|A_k⟩`. Four measure-and-prepare channels on
//! `B(K ⊗ K)` single out `ψ̃ ⊗ ψ̃` for satisfying `x`; their tensor product attains the
//! bound `f(η, d, p)` in the `1→p` norm exactly on such certificates.
//!
//! Only product inputs are ever evaluated, factor by factor; no operator on the
//! `d⁸`-dimensional input space of the tensor map is formed.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::{LinearMapRep, MapBody};
use crate::error::{Error, Result};
use crate::linalg::{self, c, kron, CMatrix, PsdOperator, SchattenIndex, C64};

/// Largest `d` accepted by the exhaustive search.
pub const MAX_EXHAUSTIVE_D: usize = 24;

/// One clause: four distinct 0-based indices with signs `±1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub indices: [usize; 4],
    pub signs: [i8; 4],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoOutOfFourInstance {
    d: usize,
    clauses: Vec<Clause>,
}

/// File form: 1-based indices and `"+"`, `"-"` or `"−"` signs.
#[derive(Serialize, Deserialize)]
struct InstanceFile {
    d: usize,
    clauses: Vec<ClauseFile>,
}

#[derive(Serialize, Deserialize)]
struct ClauseFile {
    indices: Vec<usize>,
    signs: Vec<String>,
}

fn parse_sign(s: &str) -> Result<i8> {
    match s.trim() {
        "+" | "+1" => Ok(1),
        "-" | "−" | "-1" => Ok(-1),
        other => Err(Error::Input(format!("clause sign must be + or -, got {other:?}"))),
    }
}

impl TwoOutOfFourInstance {
    pub fn new(d: usize, clauses: Vec<Clause>) -> Result<Self> {
        if d < 4 {
            return Err(Error::Input(format!("instances need d >= 4 (a clause has four distinct indices), got {d}")));
        }
        if clauses.is_empty() {
            return Err(Error::Input("an instance needs at least one clause".into()));
        }
        for (k, cl) in clauses.iter().enumerate() {
            let mut idx = cl.indices;
            idx.sort_unstable();
            if idx.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Input(format!("clause {} repeats an index", k + 1)));
            }
            if idx[3] >= d {
                return Err(Error::Input(format!("clause {} has index {} > d = {d}", k + 1, idx[3] + 1)));
            }
            if cl.signs.iter().any(|s| s.abs() != 1) {
                return Err(Error::Input(format!("clause {} has a sign other than +-1", k + 1)));
            }
        }
        Ok(TwoOutOfFourInstance { d, clauses })
    }

    /// Builds an instance from 1-based index lists and `'+'`/`'-'` sign strings.
    pub fn from_signed(d: usize, clauses: &[([usize; 4], &str)]) -> Result<Self> {
        let mut out = Vec::new();
        for (idx, signs) in clauses {
            let s: Vec<i8> = signs.chars().map(|ch| parse_sign(&ch.to_string())).collect::<Result<_>>()?;
            if s.len() != 4 || idx.contains(&0) {
                return Err(Error::Input("clauses need four 1-based indices and four signs".into()));
            }
            out.push(Clause { indices: idx.map(|i| i - 1), signs: [s[0], s[1], s[2], s[3]] });
        }
        Self::new(d, out)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: InstanceFile = serde_json::from_str(text)?;
        let mut clauses = Vec::new();
        for (k, cf) in f.clauses.iter().enumerate() {
            if cf.indices.len() != 4 || cf.signs.len() != 4 {
                return Err(Error::Input(format!("clause {} needs exactly four indices and four signs", k + 1)));
            }
            if cf.indices.contains(&0) {
                return Err(Error::Input(format!("clause {} uses index 0; indices are 1-based", k + 1)));
            }
            let s: Vec<i8> = cf.signs.iter().map(|s| parse_sign(s)).collect::<Result<_>>()?;
            clauses.push(Clause {
                indices: [cf.indices[0] - 1, cf.indices[1] - 1, cf.indices[2] - 1, cf.indices[3] - 1],
                signs: [s[0], s[1], s[2], s[3]],
            });
        }
        Self::new(f.d, clauses)
    }

    pub fn to_json(&self) -> String {
        let f = InstanceFile {
            d: self.d,
            clauses: self
                .clauses
                .iter()
                .map(|cl| ClauseFile {
                    indices: cl.indices.iter().map(|i| i + 1).collect(),
                    signs: cl.signs.iter().map(|&s| if s > 0 { "+".into() } else { "-".into() }).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&f).expect("plain data")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn m(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// `|A_k⟩` as a column vector.
    pub fn clause_vector(&self, k: usize) -> CMatrix {
        let cl = &self.clauses[k];
        let mut v = CMatrix::zeros(self.d, 1);
        for (i, s) in cl.indices.iter().zip(cl.signs) {
            v[(*i, 0)] = c(0.5 * s as f64);
        }
        v
    }

    /// Whether the sign vector satisfies clause `k`, i.e. `Σ s_i x_i = 0`.
    pub fn clause_satisfied(&self, k: usize, x: &ProperState) -> bool {
        self.clause_overlap_sum(k, x) == 0
    }

    fn clause_overlap_sum(&self, k: usize, x: &ProperState) -> i32 {
        let cl = &self.clauses[k];
        cl.indices.iter().zip(cl.signs).map(|(i, s)| (s * x.signs[*i]) as i32).sum()
    }
}

/// Sign vector `x ∈ {±1}^d` of a proper state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProperState {
    pub signs: Vec<i8>,
}

impl ProperState {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|s| s.abs() != 1) {
            return Err(Error::Input("proper states have entries +-1".into()));
        }
        Ok(ProperState { signs })
    }

    /// Parses strings like `"++--"`.
    pub fn parse(s: &str) -> Result<Self> {
        Self::new(s.chars().map(|ch| parse_sign(&ch.to_string())).collect::<Result<_>>()?)
    }

    /// `d^{-1/2}Σ x_i|i⟩`.
    pub fn vector(&self) -> CMatrix {
        let d = self.signs.len();
        let s = 1.0 / (d as f64).sqrt();
        CMatrix::from_fn(d, 1, |i, _| c(s * self.signs[i] as f64))
    }

    /// `|ψ̃⟩⟨ψ̃|`.
    pub fn density(&self) -> CMatrix {
        let v = self.vector();
        &v * v.adjoint()
    }

    /// `ψ̃ ⊗ ψ̃` on `K ⊗ K`.
    pub fn doubled(&self) -> CMatrix {
        let rho = self.density();
        kron(&rho, &rho)
    }
}

impl fmt::Display for ProperState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.signs {
            write!(f, "{}", if *s > 0 { '+' } else { '-' })?;
        }
        Ok(())
    }
}

/// `H = (1/m)Σ_k |A_k⟩⟨A_k| ⊗ |A_k⟩⟨A_k|` on `C^{d²}`.
pub fn build_hamiltonian(inst: &TwoOutOfFourInstance) -> PsdOperator {
    let d = inst.d();
    let mut h = CMatrix::zeros(d * d, d * d);
    for k in 0..inst.m() {
        let a = inst.clause_vector(k);
        let p = &a * a.adjoint();
        h += kron(&p, &p);
    }
    PsdOperator::project(&(h * c(1.0 / inst.m() as f64)))
}

/// The four factor channels `B(K ⊗ K) → B(·)`.
#[derive(Clone, Debug)]
pub struct GadgetChannels {
    /// `(1 − η/d²)·I/d + (η/d²)·Tr_2[ρ]`, onto `K`.
    pub trace: LinearMapRep,
    /// SWAP test: `(1 ± F)/2 ↦ |0⟩, |1⟩`.
    pub swap: LinearMapRep,
    /// `N ↦ |0⟩`, `M = I − N ↦ |1⟩` with `N = (1/(d(d−1)))Σ_{i≠j}Π_ij ⊗ Π′_ij`.
    pub cube: LinearMapRep,
    /// `H/2 ↦ |0⟩`, `I − H/2 ↦ |1⟩`.
    pub hamiltonian: LinearMapRep,
    pub eta: f64,
    pub d: usize,
    /// `η < 1`, where the trace gadget is entanglement breaking. Recorded, not verified.
    pub entanglement_breaking: bool,
}

impl GadgetChannels {
    pub fn factors(&self) -> [&LinearMapRep; 4] {
        [&self.trace, &self.swap, &self.cube, &self.hamiltonian]
    }

    /// `Ψ_H`, the tensor product of the four factors.
    pub fn tensor(&self) -> LinearMapRep {
        LinearMapRep::tensor(self.factors().iter().map(|m| (*m).clone()).collect()).expect("four factors")
    }

    /// The centered factors `Φ − σ_ref·Tr` of the trace-norm variant.
    pub fn centered(&self) -> [LinearMapRep; 4] {
        let d = self.d;
        [
            centered(&self.trace, &(CMatrix::identity(d, d) * c(1.0 / d as f64))),
            centered(&self.swap, &ket_bra(1)),
            centered(&self.cube, &ket_bra(0)),
            centered(&self.hamiltonian, &ket_bra(0)),
        ]
    }
}

fn ket_bra(k: usize) -> CMatrix {
    linalg::matrix_unit(2, k, k)
}

/// `Φ(·) − σ·Tr[·]` for a measure-and-prepare `Φ` with a complete POVM.
fn centered(map: &LinearMapRep, sigma: &CMatrix) -> LinearMapRep {
    match map.body() {
        MapBody::MeasurePrepare(pairs) => LinearMapRep::measure_prepare(
            pairs.iter().map(|(e, o)| (e.clone(), o - sigma)).collect(),
        )
        .expect("same shapes"),
        _ => unreachable!("gadgets are measure-and-prepare"),
    }
}

/// Informationally complete POVM `N_k = S^{-1/2}P_kS^{-1/2}` on `C^d` and its dual frame.
///
/// `P_k` are the projectors onto `|i⟩`, `(|i⟩+|j⟩)/√2` and `(|i⟩+i|j⟩)/√2`, and every
/// Hermitian `X` satisfies `X = Σ_k Tr[N_k X]·D_k`.
pub fn ic_povm(d: usize) -> (Vec<CMatrix>, Vec<CMatrix>) {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut vecs = Vec::new();
    for i in 0..d {
        let mut v = CMatrix::zeros(d, 1);
        v[(i, 0)] = c(1.0);
        vecs.push(v);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut v = CMatrix::zeros(d, 1);
            v[(i, 0)] = c(s2);
            v[(j, 0)] = c(s2);
            vecs.push(v.clone());
            v[(j, 0)] = C64::new(0.0, s2);
            vecs.push(v);
        }
    }
    let projs: Vec<CMatrix> = vecs.iter().map(|v| v * v.adjoint()).collect();
    let s = projs.iter().fold(CMatrix::zeros(d, d), |a, p| a + p);
    let s_inv_half = PsdOperator::project(&s).pinv_power(0.5, 1e-14).matrix();
    let effects: Vec<CMatrix> = projs.iter().map(|p| linalg::hermitize(&(&s_inv_half * p * &s_inv_half))).collect();
    let n = effects.len();
    let gram = nalgebra::DMatrix::<f64>::from_fn(n, n, |k, l| linalg::trace_product(&effects[k], &effects[l]).re);
    let inv = gram.try_inverse().expect("informationally complete frame");
    let duals = (0..n)
        .map(|k| linalg::hermitize(&(0..n).fold(CMatrix::zeros(d, d), |acc, l| acc + &effects[l] * c(inv[(k, l)]))))
        .collect();
    (effects, duals)
}

/// Builds the four gadget channels for `0 < η ≤ d²`.
pub fn build_gadget_channels(inst: &TwoOutOfFourInstance, eta: f64) -> Result<GadgetChannels> {
    let d = inst.d();
    let d2 = (d * d) as f64;
    if !(eta > 0.0 && eta <= d2) {
        return Err(Error::Input(format!("eta must lie in (0, d^2] = (0, {d2}], got {eta}")));
    }
    let id_k = CMatrix::identity(d, d);
    let id_h = CMatrix::identity(d * d, d * d);
    let w = eta / d2;

    let (effects, duals) = ic_povm(d);
    let trace = LinearMapRep::measure_prepare(
        effects
            .iter()
            .zip(&duals)
            .map(|(nk, dk)| (kron(nk, &id_k), &id_k * c((1.0 - w) / d as f64) + dk * c(w)))
            .collect(),
    )?;

    let mut flip = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            flip[(i * d + j, j * d + i)] = c(1.0);
        }
    }
    let swap = LinearMapRep::measure_prepare(vec![
        ((&id_h + &flip) * c(0.5), ket_bra(0)),
        ((&id_h - &flip) * c(0.5), ket_bra(1)),
    ])?;

    let mut nsum = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            let mut plus = CMatrix::zeros(d, 1);
            plus[(i, 0)] = c(1.0);
            plus[(j, 0)] = c(1.0);
            let mut minus = plus.clone();
            minus[(j, 0)] = c(-1.0);
            let pi = &plus * plus.adjoint() * c(0.5);
            let pim = &minus * minus.adjoint() * c(0.5);
            nsum += kron(&pi, &pim);
        }
    }
    let n_cube = nsum * c(1.0 / (d * (d - 1)) as f64);
    let cube = LinearMapRep::measure_prepare(vec![(n_cube.clone(), ket_bra(0)), (&id_h - n_cube, ket_bra(1))])?;

    let h = build_hamiltonian(inst).matrix();
    let hamiltonian =
        LinearMapRep::measure_prepare(vec![(&h * c(0.5), ket_bra(0)), (&id_h - &h * c(0.5), ket_bra(1))])?;

    Ok(GadgetChannels { trace, swap, cube, hamiltonian, eta, d, entanglement_breaking: eta < 1.0 })
}

/// `f(η, d, p) = ((d−1)·a^p + (a + η/d²)^p)^{1/p}` with `a = (1 − η/d²)/d`.
pub fn gadget_bound(eta: f64, d: usize, p: SchattenIndex) -> f64 {
    let df = d as f64;
    let w = eta / (df * df);
    let a = (1.0 - w) / df;
    if p.is_infinite() {
        return a + w;
    }
    let pv = p.value();
    ((df - 1.0) * a.powf(pv) + (a + w).powf(pv)).powf(1.0 / pv)
}

/// `2³(2 − 2/d)·η/d²`, the trace-norm bound of the centered gadget.
pub fn gadget_bound_one_to_one(eta: f64, d: usize) -> f64 {
    let df = d as f64;
    8.0 * (2.0 - 2.0 / df) * eta / (df * df)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateVariant {
    /// `‖Ψ_H(τ)‖_p`.
    OneToP,
    /// `‖Ψ̃_H(τ)‖_1` for the centered gadget.
    OneToOne,
}

/// Product of factor Schatten norms of `(Φ₁ ⊗ … ⊗ Φ₄)(τ₁ ⊗ … ⊗ τ₄)`.
pub fn product_value(factors: &[LinearMapRep], inputs: &[CMatrix], p: SchattenIndex) -> Result<f64> {
    if factors.len() != inputs.len() {
        return Err(Error::Dimension("one input per factor".into()));
    }
    let map = LinearMapRep::tensor(factors.to_vec())?;
    let outs = map.apply_product(inputs)?;
    outs.iter().try_fold(1.0, |acc, o| Ok(acc * linalg::schatten_norm(o, p)?))
}

/// Value of the certificate `τ = (ψ̃ ⊗ ψ̃)^{⊗4}`.
pub fn certificate_value(
    inst: &TwoOutOfFourInstance,
    eta: f64,
    p: SchattenIndex,
    x: &ProperState,
    variant: CertificateVariant,
) -> Result<f64> {
    let g = build_gadget_channels(inst, eta)?;
    certificate_value_with(&g, p, x, variant)
}

/// [`certificate_value`] for prebuilt gadgets.
pub fn certificate_value_with(g: &GadgetChannels, p: SchattenIndex, x: &ProperState, variant: CertificateVariant) -> Result<f64> {
    if x.signs.len() != g.d {
        return Err(Error::Dimension(format!("proper state has {} entries, instance has d = {}", x.signs.len(), g.d)));
    }
    let tau = x.doubled();
    let inputs = [tau.clone(), tau.clone(), tau.clone(), tau];
    match variant {
        CertificateVariant::OneToP => {
            let f: Vec<LinearMapRep> = g.factors().iter().map(|m| (*m).clone()).collect();
            product_value(&f, &inputs, p)
        }
        CertificateVariant::OneToOne => product_value(&g.centered(), &inputs, SchattenIndex::ONE),
    }
}

/// Returns a satisfying proper state, or `None` when the instance is unsatisfiable.
///
/// Only sign vectors with `x₁ = +1` are enumerated since `x` and `−x` satisfy the same
/// clauses.
pub fn exhaustive_sat(inst: &TwoOutOfFourInstance) -> Result<Option<ProperState>> {
    let d = inst.d();
    if d > MAX_EXHAUSTIVE_D {
        return Err(Error::Resource(format!("exhaustive search is limited to d <= {MAX_EXHAUSTIVE_D}, got {d}")));
    }
    for bits in 0u64..(1u64 << (d - 1)) {
        let x = sign_vector(d, bits);
        if (0..inst.m()).all(|k| inst.clause_satisfied(k, &x)) {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

fn sign_vector(d: usize, bits: u64) -> ProperState {
    let mut signs = vec![1i8; d];
    for (i, s) in signs.iter_mut().enumerate().skip(1) {
        if bits >> (i - 1) & 1 == 1 {
            *s = -1;
        }
    }
    ProperState { signs }
}

/// `Tr[H(ψ̃ ⊗ ψ̃)] = (1/m)Σ_k ⟨A_k|ψ̃⟩⁴`, evaluated exactly from the clause sums.
pub fn energy(inst: &TwoOutOfFourInstance, x: &ProperState) -> f64 {
    let d = inst.d() as f64;
    let total: f64 = (0..inst.m())
        .map(|k| {
            let ov = inst.clause_overlap_sum(k, x) as f64 / (2.0 * d.sqrt());
            ov.powi(4)
        })
        .sum();
    total / inst.m() as f64
}

/// Lower bound `1/(2md²)` on `½Tr[H(ψ̃ ⊗ ψ̃)]` for proper states violating some clause.
pub fn integrality_margin(inst: &TwoOutOfFourInstance) -> f64 {
    let d = inst.d() as f64;
    1.0 / (2.0 * inst.m() as f64 * d * d)
}

/// Outcome of [`gap_certify`].
#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub d: usize,
    pub m: usize,
    pub eta: f64,
    pub p: SchattenIndex,
    pub variant: CertificateVariant,
    pub satisfiable: bool,
    pub witness: Option<String>,
    /// `f(η, d, p)`, or the trace-norm bound for the centered variant.
    pub gadget_bound: f64,
    /// Largest value over all `2^d` proper certificates.
    pub max_certificate_value: f64,
    /// `r_min = 1/(2md²)`.
    pub margin: f64,
    /// Guaranteed relative gap `δ_gap` for unsatisfiable instances (0 when satisfiable).
    pub delta_gap: f64,
    /// For SAT: the witness attains the bound. For UNSAT: every certificate is at most
    /// `bound·(1 − δ_gap)` with `δ_gap > 0`.
    pub verified: bool,
    pub scope: String,
}

/// `1 − ‖(r, 1 − r)‖_p`, the relative loss of the `Φ_H` factor at energy `2r`.
pub fn gap_from_margin(r: f64, p: SchattenIndex) -> f64 {
    1.0 - linalg::vector_p_norm(&[r, 1.0 - r], p)
}

/// Decides the instance by enumeration and checks the certificate values against the bound.
///
/// `p = 1` uses the centered trace-norm variant, where the `1→p` variant has no gap.
pub fn gap_certify(inst: &TwoOutOfFourInstance, eta: f64, p: SchattenIndex) -> Result<GapReport> {
    let g = build_gadget_channels(inst, eta)?;
    let d = inst.d();
    let variant = if p.value() == 1.0 { CertificateVariant::OneToOne } else { CertificateVariant::OneToP };
    let bound = match variant {
        CertificateVariant::OneToP => gadget_bound(eta, d, p),
        CertificateVariant::OneToOne => gadget_bound_one_to_one(eta, d),
    };
    let witness = exhaustive_sat(inst)?;
    let margin = integrality_margin(inst);
    let mut best = f64::NEG_INFINITY;
    for bits in 0u64..(1u64 << (d - 1)) {
        let x = sign_vector(d, bits);
        best = best.max(certificate_value_with(&g, p, &x, variant)?);
    }
    let (delta_gap, verified) = match &witness {
        Some(x) => {
            let v = certificate_value_with(&g, p, x, variant)?;
            (0.0, (v - bound).abs() <= 1e-9 * bound.max(1.0))
        }
        None => {
            let delta = match variant {
                CertificateVariant::OneToP => gap_from_margin(margin, p),
                CertificateVariant::OneToOne => margin,
            };
            (delta, delta > 0.0 && best <= bound * (1.0 - delta) * (1.0 + 1e-12))
        }
    };
    Ok(GapReport {
        d,
        m: inst.m(),
        eta,
        p,
        variant,
        satisfiable: witness.is_some(),
        witness: witness.map(|x| x.to_string()),
        gadget_bound: bound,
        max_certificate_value: best,
        margin,
        delta_gap,
        verified,
        scope: "proper-certificate inputs (psi x psi)^(x4) only; the full norm over the d^8-dimensional input \
                space is not evaluated"
            .into(),
    })
}

/// Two-copy symmetrizer `ρ ↦ (ρ + FρF)/2` on `C^k ⊗ C^k`, with Kraus operators `I/√2`, `F/√2`.
pub fn symmetrizer(k: usize) -> LinearMapRep {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut flip = CMatrix::zeros(k * k, k * k);
    for i in 0..k {
        for j in 0..k {
            flip[(i * k + j, j * k + i)] = c(s);
        }
    }
    LinearMapRep::kraus(vec![CMatrix::identity(k * k, k * k) * c(s), flip]).expect("square operators")
}

//! Acceptance criteria as runnable checks, shared by the `acceptance` test target and the
//! `selftest` command.
//!
//! Every check compares a solver against an independent reference: closed forms, the
//! brute-force oracles of [`crate::oracle`], or finite differences.

use std::f64::consts::SQRT_2;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::boyd::{boyd_iterate, BoydOptions};
use crate::cb::{cb_norm_1p, cb_norm_22, cb_objective, subgradient_cb};
use crate::channel::LinearMapRep;
use crate::dispatch::{dispatch, Method, Mode, SolveRequest};
use crate::ellipsoid::{qp_objective, subgradient_qp};
use crate::linalg::{c, hilbert_metric, CMatrix, PsdOperator, SchattenIndex};
use crate::oracle::{brute_norm_qp, brute_norm_qp_inputs, classical_mixed_norm, diamond_lower_bound, BruteOptions};
use crate::random::*;
use crate::sat::{
    certificate_value, gadget_bound, gadget_bound_one_to_one, gap_certify, CertificateVariant, ProperState,
    TwoOutOfFourInstance,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    /// Reduced sample counts; finishes in well under a minute.
    Quick,
    /// The sample counts of the acceptance criteria.
    Full,
}

impl Level {
    fn pick(self, quick: usize, full: usize) -> usize {
        match self {
            Level::Quick => quick,
            Level::Full => full,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
    pub seconds: f64,
}

impl CriterionReport {
    /// One line: `criterion N [PASS|FAIL] title (k checks, t s)`.
    pub fn line(&self) -> String {
        format!(
            "criterion {} [{}] {} ({} checks, {:.2} s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.checks,
            self.seconds
        )
    }
}

pub const TITLES: [&str; 9] = [
    "closed-form norms of identity and depolarizing channels",
    "classical embedding equals classical mixed norm",
    "power-iteration bracket soundness",
    "smoothing sandwich",
    "Hilbert-metric contraction of matrix powers",
    "subgradients agree with finite differences",
    "completely bounded norms",
    "SAT gadget certificates and gap",
    "Holder duality",
];

/// Failure messages kept per criterion.
const MAX_LISTED: usize = 8;

struct Checks {
    count: usize,
    failed: usize,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks { count: 0, failed: 0, failures: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.count += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < MAX_LISTED {
                self.failures.push(msg());
            }
        }
    }

    fn error(&mut self, what: &str, e: crate::Error) {
        self.check(false, || format!("{what}: {e}"));
    }

    fn note(&mut self, msg: impl Into<String>) {
        self.notes.push(msg.into());
    }
}

fn idx(v: f64) -> SchattenIndex {
    SchattenIndex::new(v).expect("valid index")
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn oracle_opts(level: Level, seed: u64) -> BruteOptions {
    BruteOptions { restarts: level.pick(12, 64), steps: level.pick(300, 500), seed }
}

fn criterion_1(level: Level, _seed: u64, ck: &mut Checks) {
    let pairs = [(f64::INFINITY, 1.0), (2.0, 1.0), (f64::INFINITY, 2.0), (4.0, 2.0), (2.0, 2.0)];
    let dims: &[usize] = match level {
        Level::Quick => &[2, 3],
        Level::Full => &[2, 3, 4],
    };
    let mut slowest = 0.0_f64;
    for &d in dims {
        for (name, map) in [("identity", LinearMapRep::identity(d)), ("depolarizing", LinearMapRep::depolarizing(d))] {
            for &(q, p) in &pairs {
                let (q, p) = (idx(q), idx(p));
                let expected = (d as f64).powf(p.reciprocal() - q.reciprocal());
                for method in [Method::Boyd, Method::Ellipsoid] {
                    let mut req = SolveRequest::new(q, p, Mode::Norm);
                    req.method = method;
                    let t0 = Instant::now();
                    match dispatch(&map, &req) {
                        Ok(s) => {
                            let secs = t0.elapsed().as_secs_f64();
                            slowest = slowest.max(secs);
                            let r = &s.result;
                            ck.check(
                                rel_err(r.value_lo, expected) <= 1e-3 && r.contains(expected, 1e-9),
                                || format!("{name} d={d} ({q},{p}) {method:?}: [{}, {}] vs {expected}", r.value_lo, r.value_hi),
                            );
                            ck.check(secs < 5.0, || format!("{name} d={d} ({q},{p}) {method:?}: {secs:.2} s"));
                        }
                        Err(e) => ck.error(&format!("{name} d={d} ({q},{p}) {method:?}"), e),
                    }
                }
            }
        }
    }
    ck.note(format!("slowest single solve {slowest:.2} s"));
}

fn criterion_2(level: Level, seed: u64, ck: &mut Checks) {
    let mut rng = rng_from_seed(seed ^ 0x02);
    let per_size = level.pick(4, 20);
    for size in [3, 4] {
        for k in 0..per_size {
            let a = random_nonneg_matrix(size, size, &mut rng);
            let map = match LinearMapRep::classical_embedding(&a) {
                Ok(m) => m,
                Err(e) => return ck.error("embedding", e),
            };
            for (q, p) in [(SchattenIndex::INFINITY, SchattenIndex::ONE), (idx(3.0), idx(2.0))] {
                let classical = classical_mixed_norm(&a, q, p);
                let quantum = dispatch(&map, &SolveRequest::new(q, p, Mode::Norm));
                match (classical, quantum) {
                    (Ok(cl), Ok(s)) => {
                        let r = &s.result;
                        ck.check(cl.exact, || format!("{size}x{size} #{k} ({q},{p}): classical value is only an estimate"));
                        ck.check(rel_err(r.value_lo, cl.value) <= 1e-3 && r.contains(cl.value, 1e-3), || {
                            format!("{size}x{size} #{k} ({q},{p}): quantum [{}, {}] vs classical {}", r.value_lo, r.value_hi, cl.value)
                        });
                    }
                    (Err(e), _) | (_, Err(e)) => ck.error(&format!("{size}x{size} #{k} ({q},{p})"), e),
                }
            }
        }
    }
}

fn criterion_3(level: Level, seed: u64, ck: &mut Checks) {
    let mut rng = rng_from_seed(seed ^ 0x03);
    let count = level.pick(10, 50);
    let pairs = [(4.0, 2.0), (3.0, 1.5), (2.0, 1.0)];
    let tol = 1e-12;
    for k in 0..count {
        let d = 2 + k % 2;
        let map = random_positivity_improving_map(d, 0.1, &mut rng);
        let (q, p) = pairs[k % pairs.len()];
        let (q, p) = (idx(q), idx(p));
        let run = match boyd_iterate(&map, q, p, &BoydOptions { rel_tol: 1e-12, ..Default::default() }, false) {
            Ok(r) => r,
            Err(e) => return ck.error(&format!("map #{k}"), e),
        };
        let oracle = match brute_norm_qp(&map, q, p, &oracle_opts(level, seed.wrapping_add(k as u64))) {
            Ok(b) => b.value,
            Err(e) => return ck.error(&format!("oracle #{k}"), e),
        };
        for (j, w) in run.history.windows(2).enumerate() {
            ck.check(w[1].m() >= w[0].m() * (1.0 - tol), || format!("map #{k} d={d}: m decreased at step {}", j + 1));
            ck.check(w[1].big_m() <= w[0].big_m() * (1.0 + tol), || format!("map #{k} d={d}: M increased at step {}", j + 1));
        }
        for (j, b) in run.history.iter().enumerate() {
            let (lo, hi) = (b.value_lo(p), b.value_hi(p));
            ck.check(oracle >= lo - 1e-6 && oracle <= hi + 1e-6, || {
                format!("map #{k} d={d} ({q},{p}) step {j}: oracle {oracle} outside [{lo}, {hi}]")
            });
        }
    }
}

fn criterion_4(level: Level, seed: u64, ck: &mut Checks) {
    let mut rng = rng_from_seed(seed ^ 0x04);
    let count = level.pick(5, 20);
    let d = 2;
    let pairs = [(2.0, 1.0), (4.0, 2.0), (f64::INFINITY, 1.0)];
    for k in 0..count {
        let map = random_unital_channel(d, 3, &mut rng);
        let (q, p) = pairs[k % pairs.len()];
        let (q, p) = (idx(q), idx(p));
        let kappa = (d as f64).powf(1.0 - q.reciprocal());
        let opts = oracle_opts(level, seed.wrapping_add(k as u64));
        let base = match brute_norm_qp(&map, q, p, &opts) {
            Ok(b) => b.value,
            Err(e) => return ck.error(&format!("map #{k}"), e),
        };
        for delta in [1e-2, 1e-3] {
            let smoothed = map.smooth(delta).and_then(|s| brute_norm_qp(&s, q, p, &opts));
            match smoothed {
                Ok(s) => {
                    let (lo, hi) = (s.value / (1.0 - delta + delta * kappa), s.value / (1.0 - delta - delta * kappa));
                    ck.check(lo <= base + 1e-6 && base <= hi + 1e-6, || {
                        format!("map #{k} ({q},{p}) delta={delta}: {base} outside [{lo}, {hi}]")
                    });
                }
                Err(e) => ck.error(&format!("map #{k} delta={delta}"), e),
            }
        }
    }
}

/// The normalized Hadamard.
fn hadamard() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(1.0), c(-1.0)]) * c(1.0 / SQRT_2)
}

/// `‖A^{-1/2} B A^{-1/2}‖_∞` for the pair `A = diag(1, 2)`, `B = HAH`.
pub fn hadamard_pair() -> (PsdOperator, PsdOperator) {
    let a = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(2.0)]));
    let h = hadamard();
    let b = &h * &a * &h;
    (PsdOperator::new(&a).expect("psd"), PsdOperator::new(&b).expect("psd"))
}

pub fn hadamard_pair_ratio() -> f64 {
    let (a, b) = hadamard_pair();
    let ai = a.inverse_power(0.5).expect("invertible").matrix();
    crate::linalg::spectral_norm(&(&ai * b.matrix() * &ai))
}

fn criterion_5(level: Level, seed: u64, ck: &mut Checks) {
    let mut rng = rng_from_seed(seed ^ 0x05);
    let count = level.pick(100, 500);
    for k in 0..count {
        let d = 2 + k % 3;
        let a = random_full_rank_state(d, 0.05, &mut rng);
        let b = random_full_rank_state(d, 0.05, &mut rng);
        let dh = hilbert_metric(&a, &b);
        for r in [0.25, 0.5, 0.9] {
            match (a.power(r), b.power(r)) {
                (Ok(ar), Ok(br)) => {
                    let dr = hilbert_metric(&ar, &br);
                    ck.check(dr <= r * dh + 1e-9, || format!("pair #{k} d={d} r={r}: {dr} > {}", r * dh));
                }
                (Err(e), _) | (_, Err(e)) => ck.error(&format!("pair #{k}"), e),
            }
        }
    }
    // The stated closed form for the Hadamard pair.
    let stated = (15.0 + 97f64.sqrt()) / 16.0;
    let got = hadamard_pair_ratio();
    ck.note(format!("Hadamard pair ratio {got:.12}, exact (9+sqrt 17)/8 = {:.12}", (9.0 + 17f64.sqrt()) / 8.0));
    ck.check((got - stated).abs() <= 1e-10, || {
        format!("Hadamard pair: ||A^-1/2 B A^-1/2|| = {got:.12}, stated closed form 2^-4(15+sqrt 97) = {stated:.12}")
    });
    let (a, b) = hadamard_pair();
    let dh = hilbert_metric(&a, &b);
    for r in [1.5, 2.0] {
        let dr = hilbert_metric(&a.power(r).expect("power"), &b.power(r).expect("power"));
        ck.check(dr > r * dh, || format!("Hadamard pair r={r}: no expansion ({dr} <= {})", r * dh));
    }
}

fn hs_re(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

fn unit_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let h = random_hermitian(d, rng);
    let n = h.norm();
    h * c(1.0 / n)
}

fn criterion_6(level: Level, seed: u64, ck: &mut Checks) {
    let mut rng = rng_from_seed(seed ^ 0x06);
    let per_dim = level.pick(10, 50);
    let t = 1e-6;
    let qp = [(2.0, 1.5), (3.0, 2.0), (1.5, 3.0), (4.0, 1.0)];
    let cb_p = [1.0, 1.5, 2.0, 3.0];
    let mut worst = (0.0_f64, 0.0_f64);
    for d in [2usize, 3] {
        for k in 0..per_dim {
            let map = random_cp_map(d, d, 2, &mut rng);
            let x = random_full_rank_state(d, 0.05, &mut rng);
            let dir = unit_hermitian(d, &mut rng);
            let (q, p) = qp[k % qp.len()];
            let (q, p) = (idx(q), idx(p));
            let f = |s: f64| qp_objective(&map, &(x.matrix() + &dir * c(s)), q, p);
            match (f(t), f(-t), subgradient_qp(&map, &x, q, p)) {
                (Ok(fp), Ok(fm), Ok(g)) => {
                    let fd = (fp - fm) / (2.0 * t);
                    let an = hs_re(&g, &dir);
                    worst.0 = worst.0.max((fd - an).abs());
                    ck.check((fd - an).abs() <= 1e-5, || format!("q->p d={d} #{k} ({q},{p}): FD {fd} vs gradient {an}"));
                }
                (Err(e), ..) | (_, Err(e), _) | (.., Err(e)) => ck.error(&format!("q->p d={d} #{k}"), e),
            }

            let other = random_cp_map(d, d, 2, &mut rng);
            let psi = match LinearMapRep::difference(&map, &other) {
                Ok(m) => m,
                Err(e) => return ck.error("difference", e),
            };
            let j = match psi.choi() {
                Ok(j) => j,
                Err(e) => return ck.error("choi", e),
            };
            let a = random_full_rank_state(d, 0.05, &mut rng);
            let b = random_full_rank_state(d, 0.05, &mut rng);
            let (da, db) = (unit_hermitian(d, &mut rng), unit_hermitian(d, &mut rng));
            let p = idx(cb_p[k % cb_p.len()]);
            let f = |s: f64| cb_objective(&j, (d, d), &(a.matrix() + &da * c(s)), &(b.matrix() + &db * c(s)), p);
            match (f(t), f(-t), subgradient_cb(&j, (d, d), &a, &b, p)) {
                (Ok(fp), Ok(fm), Ok((ga, gb))) => {
                    let fd = (fp - fm) / (2.0 * t);
                    let an = hs_re(&ga, &da) + hs_re(&gb, &db);
                    worst.1 = worst.1.max((fd - an).abs());
                    ck.check((fd - an).abs() <= 1e-5, || format!("cb d={d} #{k} p={p}: FD {fd} vs gradient {an}"));
                }
                (Err(e), ..) | (_, Err(e), _) | (.., Err(e)) => ck.error(&format!("cb d={d} #{k}"), e),
            }
        }
    }
    ck.note(format!("largest deviation: q->p {:.2e}, cb {:.2e}", worst.0, worst.1));
}

fn z_difference() -> LinearMapRep {
    let z = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(-1.0)]));
    LinearMapRep::difference(&LinearMapRep::identity(2), &LinearMapRep::unitary(z).expect("unitary")).expect("same dims")
}

fn criterion_7(level: Level, seed: u64, ck: &mut Checks) {
    let mut rng = rng_from_seed(seed ^ 0x07);
    let count = level.pick(5, 20);
    for k in 0..count {
        let d = 2 + k % 2;
        let ch = random_channel(d, d, 1 + k % 3, &mut rng);
        match cb_norm_1p(&ch, SchattenIndex::ONE, 1e-4, false) {
            Ok(r) => ck.check(rel_err(r.value_lo, 1.0) <= 1e-4 && r.contains(1.0, 1e-4), || {
                format!("channel #{k} d={d}: cb 1->1 [{}, {}]", r.value_lo, r.value_hi)
            }),
            Err(e) => ck.error(&format!("channel #{k}"), e),
        }
    }

    let diff = z_difference();
    let oracle = diamond_lower_bound(&diff, 2, &oracle_opts(level, seed));
    match (cb_norm_1p(&diff, SchattenIndex::ONE, 1e-4, false), oracle) {
        (Ok(r), Ok(o)) => {
            ck.check((r.value_lo - 2.0).abs() <= 1e-3 && (o - 2.0).abs() <= 1e-3, || {
                format!("id - Z.Z: solver {} oracle {o}", r.value_lo)
            });
            ck.check(o <= r.value_hi * (1.0 + 1e-9), || format!("id - Z.Z: oracle {o} above solver {}", r.value_hi));
        }
        (Err(e), _) | (_, Err(e)) => ck.error("id - Z.Z", e),
    }

    match cb_norm_1p(&LinearMapRep::identity(2), SchattenIndex::TWO, 1e-4, false) {
        Ok(r) => ck.check((r.value_lo - SQRT_2).abs() <= 1e-3, || format!("qubit identity p=2: {}", r.value_lo)),
        Err(e) => ck.error("qubit identity", e),
    }

    let opts = oracle_opts(level, seed);
    for k in 0..count {
        let d = 2 + k % 2;
        let (map, positive) = if k % 2 == 0 {
            (random_cp_map(d, d, 2, &mut rng), true)
        } else {
            let a = random_cp_map(d, d, 2, &mut rng);
            let b = random_cp_map(d, d, 1, &mut rng);
            (LinearMapRep::difference(&a, &b).expect("same dims"), false)
        };
        match (cb_norm_22(&map), brute_norm_qp_inputs(&map, SchattenIndex::TWO, SchattenIndex::TWO, &opts, positive)) {
            (Ok(r), Ok(b)) => ck.check(rel_err(b.value, r.value_lo) <= 1e-4, || {
                format!("map #{k} d={d}: cb 2->2 {} vs oracle {}", r.value_lo, b.value)
            }),
            (Err(e), _) | (_, Err(e)) => ck.error(&format!("2->2 map #{k}"), e),
        }
    }
}

fn criterion_8(_level: Level, _seed: u64, ck: &mut Checks) {
    let sat = TwoOutOfFourInstance::from_signed(4, &[([1, 2, 3, 4], "++++")]).expect("valid instance");
    let x = ProperState::parse("++--").expect("valid state");
    for p in [idx(1.5), idx(2.0), idx(3.0), SchattenIndex::INFINITY] {
        match certificate_value(&sat, 16.0, p, &x, CertificateVariant::OneToP) {
            Ok(v) => ck.check((v - 1.0).abs() <= 1e-9, || format!("eta=16 p={p}: {v:.12}")),
            Err(e) => ck.error("certificate", e),
        }
        for eta in [0.5, 1.0] {
            match certificate_value(&sat, eta, p, &x, CertificateVariant::OneToP) {
                Ok(v) => {
                    let f = gadget_bound(eta, 4, p);
                    ck.check((v - f).abs() <= 1e-9, || format!("eta={eta} p={p}: {v:.12} vs f = {f:.12}"))
                }
                Err(e) => ck.error("certificate", e),
            }
        }
    }
    for eta in [0.5, 1.0, 16.0] {
        match certificate_value(&sat, eta, SchattenIndex::ONE, &x, CertificateVariant::OneToOne) {
            Ok(v) => {
                let expected = 8.0 * (2.0 - 2.0 / 4.0) * eta / 16.0;
                ck.check((v - expected).abs() <= 1e-9 && (gadget_bound_one_to_one(eta, 4) - expected).abs() <= 1e-12, || {
                    format!("one_to_one eta={eta}: {v:.12} vs {expected:.12}")
                });
            }
            Err(e) => ck.error("one_to_one", e),
        }
    }
    let unsat = TwoOutOfFourInstance::from_signed(4, &[([1, 2, 3, 4], "++++"), ([1, 2, 3, 4], "+++-")]).expect("valid");
    for (eta, p) in [(1.0, idx(2.0)), (16.0, idx(2.0)), (1.0, SchattenIndex::ONE), (4.0, SchattenIndex::INFINITY)] {
        match gap_certify(&unsat, eta, p) {
            Ok(r) => {
                ck.check(!r.satisfiable && r.verified, || format!("unsat eta={eta} p={p}: report not verified"));
                ck.check(r.delta_gap > 0.0 && r.max_certificate_value <= r.gadget_bound * (1.0 - r.delta_gap) + 1e-12, || {
                    format!(
                        "unsat eta={eta} p={p}: max {} vs bound {} with gap {}",
                        r.max_certificate_value, r.gadget_bound, r.delta_gap
                    )
                });
            }
            Err(e) => ck.error("gap_certify", e),
        }
    }
    match gap_certify(&sat, 16.0, idx(2.0)) {
        Ok(r) => ck.check(r.satisfiable && (r.max_certificate_value - 1.0).abs() <= 1e-9, || {
            format!("sat eta=16: max certificate {}", r.max_certificate_value)
        }),
        Err(e) => ck.error("gap_certify sat", e),
    }
}

fn criterion_9(level: Level, seed: u64, ck: &mut Checks) {
    let mut rng = rng_from_seed(seed ^ 0x09);
    let count = level.pick(6, 20);
    let pairs = [(4.0, 2.0), (2.0, 1.0), (3.0, 1.5), (3.0, 2.0)];
    for k in 0..count {
        let map = random_cp_map(2, 2, 1 + k % 3, &mut rng);
        let (q, p) = pairs[k % pairs.len()];
        let (q, p) = (idx(q), idx(p));
        let (dual, qd, pd) = map.holder_dual_problem(q, p);
        let mut req = SolveRequest::new(q, p, Mode::Norm);
        req.eps = 1e-4;
        let mut dreq = SolveRequest::new(qd, pd, Mode::Norm);
        dreq.eps = 1e-4;
        match (dispatch(&map, &req), dispatch(&dual, &dreq)) {
            (Ok(a), Ok(b)) => {
                let (a, b) = (a.result, b.result);
                ck.check(a.value_lo <= b.value_hi * (1.0 + 1e-9) && b.value_lo <= a.value_hi * (1.0 + 1e-9), || {
                    format!("map #{k} ({q},{p}) vs ({qd},{pd}): [{}, {}] and [{}, {}]", a.value_lo, a.value_hi, b.value_lo, b.value_hi)
                });
            }
            (Err(e), _) | (_, Err(e)) => ck.error(&format!("map #{k} ({q},{p})"), e),
        }
    }
}

/// Runs criterion `id` (1 to 9).
pub fn run_criterion(id: usize, level: Level, seed: u64) -> CriterionReport {
    assert!((1..=9).contains(&id), "criteria are numbered 1 to 9");
    let mut ck = Checks::new();
    let t0 = Instant::now();
    let f: fn(Level, u64, &mut Checks) = match id {
        1 => criterion_1,
        2 => criterion_2,
        3 => criterion_3,
        4 => criterion_4,
        5 => criterion_5,
        6 => criterion_6,
        7 => criterion_7,
        8 => criterion_8,
        _ => criterion_9,
    };
    f(level, seed, &mut ck);
    if ck.failed > ck.failures.len() {
        ck.failures.push(format!("... {} more", ck.failed - ck.failures.len()));
    }
    CriterionReport {
        id,
        title: TITLES[id - 1],
        passed: ck.failed == 0 && ck.count > 0,
        checks: ck.count,
        failures: ck.failures,
        notes: ck.notes,
        seconds: t0.elapsed().as_secs_f64(),
    }
}

pub fn run_all(level: Level, seed: u64) -> Vec<CriterionReport> {
    (1..=9).map(|id| run_criterion(id, level, seed)).collect()
}

//! Dense complex linear algebra shared by every solver.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Hermitian inputs are validated against a
//! relative tolerance and symmetrized; positive semidefinite operators carry their
//! spectral decomposition so that fractional powers are cheap to take repeatedly.
//!
//! Bipartite spaces `C^n ⊗ C^m` use the row-major index `(i, a) ↦ i·m + a`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type RMatrix = DMatrix<f64>;

/// Relative tolerance on ‖X − X*‖_∞ for accepting a matrix as Hermitian.
pub const HERMITICITY_RTOL: f64 = 1e-10;
/// Relative tolerance below which negative eigenvalues are clamped to zero.
pub const PSD_RTOL: f64 = 1e-10;
/// Relative eigenvalue threshold used to decide the support of a PSD operator.
pub const SUPPORT_RTOL: f64 = 1e-8;

#[inline]
pub fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Exponent in `[1, ∞]`. Infinity is stored as `f64::INFINITY`, which is exact.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct SchattenIndex(f64);

impl SchattenIndex {
    pub const ONE: SchattenIndex = SchattenIndex(1.0);
    pub const TWO: SchattenIndex = SchattenIndex(2.0);
    pub const INFINITY: SchattenIndex = SchattenIndex(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value < 1.0 {
            return Err(Error::Domain(format!("Schatten index must lie in [1, inf], got {value}")));
        }
        Ok(SchattenIndex(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(self) -> f64 {
        if self.is_infinite() {
            0.0
        } else {
            1.0 / self.0
        }
    }

    /// The Hölder conjugate `p′` with `1/p + 1/p′ = 1`.
    pub fn dual(self) -> Self {
        if self.is_infinite() {
            SchattenIndex::ONE
        } else if self.0 == 1.0 {
            SchattenIndex::INFINITY
        } else {
            // Snap round-off so that e.g. the dual of 4/3 is exactly 4.
            let v = self.0 / (self.0 - 1.0);
            let r = v.round();
            SchattenIndex(if (v - r).abs() <= 8.0 * f64::EPSILON * r { r } else { v })
        }
    }
}

/// Free-function form of [`SchattenIndex::dual`].
pub fn dual_index(p: SchattenIndex) -> SchattenIndex {
    p.dual()
}

impl fmt::Display for SchattenIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl FromStr for SchattenIndex {
    type Err = Error;

    /// Accepts `inf`, `infinity`, `∞`, decimals and fractions such as `4/3`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if matches!(t.to_ascii_lowercase().as_str(), "inf" | "infinity" | "∞") {
            return Ok(SchattenIndex::INFINITY);
        }
        let value = if let Some((num, den)) = t.split_once('/') {
            let num: f64 = num.trim().parse().map_err(|_| Error::Input(format!("bad index '{s}'")))?;
            let den: f64 = den.trim().parse().map_err(|_| Error::Input(format!("bad index '{s}'")))?;
            if den == 0.0 {
                return Err(Error::Input(format!("bad index '{s}': zero denominator")));
            }
            num / den
        } else {
            t.parse().map_err(|_| Error::Input(format!("bad index '{s}'")))?
        };
        SchattenIndex::new(value).map_err(|e| Error::Input(e.to_string()))
    }
}

impl Serialize for SchattenIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_f64(self.0)
        }
    }
}

pub fn ensure_finite(x: &CMatrix) -> Result<()> {
    if x.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::Input("matrix has non-finite entries".into()))
    }
}

pub fn ensure_square(x: &CMatrix) -> Result<usize> {
    if x.nrows() != x.ncols() || x.nrows() == 0 {
        return Err(Error::Input(format!("expected a non-empty square matrix, got {}x{}", x.nrows(), x.ncols())));
    }
    Ok(x.nrows())
}

/// `(X + X*)/2`.
pub fn hermitize(x: &CMatrix) -> CMatrix {
    (x + x.adjoint()) * c(0.5)
}

/// Largest singular value.
pub fn spectral_norm(x: &CMatrix) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    x.clone().svd(false, false).singular_values.max()
}

/// Validates Hermiticity within `HERMITICITY_RTOL·‖X‖_∞` and returns the symmetrized matrix.
pub fn hermitian(x: &CMatrix) -> Result<CMatrix> {
    ensure_square(x)?;
    ensure_finite(x)?;
    let scale = spectral_norm(x);
    let residual = spectral_norm(&(x - x.adjoint()));
    if residual > HERMITICITY_RTOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian(residual));
    }
    Ok(hermitize(x))
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Only the Hermitian part of `a` is used.
pub fn eigh(a: &CMatrix) -> (DVector<f64>, CMatrix) {
    let n = a.nrows();
    let eig = hermitize(a).symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = DVector::from_iterator(n, idx.iter().map(|&i| eig.eigenvalues[i]));
    let mut vecs = CMatrix::zeros(n, n);
    for (k, &i) in idx.iter().enumerate() {
        vecs.set_column(k, &eig.eigenvectors.column(i));
    }
    (vals, vecs)
}

/// `U diag(vals) U*`, re-symmetrized.
pub fn from_spectrum(vals: &DVector<f64>, vecs: &CMatrix) -> CMatrix {
    let mut scaled = vecs.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= c(vals[k]);
    }
    hermitize(&(scaled * vecs.adjoint()))
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn herm_fn(a: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = eigh(a);
    from_spectrum(&vals.map(f), &vecs)
}

pub fn min_eigenvalue(a: &CMatrix) -> f64 {
    eigh(a).0[0]
}

pub fn max_eigenvalue(a: &CMatrix) -> f64 {
    let (vals, _) = eigh(a);
    vals[vals.len() - 1]
}

fn power_sum_norm(values: impl Iterator<Item = f64> + Clone, p: SchattenIndex) -> f64 {
    let top = values.clone().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    if top == 0.0 {
        return 0.0;
    }
    if p.is_infinite() {
        return top;
    }
    let pv = p.value();
    let sum: f64 = values.map(|v| (v.abs() / top).powf(pv)).sum();
    top * sum.powf(1.0 / pv)
}

/// `(Σ|v_i|^p)^{1/p}` for a list of reals, computed with max-scaling.
pub fn vector_p_norm(v: &[f64], p: SchattenIndex) -> f64 {
    power_sum_norm(v.iter().copied(), p)
}

/// Schatten norm `Tr[|X|^p]^{1/p}` through the singular values.
pub fn schatten_norm(x: &CMatrix, p: SchattenIndex) -> Result<f64> {
    ensure_finite(x)?;
    if x.is_empty() {
        return Ok(0.0);
    }
    let sv = x.clone().svd(false, false).singular_values;
    Ok(power_sum_norm(sv.iter().copied(), p))
}

/// Schatten norm of a Hermitian matrix through its eigenvalues.
pub fn schatten_norm_hermitian(x: &CMatrix, p: SchattenIndex) -> f64 {
    let (vals, _) = eigh(x);
    power_sum_norm(vals.iter().copied(), p)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

fn check_bipartite(x: &CMatrix, n: usize, m: usize) -> Result<()> {
    if x.nrows() != n * m || x.ncols() != n * m {
        return Err(Error::Dimension(format!(
            "operator is {}x{} but the split {n}x{m} needs {}",
            x.nrows(),
            x.ncols(),
            n * m
        )));
    }
    Ok(())
}

/// Transposes the first tensor factor of an operator on `C^n ⊗ C^m`.
pub fn partial_transpose(x: &CMatrix, dims: (usize, usize)) -> Result<CMatrix> {
    let (n, m) = dims;
    check_bipartite(x, n, m)?;
    Ok(CMatrix::from_fn(n * m, n * m, |r, s| {
        let (i, a) = (r / m, r % m);
        let (j, b) = (s / m, s % m);
        x[(j * m + a, i * m + b)]
    }))
}

/// Reshuffles an operator on `C^n ⊗ C^m` into the `m² × n²` matrix
/// `R[(a,b),(i,j)] = X[(i,a),(j,b)]`.
///
/// For a Choi matrix this is the matrix of the map acting on row-major vectorizations.
pub fn realign(x: &CMatrix, dims: (usize, usize)) -> Result<CMatrix> {
    let (n, m) = dims;
    check_bipartite(x, n, m)?;
    Ok(CMatrix::from_fn(m * m, n * n, |r, s| {
        let (a, b) = (r / m, r % m);
        let (i, j) = (s / n, s % n);
        x[(i * m + a, j * m + b)]
    }))
}

/// `Tr_1` on `C^n ⊗ C^m`, returning an `m × m` matrix.
pub fn partial_trace_first(x: &CMatrix, dims: (usize, usize)) -> Result<CMatrix> {
    let (n, m) = dims;
    check_bipartite(x, n, m)?;
    Ok(CMatrix::from_fn(m, m, |a, b| (0..n).map(|i| x[(i * m + a, i * m + b)]).sum()))
}

/// `Tr_2` on `C^n ⊗ C^m`, returning an `n × n` matrix.
pub fn partial_trace_second(x: &CMatrix, dims: (usize, usize)) -> Result<CMatrix> {
    let (n, m) = dims;
    check_bipartite(x, n, m)?;
    Ok(CMatrix::from_fn(n, n, |i, j| (0..m).map(|a| x[(i * m + a, j * m + a)]).sum()))
}

/// Complex-to-real embedding `(1/√2)[[Re X, −Im X], [Im X, Re X]]`.
///
/// It satisfies `Tr[X̂ᵀŶ] = Re Tr[X*Y]`.
pub fn real_embedding(x: &CMatrix) -> Result<RMatrix> {
    let d = ensure_square(x)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Ok(RMatrix::from_fn(2 * d, 2 * d, |r, col| {
        let z = x[(r % d, col % d)];
        match (r < d, col < d) {
            (true, true) | (false, false) => s * z.re,
            (true, false) => -s * z.im,
            (false, true) => s * z.im,
        }
    }))
}

/// Positive semidefinite operator together with its spectral decomposition.
///
/// Eigenvalues in `[−PSD_RTOL·‖A‖_∞, 0)` are clamped to zero; anything more negative is
/// rejected.
#[derive(Clone, Debug)]
pub struct PsdOperator {
    vals: DVector<f64>,
    vecs: CMatrix,
}

impl PsdOperator {
    pub fn new(a: &CMatrix) -> Result<Self> {
        let h = hermitian(a)?;
        let (vals, vecs) = eigh(&h);
        Self::from_eig(vals, vecs)
    }

    /// Builds from an eigendecomposition, clamping small negative eigenvalues.
    pub fn from_eig(vals: DVector<f64>, vecs: CMatrix) -> Result<Self> {
        let scale = vals.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let tol = PSD_RTOL * scale;
        if let Some(bad) = vals.iter().copied().find(|&v| v < -tol) {
            return Err(Error::NotPsd(bad));
        }
        Ok(PsdOperator { vals: vals.map(|v| v.max(0.0)), vecs })
    }

    /// Clamps every negative eigenvalue, regardless of size.
    pub fn project(a: &CMatrix) -> Self {
        let (vals, vecs) = eigh(a);
        PsdOperator { vals: vals.map(|v| v.max(0.0)), vecs }
    }

    pub fn identity(d: usize) -> Self {
        PsdOperator { vals: DVector::from_element(d, 1.0), vecs: CMatrix::identity(d, d) }
    }

    /// `I/d`.
    pub fn maximally_mixed(d: usize) -> Self {
        PsdOperator { vals: DVector::from_element(d, 1.0 / d as f64), vecs: CMatrix::identity(d, d) }
    }

    pub fn dim(&self) -> usize {
        self.vals.len()
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.vals
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.vecs
    }

    pub fn matrix(&self) -> CMatrix {
        from_spectrum(&self.vals, &self.vecs)
    }

    pub fn trace(&self) -> f64 {
        self.vals.sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.vals.min()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.vals.max()
    }

    pub fn schatten_norm(&self, p: SchattenIndex) -> f64 {
        power_sum_norm(self.vals.iter().copied(), p)
    }

    /// Applies `f` to the spectrum. `f` must map `[0, ∞)` into `[0, ∞)`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> PsdOperator {
        PsdOperator { vals: self.vals.map(|v| f(v).max(0.0)), vecs: self.vecs.clone() }
    }

    pub fn scaled(&self, s: f64) -> PsdOperator {
        self.map_spectrum(|v| s * v)
    }

    /// Eigenvalue threshold below which an eigenvalue counts as zero.
    pub fn support_threshold(&self, rtol: f64) -> f64 {
        rtol * self.max_eigenvalue()
    }

    pub fn rank(&self, rtol: f64) -> usize {
        let thr = self.support_threshold(rtol);
        self.vals.iter().filter(|&&v| v > thr).count()
    }

    /// Projector onto the eigenvectors whose eigenvalue exceeds `rtol·λ_max`.
    pub fn support_projection(&self, rtol: f64) -> PsdOperator {
        let thr = self.support_threshold(rtol);
        self.map_spectrum(|v| if v > thr { 1.0 } else { 0.0 })
    }

    /// Spectral power `A^r` for `r ≥ 0`, with `0^0 := 0` so `r = 0` gives the support projection.
    pub fn power(&self, r: f64) -> Result<PsdOperator> {
        if r.is_nan() || r < 0.0 {
            return Err(Error::Domain(format!("matrix_power_psd needs r >= 0, got {r}")));
        }
        if r == 0.0 {
            return Ok(self.support_projection(PSD_RTOL));
        }
        Ok(self.map_spectrum(|v| v.powf(r)))
    }

    /// Moore–Penrose power `A^{-r}` on the support (eigenvalues above `rtol·λ_max`), zero elsewhere.
    pub fn pinv_power(&self, r: f64, rtol: f64) -> PsdOperator {
        let thr = self.support_threshold(rtol);
        self.map_spectrum(|v| if v > thr { v.powf(-r) } else { 0.0 })
    }

    /// `A^{-r}` for strictly positive `A`.
    pub fn inverse_power(&self, r: f64) -> Result<PsdOperator> {
        let lmin = self.min_eigenvalue();
        if lmin <= 0.0 {
            return Err(Error::Singular(format!("inverse power of a singular operator (lambda_min = {lmin:e})")));
        }
        Ok(self.map_spectrum(|v| v.powf(-r)))
    }
}

/// Free-function form of [`PsdOperator::power`].
pub fn matrix_power_psd(a: &PsdOperator, r: f64) -> Result<PsdOperator> {
    a.power(r)
}

/// Projective Hilbert metric `log‖A^{-1/2}BA^{-1/2}‖_∞ + log‖B^{-1/2}AB^{-1/2}‖_∞`.
///
/// Pseudo-inverses are taken on the support. Returns `+∞` when the supports differ.
pub fn hilbert_metric(a: &PsdOperator, b: &PsdOperator) -> f64 {
    let (ra, rb) = (a.rank(SUPPORT_RTOL), b.rank(SUPPORT_RTOL));
    if ra != rb {
        return f64::INFINITY;
    }
    if ra == 0 {
        return 0.0;
    }
    let pa = a.support_projection(SUPPORT_RTOL).matrix();
    let pb = b.support_projection(SUPPORT_RTOL).matrix();
    if spectral_norm(&(pa - pb)) > 1e-6 {
        return f64::INFINITY;
    }
    let ai = a.pinv_power(0.5, SUPPORT_RTOL).matrix();
    let bi = b.pinv_power(0.5, SUPPORT_RTOL).matrix();
    let t1 = max_eigenvalue(&(&ai * b.matrix() * &ai));
    let t2 = max_eigenvalue(&(&bi * a.matrix() * &bi));
    t1.ln() + t2.ln()
}

/// Hilbert–Schmidt inner product `Re Tr[X* Y]`.
pub fn hs_inner(x: &CMatrix, y: &CMatrix) -> f64 {
    x.iter().zip(y.iter()).map(|(a, b)| (a.conj() * b).re).sum()
}

/// `Tr[X Y]`.
pub fn trace_product(x: &CMatrix, y: &CMatrix) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..x.nrows() {
        for k in 0..x.ncols() {
            acc += x[(i, k)] * y[(k, i)];
        }
    }
    acc
}

/// Matrix unit `|i⟩⟨j|` in dimension `d`.
pub fn matrix_unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut e = CMatrix::zeros(d, d);
    e[(i, j)] = c(1.0);
    e
}

/// Divided difference `(a^s − b^s)/(a − b)`, stable for nearby arguments.
///
/// Coincident arguments (`|a − b| ≤ 1e-12·scale`) use the derivative `s·a^{s−1}`.
pub fn power_divided_difference(a: f64, b: f64, s: f64, scale: f64) -> f64 {
    if (a - b).abs() <= 1e-12 * scale {
        let m = 0.5 * (a + b);
        return s * m.powf(s - 1.0);
    }
    if a > 0.0 && b > 0.0 {
        let (hi, lo) = if a > b { (a, b) } else { (b, a) };
        let l = ((hi - lo) / lo).ln_1p();
        lo.powf(s - 1.0) * (s * l).exp_m1() / l.exp_m1()
    } else {
        (a.powf(s) - b.powf(s)) / (a - b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&DVector::from_iterator(v.len(), v.iter().map(|&x| c(x))))
    }

    #[test]
    fn schatten_examples() {
        let p2 = SchattenIndex::TWO;
        assert!((schatten_norm(&diag(&[3.0, 4.0]), p2).unwrap() - 5.0).abs() < 1e-12);
        let i4 = CMatrix::identity(4, 4);
        assert!((schatten_norm(&i4, SchattenIndex::ONE).unwrap() - 4.0).abs() < 1e-12);
        assert!((schatten_norm(&i4, SchattenIndex::INFINITY).unwrap() - 1.0).abs() < 1e-12);
        let mut n = CMatrix::zeros(2, 2);
        n[(0, 1)] = c(1.0);
        assert!((schatten_norm(&n, SchattenIndex::ONE).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_is_rejected() {
        let mut x = CMatrix::identity(2, 2);
        x[(0, 1)] = c(f64::NAN);
        assert!(matches!(schatten_norm(&x, SchattenIndex::TWO), Err(Error::Input(_))));
    }

    #[test]
    fn powers() {
        let a = PsdOperator::new(&diag(&[4.0, 9.0])).unwrap();
        let r = a.power(0.5).unwrap().matrix();
        assert!((r - diag(&[2.0, 3.0])).norm() < 1e-12);
        let b = PsdOperator::new(&diag(&[5.0, 0.0])).unwrap();
        let r0 = b.power(0.0).unwrap().matrix();
        assert!((r0 - diag(&[1.0, 0.0])).norm() < 1e-12);
        assert!(matches!(a.power(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn negative_eigenvalue_rejected_small_one_clamped() {
        assert!(matches!(PsdOperator::new(&diag(&[1.0, -1e-3])), Err(Error::NotPsd(_))));
        let ok = PsdOperator::new(&diag(&[1.0, -1e-13])).unwrap();
        assert_eq!(ok.min_eigenvalue(), 0.0);
    }

    #[test]
    fn hermiticity_check() {
        let mut x = CMatrix::identity(2, 2);
        x[(0, 1)] = C64::new(0.0, 1.0);
        assert!(matches!(hermitian(&x), Err(Error::NotHermitian(_))));
        x[(1, 0)] = C64::new(0.0, -1.0 + 1e-14);
        let h = hermitian(&x).unwrap();
        assert_eq!(h[(0, 1)], h[(1, 0)].conj());
    }

    #[test]
    fn hilbert_metric_examples() {
        let a = PsdOperator::new(&diag(&[1.0, 2.0])).unwrap();
        let b = PsdOperator::new(&diag(&[2.0, 1.0])).unwrap();
        assert!((hilbert_metric(&a, &b) - 2.0 * 2f64.ln()).abs() < 1e-12);
        assert!(hilbert_metric(&a, &a.scaled(3.0)).abs() < 1e-12);
        let e = PsdOperator::new(&diag(&[1.0, 0.0])).unwrap();
        let f = PsdOperator::new(&diag(&[0.0, 1.0])).unwrap();
        assert!(hilbert_metric(&e, &f).is_infinite());
    }

    #[test]
    fn hadamard_pair_exact_value() {
        // A = diag(1,2), B = HAH with the normalized Hadamard:
        // B = [[3/2, -1/2], [-1/2, 3/2]], A^{-1/2}BA^{-1/2} = [[3/2, -1/(2√2)], [-1/(2√2), 3/4]],
        // whose top eigenvalue is (9 + √17)/8.
        let a = PsdOperator::new(&diag(&[1.0, 2.0])).unwrap();
        let h = CMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(1.0), c(-1.0)]) * c(std::f64::consts::FRAC_1_SQRT_2);
        let b = PsdOperator::new(&(&h * a.matrix() * &h)).unwrap();
        let ai = a.pinv_power(0.5, SUPPORT_RTOL).matrix();
        let top = max_eigenvalue(&(&ai * b.matrix() * &ai));
        assert!((top - (9.0 + 17f64.sqrt()) / 8.0).abs() < 1e-12);
        let dh = hilbert_metric(&a, &b);
        for r in [1.5, 2.0] {
            let dr = hilbert_metric(&a.power(r).unwrap(), &b.power(r).unwrap());
            assert!(dr > r * dh);
        }
    }

    #[test]
    fn embedding_examples() {
        let e = real_embedding(&CMatrix::identity(2, 2)).unwrap();
        assert!((e - RMatrix::identity(4, 4) * std::f64::consts::FRAC_1_SQRT_2).norm() < 1e-15);
        let y = CMatrix::from_row_slice(2, 2, &[c(0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), c(0.0)]);
        let ey = real_embedding(&y).unwrap();
        assert!(ey.view((0, 0), (2, 2)).norm() == 0.0);
        let im = ey.view((2, 0), (2, 2)).into_owned();
        assert!((&im + im.transpose()).norm() == 0.0);
    }

    #[test]
    fn dual_examples() {
        assert_eq!(SchattenIndex::ONE.dual(), SchattenIndex::INFINITY);
        assert_eq!(SchattenIndex::INFINITY.dual(), SchattenIndex::ONE);
        assert_eq!(SchattenIndex::TWO.dual(), SchattenIndex::TWO);
        let four: SchattenIndex = "4".parse().unwrap();
        let third: SchattenIndex = "4/3".parse().unwrap();
        assert!((four.dual().value() - third.value()).abs() < 1e-15);
        assert!("0.5".parse::<SchattenIndex>().is_err());
        assert!("inf".parse::<SchattenIndex>().unwrap().is_infinite());
    }

    #[test]
    fn partial_transpose_of_identity_choi_is_swap() {
        let mut omega = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                omega[(i * 2 + i, j * 2 + j)] = c(1.0);
            }
        }
        let pt = partial_transpose(&omega, (2, 2)).unwrap();
        let mut swap = CMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                swap[(i * 2 + j, j * 2 + i)] = c(1.0);
            }
        }
        assert!((pt - swap).norm() < 1e-15);
    }

    #[test]
    fn divided_difference_matches_naive_and_derivative() {
        let dd = power_divided_difference(2.0, 1.0, 0.5, 2.0);
        assert!((dd - (2f64.sqrt() - 1.0)).abs() < 1e-14);
        let near = power_divided_difference(1.0 + 1e-9, 1.0, 0.5, 1.0);
        assert!((near - 0.5).abs() < 1e-8);
        let same = power_divided_difference(4.0, 4.0, 0.5, 4.0);
        assert!((same - 0.25).abs() < 1e-15);
    }
}

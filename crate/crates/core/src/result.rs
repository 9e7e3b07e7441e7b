use serde::Serialize;

use crate::linalg::PsdOperator;

/// Optimizer reported alongside a norm value.
#[derive(Clone, Debug)]
pub enum Witness {
    /// Input `ω` (PSD) attaining the lower end of the interval.
    State(PsdOperator),
    /// Pair `(A, B)` of the two-indexed norm variational formula.
    Pair(PsdOperator, PsdOperator),
}

/// Interval `[value_lo, value_hi]` for a norm, with optimizer and solver diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct NormResult {
    pub value_lo: f64,
    pub value_hi: f64,
    #[serde(skip)]
    pub optimizer: Option<Witness>,
    pub iterations: usize,
    pub method: String,
    pub converged: bool,
    /// `true` when both ends are rigorous bounds; `false` when `value_hi` is an a-priori
    /// guarantee of the optimization method rather than a computed certificate.
    pub certified_upper: bool,
    pub diagnostics: Vec<String>,
}

impl NormResult {
    pub fn exact(value: f64, method: &str) -> Self {
        NormResult {
            value_lo: value,
            value_hi: value,
            optimizer: None,
            iterations: 0,
            method: method.to_string(),
            converged: true,
            certified_upper: true,
            diagnostics: Vec::new(),
        }
    }

    /// Midpoint of the interval.
    pub fn estimate(&self) -> f64 {
        0.5 * (self.value_lo + self.value_hi)
    }

    /// `(hi − lo)/lo`, or `0` for an exact zero.
    pub fn relative_width(&self) -> f64 {
        if self.value_lo > 0.0 {
            (self.value_hi - self.value_lo) / self.value_lo
        } else if self.value_hi == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn contains(&self, v: f64, rel_slack: f64) -> bool {
        v >= self.value_lo * (1.0 - rel_slack) && v <= self.value_hi * (1.0 + rel_slack)
    }

    pub(crate) fn scaled(mut self, s: f64) -> Self {
        self.value_lo *= s;
        self.value_hi *= s;
        self
    }

    pub(crate) fn note(mut self, msg: impl Into<String>) -> Self {
        self.diagnostics.push(msg.into());
        self
    }
}

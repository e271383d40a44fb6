//! Domain types and the one-step boundary-law recursion.
//!
//! A boundary law is stored as the scalar ratio `z = z_1 / z_0` of the
//! occupied to the free weight at a vertex; the finite-volume measures are
//! invariant under per-vertex rescaling, so `z_0 ≡ 1` loses nothing. With that
//! normalisation the recursion over the `k` children of a vertex reads
//! `z_x = Π_y (1 + λ z_y)^(-k)`, and for laws that are constant on a level
//! it collapses to the scalar map `f(z) = (1 + λ z)^(-k)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, HcError, Result};
use crate::weakperiodic::InvariantSet;

/// Tree order `k` and activity `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    k: u32,
    lambda: f64,
}

impl ModelParams {
    pub fn new(k: u32, lambda: f64) -> Result<Self> {
        if k < 1 {
            return domain(format!("tree order k must be >= 1, got {k}"));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return domain(format!(
                "activity must be positive and finite, got {lambda}"
            ));
        }
        Ok(Self { k, lambda })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Which family a boundary law belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "set")]
pub enum LawKind {
    TranslationInvariant,
    TwoPeriodic,
    WeakPeriodic(InvariantSet),
}

impl LawKind {
    fn arity(self) -> usize {
        match self {
            LawKind::TranslationInvariant => 1,
            LawKind::TwoPeriodic => 2,
            LawKind::WeakPeriodic(_) => 4,
        }
    }
}

/// Per-class field values of a boundary law.
///
/// Two-periodic laws are kept in canonical order `values[0] <= values[1]`,
/// so one value stands for both `(z1, z2)` and its mirror `(z2, z1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryLaw {
    kind: LawKind,
    values: Vec<f64>,
}

impl BoundaryLaw {
    pub fn new(kind: LawKind, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != kind.arity() {
            return domain(format!(
                "{kind:?} law needs {} values, got {}",
                kind.arity(),
                values.len()
            ));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return domain(format!("boundary-law values must be positive, got {bad}"));
        }
        if kind == LawKind::TwoPeriodic && values[0] > values[1] {
            values.swap(0, 1);
        }
        Ok(Self { kind, values })
    }

    pub fn translation_invariant(z: f64) -> Result<Self> {
        Self::new(LawKind::TranslationInvariant, vec![z])
    }

    pub fn two_periodic(z1: f64, z2: f64) -> Result<Self> {
        Self::new(LawKind::TwoPeriodic, vec![z1, z2])
    }

    pub fn kind(&self) -> LawKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of distinct Gibbs measures this law represents: an
    /// asymmetric two-periodic pair stands for two (one per root parity).
    pub fn measure_count(&self) -> usize {
        match self.kind {
            LawKind::TwoPeriodic if self.values[0] != self.values[1] => 2,
            _ => 1,
        }
    }

    /// Field values as an ordered pair; translation-invariant laws repeat `z`.
    pub fn pair(&self) -> Option<(f64, f64)> {
        match self.kind {
            LawKind::TranslationInvariant => Some((self.values[0], self.values[0])),
            LawKind::TwoPeriodic => Some((self.values[0], self.values[1])),
            LawKind::WeakPeriodic(_) => None,
        }
    }
}

/// Row-stochastic 2×2 transition matrix on the spin space `{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionMatrix2 {
    pub p00: f64,
    pub p01: f64,
    pub p10: f64,
    pub p11: f64,
}

/// Row sums may deviate from 1 by at most this much.
const ROW_SUM_SLACK: f64 = 4.0 * f64::EPSILON;

impl TransitionMatrix2 {
    pub fn new(p00: f64, p01: f64, p10: f64, p11: f64) -> Result<Self> {
        let m = Self { p00, p01, p10, p11 };
        if m.entries().iter().any(|p| !(0.0..=1.0).contains(p)) {
            return domain(format!(
                "transition probabilities must lie in [0, 1]: {m:?}"
            ));
        }
        let (r0, r1) = m.row_sums();
        if (r0 - 1.0).abs() > ROW_SUM_SLACK || (r1 - 1.0).abs() > ROW_SUM_SLACK {
            return domain(format!("rows must sum to 1, got {r0} and {r1}"));
        }
        Ok(m)
    }

    /// Builds a matrix from `P(0→1)` and `P(1→1)`, filling the complements.
    pub fn from_flip_probabilities(p01: f64, p11: f64) -> Result<Self> {
        Self::new(1.0 - p01, p01, 1.0 - p11, p11)
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.p00, self.p01, self.p10, self.p11]
    }

    pub fn row(&self, from: u8) -> [f64; 2] {
        if from == 0 {
            [self.p00, self.p01]
        } else {
            [self.p10, self.p11]
        }
    }

    pub fn row_sums(&self) -> (f64, f64) {
        (self.p00 + self.p01, self.p10 + self.p11)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            p00: self.p00 * rhs.p00 + self.p01 * rhs.p10,
            p01: self.p00 * rhs.p01 + self.p01 * rhs.p11,
            p10: self.p10 * rhs.p00 + self.p11 * rhs.p10,
            p11: self.p10 * rhs.p01 + self.p11 * rhs.p11,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.p00 * self.p11 - self.p01 * self.p10
    }

    pub fn trace(&self) -> f64 {
        self.p00 + self.p11
    }

    /// Non-unit eigenvalue. For a stochastic 2×2 matrix it equals
    /// `p00 - p10`, which is also the determinant.
    pub fn second_eigenvalue(&self) -> f64 {
        self.p00 - self.p10
    }

    /// Stationary distribution `(π0, π1)`; `None` when the chain is the identity.
    pub fn stationary(&self) -> Option<[f64; 2]> {
        let s = self.p01 + self.p10;
        (s > 0.0).then(|| [self.p10 / s, self.p01 / s])
    }
}

/// Solver output: every boundary law found, with its residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solutions: Vec<BoundaryLaw>,
    pub lambda_critical: f64,
    /// Max-norm residual `|z - F(z)|` per solution, same order as `solutions`.
    pub residuals: Vec<f64>,
    /// Set when the activity sits on the critical value and the asymmetric
    /// pair has collapsed onto the translation-invariant root.
    pub degenerate_double_root: bool,
    pub diagnostics: Vec<String>,
}

impl SolveReport {
    /// Number of Gibbs measures represented by the solutions.
    pub fn measure_count(&self) -> usize {
        self.solutions.iter().map(BoundaryLaw::measure_count).sum()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

fn check_z(z: f64) -> Result<()> {
    if !z.is_finite() {
        return domain(format!("field value must be finite, got {z}"));
    }
    if z < 0.0 {
        return domain(format!("field value must be non-negative, got {z}"));
    }
    Ok(())
}

fn check_positive_z(z: f64) -> Result<()> {
    if !(z.is_finite() && z > 0.0) {
        return domain(format!("field value must be positive, got {z}"));
    }
    Ok(())
}

/// `f(z) = (1 + λz)^(-k)`.
pub fn recursion_map(params: &ModelParams, z: f64) -> Result<f64> {
    check_z(z)?;
    Ok(f(params, z))
}

#[inline]
pub(crate) fn f(params: &ModelParams, z: f64) -> f64 {
    (1.0 + params.lambda * z).powi(-(params.k as i32))
}

/// `f'(z) = -kλ(1 + λz)^(-k-1)`.
pub fn recursion_derivative(params: &ModelParams, z: f64) -> Result<f64> {
    check_z(z)?;
    let k = params.k as i32;
    Ok(-(params.k as f64) * params.lambda * (1.0 + params.lambda * z).powi(-k - 1))
}

/// Parent-to-child transition matrix when the child carries field `z_child`:
/// a free parent has an occupied child with probability `λz/(1+λz)`, an
/// occupied parent forces the child free.
pub fn single_step_matrix(params: &ModelParams, z_child: f64) -> Result<TransitionMatrix2> {
    check_positive_z(z_child)?;
    let lz = params.lambda * z_child;
    let p00 = 1.0 / (1.0 + lz);
    let p01 = lz / (1.0 + lz);
    TransitionMatrix2::new(p00, p01, 1.0, 0.0)
}

/// Two-generation transition matrix `P(z1)·P(z2)` in closed form.
pub fn two_step_matrix(params: &ModelParams, z1: f64, z2: f64) -> Result<TransitionMatrix2> {
    check_positive_z(z1)?;
    check_positive_z(z2)?;
    let l = params.lambda;
    let (a, b) = (1.0 + l * z1, 1.0 + l * z2);
    let den = a * b;
    let p00 = (1.0 + l * z1 + l * l * z1 * z2) / den;
    let p01 = l * z2 / den;
    let p10 = 1.0 / b;
    let p11 = l * z2 / b;
    TransitionMatrix2::new(p00, p01, p10, p11).map_err(|e| match e {
        HcError::Domain(m) => HcError::Domain(format!("two-step matrix: {m}")),
        other => other,
    })
}

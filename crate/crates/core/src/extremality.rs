//! Extremality and non-extremality criteria for translation-invariant and
//! two-periodic measures.
//!
//! Each measure induces a two-state Markov chain along the tree. A
//! translation-invariant measure uses the single-step matrix `P(z)` on a
//! tree of branching `k`. A two-periodic measure is read on even levels
//! only, giving the two-step matrix `P(z1)·P(z2)` on a tree of branching
//! `k²`. The criteria then act on that chain:
//!
//! * Kesten-Stigum: `k_eff · s2² > 1` implies non-extremality.
//! * MSW: `k_eff · κ · γ < 1` implies extremality, with `γ` replaced by the
//!   upper bound `λ/(λ+1)`.
//! * Mossel and Martinelli bounds on the transition matrix: either one at
//!   most `1` rules out reconstruction, hence implies extremality.
//!
//! `γ` itself is never computed, only its bound.

use serde::{Deserialize, Serialize};

use crate::error::{domain, HcError, Result};
use crate::model::{
    single_step_matrix, two_step_matrix, BoundaryLaw, LawKind, ModelParams, TransitionMatrix2,
};
use crate::numeric::DEFAULT_TOL;
use crate::solvers::{solve_two_periodic, solve_two_periodic_k3_closed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    ProvenExtremal,
    ProvenNonExtremal,
    Undetermined,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::ProvenExtremal => "ProvenExtremal",
            Verdict::ProvenNonExtremal => "ProvenNonExtremal",
            Verdict::Undetermined => "Undetermined",
        })
    }
}

/// Value of a criterion and whether its sufficient condition fires.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub value: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalityReport {
    pub s2: f64,
    pub kappa: f64,
    pub gamma_bound: f64,
    pub ks_value: f64,
    pub msw_value: f64,
    pub martinelli_value: f64,
    pub mossel_value: f64,
    pub k_eff: u64,
    pub verdict: Verdict,
}

fn check_pair(z1: f64, z2: f64) -> Result<()> {
    if !(z1.is_finite() && z1 > 0.0 && z2.is_finite() && z2 > 0.0) {
        return domain(format!("field values must be positive, got ({z1}, {z2})"));
    }
    Ok(())
}

/// `s2 = λ²z1z2 / (λ²z1z2 + λz1 + λz2 + 1)`, the non-unit eigenvalue of the
/// two-step chain.
pub fn second_eigenvalue(params: &ModelParams, z1: f64, z2: f64) -> Result<f64> {
    check_pair(z1, z2)?;
    let l = params.lambda();
    let q = l * l * (z1 * z2);
    Ok(q / (q + (l * z1 + l * z2) + 1.0))
}

/// Dobrushin coefficient `κ = ½ max_{i,j} Σ_l |P_il - P_jl|` of the two-step
/// chain, in closed form `λ²z1z2 / ((1+λz1)(1+λz2))`.
pub fn kappa(params: &ModelParams, z1: f64, z2: f64) -> Result<f64> {
    check_pair(z1, z2)?;
    let l = params.lambda();
    Ok(l * l * (z1 * z2) / ((1.0 + l * z1) * (1.0 + l * z2)))
}

/// Dobrushin coefficient computed from the matrix entries.
pub fn dobrushin(m: &TransitionMatrix2) -> f64 {
    0.5 * ((m.p00 - m.p10).abs() + (m.p01 - m.p11).abs())
}

/// Upper bound `λ/(λ+1)` on the boundary influence `γ`.
pub fn gamma_bound(lambda: f64) -> f64 {
    lambda / (lambda + 1.0)
}

fn k_eff(params: &ModelParams, two_periodic: bool) -> u64 {
    let k = params.k() as u64;
    if two_periodic {
        k * k
    } else {
        k
    }
}

/// `|s2|` and `κ` of the chain a measure induces. For a translation-invariant
/// measure (`two_periodic == false`) the chain is `P(z1)`, whose non-unit
/// eigenvalue is `-λz/(1+λz)`; `z1` and `z2` must then coincide.
fn chain_coefficients(
    params: &ModelParams,
    z1: f64,
    z2: f64,
    two_periodic: bool,
) -> Result<(f64, f64)> {
    check_pair(z1, z2)?;
    if two_periodic {
        Ok((second_eigenvalue(params, z1, z2)?, kappa(params, z1, z2)?))
    } else {
        if (z1 - z2).abs() > 1e-12 * z1.max(z2) {
            return domain(format!(
                "translation-invariant chain needs z1 == z2, got ({z1}, {z2})"
            ));
        }
        let lz = params.lambda() * z1;
        let s = lz / (1.0 + lz);
        Ok((s, s))
    }
}

/// Kesten-Stigum: value `k_eff · s2²`, non-extremal when it exceeds 1.
pub fn kesten_stigum(
    params: &ModelParams,
    z1: f64,
    z2: f64,
    two_periodic: bool,
) -> Result<Criterion> {
    let (s2, _) = chain_coefficients(params, z1, z2, two_periodic)?;
    let value = k_eff(params, two_periodic) as f64 * s2 * s2;
    Ok(Criterion {
        value,
        holds: value > 1.0,
    })
}

/// MSW: value `k_eff · κ · λ/(λ+1)`, extremal when below 1.
pub fn msw_check(params: &ModelParams, z1: f64, z2: f64, two_periodic: bool) -> Result<Criterion> {
    let (_, kap) = chain_coefficients(params, z1, z2, two_periodic)?;
    let value = k_eff(params, two_periodic) as f64 * kap * gamma_bound(params.lambda());
    Ok(Criterion {
        value,
        holds: value < 1.0,
    })
}

fn check_nonnegative(m: &TransitionMatrix2) -> Result<()> {
    if m.entries().iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return domain(format!(
            "transition matrix has negative or non-finite entries: {m:?}"
        ));
    }
    Ok(())
}

/// Martinelli bound: value `k_eff (√(p00 p11) - √(p01 p10))²`; no
/// reconstruction when at most 1.
pub fn martinelli_check(m: &TransitionMatrix2, k_eff: u64) -> Result<Criterion> {
    check_nonnegative(m)?;
    let d = (m.p00 * m.p11).sqrt() - (m.p01 * m.p10).sqrt();
    let value = k_eff as f64 * d * d;
    Ok(Criterion {
        value,
        holds: value <= 1.0,
    })
}

/// Mossel bound: value `k_eff (p00 - p10)² / min(p00 + p10, p01 + p11)`; no
/// reconstruction when at most 1.
pub fn mossel_check(m: &TransitionMatrix2, k_eff: u64) -> Result<Criterion> {
    check_nonnegative(m)?;
    let den = (m.p00 + m.p10).min(m.p01 + m.p11);
    if den <= 0.0 {
        return domain("Mossel bound undefined: a column of the matrix is zero");
    }
    let d = m.p00 - m.p10;
    let value = k_eff as f64 * d * d / den;
    Ok(Criterion {
        value,
        holds: value <= 1.0,
    })
}

/// Builds the report for one boundary law.
///
/// For an asymmetric pair the Mossel and Martinelli values are taken as the
/// maximum over the two root parities (`P(z1)P(z2)` and `P(z2)P(z1)`), so the
/// verdict covers both measures of the pair.
pub fn report(params: &ModelParams, law: &BoundaryLaw) -> Result<ExtremalityReport> {
    let (z1, z2) = law.pair().ok_or_else(|| {
        HcError::Domain("extremality reports cover TI and two-periodic laws".into())
    })?;
    let two_periodic = law.kind() == LawKind::TwoPeriodic;
    report_for_pair(params, z1, z2, two_periodic)
}

pub fn report_for_pair(
    params: &ModelParams,
    z1: f64,
    z2: f64,
    two_periodic: bool,
) -> Result<ExtremalityReport> {
    let keff = k_eff(params, two_periodic);
    let (s2, kap) = chain_coefficients(params, z1, z2, two_periodic)?;
    let ks = kesten_stigum(params, z1, z2, two_periodic)?;
    let msw = msw_check(params, z1, z2, two_periodic)?;

    let matrices = if two_periodic {
        vec![
            two_step_matrix(params, z1, z2)?,
            two_step_matrix(params, z2, z1)?,
        ]
    } else {
        vec![single_step_matrix(params, z1)?]
    };
    let mut mart = Criterion {
        value: 0.0,
        holds: true,
    };
    let mut moss = Criterion {
        value: 0.0,
        holds: true,
    };
    for m in &matrices {
        let a = martinelli_check(m, keff)?;
        let b = mossel_check(m, keff)?;
        if a.value >= mart.value {
            mart = a;
        }
        if b.value >= moss.value {
            moss = b;
        }
    }

    let non_extremal = ks.holds;
    let extremal = msw.holds || mart.holds || moss.holds;
    let verdict = match (extremal, non_extremal) {
        (true, true) => {
            return Err(HcError::InternalConsistency(format!(
                "both extremal and non-extremal conditions fire at k={}, λ={}, z=({z1}, {z2})",
                params.k(),
                params.lambda()
            )))
        }
        (true, false) => Verdict::ProvenExtremal,
        (false, true) => Verdict::ProvenNonExtremal,
        (false, false) => Verdict::Undetermined,
    };

    Ok(ExtremalityReport {
        s2,
        kappa: kap,
        gamma_bound: gamma_bound(params.lambda()),
        ks_value: ks.value,
        msw_value: msw.value,
        martinelli_value: mart.value,
        mossel_value: moss.value,
        k_eff: keff,
        verdict,
    })
}

/// Every two-periodic boundary law at `params` with its extremality report.
pub fn classify(params: &ModelParams) -> Result<Vec<(BoundaryLaw, ExtremalityReport)>> {
    let solved = solve_two_periodic(params, DEFAULT_TOL)?;
    solved
        .solutions
        .into_iter()
        .map(|law| {
            let r = report(params, &law)?;
            Ok((law, r))
        })
        .collect()
}

fn k3_pair_kappa(lambda: f64) -> Result<f64> {
    if !(lambda > 27.0 / 16.0) {
        return domain(format!("k = 3 diagnostics need λ > 27/16, got {lambda}"));
    }
    let (z1, z2) = solve_two_periodic_k3_closed(lambda)?;
    kappa(&ModelParams::new(3, lambda)?, z1, z2)
}

/// `h(λ) = 9κ² - 1` along the `k = 3` closed-form pair (Kesten-Stigum minus one).
pub fn h_function(lambda: f64) -> Result<f64> {
    let kap = k3_pair_kappa(lambda)?;
    Ok(9.0 * kap * kap - 1.0)
}

/// `g(λ) = 9κ·λ/(λ+1) - 1` along the `k = 3` closed-form pair (MSW minus one).
pub fn g_function(lambda: f64) -> Result<f64> {
    let kap = k3_pair_kappa(lambda)?;
    Ok(9.0 * kap * gamma_bound(lambda) - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::solve_two_periodic_k2_closed;

    fn p(k: u32, l: f64) -> ModelParams {
        ModelParams::new(k, l).unwrap()
    }

    #[test]
    fn s2_examples() {
        let (z1, z2) = solve_two_periodic_k2_closed(5.0).unwrap();
        let s2 = second_eigenvalue(&p(2, 5.0), z1, z2).unwrap();
        assert!((s2 - 0.2).abs() < 1e-15);

        let z = 0.37;
        let params = p(3, 2.0);
        let lz = 2.0 * z;
        let s2 = second_eigenvalue(&params, z, z).unwrap();
        assert!((s2 - (lz / (1.0 + lz)).powi(2)).abs() < 1e-15);

        assert!(second_eigenvalue(&p(2, 1e-12), 0.5, 0.5).unwrap() < 1e-20);
        assert!(second_eigenvalue(&params, -1.0, 0.5).is_err());
    }

    #[test]
    fn ks_examples() {
        for lambda in [4.5, 5.0, 10.0, 1e3] {
            let (z1, z2) = solve_two_periodic_k2_closed(lambda).unwrap();
            let c = kesten_stigum(&p(2, lambda), z1, z2, true).unwrap();
            assert!((c.value - 4.0 / (lambda * lambda)).abs() < 1e-12);
            assert!(!c.holds);
        }
        // TI chain with λz = 1 has |s2| = 0.5
        let c = kesten_stigum(&p(2, 2.0), 0.5, 0.5, false).unwrap();
        assert_eq!(c.value, 0.5);
        assert!(!c.holds);
        assert!(kesten_stigum(&p(2, 2.0), 0.5, 0.6, false).is_err());
    }

    #[test]
    fn ks_k3_matches_h() {
        let (z1, z2) = solve_two_periodic_k3_closed(2.0).unwrap();
        let c = kesten_stigum(&p(3, 2.0), z1, z2, true).unwrap();
        let h = h_function(2.0).unwrap();
        assert!(h < 0.0);
        assert!((c.value - (h + 1.0)).abs() < 1e-14);
        assert!(!c.holds);
    }

    #[test]
    fn msw_examples() {
        for lambda in [4.5, 5.0, 10.0, 1e3] {
            let (z1, z2) = solve_two_periodic_k2_closed(lambda).unwrap();
            let c = msw_check(&p(2, lambda), z1, z2, true).unwrap();
            assert!((c.value - 4.0 / (lambda + 1.0)).abs() < 1e-12);
            assert!(c.holds);
        }
        let (z1, z2) = solve_two_periodic_k3_closed(2.0).unwrap();
        let c = msw_check(&p(3, 2.0), z1, z2, true).unwrap();
        let g = g_function(2.0).unwrap();
        assert!(g < 0.0 && c.holds);
        assert!((c.value - (g + 1.0)).abs() < 1e-14);

        let c = msw_check(&p(2, 1e-12), 0.9, 0.9, true).unwrap();
        assert!(c.value < 1e-20 && c.holds);
    }

    #[test]
    fn martinelli_examples() {
        let params = p(2, 3.0);
        let z = 0.2;
        let m = single_step_matrix(&params, z).unwrap();
        let c = martinelli_check(&m, 2).unwrap();
        let lz = 3.0 * z;
        assert!((c.value - 2.0 * lz / (1.0 + lz)).abs() < 1e-15);

        let id = TransitionMatrix2::new(1.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(martinelli_check(&id, 3).unwrap().value, 3.0);
        assert!(!martinelli_check(&id, 3).unwrap().holds);

        let flat = TransitionMatrix2::new(0.3, 0.7, 0.3, 0.7).unwrap();
        let c = martinelli_check(&flat, 100).unwrap();
        assert!(c.value.abs() < 1e-15 && c.holds);

        let bad = TransitionMatrix2 {
            p00: -0.1,
            p01: 1.1,
            p10: 1.0,
            p11: 0.0,
        };
        assert!(martinelli_check(&bad, 2).is_err());
    }

    #[test]
    fn mossel_examples() {
        let flat = TransitionMatrix2::new(0.3, 0.7, 0.3, 0.7).unwrap();
        let c = mossel_check(&flat, 100).unwrap();
        assert_eq!(c.value, 0.0);
        assert!(c.holds);

        let m = single_step_matrix(&p(2, 1.0), 1.0).unwrap();
        let c = mossel_check(&m, 2).unwrap();
        assert_eq!(c.value, 1.0);
        assert!(c.holds);

        let degenerate = TransitionMatrix2::new(1.0, 0.0, 1.0, 0.0).unwrap();
        assert!(mossel_check(&degenerate, 2).is_err());
    }

    #[test]
    fn classify_examples() {
        let rows = classify(&p(2, 5.0)).unwrap();
        assert_eq!(rows.len(), 2);
        let (law, r) = &rows[1];
        assert_eq!(law.kind(), LawKind::TwoPeriodic);
        assert_eq!(r.k_eff, 4);
        assert!((r.msw_value - 4.0 / 6.0).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::ProvenExtremal);

        let rows = classify(&p(2, 3.0)).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].1.k_eff, 2);

        let rows = classify(&p(2, 30.0)).unwrap();
        assert_eq!(rows[0].0.kind(), LawKind::TranslationInvariant);
        assert_eq!(rows[0].1.verdict, Verdict::ProvenNonExtremal);
        assert_eq!(rows[1].1.verdict, Verdict::ProvenExtremal);
    }

    #[test]
    fn report_is_symmetric_in_the_pair() {
        let params = p(3, 4.0);
        let (z1, z2) = solve_two_periodic_k3_closed(4.0).unwrap();
        let a = report_for_pair(&params, z1, z2, true).unwrap();
        let b = report_for_pair(&params, z2, z1, true).unwrap();
        assert_eq!(a.s2, b.s2);
        assert_eq!(a.kappa, b.kappa);
        assert_eq!(a.martinelli_value, b.martinelli_value);
        assert_eq!(a.mossel_value, b.mossel_value);
        assert_eq!(a.verdict, b.verdict);
    }

    #[test]
    fn dobrushin_matches_closed_kappa() {
        let params = p(2, 7.0);
        let m = two_step_matrix(&params, 0.13, 0.61).unwrap();
        assert!((dobrushin(&m) - kappa(&params, 0.13, 0.61).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn h_and_g_domain() {
        assert!(h_function(27.0 / 16.0).is_err());
        assert!(g_function(1.0).is_err());
        let h = h_function(100.0).unwrap();
        assert!(h > -1.0 && h < 0.0);
    }
}

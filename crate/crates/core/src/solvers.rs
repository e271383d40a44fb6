//! Translation-invariant and two-periodic boundary laws, and the critical
//! activities attached to them.
//!
//! For `k = 2` and `k = 3` the asymmetric pair has a closed form. For other
//! orders the pair is found as the two-cycle of `f`: with `z*` the fixed
//! point, `f∘f` is increasing, so bisecting `f(f(z)) - z` on `(0, z* - δ)`
//! isolates the lower member of the cycle and `f` maps it to its partner.

use serde::{Deserialize, Serialize};

use crate::error::{domain, HcError, Result};
use crate::model::{f, BoundaryLaw, ModelParams, SolveReport};
use crate::numeric::{bisect, real_cbrt};

/// Offset below `z*` that keeps the two-cycle bracket away from the
/// translation-invariant root of `f∘f - id`.
pub const DEFLATION_OFFSET: f64 = 1e-9;

/// Relative distance to `λ_cr` treated as sitting on the critical activity.
const CRITICAL_SLACK: f64 = 1e-12;

/// Critical activities for one tree order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    pub k: u32,
    /// Uniqueness threshold where the two-periodic branch is born.
    pub lambda_cr: f64,
    /// Below this activity the translation-invariant measure is extremal.
    pub lambda_star: f64,
    /// Above this activity the translation-invariant measure is not extremal.
    pub lambda_nonextremal: f64,
    /// Root in `(0, 1)` of `t^(k+1) - k t^2 + (2k-1) t - k + 1`.
    pub t_star: f64,
}

fn check_order(k: u32) -> Result<()> {
    if k < 2 {
        return domain(format!("tree order must be >= 2, got {k}"));
    }
    Ok(())
}

/// `λ_cr(k) = (k-1)^(-1) (k/(k-1))^k`.
pub fn critical_lambda(k: u32) -> Result<f64> {
    check_order(k)?;
    let km1 = (k - 1) as f64;
    Ok((k as f64 / km1).powi(k as i32) / km1)
}

/// Residual `|z - f(z)|` of a translation-invariant law.
pub fn ti_residual(params: &ModelParams, z: f64) -> f64 {
    (z - f(params, z)).abs()
}

/// Residual `max(|z1 - f(z2)|, |z2 - f(z1)|)` of a two-periodic law.
pub fn pair_residual(params: &ModelParams, z1: f64, z2: f64) -> f64 {
    (z1 - f(params, z2)).abs().max((z2 - f(params, z1)).abs())
}

/// The unique `z* ∈ (0, 1)` with `z* = (1 + λz*)^(-k)`, by bisection on `[0, 1]`.
pub fn solve_translation_invariant(params: &ModelParams, tol: f64) -> Result<BoundaryLaw> {
    check_tol(tol)?;
    let z = ti_root(params)?;
    let residual = ti_residual(params, z);
    if residual > tol {
        return Err(HcError::Convergence {
            method: "translation-invariant bisection",
            residual,
            tol,
            iterations: crate::numeric::MAX_BISECTION_ITERATIONS,
        });
    }
    BoundaryLaw::translation_invariant(z)
}

fn ti_root(params: &ModelParams) -> Result<f64> {
    bisect(|z| f(params, z) - z, 0.0, 1.0)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol.is_finite() && tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    Ok(())
}

/// All two-periodic boundary laws: the translation-invariant one, plus the
/// asymmetric pair when `λ > λ_cr(k)`.
pub fn solve_two_periodic(params: &ModelParams, tol: f64) -> Result<SolveReport> {
    check_tol(tol)?;
    let k = params.k();
    check_order(k)?;
    let lambda = params.lambda();
    let lambda_cr = critical_lambda(k)?;

    let ti = solve_translation_invariant(params, tol)?;
    let z_star = ti.values()[0];
    let mut report = SolveReport {
        residuals: vec![ti_residual(params, z_star)],
        solutions: vec![ti],
        lambda_critical: lambda_cr,
        degenerate_double_root: false,
        diagnostics: Vec::new(),
    };

    if (lambda - lambda_cr).abs() <= CRITICAL_SLACK * lambda_cr {
        report.degenerate_double_root = true;
        report
            .diagnostics
            .push("degenerate-double-root: activity is critical, pair coincides with z*".into());
        return Ok(report);
    }
    if lambda < lambda_cr {
        return Ok(report);
    }

    let (z1, z2) = match k {
        2 => solve_two_periodic_k2_closed(lambda)?,
        3 => solve_two_periodic_k3_closed(lambda)?,
        _ => two_cycle_generic(params, z_star)?,
    };
    let residual = pair_residual(params, z1, z2);
    if residual > tol {
        return Err(HcError::Convergence {
            method: "two-periodic pair",
            residual,
            tol,
            iterations: crate::numeric::MAX_BISECTION_ITERATIONS,
        });
    }
    report.solutions.push(BoundaryLaw::two_periodic(z1, z2)?);
    report.residuals.push(residual);
    Ok(report)
}

/// Two-cycle of `f` by bisection of `f(f(z)) - z` below the fixed point.
/// Returns `(z1, z2)` with `z1 < z2`.
pub fn two_cycle_generic(params: &ModelParams, z_star: f64) -> Result<(f64, f64)> {
    let hi = z_star - DEFLATION_OFFSET;
    if hi <= 0.0 {
        return domain(format!("fixed point {z_star} too small to deflate"));
    }
    let z1 = bisect(|z| f(params, f(params, z)) - z, 0.0, hi)?;
    let z2 = f(params, z1);
    Ok((z1, z2))
}

/// Closed-form asymmetric pair for `k = 2`: with `x = √z`, the pair solves
/// `λx² - λx + 1 = 0`. The smaller root is taken in the cancellation-free
/// form `2/(λ + √(λ² - 4λ))`.
pub fn solve_two_periodic_k2_closed(lambda: f64) -> Result<(f64, f64)> {
    if !(lambda.is_finite() && lambda > 4.0) {
        return Err(HcError::NoAsymmetricSolution {
            lambda,
            lambda_cr: 4.0,
        });
    }
    let root = (lambda * lambda - 4.0 * lambda).sqrt();
    let x_large = (lambda + root) / (2.0 * lambda);
    let x_small = 2.0 / (lambda + root);
    Ok((x_small * x_small, x_large * x_large))
}

/// Real root of `a³ - a² - 1/λ = 0` by Cardano's formula.
pub fn cardano_a(lambda: f64) -> f64 {
    let q = 12.0 * (12.0 * lambda + 81.0).sqrt() + 8.0 * lambda + 108.0;
    real_cbrt(q / lambda) / 6.0 + 2.0 / 3.0 * real_cbrt(lambda / q) + 1.0 / 3.0
}

/// `D(λ) = a⁴λ² - 4aλ`, the discriminant of the quadratic whose roots are
/// the cube roots of the `k = 3` pair.
pub fn discriminant_k3(lambda: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return domain(format!("activity must be positive, got {lambda}"));
    }
    let a = cardano_a(lambda);
    Ok(a.powi(4) * lambda * lambda - 4.0 * a * lambda)
}

/// Closed-form asymmetric pair for `k = 3`. With `x = ∛z1`, `y = ∛z2`,
/// `a = x + y` solves `a³ - a² - 1/λ = 0` and `x, y` are the roots of
/// `t² - a t + 1/(aλ) = 0`.
pub fn solve_two_periodic_k3_closed(lambda: f64) -> Result<(f64, f64)> {
    let lambda_cr = 27.0 / 16.0;
    if !(lambda.is_finite() && lambda > lambda_cr) {
        return Err(HcError::NoAsymmetricSolution { lambda, lambda_cr });
    }
    let a = cardano_a(lambda);
    let d = a.powi(4) * lambda * lambda - 4.0 * a * lambda;
    if d <= 0.0 {
        return Err(HcError::NoAsymmetricSolution { lambda, lambda_cr });
    }
    let sq = d.sqrt();
    let den = 2.0 * lambda * a;
    let t1 = (lambda * a * a - sq) / den;
    let t2 = (lambda * a * a + sq) / den;
    Ok((t1.powi(3), t2.powi(3)))
}

/// `t^(k+1) - k t² + (2k-1) t - k + 1`.
pub fn t_star_polynomial(k: u32, t: f64) -> f64 {
    let kf = k as f64;
    t.powi(k as i32 + 1) - kf * t * t + (2.0 * kf - 1.0) * t - kf + 1.0
}

/// `λ*(k) = t*^(-k) (1/t* - 1)` together with the other critical values.
pub fn lambda_star(k: u32) -> Result<CriticalValues> {
    check_order(k)?;
    let t_star = bisect(|t| t_star_polynomial(k, t), 0.0, 1.0).map_err(|e| {
        HcError::InternalConsistency(format!("t* bracketing failed for k={k}: {e}"))
    })?;
    let lambda_star = (1.0 / t_star - 1.0) / t_star.powi(k as i32);
    Ok(CriticalValues {
        k,
        lambda_cr: critical_lambda(k)?,
        lambda_star,
        lambda_nonextremal: nonextremal_bound(k)?,
        t_star,
    })
}

/// `(√k - 1)^(-1) (√k/(√k - 1))^k`: above it the translation-invariant
/// measure is not extremal.
pub fn nonextremal_bound(k: u32) -> Result<f64> {
    check_order(k)?;
    let s = (k as f64).sqrt();
    Ok((s / (s - 1.0)).powi(k as i32) / (s - 1.0))
}

/// Large-`k` non-extremality bound `e^(1+ε) ln k (ln k + ln ln k + 1 + ε)`.
pub fn asymptotic_bound(k: u32, epsilon: f64) -> Result<f64> {
    if k < 3 {
        return domain(format!(
            "asymptotic bound needs k >= 3 (ln ln k > -inf), got {k}"
        ));
    }
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return domain(format!("epsilon must be positive, got {epsilon}"));
    }
    let lk = (k as f64).ln();
    Ok((1.0 + epsilon).exp() * lk * (lk + lk.ln() + 1.0 + epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{recursion_derivative, LawKind};
    use crate::numeric::DEFAULT_TOL;

    fn p(k: u32, l: f64) -> ModelParams {
        ModelParams::new(k, l).unwrap()
    }

    #[test]
    fn critical_lambda_values() {
        assert_eq!(critical_lambda(2).unwrap(), 4.0);
        assert_eq!(critical_lambda(3).unwrap(), 1.6875);
        assert!((critical_lambda(4).unwrap() - 256.0 / 243.0).abs() < 1e-15);
        assert!(critical_lambda(1).is_err());
    }

    #[test]
    fn ti_examples() {
        let z = solve_translation_invariant(&p(2, 4.0), DEFAULT_TOL).unwrap();
        assert!((z.values()[0] - 0.25).abs() < 1e-15);

        // independent oracle: Newton on z(1+z)^2 - 1
        let mut x: f64 = 0.5;
        for _ in 0..60 {
            let g = x * (1.0 + x).powi(2) - 1.0;
            let dg = (1.0 + x).powi(2) + 2.0 * x * (1.0 + x);
            x -= g / dg;
        }
        let z = solve_translation_invariant(&p(2, 1.0), DEFAULT_TOL).unwrap();
        assert!((z.values()[0] - x).abs() < 1e-12);
        assert!((x - 0.465571231876768).abs() < 1e-12);

        let z = solve_translation_invariant(&p(5, 1e-9), DEFAULT_TOL).unwrap();
        assert!((z.values()[0] - 1.0).abs() < 1e-8);
        assert!(solve_translation_invariant(&p(2, 1.0), 0.0).is_err());
    }

    #[test]
    fn bifurcation_signature() {
        for k in 2..=8 {
            let lc = critical_lambda(k).unwrap();
            let params = p(k, lc);
            let z = solve_translation_invariant(&params, DEFAULT_TOL)
                .unwrap()
                .values()[0];
            let d = recursion_derivative(&params, z).unwrap();
            assert!((d + 1.0).abs() < 1e-8, "k={k}: f'(z*) = {d}");
        }
    }

    #[test]
    fn k2_closed_form() {
        let (z1, z2) = solve_two_periodic_k2_closed(5.0).unwrap();
        let s5 = 5f64.sqrt();
        assert!((z1 - ((5.0 - s5) / 10.0).powi(2)).abs() < 1e-15);
        assert!((z2 - ((5.0 + s5) / 10.0).powi(2)).abs() < 1e-15);
        assert!((z1 - 0.0763932).abs() < 1e-7 && (z2 - 0.5236068).abs() < 1e-7);

        let (z1, z2) = solve_two_periodic_k2_closed(8.0).unwrap();
        assert!((64.0 * z1 * z2 - 1.0).abs() < 1e-14);

        let (z1, z2) = solve_two_periodic_k2_closed(4.0 + 1e-10).unwrap();
        assert!((z1 - 0.25).abs() < 1e-4 && (z2 - 0.25).abs() < 1e-4);

        assert!(matches!(
            solve_two_periodic_k2_closed(4.0),
            Err(HcError::NoAsymmetricSolution { .. })
        ));
    }

    #[test]
    fn k3_closed_form() {
        // independent bisection oracle for the cubic at λ = 2
        let lambda = 2.0;
        let mut lo = 1.0f64;
        let mut hi = 2.0f64;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid * mid - mid * mid - 1.0 / lambda < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((cardano_a(lambda) - lo).abs() < 1e-12);
        assert!((lo - 1.297).abs() < 1e-3);

        let params = p(3, lambda);
        let (z1, z2) = solve_two_periodic_k3_closed(lambda).unwrap();
        assert!(pair_residual(&params, z1, z2) < 1e-10);
        assert!(z1 < z2);

        let (z1, z2) = solve_two_periodic_k3_closed(10.0).unwrap();
        let (t1, t2) = (z1.cbrt(), z2.cbrt());
        assert!((10.0 * t1 * t2 * (t1 + t2) - 1.0).abs() < 1e-10);

        assert!(matches!(
            solve_two_periodic_k3_closed(27.0 / 16.0),
            Err(HcError::NoAsymmetricSolution { .. })
        ));
    }

    #[test]
    fn discriminant_signs() {
        assert!(discriminant_k3(27.0 / 16.0).unwrap().abs() < 1e-8);
        assert!(discriminant_k3(1.0).unwrap() < 0.0);
        assert!(discriminant_k3(3.0).unwrap() > 0.0);
        assert!(discriminant_k3(0.0).is_err());
    }

    #[test]
    fn two_periodic_examples() {
        let r = solve_two_periodic(&p(2, 5.0), DEFAULT_TOL).unwrap();
        assert_eq!(r.measure_count(), 3);
        assert_eq!(r.solutions[1].kind(), LawKind::TwoPeriodic);
        let v = r.solutions[1].values();
        assert!((v[0] - 0.0763932).abs() < 1e-7 && (v[1] - 0.5236068).abs() < 1e-7);

        let r = solve_two_periodic(&p(2, 4.0), DEFAULT_TOL).unwrap();
        assert_eq!(r.measure_count(), 1);
        assert!(r.degenerate_double_root);
        assert!((r.solutions[0].values()[0] - 0.25).abs() < 1e-15);

        let r = solve_two_periodic(&p(3, 27.0 / 16.0), DEFAULT_TOL).unwrap();
        assert_eq!(r.measure_count(), 1);
        assert!(r.degenerate_double_root);
    }

    #[test]
    fn generic_agrees_with_cardano() {
        for lambda in [1.7, 2.0, 5.0, 10.0, 100.0] {
            let params = p(3, lambda);
            let z_star = solve_translation_invariant(&params, DEFAULT_TOL)
                .unwrap()
                .values()[0];
            let (g1, g2) = two_cycle_generic(&params, z_star).unwrap();
            let (c1, c2) = solve_two_periodic_k3_closed(lambda).unwrap();
            assert!(
                (g1 - c1).abs() < 1e-9 && (g2 - c2).abs() < 1e-9,
                "λ={lambda}"
            );
        }
    }

    #[test]
    fn solution_counts_on_grids() {
        for k in 2..=6 {
            let lc = critical_lambda(k).unwrap();
            for factor in [0.1, 0.5, 0.9, 0.99, 1.0, 1.01, 1.1, 2.0, 10.0, 100.0] {
                let r = solve_two_periodic(&p(k, lc * factor), DEFAULT_TOL).unwrap();
                let want = if factor <= 1.0 { 1 } else { 3 };
                assert_eq!(r.measure_count(), want, "k={k}, λ={}", lc * factor);
                assert!(r.max_residual() <= DEFAULT_TOL);
            }
        }
    }

    #[test]
    fn lambda_star_examples() {
        // independent oracle: dense sign scan then bisection, written out here
        for k in 2..=20u32 {
            let c = lambda_star(k).unwrap();
            assert!(t_star_polynomial(k, c.t_star).abs() < 1e-12);
            assert!(c.t_star > 0.0 && c.t_star < 1.0);
            assert!(c.lambda_star < c.lambda_nonextremal, "k={k}");
        }
        let c = lambda_star(2).unwrap();
        assert!((c.t_star - 0.430159709001947).abs() < 1e-12);
        assert!((c.lambda_star - (1.0 - c.t_star) / c.t_star.powi(3)).abs() < 1e-12);
        assert!(lambda_star(1).is_err());
    }

    #[test]
    fn nonextremal_bound_examples() {
        let s2 = 2f64.sqrt();
        let want = (s2 / (s2 - 1.0)).powi(2) / (s2 - 1.0);
        assert!((nonextremal_bound(2).unwrap() - want).abs() < 1e-12);
        assert!((nonextremal_bound(2).unwrap() - 28.14).abs() < 0.01);
        assert_eq!(nonextremal_bound(4).unwrap(), 16.0);
        assert!((nonextremal_bound(9).unwrap() - 0.5 * 1.5f64.powi(9)).abs() < 1e-12);
        assert!(nonextremal_bound(1).is_err());
    }

    #[test]
    fn asymptotic_bound_examples() {
        let l3 = 3f64.ln();
        let want = 1f64.exp().powi(2) * l3 * (l3 + l3.ln() + 2.0);
        assert!((asymptotic_bound(3, 1.0).unwrap() - want).abs() < 1e-12);
        assert!(asymptotic_bound(2, 1.0).is_err());
        assert!(asymptotic_bound(3, 0.0).is_err());
        let mut prev = 0.0;
        for eps in [0.01, 0.1, 0.5, 1.0, 2.0] {
            let v = asymptotic_bound(16, eps).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }
}

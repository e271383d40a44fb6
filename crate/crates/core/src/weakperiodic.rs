//! Weakly periodic boundary laws for the index-4 normal subgroup.
//!
//! The field takes four values `z1..z4` depending on the classes of a vertex
//! and its parent; `i` is the size of the generator subset defining the
//! subgroup. Fixed points of the four-component map `W` are searched on the
//! two-dimensional invariant slices `I2`, `I3`, `I4`, where the system
//! reduces to two equations in two unknowns.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, HcError, Result};
use crate::model::{BoundaryLaw, LawKind, SolveReport};
use crate::solvers::critical_lambda;

/// Invariant sets of `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InvariantSet {
    /// `z1 = z2 = z3 = z4`
    I1,
    /// `z1 = z3, z2 = z4`
    I2,
    /// `z1 = z2, z3 = z4`
    I3,
    /// `z1 = z4, z2 = z3`
    I4,
}

impl InvariantSet {
    pub const ALL: [InvariantSet; 4] = [Self::I1, Self::I2, Self::I3, Self::I4];

    /// Component pairs that must coincide on this set.
    fn ties(self) -> &'static [(usize, usize)] {
        match self {
            Self::I1 => &[(0, 1), (1, 2), (2, 3)],
            Self::I2 => &[(0, 2), (1, 3)],
            Self::I3 => &[(0, 1), (2, 3)],
            Self::I4 => &[(0, 3), (1, 2)],
        }
    }

    /// Embeds two free coordinates into the slice.
    fn embed(self, u: [f64; 2]) -> [f64; 4] {
        let [a, b] = u;
        match self {
            Self::I1 => [a, a, a, a],
            Self::I2 => [a, b, a, b],
            Self::I3 => [a, a, b, b],
            Self::I4 => [a, b, b, a],
        }
    }

    /// Components of `W` carrying the reduced equations.
    fn free_components(self) -> [usize; 2] {
        match self {
            Self::I1 | Self::I2 | Self::I4 => [0, 1],
            Self::I3 => [0, 2],
        }
    }

    pub fn contains(self, z: &[f64; 4], tol: f64) -> bool {
        self.ties().iter().all(|&(a, b)| (z[a] - z[b]).abs() <= tol)
    }
}

impl fmt::Display for InvariantSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::I1 => "I1",
            Self::I2 => "I2",
            Self::I3 => "I3",
            Self::I4 => "I4",
        };
        f.write_str(s)
    }
}

impl FromStr for InvariantSet {
    type Err = HcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "I1" | "1" => Ok(Self::I1),
            "I2" | "2" => Ok(Self::I2),
            "I3" | "3" => Ok(Self::I3),
            "I4" | "4" => Ok(Self::I4),
            _ => domain(format!("unknown invariant set {s:?}; expected I1..I4")),
        }
    }
}

/// Problem instance for the weakly periodic system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakPeriodicParams {
    k: u32,
    i: u32,
    lambda: f64,
    set: InvariantSet,
}

impl WeakPeriodicParams {
    pub fn new(k: u32, i: u32, lambda: f64, set: InvariantSet) -> Result<Self> {
        if k < 1 {
            return domain(format!("tree order k must be >= 1, got {k}"));
        }
        if i < 1 || i > k + 1 {
            return domain(format!("subset size i must lie in 1..={}, got {i}", k + 1));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return domain(format!(
                "activity must be positive and finite, got {lambda}"
            ));
        }
        Ok(Self { k, i, lambda, set })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn i(&self) -> u32 {
        self.i
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn set(&self) -> InvariantSet {
        self.set
    }
}

/// One component of `W`:
/// `(1+λa)^k / ((1+λa)^(k/i) + λ b^(1-1/i))^i · (1+λc)^(i-k)`.
#[inline]
fn component(p: &WeakPeriodicParams, a: f64, b: f64, c: f64) -> f64 {
    let (k, i, l) = (p.k as f64, p.i as f64, p.lambda);
    let base = 1.0 + l * a;
    let inner = base.powf(k / i) + l * b.powf(1.0 - 1.0 / i);
    base.powf(k) / inner.powf(i) * (1.0 + l * c).powf(i - k)
}

#[inline]
fn apply(p: &WeakPeriodicParams, z: &[f64; 4]) -> [f64; 4] {
    let [z1, z2, z3, z4] = *z;
    [
        component(p, z3, z4, z2),
        component(p, z4, z3, z1),
        component(p, z1, z2, z4),
        component(p, z2, z1, z3),
    ]
}

/// The map `W` whose fixed points are the weakly periodic boundary laws.
pub fn weak_system_map(p: &WeakPeriodicParams, z: &[f64; 4]) -> Result<[f64; 4]> {
    if let Some(bad) = z.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return domain(format!(
            "weakly periodic field values must be positive, got {bad}"
        ));
    }
    Ok(apply(p, z))
}

/// Max-norm residual `|z - W(z)|`.
pub fn weak_residual(p: &WeakPeriodicParams, z: &[f64; 4]) -> Result<f64> {
    let w = weak_system_map(p, z)?;
    Ok(z.iter()
        .zip(w)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// True iff `z` lies in `set` and so does `W(z)`, both within `tol`.
pub fn invariant_set_check(
    p: &WeakPeriodicParams,
    set: InvariantSet,
    z: &[f64; 4],
    tol: f64,
) -> bool {
    if !set.contains(z, tol) {
        return false;
    }
    match weak_system_map(p, z) {
        Ok(w) => set.contains(&w, tol),
        Err(_) => false,
    }
}

/// Multi-start search settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Starts per axis; the grid is `grid × grid` log-spaced points.
    pub grid: usize,
    pub lo: f64,
    pub hi: f64,
    pub max_iterations: usize,
    /// Endpoints closer than this in max-norm are merged outright.
    pub dedup: f64,
    /// Endpoints closer than this are merged when the residual is below
    /// tolerance along the whole segment between them.
    pub link_radius: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            grid: 32,
            lo: 1e-4,
            hi: 10.0,
            max_iterations: 100,
            dedup: 1e-8,
            link_radius: 1e-3,
        }
    }
}

const FLOOR: f64 = 1e-30;

/// Fixed points of `W` on the slice named by `p.set()`, found by damped
/// Newton from every point of a log-spaced start grid.
pub fn solve_weak_periodic(p: &WeakPeriodicParams, tol: f64) -> Result<SolveReport> {
    solve_weak_periodic_with(p, tol, &SearchConfig::default())
}

pub fn solve_weak_periodic_with(
    p: &WeakPeriodicParams,
    tol: f64,
    cfg: &SearchConfig,
) -> Result<SolveReport> {
    if p.set == InvariantSet::I1 {
        return domain(
            "the diagonal I1 reduces to the scalar recursion; use solve_translation_invariant",
        );
    }
    if !(tol.is_finite() && tol > 0.0) {
        return domain(format!("tolerance must be positive, got {tol}"));
    }
    let axis = crate::numeric::grid(cfg.lo, cfg.hi, cfg.grid, true);
    let starts: Vec<[f64; 2]> = axis
        .iter()
        .flat_map(|&a| axis.iter().map(move |&b| [a, b]))
        .collect();

    let mut found: Vec<([f64; 4], f64)> = starts
        .par_iter()
        .filter_map(|&u0| newton(p, u0, tol, cfg.max_iterations))
        .filter_map(|u| {
            let z = p.set.embed(u);
            let r = weak_residual(p, &z).ok()?;
            (r <= tol).then_some((z, r))
        })
        .collect();

    found.sort_by(|a, b| lex_cmp(&a.0, &b.0));
    let unique = cluster(p, found, tol, cfg);

    let mut report = SolveReport {
        solutions: Vec::with_capacity(unique.len()),
        lambda_critical: critical_lambda(p.k.max(2))?,
        residuals: Vec::with_capacity(unique.len()),
        degenerate_double_root: false,
        diagnostics: Vec::new(),
    };
    if unique.is_empty() {
        report.diagnostics.push(format!(
            "damped Newton failed from all {} starts on {}",
            starts.len(),
            p.set
        ));
    }
    let crowded = unique.iter().enumerate().any(|(i, (a, _))| {
        unique[i + 1..].iter().any(|(b, _)| {
            a.iter()
                .zip(b.iter())
                .all(|(x, y)| (x - y).abs() <= cfg.link_radius)
        })
    });
    if crowded {
        report.diagnostics.push(format!(
            "distinct solutions lie within {} of each other; λ may sit on a bifurcation and the count is unreliable",
            cfg.link_radius
        ));
    }
    for (z, r) in unique {
        report
            .solutions
            .push(BoundaryLaw::new(LawKind::WeakPeriodic(p.set), z.to_vec())?);
        report.residuals.push(r);
    }
    Ok(report)
}

fn lex_cmp(a: &[f64; 4], b: &[f64; 4]) -> std::cmp::Ordering {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

/// Interior points checked on the segment between two candidate roots.
const SEGMENT_PROBES: usize = 9;

/// True when the residual stays within `tol` on the segment from `a` to `b`.
/// Both ends lie on the same linear invariant set, so the segment does too.
fn joined_by_flat_segment(p: &WeakPeriodicParams, a: &[f64; 4], b: &[f64; 4], tol: f64) -> bool {
    (1..=SEGMENT_PROBES).all(|j| {
        let t = j as f64 / (SEGMENT_PROBES + 1) as f64;
        let z: [f64; 4] = std::array::from_fn(|c| a[c] + t * (b[c] - a[c]));
        weak_residual(p, &z).is_ok_and(|r| r <= tol)
    })
}

/// Single-linkage clusters of Newton endpoints, each represented by its
/// lowest-residual member. Two endpoints are linked when they lie within
/// `cfg.dedup`, or within `cfg.link_radius` with residual `<= tol` along
/// the segment joining them; the latter merges the flat valley a double
/// root leaves in floating point.
fn cluster(
    p: &WeakPeriodicParams,
    points: Vec<([f64; 4], f64)>,
    tol: f64,
    cfg: &SearchConfig,
) -> Vec<([f64; 4], f64)> {
    fn find(root: &mut [usize], mut i: usize) -> usize {
        while root[i] != i {
            root[i] = root[root[i]];
            i = root[i];
        }
        i
    }
    let n = points.len();
    let mut root: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (find(&mut root, i), find(&mut root, j));
            if a == b {
                continue;
            }
            let dist = points[i]
                .0
                .iter()
                .zip(points[j].0.iter())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            let linked = dist <= cfg.dedup
                || (dist <= cfg.link_radius
                    && joined_by_flat_segment(p, &points[i].0, &points[j].0, tol));
            if linked {
                root[a.max(b)] = a.min(b);
            }
        }
    }
    let mut best: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut root, i);
        if best[r].is_none_or(|b| points[i].1 < points[b].1) {
            best[r] = Some(i);
        }
    }
    let mut out: Vec<([f64; 4], f64)> = best.into_iter().flatten().map(|i| points[i]).collect();
    out.sort_by(|a, b| lex_cmp(&a.0, &b.0));
    out
}

/// True when all four values coincide within `tol`.
pub fn is_translation_invariant(law: &BoundaryLaw, tol: f64) -> bool {
    let v = law.values();
    v.iter().all(|x| (x - v[0]).abs() <= tol)
}

fn reduced_residual(p: &WeakPeriodicParams, u: [f64; 2]) -> [f64; 2] {
    let w = apply(p, &p.set.embed(u));
    let [c0, c1] = p.set.free_components();
    [w[c0] - u[0], w[c1] - u[1]]
}

fn norm(r: [f64; 2]) -> f64 {
    r[0].abs().max(r[1].abs())
}

/// Damped Newton on `R(u) - u = 0` with a central-difference Jacobian.
fn newton(p: &WeakPeriodicParams, mut u: [f64; 2], tol: f64, max_iter: usize) -> Option<[f64; 2]> {
    let mut r = reduced_residual(p, u);
    let mut rn = norm(r);
    let mut damping = 1.0f64;
    for _ in 0..max_iter {
        if !rn.is_finite() {
            return None;
        }
        if rn <= 0.1 * tol {
            return Some(u);
        }
        let mut jac = [[0.0; 2]; 2];
        for j in 0..2 {
            let h = 1e-7 * u[j].max(1e-8);
            let mut up = u;
            let mut dn = u;
            up[j] += h;
            dn[j] = (dn[j] - h).max(FLOOR);
            let (rp, rm) = (reduced_residual(p, up), reduced_residual(p, dn));
            let width = up[j] - dn[j];
            for i in 0..2 {
                jac[i][j] = (rp[i] - rm[i]) / width;
            }
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let step = [
            -(jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            -(-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
        ];

        // halve the step until the residual stops growing
        let mut t = damping;
        let mut accepted = None;
        for _ in 0..40 {
            let cand = [
                (u[0] + t * step[0]).max(FLOOR),
                (u[1] + t * step[1]).max(FLOOR),
            ];
            let rc = reduced_residual(p, cand);
            let rcn = norm(rc);
            if rcn.is_finite() && rcn < rn {
                accepted = Some((cand, rc, rcn));
                break;
            }
            t *= 0.5;
        }
        let (cand, rc, rcn) = accepted?;
        let moved = (cand[0] - u[0]).abs().max((cand[1] - u[1]).abs());
        u = cand;
        r = rc;
        rn = rcn;
        damping = (2.0 * t).min(1.0);
        if moved == 0.0 {
            break;
        }
    }
    (rn <= tol).then_some(u)
}

/// `s±(k) = (k - 3 ± √(k² - 6k + 1)) / 4`, returned as `(s⁻, s⁺)`.
pub fn s_pm(k: u32) -> Result<(f64, f64)> {
    if k < 6 {
        return domain(format!("s± needs k >= 6, got {k}"));
    }
    let kf = k as f64;
    let root = (kf * kf - 6.0 * kf + 1.0).sqrt();
    Ok(((kf - 3.0 - root) / 4.0, (kf - 3.0 + root) / 4.0))
}

/// `λ±(k) = (s± + 1)^k s±`, returned as `(λ⁻, λ⁺)`.
pub fn lambda_pm(k: u32) -> Result<(f64, f64)> {
    let (sm, sp) = s_pm(k)?;
    let e = k as i32;
    Ok(((sm + 1.0).powi(e) * sm, (sp + 1.0).powi(e) * sp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{recursion_map, ModelParams};
    use crate::numeric::DEFAULT_TOL;
    use crate::solvers::solve_translation_invariant;

    fn wp(k: u32, i: u32, l: f64, set: InvariantSet) -> WeakPeriodicParams {
        WeakPeriodicParams::new(k, i, l, set).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(WeakPeriodicParams::new(2, 0, 1.0, InvariantSet::I2).is_err());
        assert!(WeakPeriodicParams::new(2, 4, 1.0, InvariantSet::I2).is_err());
        assert!(WeakPeriodicParams::new(2, 3, 1.0, InvariantSet::I2).is_ok());
        assert!(WeakPeriodicParams::new(2, 1, -1.0, InvariantSet::I2).is_err());
        assert!(weak_system_map(&wp(2, 1, 1.0, InvariantSet::I2), &[0.1, 0.0, 0.1, 0.1]).is_err());
    }

    #[test]
    fn diagonal_fixed_point_is_the_scalar_one() {
        for (k, i, l) in [
            (2, 1, 3.0),
            (2, 2, 6.0),
            (3, 1, 2.0),
            (4, 3, 1.5),
            (6, 1, 10.0),
        ] {
            let params = ModelParams::new(k, l).unwrap();
            let z = solve_translation_invariant(&params, DEFAULT_TOL)
                .unwrap()
                .values()[0];
            let w = weak_system_map(&wp(k, i, l, InvariantSet::I1), &[z; 4]).unwrap();
            let fz = recursion_map(&params, z).unwrap();
            for wj in w {
                assert!((wj - fz).abs() < 1e-13, "k={k} i={i} λ={l}");
            }
        }
    }

    #[test]
    fn diagonal_outputs_are_equal() {
        let p = wp(3, 2, 2.5, InvariantSet::I1);
        for z in [0.01, 0.3, 2.0] {
            let w = weak_system_map(&p, &[z; 4]).unwrap();
            assert!(w.iter().all(|x| (x - w[0]).abs() < 1e-15));
        }
    }

    #[test]
    fn i_equals_k_matches_direct_formula() {
        let (k, l) = (3u32, 2.2);
        let p = wp(k, k, l, InvariantSet::I2);
        let z = [0.13, 0.71, 0.29, 1.7];
        let direct = |a: f64, b: f64, c: f64| {
            let _ = c;
            (1.0 + l * a).powi(3) / ((1.0 + l * a) + l * b.powf(2.0 / 3.0)).powi(3)
        };
        let want = [
            direct(z[2], z[3], z[1]),
            direct(z[3], z[2], z[0]),
            direct(z[0], z[1], z[3]),
            direct(z[1], z[0], z[2]),
        ];
        let got = weak_system_map(&p, &z).unwrap();
        for (a, b) in got.iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn invariant_set_membership() {
        let p = wp(2, 1, 5.0, InvariantSet::I2);
        for set in InvariantSet::ALL {
            assert!(invariant_set_check(&p, set, &[0.4; 4], 1e-12));
        }
        let z = [0.2, 0.7, 0.2, 0.7];
        assert!(invariant_set_check(&p, InvariantSet::I2, &z, 1e-12));
        assert!(!invariant_set_check(&p, InvariantSet::I3, &z, 1e-12));
        assert!(!invariant_set_check(&p, InvariantSet::I4, &z, 1e-12));
        let off = [0.1, 0.2, 0.3, 0.4];
        for set in InvariantSet::ALL {
            assert!(!invariant_set_check(&p, set, &off, 1e-12));
        }
    }

    #[test]
    fn theorem_counts_k2_and_k3() {
        let r = solve_weak_periodic(&wp(2, 1, 3.0, InvariantSet::I2), DEFAULT_TOL).unwrap();
        assert_eq!(r.solutions.len(), 1);
        assert!(is_translation_invariant(&r.solutions[0], 1e-8));

        let r = solve_weak_periodic(&wp(2, 1, 6.0, InvariantSet::I2), DEFAULT_TOL).unwrap();
        let non_ti = r
            .solutions
            .iter()
            .filter(|s| !is_translation_invariant(s, 1e-8))
            .count();
        assert_eq!(non_ti, 2);

        let r = solve_weak_periodic(&wp(3, 1, 3.0, InvariantSet::I2), DEFAULT_TOL).unwrap();
        assert_eq!(r.solutions.len(), 3);
        let ti = r
            .solutions
            .iter()
            .filter(|s| is_translation_invariant(s, 1e-8))
            .count();
        assert_eq!(ti, 1);
        assert!(r.max_residual() <= DEFAULT_TOL);
    }

    #[test]
    fn s_and_lambda_pm() {
        assert_eq!(s_pm(6).unwrap(), (0.5, 1.0));
        let (sm, sp) = s_pm(7).unwrap();
        assert!((sm - (4.0 - 8f64.sqrt()) / 4.0).abs() < 1e-15);
        assert!((sp - (4.0 + 8f64.sqrt()) / 4.0).abs() < 1e-15);
        for k in 6..=20u32 {
            let (sm, sp) = s_pm(k).unwrap();
            let kf = k as f64;
            assert!((sm + sp - (kf - 3.0) / 2.0).abs() < 1e-12);
            assert!((sm * sp - 0.5).abs() < 1e-12);
            let (lm, lp) = lambda_pm(k).unwrap();
            assert!(lm > 0.0 && lm < lp);
        }
        let (lm, lp) = lambda_pm(6).unwrap();
        assert!((lm - 1.5f64.powi(6) * 0.5).abs() < 1e-12);
        assert!((lm - 5.6953).abs() < 1e-4);
        assert_eq!(lp, 64.0);
        assert!(s_pm(5).is_err() && lambda_pm(5).is_err());
    }

    #[test]
    fn double_root_valley_counts_once() {
        let r = solve_weak_periodic(&wp(2, 1, 4.0, InvariantSet::I2), DEFAULT_TOL).unwrap();
        assert_eq!(r.solutions.len(), 1);
        let v = r.solutions[0].values();
        assert!(v.iter().all(|x| (x - 0.25).abs() < 1e-4));
    }

    #[test]
    fn crowded_solutions_are_flagged() {
        let r = solve_weak_periodic(&wp(3, 1, 27.0 / 16.0, InvariantSet::I2), DEFAULT_TOL).unwrap();
        if r.solutions.len() > 1 {
            assert!(r.diagnostics.iter().any(|d| d.contains("bifurcation")));
        }
    }

    #[test]
    fn empty_search_reports_diagnostic() {
        let cfg = SearchConfig {
            grid: 2,
            lo: 1e-4,
            hi: 1e-3,
            max_iterations: 0,
            dedup: 1e-8,
            link_radius: 1e-3,
        };
        let r = solve_weak_periodic_with(&wp(2, 1, 3.0, InvariantSet::I2), 1e-12, &cfg).unwrap();
        assert!(r.solutions.is_empty());
        assert_eq!(r.diagnostics.len(), 1);
    }
}

use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::output::{csv, csv_num, json, key_values, table, table_num, Format};
use super::{
    CliError, CriticalArgs, OracleArgs, OracleMode, PointArgs, Quantity, RootArg, Scale, SweepArgs,
    WeakArgs, THREADS_ENV,
};
use crate::extremality::{self, report_for_pair, Verdict};
use crate::model::{BoundaryLaw, LawKind, ModelParams, SolveReport};
use crate::numeric::{grid, DEFAULT_TOL};
use crate::oracle::{
    consistency_check, free_parent_child_counts, parity_assignment, root_marginal,
    sample_tree_chain, uniform_assignment, Configuration, FiniteBall, RootDegree, ENUMERATION_CAP,
    GENERATOR,
};
use crate::solvers::{
    asymptotic_bound, discriminant_k3, lambda_star, solve_translation_invariant, solve_two_periodic,
};
use crate::weakperiodic::{
    is_translation_invariant, lambda_pm, s_pm, solve_weak_periodic, WeakPeriodicParams,
};

type CmdResult = Result<String, CliError>;

/// Oracle verdict threshold on the largest consistency deviation.
pub(super) const ORACLE_THRESHOLD: f64 = 1e-8;

/// Two laws count as the same translation-invariant point below this gap.
const TI_TOL: f64 = 1e-8;

fn kind_name(kind: LawKind) -> &'static str {
    match kind {
        LawKind::TranslationInvariant => "translation_invariant",
        LawKind::TwoPeriodic => "two_periodic",
        LawKind::WeakPeriodic(_) => "weak_periodic",
    }
}

fn pair_of(law: &BoundaryLaw) -> (f64, f64) {
    law.pair().unwrap_or((f64::NAN, f64::NAN))
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--tol must be positive, got {tol}"
        )))
    }
}

fn solve_point(a: &PointArgs) -> Result<(ModelParams, SolveReport), CliError> {
    check_tol(a.tol)?;
    let params = ModelParams::new(a.k, a.lambda)?;
    let report = solve_two_periodic(&params, a.tol)?;
    Ok((params, report))
}

pub(super) fn solve(a: &PointArgs) -> CmdResult {
    let (params, rep) = solve_point(a)?;
    let rows: Vec<(&BoundaryLaw, f64)> = rep
        .solutions
        .iter()
        .zip(rep.residuals.iter().copied())
        .collect();
    Ok(match a.format.format() {
        Format::Json => json(&json!({
            "command": "solve",
            "k": params.k(),
            "lambda": params.lambda(),
            "lambda_critical": rep.lambda_critical,
            "degenerate_double_root": rep.degenerate_double_root,
            "measure_count": rep.measure_count(),
            "solutions": rows.iter().map(|(law, r)| json!({
                "kind": kind_name(law.kind()),
                "values": law.values(),
                "residual": r,
            })).collect::<Vec<_>>(),
            "diagnostics": rep.diagnostics,
        })),
        Format::Csv => csv(
            &["kind", "z1", "z2", "residual"],
            &rows
                .iter()
                .map(|(law, r)| {
                    let (z1, z2) = pair_of(law);
                    vec![
                        kind_name(law.kind()).into(),
                        csv_num(z1),
                        csv_num(z2),
                        csv_num(*r),
                    ]
                })
                .collect::<Vec<_>>(),
        ),
        Format::Table => {
            let mut s = format!(
                "k = {}, lambda = {}, lambda_cr = {}, Gibbs measures = {}\n",
                params.k(),
                table_num(params.lambda()),
                table_num(rep.lambda_critical),
                rep.measure_count()
            );
            s.push_str(&table(
                &["kind", "z1", "z2", "residual"],
                &rows
                    .iter()
                    .map(|(law, r)| {
                        let (z1, z2) = pair_of(law);
                        vec![
                            kind_name(law.kind()).into(),
                            table_num(z1),
                            table_num(z2),
                            format!("{r:.3e}"),
                        ]
                    })
                    .collect::<Vec<_>>(),
            ));
            for d in &rep.diagnostics {
                let _ = writeln!(s, "note: {d}");
            }
            s
        }
    })
}

const CLASSIFY_HEADER: [&str; 12] = [
    "kind",
    "z1",
    "z2",
    "s2",
    "kappa",
    "gamma_bound",
    "ks_value",
    "msw_value",
    "martinelli_value",
    "mossel_value",
    "k_eff",
    "verdict",
];

pub(super) fn classify(a: &PointArgs) -> CmdResult {
    let (params, rep) = solve_point(a)?;
    let mut rows = Vec::with_capacity(rep.solutions.len());
    for law in &rep.solutions {
        rows.push((law, extremality::report(&params, law)?));
    }
    let cells = |num: fn(f64) -> String| -> Vec<Vec<String>> {
        rows.iter()
            .map(|(law, r)| {
                let (z1, z2) = pair_of(law);
                vec![
                    kind_name(law.kind()).into(),
                    num(z1),
                    num(z2),
                    num(r.s2),
                    num(r.kappa),
                    num(r.gamma_bound),
                    num(r.ks_value),
                    num(r.msw_value),
                    num(r.martinelli_value),
                    num(r.mossel_value),
                    r.k_eff.to_string(),
                    r.verdict.to_string(),
                ]
            })
            .collect()
    };
    Ok(match a.format.format() {
        Format::Json => json(&json!({
            "command": "classify",
            "k": params.k(),
            "lambda": params.lambda(),
            "rows": rows.iter().map(|(law, r)| json!({
                "kind": kind_name(law.kind()),
                "values": law.values(),
                "s2": r.s2,
                "kappa": r.kappa,
                "gamma_bound": r.gamma_bound,
                "ks_value": r.ks_value,
                "msw_value": r.msw_value,
                "martinelli_value": r.martinelli_value,
                "mossel_value": r.mossel_value,
                "k_eff": r.k_eff,
                "verdict": r.verdict.to_string(),
            })).collect::<Vec<_>>(),
        })),
        Format::Csv => csv(&CLASSIFY_HEADER, &cells(csv_num)),
        Format::Table => {
            let mut s = format!(
                "k = {}, lambda = {}\n",
                params.k(),
                table_num(params.lambda())
            );
            s.push_str(&table(&CLASSIFY_HEADER, &cells(table_num)));
            s
        }
    })
}

/// CSV columns contributed by one quantity, in output order.
pub(super) fn quantity_columns(q: Quantity) -> &'static [&'static str] {
    match q {
        Quantity::Solutions => &["solutions"],
        Quantity::D => &["D"],
        Quantity::H => &["h"],
        Quantity::G => &["g"],
        Quantity::S2 => &["s2_ti", "s2_periodic"],
        Quantity::Ks => &["ks_ti", "ks_periodic"],
        Quantity::Msw => &["msw_ti", "msw_periodic"],
        Quantity::Verdict => &["verdict_ti", "verdict_periodic"],
        Quantity::WeakPeriodicCount => &["weakperiodic_count"],
    }
}

struct PointReports {
    solutions: usize,
    ti: extremality::ExtremalityReport,
    periodic: Option<extremality::ExtremalityReport>,
}

fn point_reports(k: u32, lambda: f64) -> Result<PointReports, CliError> {
    let params = ModelParams::new(k, lambda)?;
    let rep = solve_two_periodic(&params, DEFAULT_TOL)?;
    let z = solve_translation_invariant(&params, DEFAULT_TOL)?.values()[0];
    let ti = report_for_pair(&params, z, z, false)?;
    let periodic = match rep
        .solutions
        .iter()
        .find(|l| l.kind() == LawKind::TwoPeriodic)
    {
        Some(law) => Some(extremality::report(&params, law)?),
        None => None,
    };
    Ok(PointReports {
        solutions: rep.measure_count(),
        ti,
        periodic,
    })
}

fn verdict_cell(v: Option<Verdict>) -> String {
    v.map_or_else(|| "none".to_string(), |v| v.to_string())
}

fn sweep_row(a: &SweepArgs, lambda: f64) -> Result<Vec<String>, CliError> {
    let needs_reports = a.quantity.iter().any(|q| {
        matches!(
            q,
            Quantity::Solutions | Quantity::S2 | Quantity::Ks | Quantity::Msw | Quantity::Verdict
        )
    });
    let reports = if needs_reports {
        Some(point_reports(a.k, lambda)?)
    } else {
        None
    };
    let r = || reports.as_ref().expect("reports computed when needed");
    let nan_outside = |v: crate::Result<f64>| v.map_or(f64::NAN, |x| x);

    let mut row = vec![csv_num(lambda)];
    for q in &a.quantity {
        match q {
            Quantity::Solutions => row.push(r().solutions.to_string()),
            Quantity::D => row.push(csv_num(discriminant_k3(lambda)?)),
            Quantity::H => row.push(csv_num(nan_outside(extremality::h_function(lambda)))),
            Quantity::G => row.push(csv_num(nan_outside(extremality::g_function(lambda)))),
            Quantity::S2 | Quantity::Ks | Quantity::Msw => {
                let pick = |x: &extremality::ExtremalityReport| match q {
                    Quantity::S2 => x.s2,
                    Quantity::Ks => x.ks_value,
                    _ => x.msw_value,
                };
                row.push(csv_num(pick(&r().ti)));
                row.push(csv_num(r().periodic.as_ref().map_or(f64::NAN, pick)));
            }
            Quantity::Verdict => {
                row.push(verdict_cell(Some(r().ti.verdict)));
                row.push(verdict_cell(r().periodic.as_ref().map(|p| p.verdict)));
            }
            Quantity::WeakPeriodicCount => {
                let p = WeakPeriodicParams::new(a.k, a.i, lambda, a.set)?;
                row.push(
                    solve_weak_periodic(&p, DEFAULT_TOL)?
                        .solutions
                        .len()
                        .to_string(),
                );
            }
        }
    }
    Ok(row)
}

/// Worker pool sized by `HC_TREE_THREADS` when set, else rayon's default.
pub(super) fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Usage(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))
        })?;
        b = b.num_threads(n);
    }
    b.build()
        .map_err(|e| CliError::Runtime(format!("cannot start worker pool: {e}")))
}

pub(super) fn sweep(a: &SweepArgs) -> CmdResult {
    if a.k < 2 {
        return Err(CliError::Usage(format!(
            "tree order must be >= 2, got {}",
            a.k
        )));
    }
    if !(a.lambda_min.is_finite() && a.lambda_max.is_finite() && a.lambda_min > 0.0) {
        return Err(CliError::Usage(
            "activities must be positive and finite".into(),
        ));
    }
    if a.lambda_min >= a.lambda_max {
        return Err(CliError::Usage(format!(
            "need lmin < lmax, got {} >= {}",
            a.lambda_min, a.lambda_max
        )));
    }
    if a.points < 2 {
        return Err(CliError::Usage(format!(
            "need at least 2 points, got {}",
            a.points
        )));
    }
    let k3_only = a
        .quantity
        .iter()
        .any(|q| matches!(q, Quantity::D | Quantity::H | Quantity::G));
    if k3_only && a.k != 3 {
        return Err(CliError::Usage(
            "quantities D, h and g are defined for k = 3 only".into(),
        ));
    }
    if a.quantity.contains(&Quantity::WeakPeriodicCount) {
        WeakPeriodicParams::new(a.k, a.i, a.lambda_min, a.set)?;
        if a.set == crate::weakperiodic::InvariantSet::I1 {
            return Err(CliError::Usage(
                "weakperiodic_count needs --set I2, I3 or I4".into(),
            ));
        }
    }

    let lambdas = grid(a.lambda_min, a.lambda_max, a.points, a.scale == Scale::Log);
    let pool = thread_pool()?;
    let rows: Vec<Vec<String>> = pool.install(|| {
        lambdas
            .par_iter()
            .map(|&l| sweep_row(a, l))
            .collect::<Result<_, _>>()
    })?;

    let mut header = vec!["lambda"];
    for q in &a.quantity {
        header.extend_from_slice(quantity_columns(*q));
    }
    let text = csv(&header, &rows);
    match &a.out {
        Some(path) => {
            std::fs::write(path, text)
                .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

fn oracle_fields(a: &OracleArgs, params: &ModelParams) -> Result<(f64, f64), CliError> {
    match a.mode {
        OracleMode::Ti | OracleMode::Perturbed => {
            let z = solve_translation_invariant(params, DEFAULT_TOL)?.values()[0];
            let z = if a.mode == OracleMode::Perturbed {
                z + 0.1
            } else {
                z
            };
            Ok((z, z))
        }
        OracleMode::Periodic => {
            let rep = solve_two_periodic(params, DEFAULT_TOL)?;
            rep.solutions
                .iter()
                .find(|l| l.kind() == LawKind::TwoPeriodic)
                .and_then(BoundaryLaw::pair)
                .ok_or_else(|| {
                    CliError::Runtime(format!(
                        "no two-periodic pair at lambda = {} <= lambda_cr = {}",
                        params.lambda(),
                        rep.lambda_critical
                    ))
                })
        }
    }
}

pub(super) fn oracle(a: &OracleArgs) -> CmdResult {
    let params = ModelParams::new(a.k, a.lambda)?;
    let root = match a.root {
        RootArg::Half => RootDegree::Half,
        RootArg::Full => RootDegree::Full,
    };
    if a.depth == 0 {
        return Err(CliError::Usage("oracle needs depth >= 1".into()));
    }
    let (z_even, z_odd) = oracle_fields(a, &params)?;
    let size = FiniteBall::vertex_count_for(a.k, a.depth, root).unwrap_or(usize::MAX);
    if size > ENUMERATION_CAP {
        return Err(CliError::Runtime(format!(
            "ball has {size} vertices, enumeration cap is {ENUMERATION_CAP}"
        )));
    }
    let ball = FiniteBall::new(a.k, a.depth, root)?;
    let field = if a.mode == OracleMode::Periodic {
        parity_assignment(&ball, z_even, z_odd)
    } else {
        uniform_assignment(&ball, z_even)
    };
    let deviation = consistency_check(&ball, params.lambda(), &field)?;
    let marginal = root_marginal(&ball, params.lambda(), &field[ball.leaves()])?;
    let pass = deviation < ORACLE_THRESHOLD;

    let sampler = match a.samples {
        None => None,
        Some(0) => return Err(CliError::Usage("--samples must be positive".into())),
        Some(n) => Some(sampler_summary(&params, z_even, z_odd, a.depth, n, a.seed)?),
    };

    let mode = match a.mode {
        OracleMode::Ti => "ti",
        OracleMode::Periodic => "periodic",
        OracleMode::Perturbed => "perturbed",
    };
    let root_name = match a.root {
        RootArg::Half => "half",
        RootArg::Full => "full",
    };
    let verdict = if pass { "PASS" } else { "FAIL" };
    Ok(match a.format.format() {
        Format::Json => json(&json!({
            "command": "oracle",
            "k": a.k,
            "lambda": a.lambda,
            "depth": a.depth,
            "mode": mode,
            "root": root_name,
            "vertices": ball.vertex_count(),
            "field": [z_even, z_odd],
            "max_deviation": deviation,
            "threshold": ORACLE_THRESHOLD,
            "root_occupation": marginal,
            "pass": pass,
            "sampler": sampler.as_ref().map(SamplerSummary::to_json),
        })),
        Format::Csv => {
            let mut s = csv(
                &[
                    "mode",
                    "k",
                    "lambda",
                    "depth",
                    "vertices",
                    "max_deviation",
                    "threshold",
                    "result",
                ],
                &[vec![
                    mode.into(),
                    a.k.to_string(),
                    csv_num(a.lambda),
                    a.depth.to_string(),
                    ball.vertex_count().to_string(),
                    csv_num(deviation),
                    csv_num(ORACLE_THRESHOLD),
                    verdict.into(),
                ]],
            );
            if let Some(sm) = &sampler {
                s.push_str(&sm.csv());
            }
            s
        }
        Format::Table => {
            let mut s = key_values(&[
                ("mode".into(), mode.into()),
                (
                    "ball".into(),
                    format!(
                        "k = {}, depth = {}, {root_name} root, {} vertices",
                        a.k,
                        a.depth,
                        ball.vertex_count()
                    ),
                ),
                (
                    "field (even, odd levels)".into(),
                    format!("{}, {}", table_num(z_even), table_num(z_odd)),
                ),
                ("root occupation probability".into(), table_num(marginal)),
                (
                    "max consistency deviation".into(),
                    format!("{deviation:.3e}"),
                ),
                ("threshold".into(), format!("{ORACLE_THRESHOLD:.0e}")),
            ]);
            let _ = writeln!(s, "{verdict}");
            if let Some(sm) = &sampler {
                s.push_str(&sm.table());
            }
            s
        }
    })
}

struct SamplerRow {
    parity: &'static str,
    occupied: u64,
    trials: u64,
    expected: f64,
}

impl SamplerRow {
    fn frequency(&self) -> f64 {
        self.occupied as f64 / self.trials as f64
    }

    fn z_score(&self) -> f64 {
        let p = self.expected;
        let n = self.trials as f64;
        (self.frequency() - p) / (p * (1.0 - p) / n).sqrt()
    }
}

struct SamplerSummary {
    seed: u64,
    samples: usize,
    admissible: bool,
    rows: Vec<SamplerRow>,
}

fn sampler_summary(
    params: &ModelParams,
    z1: f64,
    z2: f64,
    depth: u32,
    count: usize,
    seed: u64,
) -> Result<SamplerSummary, CliError> {
    let s = sample_tree_chain(params, z1, z2, depth, count, seed)?;
    let admissible = s.samples.iter().all(|spins| {
        Configuration {
            spins: spins.clone(),
        }
        .is_admissible(&s.ball)
    });
    let counts = free_parent_child_counts(&s);
    let rows = [("even", s.even_step.p01), ("odd", s.odd_step.p01)]
        .into_iter()
        .zip(counts)
        .filter(|(_, (_, trials))| *trials > 0)
        .map(|((parity, expected), (occupied, trials))| SamplerRow {
            parity,
            occupied,
            trials,
            expected,
        })
        .collect();
    Ok(SamplerSummary {
        seed,
        samples: count,
        admissible,
        rows,
    })
}

impl SamplerSummary {
    fn to_json(&self) -> Value {
        json!({
            "generator": GENERATOR,
            "seed": self.seed,
            "samples": self.samples,
            "admissible": self.admissible,
            "rows": self.rows.iter().map(|r| json!({
                "parent_level_parity": r.parity,
                "trials": r.trials,
                "occupied": r.occupied,
                "frequency": r.frequency(),
                "expected": r.expected,
                "z_score": r.z_score(),
            })).collect::<Vec<_>>(),
        })
    }

    fn cells(&self, num: fn(f64) -> String) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                vec![
                    r.parity.into(),
                    r.trials.to_string(),
                    r.occupied.to_string(),
                    num(r.frequency()),
                    num(r.expected),
                    num(r.z_score()),
                ]
            })
            .collect()
    }

    const HEADER: [&'static str; 6] = [
        "parent_level_parity",
        "trials",
        "occupied",
        "frequency",
        "expected",
        "z_score",
    ];

    fn csv(&self) -> String {
        csv(&Self::HEADER, &self.cells(csv_num))
    }

    fn table(&self) -> String {
        let mut s = format!(
            "sampler: {} samples, seed {}, {GENERATOR}, all admissible: {}\n",
            self.samples, self.seed, self.admissible
        );
        s.push_str(&table(&Self::HEADER, &self.cells(table_num)));
        s
    }
}

pub(super) fn critical(a: &CriticalArgs) -> CmdResult {
    if !(a.epsilon.is_finite() && a.epsilon > 0.0) {
        return Err(CliError::Usage(format!(
            "--epsilon must be positive, got {}",
            a.epsilon
        )));
    }
    let cv = lambda_star(a.k)?;
    let asym = if a.k >= 3 {
        Some(asymptotic_bound(a.k, a.epsilon)?)
    } else {
        None
    };
    let pm = if a.k >= 6 {
        Some((s_pm(a.k)?, lambda_pm(a.k)?))
    } else {
        None
    };

    let mut entries: Vec<(&str, String, f64)> = vec![
        (
            "lambda_cr",
            "lambda_cr: two-periodic bifurcation (k-1)^-1 (k/(k-1))^k".into(),
            cv.lambda_cr,
        ),
        (
            "t_star",
            "t_star: root in (0,1) of t^(k+1) - k t^2 + (2k-1) t - k + 1".into(),
            cv.t_star,
        ),
        (
            "lambda_star",
            "lambda_star: TI extremal below, t*^-k (1/t* - 1)".into(),
            cv.lambda_star,
        ),
        (
            "nonextremal_bound",
            "TI non-extremal above (sqrt(k)-1)^-1 (sqrt(k)/(sqrt(k)-1))^k".into(),
            cv.lambda_nonextremal,
        ),
    ];
    if let Some(v) = asym {
        entries.push((
            "asymptotic_bound",
            format!(
                "TI non-extremal above e^(1+eps) ln k (ln k + ln ln k + 1 + eps), eps = {}",
                a.epsilon
            ),
            v,
        ));
    }
    if let Some(((sm, sp), (lm, lp))) = pm {
        entries.push(("s_minus", "s-: (k - 3 - sqrt(k^2 - 6k + 1)) / 4".into(), sm));
        entries.push(("s_plus", "s+: (k - 3 + sqrt(k^2 - 6k + 1)) / 4".into(), sp));
        entries.push(("lambda_minus", "lambda-: (s- + 1)^k s-".into(), lm));
        entries.push(("lambda_plus", "lambda+: (s+ + 1)^k s+".into(), lp));
    }

    Ok(match a.format.format() {
        Format::Json => {
            let opt = |key: &str| entries.iter().find(|e| e.0 == key).map(|e| e.2);
            json(&json!({
                "command": "critical",
                "k": a.k,
                "epsilon": a.epsilon,
                "lambda_cr": cv.lambda_cr,
                "t_star": cv.t_star,
                "lambda_star": cv.lambda_star,
                "nonextremal_bound": cv.lambda_nonextremal,
                "asymptotic_bound": opt("asymptotic_bound"),
                "s_minus": opt("s_minus"),
                "s_plus": opt("s_plus"),
                "lambda_minus": opt("lambda_minus"),
                "lambda_plus": opt("lambda_plus"),
            }))
        }
        Format::Csv => csv(
            &["quantity", "value", "label"],
            &entries
                .iter()
                .map(|(key, label, v)| vec![key.to_string(), csv_num(*v), format!("\"{label}\"")])
                .collect::<Vec<_>>(),
        ),
        Format::Table => {
            let mut s = format!("k = {}\n", a.k);
            s.push_str(&key_values(
                &entries
                    .iter()
                    .map(|(_, label, v)| (label.clone(), table_num(*v)))
                    .collect::<Vec<_>>(),
            ));
            s
        }
    })
}

pub(super) fn weak(a: &WeakArgs) -> CmdResult {
    check_tol(a.tol)?;
    let p = WeakPeriodicParams::new(a.k, a.i, a.lambda, a.set)?;
    let rep = solve_weak_periodic(&p, a.tol)?;
    let rows: Vec<(&BoundaryLaw, f64, bool)> = rep
        .solutions
        .iter()
        .zip(rep.residuals.iter().copied())
        .map(|(law, r)| (law, r, is_translation_invariant(law, TI_TOL)))
        .collect();
    let non_ti = rows.iter().filter(|r| !r.2).count();
    let header = ["z1", "z2", "z3", "z4", "residual", "translation_invariant"];
    let cells = |num: fn(f64) -> String| -> Vec<Vec<String>> {
        rows.iter()
            .map(|(law, r, ti)| {
                let mut c: Vec<String> = law.values().iter().map(|&v| num(v)).collect();
                c.push(num(*r));
                c.push(ti.to_string());
                c
            })
            .collect()
    };
    Ok(match a.format.format() {
        Format::Json => json(&json!({
            "command": "weak",
            "k": a.k,
            "i": a.i,
            "set": a.set.to_string(),
            "lambda": a.lambda,
            "solution_count": rows.len(),
            "non_translation_invariant": non_ti,
            "solutions": rows.iter().map(|(law, r, ti)| json!({
                "values": law.values(),
                "residual": r,
                "translation_invariant": ti,
            })).collect::<Vec<_>>(),
            "diagnostics": rep.diagnostics,
        })),
        Format::Csv => csv(&header, &cells(csv_num)),
        Format::Table => {
            let mut s = format!(
                "k = {}, i = {}, set = {}, lambda = {}: {} solutions, {} not translation-invariant\n",
                a.k,
                a.i,
                a.set,
                table_num(a.lambda),
                rows.len(),
                non_ti
            );
            s.push_str(&table(&header, &cells(table_num)));
            for d in &rep.diagnostics {
                let _ = writeln!(s, "note: {d}");
            }
            s
        }
    })
}

//! Exact finite-volume quantities on a ball.
//!
//! Two independent routes are kept side by side:
//!
//! * explicit enumeration of admissible configurations (capped at
//!   [`ENUMERATION_CAP`] vertices), and
//! * the bottom-up two-state recursion, which carries for each subtree the
//!   weight with its root free and with its root occupied and is linear in
//!   the number of vertices.
//!
//! Weights follow the finite-volume measure: a configuration `σ` on `V_n`
//! has weight `λ^{#σ} Π_{x ∈ W_n, σ(x) = 1} z_x`, with the boundary field
//! normalised to `(1, z)`. For `n = 0` the root is its own boundary and
//! `Z = 1 + λ z_root`.

use std::collections::HashMap;

use crate::error::{domain, HcError, Result};
use crate::model::ModelParams;
use crate::oracle::ball::FiniteBall;

/// Largest ball on which configurations are enumerated one by one.
pub const ENUMERATION_CAP: usize = 40;

fn check_cap(ball: &FiniteBall) -> Result<()> {
    if ball.vertex_count() > ENUMERATION_CAP {
        return Err(HcError::SizeLimit {
            vertices: ball.vertex_count(),
            cap: ENUMERATION_CAP,
        });
    }
    Ok(())
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return domain(format!(
            "activity must be positive and finite, got {lambda}"
        ));
    }
    Ok(())
}

fn check_field(values: &[f64], expected: usize, what: &str) -> Result<()> {
    if values.len() != expected {
        return domain(format!(
            "{what}: expected {expected} values, got {}",
            values.len()
        ));
    }
    if let Some(bad) = values.iter().find(|z| !(z.is_finite() && **z > 0.0)) {
        return domain(format!("{what}: values must be positive, got {bad}"));
    }
    Ok(())
}

/// Calls `visit` with every admissible configuration of `V_level`, in
/// lexicographic order of the breadth-first spin vector.
pub fn for_each_admissible<F>(ball: &FiniteBall, level: u32, mut visit: F) -> Result<()>
where
    F: FnMut(&[u8]),
{
    if level > ball.depth() {
        return domain(format!("level {level} exceeds ball depth {}", ball.depth()));
    }
    let end = ball.up_to(level).end;
    if end > ENUMERATION_CAP {
        return Err(HcError::SizeLimit {
            vertices: end,
            cap: ENUMERATION_CAP,
        });
    }
    let mut spins = vec![0u8; end];
    fn go(ball: &FiniteBall, v: usize, spins: &mut [u8], visit: &mut dyn FnMut(&[u8])) {
        if v == spins.len() {
            visit(spins);
            return;
        }
        spins[v] = 0;
        go(ball, v + 1, spins, visit);
        if ball.parent(v).is_none_or(|p| spins[p] == 0) {
            spins[v] = 1;
            go(ball, v + 1, spins, visit);
            spins[v] = 0;
        }
    }
    go(ball, 0, &mut spins, &mut visit);
    Ok(())
}

trait Weight: Copy {
    fn one() -> Self;
    fn add(self, other: Self) -> Self;
    fn mul(self, other: Self) -> Self;
}

impl Weight for f64 {
    fn one() -> Self {
        1.0
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
}

impl Weight for u128 {
    fn one() -> Self {
        1
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn mul(self, o: Self) -> Self {
        self * o
    }
}

/// Sum over admissible configurations by explicit enumeration of the
/// interior `V_{n-1}`. Leaves are conditionally independent given their
/// parent, so each interior configuration contributes its own weight times
/// `leaf_free[v]` for every free parent `v` of leaves.
fn enumerate_sum<W: Weight>(
    ball: &FiniteBall,
    occupied: W,
    leaf_free: &[W],
    root_alone: (W, W),
) -> W {
    if ball.depth() == 0 {
        return root_alone.0.add(root_alone.1);
    }
    let end = ball.up_to(ball.depth() - 1).end;
    let mut spins = vec![0u8; end];

    fn go<W: Weight>(
        ball: &FiniteBall,
        v: usize,
        spins: &mut [u8],
        occupied: W,
        leaf_free: &[W],
    ) -> W {
        if v == spins.len() {
            return W::one();
        }
        let mut total = go(ball, v + 1, spins, occupied, leaf_free).mul(leaf_free[v]);
        if ball.parent(v).is_none_or(|p| spins[p] == 0) {
            spins[v] = 1;
            total = total.add(go(ball, v + 1, spins, occupied, leaf_free).mul(occupied));
            spins[v] = 0;
        }
        total
    }
    go(ball, 0, &mut spins, occupied, leaf_free)
}

/// Per interior vertex: factor contributed by its leaf children when it is free.
fn leaf_factors<W: Weight>(ball: &FiniteBall, per_leaf: impl Fn(usize) -> W) -> Vec<W> {
    let end = ball.up_to(ball.depth().saturating_sub(1)).end;
    let leaves = ball.leaves();
    (0..end)
        .map(|v| {
            ball.children(v)
                .filter(|c| leaves.contains(c))
                .fold(W::one(), |acc, c| acc.mul(per_leaf(c)))
        })
        .collect()
}

/// Admissible configurations counted by enumeration.
pub fn count_admissible_enumerated(ball: &FiniteBall) -> Result<u128> {
    check_cap(ball)?;
    let factors = leaf_factors::<u128>(ball, |_| 2);
    Ok(enumerate_sum(ball, 1u128, &factors, (1, 1)))
}

/// Admissible configurations counted by the (free, occupied) subtree recursion.
pub fn count_admissible_dp(ball: &FiniteBall) -> Result<u128> {
    let n = ball.vertex_count();
    let mut free = vec![1u128; n];
    let mut occ = vec![1u128; n];
    let overflow = || HcError::Domain("admissible-configuration count overflows u128".into());
    for v in (0..n).rev() {
        let (mut f, mut o) = (1u128, 1u128);
        for c in ball.children(v) {
            let both = free[c].checked_add(occ[c]).ok_or_else(overflow)?;
            f = f.checked_mul(both).ok_or_else(overflow)?;
            o = o.checked_mul(free[c]).ok_or_else(overflow)?;
        }
        free[v] = f;
        occ[v] = o;
    }
    free[0].checked_add(occ[0]).ok_or_else(overflow)
}

/// Number of admissible configurations on the ball. Balls within the
/// enumeration cap are counted both ways and must agree.
pub fn count_admissible(ball: &FiniteBall) -> Result<u128> {
    let dp = count_admissible_dp(ball)?;
    if ball.vertex_count() <= ENUMERATION_CAP {
        let en = count_admissible_enumerated(ball)?;
        if en != dp {
            return Err(HcError::InternalConsistency(format!(
                "enumeration counts {en} admissible configurations, recursion {dp}"
            )));
        }
    }
    Ok(dp)
}

/// `Z_n` by enumeration.
pub fn partition_function_enumerated(
    ball: &FiniteBall,
    lambda: f64,
    boundary_z: &[f64],
) -> Result<f64> {
    check_cap(ball)?;
    check_lambda(lambda)?;
    check_field(boundary_z, ball.leaves().len(), "boundary field")?;
    let first_leaf = ball.leaves().start;
    let factors = leaf_factors::<f64>(ball, |c| 1.0 + lambda * boundary_z[c - first_leaf]);
    let root_alone = (1.0, lambda * boundary_z[0]);
    Ok(enumerate_sum(ball, lambda, &factors, root_alone))
}

/// Bottom-up recursion in ratio form. Returns `(ln Z, r_root)` where
/// `r_v = occ_v / free_v` is the occupied-to-free weight ratio of the
/// subtree at `v`.
fn subtree_recursion(ball: &FiniteBall, lambda: f64, boundary_z: &[f64]) -> Result<(f64, f64)> {
    check_lambda(lambda)?;
    check_field(boundary_z, ball.leaves().len(), "boundary field")?;
    let n = ball.vertex_count();
    let first_leaf = ball.leaves().start;
    let mut log_free = vec![0.0f64; n];
    let mut ratio = vec![0.0f64; n];
    for v in (0..n).rev() {
        if v >= first_leaf {
            ratio[v] = lambda * boundary_z[v - first_leaf];
            continue;
        }
        let (mut lf, mut prod) = (0.0f64, 1.0f64);
        for c in ball.children(v) {
            lf += log_free[c] + ratio[c].ln_1p();
            prod /= 1.0 + ratio[c];
        }
        log_free[v] = lf;
        ratio[v] = lambda * prod;
    }
    Ok((log_free[0] + ratio[0].ln_1p(), ratio[0]))
}

/// `ln Z_n` by the subtree recursion; usable on balls of any size.
pub fn log_partition_function(ball: &FiniteBall, lambda: f64, boundary_z: &[f64]) -> Result<f64> {
    subtree_recursion(ball, lambda, boundary_z).map(|(lz, _)| lz)
}

/// `Z_n` by the subtree recursion.
pub fn partition_function(ball: &FiniteBall, lambda: f64, boundary_z: &[f64]) -> Result<f64> {
    log_partition_function(ball, lambda, boundary_z).map(f64::exp)
}

/// `μ_n(σ(root) = 1)`.
pub fn root_marginal(ball: &FiniteBall, lambda: f64, boundary_z: &[f64]) -> Result<f64> {
    let (_, r) = subtree_recursion(ball, lambda, boundary_z)?;
    Ok(r / (1.0 + r))
}

/// The same field value on every vertex.
pub fn uniform_assignment(ball: &FiniteBall, z: f64) -> Vec<f64> {
    vec![z; ball.vertex_count()]
}

/// `z_even` on even levels and `z_odd` on odd levels.
pub fn parity_assignment(ball: &FiniteBall, z_even: f64, z_odd: f64) -> Vec<f64> {
    (0..ball.vertex_count())
        .map(|v| {
            if ball.level_of(v).is_multiple_of(2) {
                z_even
            } else {
                z_odd
            }
        })
        .collect()
}

/// Field values produced by the recursion from a boundary field: each
/// interior vertex gets `Π_children (1 + λ z_c)^(-1)`.
pub fn propagate_assignment(
    ball: &FiniteBall,
    params: &ModelParams,
    boundary_z: &[f64],
) -> Result<Vec<f64>> {
    check_field(boundary_z, ball.leaves().len(), "boundary field")?;
    let n = ball.vertex_count();
    let first_leaf = ball.leaves().start;
    let mut z = vec![0.0; n];
    z[first_leaf..].copy_from_slice(boundary_z);
    for v in (0..first_leaf).rev() {
        z[v] = ball
            .children(v)
            .map(|c| 1.0 / (1.0 + params.lambda() * z[c]))
            .product();
    }
    Ok(z)
}

fn mask(spins: &[u8]) -> u64 {
    spins
        .iter()
        .enumerate()
        .fold(0u64, |m, (v, &s)| m | ((s as u64) << v))
}

/// Weight `λ^{#σ} Π_{x ∈ W_level, σ(x)=1} z_x` of a configuration on `V_level`.
fn level_weight(ball: &FiniteBall, level: u32, lambda: f64, z: &[f64], spins: &[u8]) -> f64 {
    let boundary = ball.level(level);
    spins.iter().enumerate().fold(1.0, |w, (v, &s)| {
        if s == 0 {
            w
        } else if boundary.contains(&v) {
            w * lambda * z[v]
        } else {
            w * lambda
        }
    })
}

/// Largest violation of Kolmogorov consistency between `μ_n` and `μ_{n-1}`
/// built from the per-vertex field `z` (levels `n` and `n-1` are used).
///
/// Every admissible `σ` on `V_{n-1}` is compared: the mass `μ_n` puts on its
/// admissible extensions against `μ_{n-1}(σ)`.
pub fn consistency_check(ball: &FiniteBall, lambda: f64, z: &[f64]) -> Result<f64> {
    check_cap(ball)?;
    check_lambda(lambda)?;
    check_field(z, ball.vertex_count(), "field assignment")?;
    let n = ball.depth();
    if n == 0 {
        return domain("consistency needs depth >= 1");
    }
    let inner_end = ball.up_to(n - 1).end;

    let mut marginal: HashMap<u64, f64> = HashMap::new();
    let mut z_n = 0.0;
    for_each_admissible(ball, n, |spins| {
        let w = level_weight(ball, n, lambda, z, spins);
        z_n += w;
        *marginal.entry(mask(&spins[..inner_end])).or_insert(0.0) += w;
    })?;

    let mut coarse: Vec<(u64, f64)> = Vec::new();
    let mut z_prev = 0.0;
    for_each_admissible(ball, n - 1, |spins| {
        let w = level_weight(ball, n - 1, lambda, z, spins);
        z_prev += w;
        coarse.push((mask(spins), w));
    })?;

    let mut worst = 0.0f64;
    for (m, w) in coarse {
        let fine = marginal.get(&m).copied().unwrap_or(0.0) / z_n;
        worst = worst.max((fine - w / z_prev).abs());
    }
    Ok(worst)
}

/// `P(σ(d) = j | σ(root) = parent_spin)` under `μ_n`, where `d` is the
/// first vertex `generations` levels below the root.
pub fn conditional_descendant_distribution(
    ball: &FiniteBall,
    lambda: f64,
    z: &[f64],
    generations: u32,
    parent_spin: u8,
) -> Result<[f64; 2]> {
    check_cap(ball)?;
    check_lambda(lambda)?;
    check_field(z, ball.vertex_count(), "field assignment")?;
    if parent_spin > 1 {
        return domain(format!("spin must be 0 or 1, got {parent_spin}"));
    }
    if generations == 0 || generations > ball.depth() {
        return domain(format!(
            "generations must lie in 1..={}, got {generations}",
            ball.depth()
        ));
    }
    let d = ball.level(generations).start;
    let n = ball.depth();
    let mut joint = [0.0f64; 2];
    for_each_admissible(ball, n, |spins| {
        if spins[0] == parent_spin {
            joint[spins[d] as usize] += level_weight(ball, n, lambda, z, spins);
        }
    })?;
    let total = joint[0] + joint[1];
    if total <= 0.0 {
        return Err(HcError::ZeroProbability(format!("root spin {parent_spin}")));
    }
    Ok([joint[0] / total, joint[1] / total])
}

/// One-generation conditional row `P(σ(child) = · | σ(root) = parent_spin)`.
pub fn conditional_child_distribution(
    ball: &FiniteBall,
    lambda: f64,
    z: &[f64],
    parent_spin: u8,
) -> Result<[f64; 2]> {
    if ball.depth() < 2 {
        return domain("conditional child distribution needs depth >= 2");
    }
    conditional_descendant_distribution(ball, lambda, z, 1, parent_spin)
}

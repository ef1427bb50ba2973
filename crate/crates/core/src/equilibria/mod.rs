//! Zeros of the drift field
//!
//! ```text
//! F_h(z) = alpha * mean(z) + beta * q + (1 - alpha - beta) f(z_h) - z_h
//! ```
//!
//! Synchronization zeros `z * 1` solve the scalar equation
//! `phi(z) = f(z) - (1 - alpha) / g * z + beta q / g = 0` (`g = 1 - alpha - beta`).
//! At any other zero every component solves `f(z) - z / g = c` for a common
//! offset `c` in `(-(alpha + beta) / g, 0)`, so the components sit on the
//! monotone branches of `psi(z) = f(z) - z / g`. For each split of the agents
//! over the branches, the offset is pinned by the scalar condition
//! `alpha * mean(z(c)) + beta q + g c = 0`.

mod oracle;

pub use oracle::{compare, multi_start_zeros, OracleReport, DEFAULT_STARTS};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::ModelParams;
use crate::reinforcement::{Reinforcement, ReinforcementFunction};
use crate::roots;
use crate::stability::{self, Stability};
use crate::{Error, Result};

/// Bisection bracket width for scalar problems.
const BISECT_WIDTH: f64 = 1e-12;
/// Inner bisection width for branch inverses (nested inside the offset scan).
const BRANCH_WIDTH: f64 = 1e-15;
/// Cells in the uniform scan of the offset equation.
const OFFSET_CELLS: usize = 4096;
/// Component values closer than this are the same zero.
pub const DEDUP_TOL: f64 = 1e-7;
/// Upper bound on the reported residual `max |F|`.
pub const RESIDUAL_BOUND: f64 = 1e-9;
/// Tolerance for a scalar residual to count as an exact (tangential) root.
const TOUCH_TOL: f64 = 1e-12;
/// `|max f' - 1/g|` below which the fragmentation search is skipped.
const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Group {
    pub value: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZeroKind {
    Synchronization,
    NoSynchronization,
}

/// A zero of `F`, stored up to permutation of the agents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroPoint {
    /// Distinct component values, ascending, with multiplicities.
    pub groups: Vec<Group>,
    pub kind: ZeroKind,
    /// `max_h |F_h|` at the point.
    pub residual: f64,
    /// Jacobian eigenvalues, ascending.
    pub spectrum: Vec<f64>,
    pub stability: Stability,
    /// The origin of an LP system with `beta == 0`: never reached from a
    /// non-zero start.
    pub excluded_given_nonzero_start: bool,
}

impl ZeroPoint {
    pub fn n_agents(&self) -> usize {
        self.groups.iter().map(|g| g.count).sum()
    }

    /// Canonical `N`-vector with components in ascending order.
    pub fn expanded(&self) -> Vec<f64> {
        self.groups.iter().flat_map(|g| std::iter::repeat_n(g.value, g.count)).collect()
    }

    pub fn is_origin(&self) -> bool {
        self.groups.len() == 1 && self.groups[0].value == 0.0
    }

    fn same_as(&self, other: &ZeroPoint) -> bool {
        self.groups.len() == other.groups.len()
            && self
                .groups
                .iter()
                .zip(&other.groups)
                .all(|(a, b)| a.count == b.count && (a.value - b.value).abs() <= DEDUP_TOL)
    }
}

/// Solutions of `f' = (1 - alpha) / g` and `f' = 1 / g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalAbscissas {
    /// Critical points of `phi` (monotonicity breaks of the sync equation).
    pub xhat: Vec<f64>,
    /// Critical points of `psi` (branch boundaries for fragmented zeros).
    pub xstar12: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnumerationOptions {
    /// Also enumerate zeros using the increasing (middle) branch of `psi`;
    /// those are always linearly unstable.
    pub include_unstable_middle: bool,
    /// Cross-check against the multi-start Newton oracle (`N <= 4` only).
    pub oracle_check: bool,
}

pub fn drift<F: Reinforcement>(p: &ModelParams<F>, z: &[f64]) -> Vec<f64> {
    let mean = z.iter().sum::<f64>() / z.len() as f64;
    let common = p.alpha * mean + p.beta * p.q;
    z.iter().map(|&zh| common + p.gamma() * p.f.eval(zh) - zh).collect()
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Residual of the synchronization equation at `z`; `phi(0) >= 0 >= phi(1)`.
pub fn sync_residual<F: Reinforcement>(p: &ModelParams<F>, z: f64) -> f64 {
    let g = p.gamma();
    p.f.eval(z) - (1.0 - p.alpha) / g * z + p.beta * p.q / g
}

pub fn critical_abscissas<F: Reinforcement>(p: &ModelParams<F>) -> CriticalAbscissas {
    let g = p.gamma();
    CriticalAbscissas {
        xhat: p.f.deriv_level_points((1.0 - p.alpha) / g).unwrap_or_default(),
        xstar12: p.f.deriv_level_points(1.0 / g).unwrap_or_default(),
    }
}

/// Interval `(lower, upper)` that `alpha * N1 / N` must lie in for a stable
/// two-group zero with values `z1 < z3`.
pub fn restriction_bounds<F: Reinforcement>(p: &ModelParams<F>, z1: f64, z3: f64) -> (f64, f64) {
    let g = p.gamma();
    (-(1.0 - p.alpha) + g * p.f.deriv(z3), 1.0 - g * p.f.deriv(z1))
}

/// Roots of the LP synchronization quadratic
/// `(1-a) t z^2 + [(1-a) t x* - b t q - g] z - b q t x* = 0` in `[0, 1]`.
pub fn lp_sync_roots(alpha: f64, beta: f64, q: f64, theta: f64, xstar: f64) -> Vec<f64> {
    let g = 1.0 - alpha - beta;
    let a = (1.0 - alpha) * theta;
    let b = (1.0 - alpha) * theta * xstar - beta * theta * q - g;
    let c = -beta * q * theta * xstar;
    let disc = (b * b - 4.0 * a * c).max(0.0);
    let qq = -0.5 * (b + b.signum() * disc.sqrt());
    let candidates = if qq == 0.0 { vec![-b / (2.0 * a)] } else { vec![qq / a, c / qq] };
    let mut out: Vec<f64> = candidates
        .into_iter()
        .filter(|z| (-TOUCH_TOL..=1.0 + TOUCH_TOL).contains(z))
        .map(|z| z.clamp(0.0, 1.0))
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|x, y| (*x - *y).abs() <= DEDUP_TOL);
    out
}

/// Roots of `phi` on `[0, 1]` by splitting at the critical points of `phi`
/// and bisecting every monotone piece with a sign change.
pub fn sync_roots_by_bisection<F: Reinforcement>(p: &ModelParams<F>) -> Vec<f64> {
    let phi = |z: f64| sync_residual(p, z);
    let mut breaks = vec![0.0];
    breaks.extend(critical_abscissas(p).xhat);
    breaks.push(1.0);
    let mut out = Vec::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (pa, pb) = (phi(a), phi(b));
        if pa.abs() > TOUCH_TOL && pb.abs() > TOUCH_TOL && (pa < 0.0) != (pb < 0.0) {
            out.push(roots::bisect(phi, a, b, BISECT_WIDTH));
        }
    }
    out.extend(breaks.iter().copied().filter(|&x| phi(x).abs() <= TOUCH_TOL));
    out.sort_by(f64::total_cmp);
    out.dedup_by(|x, y| (*x - *y).abs() <= DEDUP_TOL);
    out
}

/// Damped Newton on the group equations
/// `alpha/N sum_k n_k v_k + beta q + g f(v_j) - v_j = 0`.
fn polish_groups<F: Reinforcement>(p: &ModelParams<F>, groups: &mut [Group]) {
    let n = p.n_agents as f64;
    let k = groups.len();
    let residual = |gs: &[Group]| {
        let mean = gs.iter().map(|g| g.count as f64 * g.value).sum::<f64>() / n;
        gs.iter()
            .map(|g| p.alpha * mean + p.beta * p.q + p.gamma() * p.f.eval(g.value) - g.value)
            .collect::<Vec<f64>>()
    };
    let mut res = residual(groups);
    for _ in 0..50 {
        let norm = sup_norm(&res);
        if norm <= 1e-15 {
            break;
        }
        let jac = DMatrix::from_fn(k, k, |i, j| {
            p.alpha * groups[j].count as f64 / n
                + if i == j { p.gamma() * p.f.deriv(groups[i].value) - 1.0 } else { 0.0 }
        });
        let Some(delta) = jac.lu().solve(&-DVector::from_column_slice(&res)) else {
            break;
        };
        let mut step = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial: Vec<Group> = groups
                .iter()
                .zip(delta.iter())
                .map(|(g, d)| Group { value: (g.value + step * d).clamp(0.0, 1.0), count: g.count })
                .collect();
            let trial_res = residual(&trial);
            if sup_norm(&trial_res) < norm {
                groups.copy_from_slice(&trial);
                res = trial_res;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
}

/// Builds a classified zero from group values; groups are merged and sorted.
pub fn make_zero<F: Reinforcement>(p: &ModelParams<F>, groups: Vec<Group>) -> ZeroPoint {
    let mut groups = merge_groups(groups);
    polish_groups(p, &mut groups);
    let groups = merge_groups(groups);
    let z: Vec<f64> = groups.iter().flat_map(|g| std::iter::repeat_n(g.value, g.count)).collect();
    let residual = sup_norm(&drift(p, &z));
    let spectrum = stability::spectrum(&stability::jacobian(p, &z));
    let kind = if groups.len() == 1 { ZeroKind::Synchronization } else { ZeroKind::NoSynchronization };
    ZeroPoint {
        stability: stability::classify(&spectrum),
        groups,
        kind,
        residual,
        spectrum,
        excluded_given_nonzero_start: false,
    }
}

fn merge_groups(mut groups: Vec<Group>) -> Vec<Group> {
    groups.retain(|g| g.count > 0);
    groups.sort_by(|a, b| a.value.total_cmp(&b.value));
    let mut out: Vec<Group> = Vec::with_capacity(groups.len());
    for g in groups {
        match out.last_mut() {
            Some(last) if (g.value - last.value).abs() <= stability::GROUP_TOL => {
                let total = last.count + g.count;
                last.value = (last.value * last.count as f64 + g.value * g.count as f64) / total as f64;
                last.count = total;
            }
            _ => out.push(g),
        }
    }
    out
}

/// All synchronization zeros; never empty.
pub fn sync_zeros<F: Reinforcement>(p: &ModelParams<F>) -> Vec<ZeroPoint> {
    let values = match p.f.family() {
        Some(ReinforcementFunction::Lp { theta, xstar }) => lp_sync_roots(p.alpha, p.beta, p.q, *theta, *xstar),
        _ => sync_roots_by_bisection(p),
    };
    values
        .into_iter()
        .map(|value| make_zero(p, vec![Group { value, count: p.n_agents }]))
        .collect()
}

/// A maximal interval on which `psi(z) = f(z) - z / g` is monotone.
#[derive(Debug, Clone, Copy)]
struct Branch {
    lo: f64,
    hi: f64,
    decreasing: bool,
    /// Range of `psi` over the branch.
    psi_min: f64,
    psi_max: f64,
}

impl Branch {
    /// The unique point of the branch with `psi == c`.
    fn inverse<G: Fn(f64) -> f64>(&self, psi: G, c: f64) -> f64 {
        roots::bisect(|z| psi(z) - c, self.lo, self.hi, BRANCH_WIDTH)
    }
}

fn branches<F: Reinforcement>(p: &ModelParams<F>, breaks: &[f64]) -> Vec<Branch> {
    let slope = 1.0 / p.gamma();
    let psi = |z: f64| p.f.eval(z) - slope * z;
    let mut points = vec![0.0];
    points.extend(breaks.iter().copied().filter(|x| *x > 0.0 && *x < 1.0));
    points.push(1.0);
    let mut out: Vec<Branch> = Vec::new();
    for w in points.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo <= 0.0 {
            continue;
        }
        let decreasing = p.f.deriv(0.5 * (lo + hi)) < slope;
        match out.last_mut() {
            // a tangential touch of f' does not change monotonicity
            Some(last) if last.decreasing == decreasing => last.hi = hi,
            _ => out.push(Branch { lo, hi, decreasing, psi_min: 0.0, psi_max: 0.0 }),
        }
    }
    for b in &mut out {
        let (a, c) = (psi(b.lo), psi(b.hi));
        b.psi_min = a.min(c);
        b.psi_max = a.max(c);
    }
    out
}

/// All splits of `n` agents over the allowed branches (weak compositions)
/// that use at least two branches.
fn compositions(n: usize, allowed: &[bool]) -> Vec<Vec<usize>> {
    fn rec(i: usize, left: usize, allowed: &[bool], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == allowed.len() {
            if left == 0 && cur.iter().filter(|c| **c > 0).count() >= 2 {
                out.push(cur.clone());
            }
            return;
        }
        let max = if allowed[i] { left } else { 0 };
        for k in 0..=max {
            cur.push(k);
            rec(i + 1, left - k, allowed, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, allowed, &mut Vec::new(), &mut out);
    out
}

/// True when `max f'` is within the degeneracy band of `1 / g`.
pub fn fragmentation_degenerate<F: Reinforcement>(p: &ModelParams<F>) -> bool {
    (p.f.max_deriv() - 1.0 / p.gamma()).abs() <= DEGENERACY_TOL
}

/// All zeros with at least two distinct component values.
pub fn nosync_zeros<F: Reinforcement>(p: &ModelParams<F>, include_unstable_middle: bool) -> Vec<ZeroPoint> {
    let n = p.n_agents;
    if n < 2 || fragmentation_degenerate(p) {
        return Vec::new();
    }
    let slope = 1.0 / p.gamma();
    let psi = |z: f64| p.f.eval(z) - slope * z;
    let levels = p.f.deriv_level_points(slope).unwrap_or_default();
    if levels.len() < 2 && !include_unstable_middle {
        return Vec::new();
    }
    let branches = branches(p, &levels);
    let allowed: Vec<bool> = branches.iter().map(|b| b.decreasing || include_unstable_middle).collect();
    let c_lo = -(p.alpha + p.beta) / p.gamma();
    let c_hi = 0.0;

    let found: Vec<Vec<Group>> = compositions(n, &allowed)
        .into_par_iter()
        .flat_map_iter(|counts| {
            let used: Vec<(Branch, usize)> = branches
                .iter()
                .zip(&counts)
                .filter(|(_, k)| **k > 0)
                .map(|(b, k)| (*b, *k))
                .collect();
            let lo = used.iter().map(|(b, _)| b.psi_min).fold(c_lo, f64::max);
            let hi = used.iter().map(|(b, _)| b.psi_max).fold(c_hi, f64::min);
            let offset_eq = |c: f64| {
                let sum: f64 = used.iter().map(|(b, k)| *k as f64 * b.inverse(psi, c)).sum();
                p.alpha * sum / n as f64 + p.beta * p.q + p.gamma() * c
            };
            let offsets = if hi >= lo { roots::scan_roots(offset_eq, lo, hi, OFFSET_CELLS, BISECT_WIDTH) } else { Vec::new() };
            offsets
                .into_iter()
                .map(|c| {
                    used.iter()
                        .map(|(b, k)| Group { value: b.inverse(psi, c), count: *k })
                        .collect::<Vec<Group>>()
                })
                .collect::<Vec<_>>()
        })
        .collect();

    let mut zeros: Vec<ZeroPoint> = Vec::new();
    for groups in found {
        if merge_groups(groups.clone()).len() < 2 {
            continue;
        }
        let zero = make_zero(p, groups);
        if zero.groups.len() >= 2 && !zeros.iter().any(|z| z.same_as(&zero)) {
            zeros.push(zero);
        }
    }
    sort_zeros(&mut zeros);
    zeros
}

fn sort_zeros(zeros: &mut [ZeroPoint]) {
    zeros.sort_by(|a, b| {
        let (ea, eb) = (a.groups.len(), b.groups.len());
        ea.cmp(&eb).then_with(|| {
            for (x, y) in a.expanded().iter().zip(b.expanded()) {
                match x.total_cmp(&y) {
                    std::cmp::Ordering::Equal => continue,
                    o => return o,
                }
            }
            std::cmp::Ordering::Equal
        })
    });
}

/// Synchronization and fragmented zeros, deduplicated and verified.
pub fn all_zeros<F: Reinforcement>(p: &ModelParams<F>, opts: EnumerationOptions) -> Result<Vec<ZeroPoint>> {
    let mut zeros = sync_zeros(p);
    for z in nosync_zeros(p, opts.include_unstable_middle) {
        if !zeros.iter().any(|k| k.same_as(&z)) {
            zeros.push(z);
        }
    }
    if let Some(bad) = zeros.iter().find(|z| z.residual > RESIDUAL_BOUND) {
        return Err(Error::Consistency(format!(
            "zero {:?} has residual {:.3e}",
            bad.groups, bad.residual
        )));
    }
    sort_zeros(&mut zeros);
    if opts.oracle_check && p.n_agents <= 4 {
        let structured = if opts.include_unstable_middle { zeros.clone() } else { all_zeros(p, EnumerationOptions { include_unstable_middle: true, oracle_check: false })? };
        let report = oracle::compare(p, &structured, oracle::DEFAULT_STARTS, 0x5EED);
        if !report.extra.is_empty() {
            return Err(Error::Consistency(format!(
                "multi-start search found zeros missing from the enumeration: {:?}",
                report.extra
            )));
        }
    }
    Ok(zeros)
}

/// Conditions from the sigmoid-family analysis. Numbering follows the LogP
/// family; for Tech, `U2` is always false since `f'(0) = f'(1) = 0` and `U3`
/// is the second uniqueness condition of that family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionFlags {
    pub u1: bool,
    pub u2: bool,
    pub u3: bool,
    pub s1: bool,
    pub s2: bool,
    pub s3: bool,
    pub s4: bool,
    /// Complement of `S1`-`S3`: two branch points with fragmentation possible.
    pub complementary: bool,
    /// `g (f'(0) + f'(1)) >= 1 + (1 - alpha)`: no stable fragmented zero.
    pub cond_cs: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `1/2 * 1` is a synchronization zero.
    pub half_is_zero: bool,
    pub conditions: Option<ConditionFlags>,
    /// `max f'` is within `1e-10` of `1 / g`; the fragmentation search was skipped.
    pub degenerate: bool,
    pub critical: CriticalAbscissas,
}

pub fn diagnostics<F: Reinforcement>(p: &ModelParams<F>) -> Diagnostics {
    let critical = critical_abscissas(p);
    let conditions = match p.f.family() {
        Some(ReinforcementFunction::LogP { .. } | ReinforcementFunction::Tech { .. }) => {
            Some(condition_flags(p, &critical))
        }
        _ => None,
    };
    Diagnostics {
        half_is_zero: sync_residual(p, 0.5).abs() <= TOUCH_TOL,
        conditions,
        degenerate: p.n_agents >= 2 && fragmentation_degenerate(p),
        critical,
    }
}

fn condition_flags<F: Reinforcement>(p: &ModelParams<F>, critical: &CriticalAbscissas) -> ConditionFlags {
    let g = p.gamma();
    let (a, b) = (p.alpha, p.beta);
    let f = &p.f;
    let peak = f.max_deriv();
    let edge = f.deriv(0.0).max(f.deriv(1.0));
    let du = (1.0 - a) / g;
    let ds = 1.0 / g;

    let u1 = peak <= du;
    let u2 = edge >= du;
    let u3 = edge < du && du < peak && {
        match critical.xhat[..] {
            [x1, x2] => sync_residual(p, x1) > 0.0 || sync_residual(p, x2) < 0.0,
            _ => false,
        }
    };

    let s1 = peak <= ds;
    let s2 = edge >= ds;
    let two_points = edge < ds && ds < peak;
    let (s3, complementary) = match (two_points, &critical.xstar12[..]) {
        (true, [x1, x2]) => {
            let left = f.eval(*x1) >= x1 * ds;
            let right = f.eval(*x2) <= (x2 - (a + b)) * ds;
            (left || right, !(left || right))
        }
        _ => (false, false),
    };
    let cond_cs = g * (f.deriv(0.0) + f.deriv(1.0)) >= 1.0 + (1.0 - a);
    ConditionFlags { u1, u2, u3, s1, s2, s3, s4: complementary && cond_cs, complementary, cond_cs }
}

#[cfg(test)]
mod tests;

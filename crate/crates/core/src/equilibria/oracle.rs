//! Independent zero search: projected damped Newton on the full `N`-vector
//! from quasi-random starts. Used only to cross-check the enumeration.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{drift, sup_norm, ZeroPoint};
use crate::dynamics::ModelParams;
use crate::reinforcement::Reinforcement;

pub const DEFAULT_STARTS: usize = 10_000;
/// Residual at which a Newton iterate is accepted as a zero.
const ACCEPT_RESIDUAL: f64 = 1e-10;
/// Two oracle points (sorted) within this max-distance are the same zero.
const ORACLE_DEDUP: f64 = 1e-6;
const MAX_ITER: usize = 100;

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    /// Distinct zeros found by the search, each sorted ascending.
    pub found: Vec<Vec<f64>>,
    /// Found zeros with no match in the enumeration.
    pub extra: Vec<Vec<f64>>,
    /// Enumerated zeros the search never reached.
    pub missing: Vec<Vec<f64>>,
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * scale;
        i /= base;
        scale *= inv;
    }
    out
}

/// Point `i` of the Halton sequence in `[0,1]^dim`, shifted by `offset`
/// (Cranley-Patterson rotation) to avoid the lattice hitting exact zeros.
fn halton(i: u64, dim: usize, offset: u64) -> Vec<f64> {
    (0..dim)
        .map(|k| {
            let shift = (crate::dynamics::mix64(offset.wrapping_add(k as u64)) >> 11) as f64 / (1u64 << 53) as f64;
            (radical_inverse(i + 1, PRIMES[k % PRIMES.len()]) + shift).fract()
        })
        .collect()
}

fn newton<F: Reinforcement>(p: &ModelParams<F>, mut z: Vec<f64>) -> Option<Vec<f64>> {
    let n = z.len();
    let a = p.alpha / n as f64;
    let mut res = drift(p, &z);
    for _ in 0..MAX_ITER {
        let norm = sup_norm(&res);
        if norm <= 1e-14 {
            break;
        }
        let jac = DMatrix::from_fn(n, n, |i, j| a + if i == j { p.gamma() * p.f.deriv(z[i]) - 1.0 } else { 0.0 });
        let delta = jac.lu().solve(&-DVector::from_column_slice(&res))?;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = z.iter().zip(delta.iter()).map(|(x, d)| (x + step * d).clamp(0.0, 1.0)).collect();
            let trial_res = drift(p, &trial);
            if sup_norm(&trial_res) < norm {
                z = trial;
                res = trial_res;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (sup_norm(&res) <= ACCEPT_RESIDUAL).then(|| {
        z.sort_by(f64::total_cmp);
        z
    })
}

fn max_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Distinct zeros of `F` reached from `starts` quasi-random starting points.
pub fn multi_start_zeros<F: Reinforcement>(p: &ModelParams<F>, starts: usize, offset: u64) -> Vec<Vec<f64>> {
    let n = p.n_agents;
    let hits: Vec<Vec<f64>> = (0..starts as u64)
        .into_par_iter()
        .filter_map(|i| newton(p, halton(i, n, offset)))
        .collect();
    let mut found: Vec<Vec<f64>> = Vec::new();
    for z in hits {
        if !found.iter().any(|f| max_dist(f, &z) <= ORACLE_DEDUP) {
            found.push(z);
        }
    }
    found.sort_by(|a, b| a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    found
}

/// Multi-start search compared against an enumerated zero list.
pub fn compare<F: Reinforcement>(p: &ModelParams<F>, zeros: &[ZeroPoint], starts: usize, offset: u64) -> OracleReport {
    let found = multi_start_zeros(p, starts, offset);
    let expanded: Vec<Vec<f64>> = zeros.iter().map(ZeroPoint::expanded).collect();
    let extra = found
        .iter()
        .filter(|f| !expanded.iter().any(|e| max_dist(e, f) <= ORACLE_DEDUP))
        .cloned()
        .collect();
    let missing = expanded
        .iter()
        .filter(|e| !found.iter().any(|f| max_dist(e, f) <= ORACLE_DEDUP))
        .cloned()
        .collect();
    OracleReport { found, extra, missing }
}

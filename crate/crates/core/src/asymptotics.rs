//! Fluctuations around a strictly stable zero `z_inf`.
//!
//! With `lambda` the smallest eigenvalue of `-J(z_inf)`:
//! `sqrt(n)` Gaussian scaling when `lambda > 1/2`, `sqrt(n / log n)` at
//! `lambda = 1/2`, and `n^lambda` scaling below that. In the first regime the
//! limit covariance solves the Lyapunov equation
//! `(J + I/2) S + S (J + I/2) + Gamma = 0`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{self, InitSpec, ModelParams};
use crate::equilibria::{ZeroKind, ZeroPoint};
use crate::reinforcement::Reinforcement;
use crate::stability::{self, Stability};
use crate::{Error, Result};

/// `|lambda - 1/2|` below which the logarithmic regime is reported.
pub const LOG_REGIME_TOL: f64 = 1e-12;
/// Terminal Euclidean distance to the zero for a run to enter the
/// empirical covariance.
pub const QUALIFY_RADIUS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    GaussianSqrtN,
    GaussianSqrtNOverLogN,
    PolynomialNLambda,
}

impl Regime {
    pub fn from_lambda(lambda: f64) -> Regime {
        if (lambda - 0.5).abs() <= LOG_REGIME_TOL {
            Regime::GaussianSqrtNOverLogN
        } else if lambda > 0.5 {
            Regime::GaussianSqrtN
        } else {
            Regime::PolynomialNLambda
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltPrediction {
    pub lambda: f64,
    pub regime: Regime,
    /// Limit covariance, row-major; present in the `sqrt(n)` regime.
    pub sigma: Option<Vec<Vec<f64>>>,
    /// The covariance of a fragmented zero uses the diagonal
    /// `Gamma_hh = z_h (1 - z_h)`, which is not covered by a theorem.
    pub sigma_unverified: bool,
}

fn require_strict(zero: &ZeroPoint) -> Result<()> {
    if zero.stability != Stability::StrictlyStable {
        let lambda = -zero.spectrum.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        return Err(Error::NotStrictlyStable { lambda });
    }
    Ok(())
}

/// Smallest eigenvalue of `-J` at a strictly stable zero.
pub fn clt_exponent<F: Reinforcement>(p: &ModelParams<F>, zero: &ZeroPoint) -> Result<f64> {
    require_strict(zero)?;
    let derivs: Vec<f64> = zero.groups.iter().map(|g| p.f.deriv(g.value)).collect();
    let equal = derivs.windows(2).all(|w| (w[0] - w[1]).abs() <= 1e-12);
    if equal {
        Ok((1.0 - p.alpha) - p.gamma() * derivs[0])
    } else {
        let spec = stability::jacobian(p, &zero.expanded());
        Ok(-stability::eigen_general(&spec).last().copied().unwrap_or(f64::NAN))
    }
}

/// `S = z(1 - z) (-2J - I)^{-1}` at a synchronization zero `z * 1`.
/// `gamma_diag` overrides `z(1 - z)`.
pub fn clt_sigma<F: Reinforcement>(p: &ModelParams<F>, zero: &ZeroPoint, gamma_diag: Option<f64>) -> Result<DMatrix<f64>> {
    if zero.kind != ZeroKind::Synchronization {
        return Err(Error::Precondition("closed-form covariance needs a synchronization zero".into()));
    }
    let lambda = clt_exponent(p, zero)?;
    if lambda <= 0.5 {
        return Err(Error::SlowRegime { lambda });
    }
    let z = zero.groups[0].value;
    let g = gamma_diag.unwrap_or(z * (1.0 - z));
    let j = stability::jacobian(p, &zero.expanded()).dense();
    let n = j.nrows();
    let m = -2.0 * j - DMatrix::identity(n, n);
    let chol = m
        .cholesky()
        .ok_or_else(|| Error::Consistency("-2J - I is not positive definite".into()))?;
    Ok(chol.inverse() * g)
}

/// Solution of `(J + I/2) S + S (J + I/2) + diag(gamma) = 0` at any point
/// `z`, through the eigenbasis of the symmetric `J`.
pub fn lyapunov_sigma<F: Reinforcement>(p: &ModelParams<F>, z: &[f64], gamma: &[f64]) -> Result<DMatrix<f64>> {
    let spec = stability::jacobian(p, z);
    let (lam, q) = stability::symmetric_eigen(&spec.dense());
    if let Some(&top) = lam.last() {
        if -top <= 0.5 {
            return Err(Error::SlowRegime { lambda: -top });
        }
    }
    let gam = DMatrix::from_diagonal(&DVector::from_column_slice(gamma));
    let rotated = q.transpose() * gam * &q;
    let n = z.len();
    let solved = DMatrix::from_fn(n, n, |i, j| -rotated[(i, j)] / (lam[i] + lam[j] + 1.0));
    Ok(&q * solved * q.transpose())
}

/// Exponent, regime and (when available) covariance at a strictly stable zero.
pub fn predict<F: Reinforcement>(p: &ModelParams<F>, zero: &ZeroPoint) -> Result<CltPrediction> {
    let lambda = clt_exponent(p, zero)?;
    let regime = Regime::from_lambda(lambda);
    let sync = zero.kind == ZeroKind::Synchronization;
    let sigma = if regime == Regime::GaussianSqrtN {
        let z = zero.expanded();
        let m = if sync {
            clt_sigma(p, zero, None)?
        } else {
            let gamma: Vec<f64> = z.iter().map(|x| x * (1.0 - x)).collect();
            lyapunov_sigma(p, &z, &gamma)?
        };
        Some(to_rows(&m))
    } else {
        None
    };
    Ok(CltPrediction { lambda, regime, sigma, sigma_unverified: !sync })
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltCheck {
    pub lambda: f64,
    pub empirical_cov: Vec<Vec<f64>>,
    pub predicted_cov: Vec<Vec<f64>>,
    /// Largest relative error over the diagonal entries.
    pub max_rel_err: f64,
    /// Largest absolute error over all entries.
    pub max_abs_err: f64,
    pub qualified: usize,
    pub replications: usize,
}

/// Runs `replications` systems from `z_inf * 1` for `horizon` steps and
/// compares the sample covariance of `sqrt(T) (Z_T - z_inf)` with
/// [`clt_sigma`]. Runs ending farther than [`QUALIFY_RADIUS`] from the zero
/// are discarded.
pub fn clt_empirical_check<F: Reinforcement>(
    p: &ModelParams<F>,
    zero: &ZeroPoint,
    horizon: u64,
    replications: usize,
    base_seed: u64,
) -> Result<CltCheck> {
    let predicted = clt_sigma(p, zero, None)?;
    let lambda = clt_exponent(p, zero)?;
    let target = zero.expanded();
    let reports = dynamics::replicate(p, &InitSpec::Fixed(target.clone()), horizon, replications, base_seed)?;
    let scale = (horizon as f64).sqrt();
    let samples: Vec<Vec<f64>> = reports
        .iter()
        .map(|r| &r.terminal_state.z)
        .filter(|z| euclid(z, &target) <= QUALIFY_RADIUS)
        .map(|z| z.iter().zip(&target).map(|(a, b)| scale * (a - b)).collect())
        .collect();
    let qualified = samples.len();
    if 2 * qualified < replications || qualified < 2 {
        return Err(Error::InsufficientSample { qualified, total: replications });
    }
    let n = target.len();
    let k = qualified as f64;
    let mean: Vec<f64> = (0..n).map(|i| samples.iter().map(|s| s[i]).sum::<f64>() / k).collect();
    let cov = DMatrix::from_fn(n, n, |i, j| {
        samples.iter().map(|s| (s[i] - mean[i]) * (s[j] - mean[j])).sum::<f64>() / (k - 1.0)
    });
    let max_rel_err = (0..n)
        .map(|i| ((cov[(i, i)] - predicted[(i, i)]) / predicted[(i, i)]).abs())
        .fold(0.0, f64::max);
    let max_abs_err = (&cov - &predicted).amax();
    Ok(CltCheck {
        lambda,
        empirical_cov: to_rows(&cov),
        predicted_cov: to_rows(&predicted),
        max_rel_err,
        max_abs_err,
        qualified,
        replications,
    })
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

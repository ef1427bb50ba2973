//! Jacobian spectra of the drift field and stability classes of its zeros.
//!
//! The Jacobian of `F` at `z` is the symmetric rank-one update
//! `(alpha / N) * ones + diag(d)` with `d_i = (1 - alpha - beta) f'(z_i) - 1`.
//! One- and two-valued `d` have closed-form spectra; anything else goes
//! through a cyclic Jacobi diagonalization.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dynamics::ModelParams;
use crate::equilibria::ZeroPoint;
use crate::reinforcement::{Reinforcement, ReinforcementFunction};
use crate::{Error, Result};

/// Eigenvalues within this band around zero count as zero.
pub const CLASSIFICATION_MARGIN: f64 = 1e-9;

/// Diagonal entries closer than this are treated as one group.
pub const GROUP_TOL: f64 = 1e-9;

/// Distinct groups closer than this are ambiguous; the dense solver is used.
const AMBIGUOUS_GAP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stability {
    StrictlyStable,
    Stable,
    LinearlyUnstable,
    /// Every eigenvalue is positive; a special case of linear instability.
    Repulsive,
}

impl Stability {
    pub fn is_stable(self) -> bool {
        matches!(self, Self::StrictlyStable | Self::Stable)
    }

    pub fn is_linearly_unstable(self) -> bool {
        matches!(self, Self::LinearlyUnstable | Self::Repulsive)
    }
}

/// `(alpha / N) * ones + diag(d)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobianSpec {
    pub alpha_over_n: f64,
    pub d: Vec<f64>,
}

impl JacobianSpec {
    pub fn dim(&self) -> usize {
        self.d.len()
    }

    /// Rank-one weight times `N`, i.e. `alpha`.
    pub fn alpha(&self) -> f64 {
        self.alpha_over_n * self.dim() as f64
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| self.alpha_over_n + if i == j { self.d[i] } else { 0.0 })
    }

    /// Characteristic polynomial
    /// `prod(d_i - x) + c^2 sum_i prod_{j != i}(d_j - x)`.
    pub fn char_poly(&self, x: f64) -> f64 {
        let prod: f64 = self.d.iter().map(|d| d - x).product();
        let sum: f64 = (0..self.dim())
            .map(|i| {
                self.d
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != i)
                    .map(|(_, d)| d - x)
                    .product::<f64>()
            })
            .sum();
        prod + self.alpha_over_n * sum
    }

    /// Distinct diagonal values with their multiplicities, ascending.
    fn groups(&self) -> Vec<(f64, usize)> {
        let mut sorted = self.d.clone();
        sorted.sort_by(f64::total_cmp);
        let mut groups: Vec<(f64, usize)> = Vec::new();
        for d in sorted {
            match groups.last_mut() {
                Some((v, k)) if (d - *v).abs() <= GROUP_TOL => *k += 1,
                _ => groups.push((d, 1)),
            }
        }
        groups
    }
}

pub fn jacobian<F: Reinforcement>(p: &ModelParams<F>, z: &[f64]) -> JacobianSpec {
    JacobianSpec {
        alpha_over_n: p.alpha / z.len() as f64,
        d: z.iter().map(|&zi| p.gamma() * p.f.deriv(zi) - 1.0).collect(),
    }
}

/// Spectrum when all `d_i` coincide: `d` with multiplicity `N - 1` and
/// `d + alpha` once.
pub fn eigen_sync(spec: &JacobianSpec) -> Result<(f64, f64)> {
    let d = *spec.d.first().ok_or_else(|| Error::Precondition("empty Jacobian".into()))?;
    if spec.d.iter().any(|x| (x - d).abs() > 1e-12) {
        return Err(Error::Precondition("diagonal entries are not all equal".into()));
    }
    Ok((d, d + spec.alpha()))
}

/// Spectrum when `d` takes exactly two values `D1 < D2` with counts `N1`,
/// `N2`: `D1` (`N1 - 1` times), `D2` (`N2 - 1` times) and the two roots of
/// `x^2 - (D1 + D2 + alpha) x + D1 D2 + c^2 (N1 D2 + N2 D1)`.
pub fn eigen_two_group(spec: &JacobianSpec) -> Result<Vec<f64>> {
    let groups = spec.groups();
    let [(d1, n1), (d2, n2)] = groups[..] else {
        return Err(Error::Precondition(format!(
            "expected two distinct diagonal values, found {}",
            groups.len()
        )));
    };
    let c2 = spec.alpha_over_n;
    let b = d1 + d2 + spec.alpha();
    let c = d1 * d2 + c2 * (n1 as f64 * d2 + n2 as f64 * d1);
    let disc = (b * b - 4.0 * c).max(0.0);
    // numerically stable quadratic roots
    let qq = -0.5 * (-b - b.signum() * disc.sqrt());
    let (r1, r2) = if qq == 0.0 { (0.0, 0.0) } else { (qq, c / qq) };
    let mut out = Vec::with_capacity(spec.dim());
    out.extend(std::iter::repeat_n(d1, n1 - 1));
    out.extend(std::iter::repeat_n(d2, n2 - 1));
    out.push(r1);
    out.push(r2);
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Eigenvalues of the dense matrix, ascending.
pub fn eigen_general(spec: &JacobianSpec) -> Vec<f64> {
    symmetric_eigen(&spec.dense()).0
}

/// Spectrum through the cheapest exact route for the structure of `d`.
pub fn spectrum(spec: &JacobianSpec) -> Vec<f64> {
    let groups = spec.groups();
    let ambiguous = groups.windows(2).any(|w| w[1].0 - w[0].0 < AMBIGUOUS_GAP);
    match groups.len() {
        _ if ambiguous => eigen_general(spec),
        1 => {
            let d = groups[0].0;
            let mut out = vec![d; spec.dim() - 1];
            out.push(d + spec.alpha());
            out.sort_by(f64::total_cmp);
            out
        }
        2 => eigen_two_group(spec).unwrap_or_else(|_| eigen_general(spec)),
        _ => eigen_general(spec),
    }
}

/// Cyclic Jacobi diagonalization of a symmetric matrix. Returns ascending
/// eigenvalues and the matching orthonormal eigenvectors as columns.
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let off = |a: &DMatrix<f64>| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    for _sweep in 0..100 {
        if off(&a) <= 1e-13 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

pub fn classify(spectrum: &[f64]) -> Stability {
    let eps = CLASSIFICATION_MARGIN;
    if !spectrum.is_empty() && spectrum.iter().all(|&l| l > eps) {
        Stability::Repulsive
    } else if spectrum.iter().any(|&l| l > eps) {
        Stability::LinearlyUnstable
    } else if spectrum.iter().all(|&l| l < -eps) {
        Stability::StrictlyStable
    } else {
        Stability::Stable
    }
}

/// Predicted support of the limit: drops linearly unstable zeros when
/// `f(0) > 0` and `f(1) < 1`. For the LP family (`f(0) = 0`) the origin is
/// kept but flagged as unreachable from a non-zero start whenever another
/// zero exists.
pub fn exclude_unstable<F: Reinforcement>(p: &ModelParams<F>, zeros: &[ZeroPoint]) -> Vec<ZeroPoint> {
    if p.f.eval(0.0) > 0.0 && p.f.eval(1.0) < 1.0 {
        return zeros.iter().filter(|z| !z.stability.is_linearly_unstable()).cloned().collect();
    }
    let mut out = zeros.to_vec();
    if let Some(ReinforcementFunction::Lp { .. }) = p.f.family() {
        if out.len() > 1 {
            for z in out.iter_mut().filter(|z| z.is_origin()) {
                z.excluded_given_nonzero_start = true;
            }
        }
    }
    out
}

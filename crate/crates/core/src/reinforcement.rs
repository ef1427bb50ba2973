//! Reinforcement (urn) functions `f: [0, 1] -> [0, 1]`.
//!
//! Every function carries its exact derivative and a primitive normalized so
//! that `primitive(0) == 0`. The simulation and analysis code is generic over
//! the [`Reinforcement`] trait so that tests can plug in simple doubles
//! (constant or identity maps) that the validated [`ReinforcementFunction`]
//! family would reject.

use serde::{Deserialize, Serialize};

use crate::roots;
use crate::{Error, Result};

/// Tolerance on arguments slightly outside `[0, 1]`.
pub const DOMAIN_TOL: f64 = 1e-12;

/// When `|max f' - level| <= TANGENCY_TOL` the level set is the single
/// maximizer of `f'`.
pub const TANGENCY_TOL: f64 = 1e-12;

const VALIDATION_GRID: usize = 10_000;
const LEVEL_SCAN_GRID: usize = 10_000;

/// A reinforcement function with analytic derivative and primitive.
pub trait Reinforcement: Send + Sync {
    fn eval(&self, x: f64) -> f64;

    fn deriv(&self, x: f64) -> f64;

    /// Antiderivative of [`Reinforcement::eval`] with `primitive(0) == 0`.
    fn primitive(&self, x: f64) -> f64;

    /// Maximum of `f'` over `[0, 1]`.
    fn max_deriv(&self) -> f64 {
        numeric_max(|x| self.deriv(x))
    }

    /// All `x` in `[0, 1]` with `f'(x) == level`, sorted ascending.
    fn deriv_level_points(&self, level: f64) -> Result<Vec<f64>> {
        if !(level > 0.0) {
            return Err(Error::InvalidLevel(level));
        }
        Ok(scan_level_points(|x| self.deriv(x), level))
    }

    /// The named family, when there is one; enables closed-form shortcuts.
    fn family(&self) -> Option<&ReinforcementFunction> {
        None
    }
}

/// The supported reinforcement families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionSpec", into = "FunctionSpec")]
pub enum ReinforcementFunction {
    /// Linear probability rule `x / (theta (x + xstar))`.
    Lp { theta: f64, xstar: f64 },
    /// Logit rule `1 / (1 + exp(-theta (x - xstar)))`.
    LogP { theta: f64, xstar: f64 },
    /// Technology adoption cubic `(1 - theta) + (2 theta - 1)(3x^2 - 2x^3)`.
    Tech { theta: f64 },
    /// `sum_k c_k x^k`, validated numerically on a dense grid.
    Polynomial { coeffs: Vec<f64> },
}

impl ReinforcementFunction {
    pub fn lp(theta: f64, xstar: f64) -> Result<Self> {
        let t = theta * xstar;
        if !(theta > 0.0 && theta.is_finite() && xstar.is_finite()) {
            return Err(Error::InvalidFunction(format!("lp: theta must be positive, got {theta}")));
        }
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::InvalidFunction(format!(
                "lp: theta * xstar must lie in (0, 1], got {t}"
            )));
        }
        // theta * xstar >= 1 - theta keeps f(1) <= 1; allow rounding slack
        if t < 1.0 - theta - 1e-12 {
            return Err(Error::InvalidFunction(format!(
                "lp: theta * xstar = {t} is below 1 - theta = {}",
                1.0 - theta
            )));
        }
        Ok(Self::Lp { theta, xstar })
    }

    pub fn logp(theta: f64, xstar: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::InvalidFunction(format!("logp: theta must be positive, got {theta}")));
        }
        if !(xstar > 0.0 && xstar < 1.0) {
            return Err(Error::InvalidFunction(format!("logp: xstar must lie in (0, 1), got {xstar}")));
        }
        Ok(Self::LogP { theta, xstar })
    }

    pub fn tech(theta: f64) -> Result<Self> {
        if !(theta > 0.5 && theta < 1.0) {
            return Err(Error::InvalidFunction(format!("tech: theta must lie in (1/2, 1), got {theta}")));
        }
        Ok(Self::Tech { theta })
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidFunction("poly: coefficients must be finite and non-empty".into()));
        }
        let f = Self::Polynomial { coeffs };
        let mut prev = f.eval(0.0);
        for i in 0..=VALIDATION_GRID {
            let x = i as f64 / VALIDATION_GRID as f64;
            let y = f.eval(x);
            if !(-DOMAIN_TOL..=1.0 + DOMAIN_TOL).contains(&y) {
                return Err(Error::InvalidFunction(format!("poly: f({x}) = {y} leaves [0, 1]")));
            }
            if i > 0 && y <= prev {
                return Err(Error::InvalidFunction(format!("poly: not strictly increasing near x = {x}")));
            }
            if i > 0 && i < VALIDATION_GRID && f.deriv(x) <= 0.0 {
                return Err(Error::InvalidFunction(format!("poly: f'({x}) <= 0")));
            }
            prev = y;
        }
        Ok(f)
    }

    /// Point of maximal slope for the sigmoid families (`xstar` for LogP,
    /// `1/2` for Tech).
    pub fn sigmoid_center(&self) -> Option<f64> {
        match self {
            Self::LogP { xstar, .. } => Some(*xstar),
            Self::Tech { .. } => Some(0.5),
            _ => None,
        }
    }

    /// `f(x)` with a domain check.
    pub fn checked_eval(&self, x: f64) -> Result<f64> {
        check_domain(x).map(|x| self.eval(x))
    }

    /// `f'(x)` with a domain check.
    pub fn checked_deriv(&self, x: f64) -> Result<f64> {
        check_domain(x).map(|x| self.deriv(x))
    }

    /// `Phi(x)` with a domain check.
    pub fn checked_primitive(&self, x: f64) -> Result<f64> {
        check_domain(x).map(|x| self.primitive(x))
    }
}

fn check_domain(x: f64) -> Result<f64> {
    if (-DOMAIN_TOL..=1.0 + DOMAIN_TOL).contains(&x) {
        Ok(x.clamp(0.0, 1.0))
    } else {
        Err(Error::Domain { value: x })
    }
}

/// `ln(1 + e^y)` without overflow.
fn softplus(y: f64) -> f64 {
    y.max(0.0) + (-y.abs()).exp().ln_1p()
}

fn logistic(theta: f64, xstar: f64, x: f64) -> f64 {
    let u = theta * (x - xstar);
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

impl Reinforcement for ReinforcementFunction {
    fn eval(&self, x: f64) -> f64 {
        match self {
            Self::Lp { theta, xstar } => x / (theta * (x + xstar)),
            Self::LogP { theta, xstar } => logistic(*theta, *xstar, x),
            Self::Tech { theta } => (1.0 - theta) + (2.0 * theta - 1.0) * x * x * (3.0 - 2.0 * x),
            Self::Polynomial { coeffs } => horner(coeffs, x),
        }
    }

    fn deriv(&self, x: f64) -> f64 {
        match self {
            Self::Lp { theta, xstar } => xstar / (theta * (x + xstar).powi(2)),
            Self::LogP { theta, xstar } => {
                let s = logistic(*theta, *xstar, x);
                theta * s * (1.0 - s)
            }
            Self::Tech { theta } => 6.0 * (2.0 * theta - 1.0) * x * (1.0 - x),
            Self::Polynomial { coeffs } => coeffs
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, c)| acc * x + k as f64 * c),
        }
    }

    fn primitive(&self, x: f64) -> f64 {
        match self {
            Self::Lp { theta, xstar } => (x - xstar * (x / xstar).ln_1p()) / theta,
            Self::LogP { theta, xstar } => {
                x + (softplus(-theta * (x - xstar)) - softplus(theta * xstar)) / theta
            }
            Self::Tech { theta } => {
                (1.0 - theta) * x + (2.0 * theta - 1.0) * (1.0 - 0.5 * x) * x.powi(3)
            }
            Self::Polynomial { coeffs } => {
                coeffs.iter().enumerate().rev().fold(0.0, |acc, (k, c)| acc * x + c / (k + 1) as f64) * x
            }
        }
    }

    fn max_deriv(&self) -> f64 {
        match self {
            Self::Lp { .. } => self.deriv(0.0),
            // f' peaks at xstar, inside (0, 1)
            Self::LogP { theta, .. } => theta / 4.0,
            Self::Tech { theta } => 3.0 * theta - 1.5,
            Self::Polynomial { .. } => numeric_max(|x| self.deriv(x)),
        }
    }

    fn deriv_level_points(&self, level: f64) -> Result<Vec<f64>> {
        if !(level > 0.0) {
            return Err(Error::InvalidLevel(level));
        }
        let max = self.max_deriv();
        let points = match self {
            Self::Lp { theta, xstar } => {
                // f' strictly decreasing: at most one solution
                let x = (xstar / (theta * level)).sqrt() - xstar;
                if (0.0..=1.0).contains(&x) {
                    vec![x]
                } else {
                    Vec::new()
                }
            }
            Self::Tech { theta } => {
                if (max - level).abs() <= TANGENCY_TOL {
                    vec![0.5]
                } else if level > max {
                    Vec::new()
                } else {
                    // 6(2 theta - 1) x (1 - x) = level
                    let disc = 1.0 - 4.0 * level / (6.0 * (2.0 * theta - 1.0));
                    let half_width = 0.5 * disc.sqrt();
                    vec![0.5 - half_width, 0.5 + half_width]
                }
            }
            Self::LogP { theta, xstar } => {
                if (max - level).abs() <= TANGENCY_TOL {
                    vec![*xstar]
                } else if level > max {
                    Vec::new()
                } else {
                    // y = exp(-theta (x - xstar)) solves p y^2 + (2p - 1) y + p = 0;
                    // the two roots are reciprocal so the solutions are symmetric
                    let p = level / theta;
                    let y = ((1.0 - 2.0 * p) + (1.0 - 4.0 * p).sqrt()) / (2.0 * p);
                    let offset = y.ln() / theta;
                    [xstar - offset, xstar + offset]
                        .into_iter()
                        .filter(|x| (0.0..=1.0).contains(x))
                        .collect()
                }
            }
            Self::Polynomial { .. } => {
                if (max - level).abs() <= TANGENCY_TOL {
                    return Ok(merge_close(scan_level_points(|x| self.deriv(x), max), 1e-5));
                }
                scan_level_points(|x| self.deriv(x), level)
            }
        };
        Ok(points)
    }

    fn family(&self) -> Option<&ReinforcementFunction> {
        Some(self)
    }
}

/// Maximum of a smooth `g` over `[0, 1]`: dense grid, then golden-section
/// refinement around the best node.
fn numeric_max<G: Fn(f64) -> f64>(g: G) -> f64 {
    let step = 1.0 / LEVEL_SCAN_GRID as f64;
    let coarse = (0..=LEVEL_SCAN_GRID)
        .map(|i| i as f64 * step)
        .max_by(|a, b| g(*a).total_cmp(&g(*b)))
        .unwrap_or(0.0);
    let refined = roots::golden_min(|x| -g(x), (coarse - step).max(0.0), (coarse + step).min(1.0), 1e-13);
    g(refined).max(g(coarse))
}

/// Numerical level set of a smooth `g` on `[0, 1]`: sign changes of
/// `g - level` on a dense grid, plus tangential touches found by refining the
/// local extrema of `|g - level|`.
pub(crate) fn scan_level_points<G: Fn(f64) -> f64>(g: G, level: f64) -> Vec<f64> {
    let h = |x: f64| g(x) - level;
    let mut found = roots::scan_roots(h, 0.0, 1.0, LEVEL_SCAN_GRID, 1e-15);
    let step = 1.0 / LEVEL_SCAN_GRID as f64;
    for i in 1..LEVEL_SCAN_GRID {
        let (a, x, b) = ((i - 1) as f64 * step, i as f64 * step, (i + 1) as f64 * step);
        let (ha, hx, hb) = (h(a).abs(), h(x).abs(), h(b).abs());
        if hx <= ha && hx <= hb && hx < 1e-6 {
            let m = roots::golden_min(|t| h(t).abs(), a, b, 1e-14);
            if h(m).abs() <= TANGENCY_TOL {
                found.push(m);
            }
        }
    }
    found.sort_by(f64::total_cmp);
    found.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    found
}

/// Replaces runs of points closer than `tol` by their midpoint.
fn merge_close(points: Vec<f64>, tol: f64) -> Vec<f64> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for x in points {
        match out.last_mut() {
            Some(run) if x - run[run.len() - 1] < tol => run.push(x),
            _ => out.push(vec![x]),
        }
    }
    out.into_iter().map(|run| 0.5 * (run[0] + run[run.len() - 1])).collect()
}

/// Configuration form: `{"kind": "lp"|"logp"|"tech"|"poly", ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xstar: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<f64>>,
}

impl TryFrom<FunctionSpec> for ReinforcementFunction {
    type Error = Error;

    fn try_from(spec: FunctionSpec) -> Result<Self> {
        let need = |v: Option<f64>, name: &str| {
            v.ok_or_else(|| Error::InvalidFunction(format!("{}: missing `{name}`", spec.kind)))
        };
        match spec.kind.as_str() {
            "lp" => Self::lp(need(spec.theta, "theta")?, need(spec.xstar, "xstar")?),
            "logp" => Self::logp(need(spec.theta, "theta")?, need(spec.xstar, "xstar")?),
            "tech" => Self::tech(need(spec.theta, "theta")?),
            "poly" => Self::polynomial(
                spec.coeffs
                    .clone()
                    .ok_or_else(|| Error::InvalidFunction("poly: missing `coeffs`".into()))?,
            ),
            other => Err(Error::InvalidFunction(format!("unknown kind `{other}`"))),
        }
    }
}

impl From<ReinforcementFunction> for FunctionSpec {
    fn from(f: ReinforcementFunction) -> Self {
        let blank = |kind: &str| FunctionSpec { kind: kind.into(), theta: None, xstar: None, coeffs: None };
        match f {
            ReinforcementFunction::Lp { theta, xstar } => {
                FunctionSpec { theta: Some(theta), xstar: Some(xstar), ..blank("lp") }
            }
            ReinforcementFunction::LogP { theta, xstar } => {
                FunctionSpec { theta: Some(theta), xstar: Some(xstar), ..blank("logp") }
            }
            ReinforcementFunction::Tech { theta } => FunctionSpec { theta: Some(theta), ..blank("tech") },
            ReinforcementFunction::Polynomial { coeffs } => FunctionSpec { coeffs: Some(coeffs), ..blank("poly") },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn families() -> Vec<ReinforcementFunction> {
        vec![
            ReinforcementFunction::lp(0.9, 1.0 / 3.0).unwrap(),
            ReinforcementFunction::lp(1.5, 0.2).unwrap(),
            ReinforcementFunction::logp(12.0, 0.47).unwrap(),
            ReinforcementFunction::logp(5.0, 0.6).unwrap(),
            ReinforcementFunction::logp(30.0, 0.5).unwrap(),
            ReinforcementFunction::tech(0.9).unwrap(),
            ReinforcementFunction::tech(0.99).unwrap(),
            ReinforcementFunction::polynomial(vec![0.1, 0.2, 0.9, -0.4]).unwrap(),
        ]
    }

    #[test]
    fn eval_examples() {
        let lp = ReinforcementFunction::lp(0.9, 1.0 / 3.0).unwrap();
        assert_eq!(lp.checked_eval(0.0).unwrap(), 0.0);
        let logp = ReinforcementFunction::logp(12.0, 0.47).unwrap();
        assert!((logp.checked_eval(0.47).unwrap() - 0.5).abs() < 1e-15);
        let tech = ReinforcementFunction::tech(0.9).unwrap();
        assert!((tech.checked_eval(0.5).unwrap() - 0.5).abs() < 1e-15);
        assert!((tech.checked_eval(1.0).unwrap() - 0.9).abs() < 1e-15);
    }

    #[test]
    fn eval_rejects_out_of_domain() {
        let tech = ReinforcementFunction::tech(0.9).unwrap();
        assert!(matches!(tech.checked_eval(1.0 + 1e-9), Err(Error::Domain { .. })));
        assert!(matches!(tech.checked_eval(-1e-6), Err(Error::Domain { .. })));
        assert!(tech.checked_eval(1.0 + 1e-13).is_ok());
    }

    #[test]
    fn construction_rejects_invalid_parameters() {
        assert!(ReinforcementFunction::lp(0.9, 1.2).is_err()); // theta x* > 1
        assert!(ReinforcementFunction::lp(0.5, 0.2).is_err()); // theta x* < 1 - theta
        assert!(ReinforcementFunction::lp(-1.0, 0.2).is_err());
        assert!(ReinforcementFunction::logp(5.0, 1.0).is_err());
        assert!(ReinforcementFunction::logp(0.0, 0.5).is_err());
        assert!(ReinforcementFunction::tech(0.5).is_err());
        assert!(ReinforcementFunction::tech(1.0).is_err());
        assert!(ReinforcementFunction::polynomial(vec![0.5, -0.2]).is_err());
        assert!(ReinforcementFunction::polynomial(vec![0.0, 2.0]).is_err());
        assert!(ReinforcementFunction::polynomial(vec![]).is_err());
    }

    #[test]
    fn deriv_examples() {
        let logp = ReinforcementFunction::logp(12.0, 0.47).unwrap();
        assert!((logp.deriv(0.47) - 3.0).abs() < 1e-14);
        let tech = ReinforcementFunction::tech(0.99).unwrap();
        assert!((tech.deriv(0.5) - 1.47).abs() < 1e-14);
        assert_eq!(tech.deriv(0.0), 0.0);
        assert_eq!(tech.deriv(1.0), 0.0);
    }

    #[test]
    fn deriv_matches_central_differences() {
        let h = 1e-6;
        for f in families() {
            for i in 0..=1000 {
                let x = (i as f64 / 1000.0).clamp(h, 1.0 - h);
                let fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
                assert!((fd - f.deriv(x)).abs() < 1e-6, "{f:?} at {x}: {fd} vs {}", f.deriv(x));
            }
        }
    }

    #[test]
    fn primitive_normalized_and_differentiates_back() {
        let h = 1e-5;
        for f in families() {
            assert_eq!(f.primitive(0.0), 0.0, "{f:?}");
            for i in 1..1000 {
                let x = i as f64 / 1000.0;
                let fd = (f.primitive(x + h) - f.primitive(x - h)) / (2.0 * h);
                assert!((fd - f.eval(x)).abs() < 1e-6, "{f:?} at {x}");
            }
        }
        let tech = ReinforcementFunction::tech(0.9).unwrap();
        assert!((tech.primitive(1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn level_points_examples() {
        let tech = ReinforcementFunction::tech(0.99).unwrap();
        assert_eq!(tech.deriv_level_points(1.47).unwrap(), vec![0.5]);
        let logp = ReinforcementFunction::logp(12.0, 0.47).unwrap();
        assert_eq!(logp.deriv_level_points(3.0).unwrap(), vec![0.47]);

        // 5.88 x (1 - x) = 1, checked against bisection on f' - 1
        let pts = tech.deriv_level_points(1.0).unwrap();
        let left = roots::bisect(|x| tech.deriv(x) - 1.0, 0.0, 0.5, 1e-15);
        let right = roots::bisect(|x| tech.deriv(x) - 1.0, 0.5, 1.0, 1e-15);
        assert_eq!(pts.len(), 2);
        assert!((pts[0] - left).abs() < 1e-12 && (pts[1] - right).abs() < 1e-12);
        assert!((pts[0] - 0.21728).abs() < 1e-5 && (pts[1] - 0.78272).abs() < 1e-5);

        assert!(tech.deriv_level_points(2.0).unwrap().is_empty());
        assert!(matches!(tech.deriv_level_points(0.0), Err(Error::InvalidLevel(_))));
        assert!(matches!(tech.deriv_level_points(-1.0), Err(Error::InvalidLevel(_))));
    }

    #[test]
    fn level_points_exact_and_complete() {
        for f in families() {
            for level in [0.05, 0.3, 0.7, 1.0, 1.2, 1.667, 2.5, 5.0] {
                let pts = f.deriv_level_points(level).unwrap();
                if (f.max_deriv() - level).abs() <= 1e-9 {
                    // tangency is reported as the single touching point
                    assert_eq!(pts.len(), 1);
                    continue;
                }
                for &x in &pts {
                    assert!((f.deriv(x) - level).abs() <= 1e-10, "{f:?} level {level} at {x}");
                }
                let scan = 10_000;
                let mut changes = 0;
                for i in 0..scan {
                    let (a, b) = (i as f64 / scan as f64, (i + 1) as f64 / scan as f64);
                    if (f.deriv(a) - level) * (f.deriv(b) - level) < 0.0 {
                        changes += 1;
                    }
                }
                assert!(changes <= pts.len(), "{f:?} level {level}: {changes} crossings, {pts:?}");
                assert!(pts.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn polynomial_level_points_use_scan() {
        // f(x) = 3x^2 - 2x^3, f'(x) = 6x(1 - x), peak 1.5 at 1/2
        let f = ReinforcementFunction::polynomial(vec![0.0, 0.0, 3.0, -2.0]).unwrap();
        assert!((f.max_deriv() - 1.5).abs() < 1e-12);
        let pts = f.deriv_level_points(1.0).unwrap();
        let expected = 0.5 - 0.5 * (1.0 - 4.0 / 6.0f64).sqrt();
        assert_eq!(pts.len(), 2);
        assert!((pts[0] - expected).abs() < 1e-12);
        let touch = f.deriv_level_points(1.5).unwrap();
        assert_eq!(touch.len(), 1);
        assert!((touch[0] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn derivative_symmetries() {
        let logp = ReinforcementFunction::logp(12.0, 0.47).unwrap();
        let tech = ReinforcementFunction::tech(0.9).unwrap();
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let mirror = 2.0 * 0.47 - x;
            if (0.0..=1.0).contains(&mirror) {
                assert!((logp.deriv(x) - logp.deriv(mirror)).abs() < 1e-12);
            }
            assert!((tech.deriv(x) - tech.deriv(1.0 - x)).abs() < 1e-12);
        }
    }

    #[test]
    fn logp_stable_at_large_theta() {
        let f = ReinforcementFunction::logp(2000.0, 0.5).unwrap();
        assert_eq!(f.eval(0.0), 0.0_f64.max(f.eval(0.0)));
        assert!(f.eval(0.0).is_finite() && f.eval(1.0) <= 1.0);
        assert!(f.primitive(1.0).is_finite());
        assert!((f.primitive(1.0) - 0.5).abs() < 1e-3);
    }

    #[test]
    fn json_roundtrip_and_rejection() {
        let f: ReinforcementFunction =
            serde_json::from_str(r#"{"kind": "logp", "theta": 12, "xstar": 0.47}"#).unwrap();
        assert_eq!(f, ReinforcementFunction::logp(12.0, 0.47).unwrap());
        let back: ReinforcementFunction = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<ReinforcementFunction>(r#"{"kind": "tech", "theta": 0.3}"#).is_err());
        assert!(serde_json::from_str::<ReinforcementFunction>(r#"{"kind": "tech", "theta": 0.9, "x": 1}"#).is_err());
        assert!(serde_json::from_str::<ReinforcementFunction>(r#"{"kind": "lp", "theta": 0.9}"#).is_err());
    }

    proptest! {
        #[test]
        fn strictly_increasing_and_in_range(a in 0.0f64..1.0, b in 0.0f64..1.0, idx in 0usize..8) {
            let f = &families()[idx];
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-9);
            prop_assert!(f.eval(lo) < f.eval(hi));
            prop_assert!((0.0..=1.0).contains(&f.eval(lo)));
            prop_assert!((0.0..=1.0).contains(&f.eval(hi)));
        }
    }
}

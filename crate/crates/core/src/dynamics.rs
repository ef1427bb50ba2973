//! Forward simulation of the interacting system.
//!
//! Given the state at time `n`, every agent draws an independent choice
//! `I[n+1, h] ~ Bernoulli(P[n, h])` with
//!
//! ```text
//! P[n, h] = alpha * zbar_n + beta * q + (1 - alpha - beta) * f(Z[n, h])
//! ```
//!
//! and updates `Z[n+1, h] = (1 - r_n) Z[n, h] + r_n I[n+1, h]` with
//! `r_n = 1 / (n0 + n + 1)`.
//!
//! Randomness comes from [`ChaCha8Rng`] seeded with `seed_from_u64`. The seed
//! of replication `r` is [`split_seed`]`(base_seed, r)`, so every replication
//! owns an independent stream and results do not depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::reinforcement::{Reinforcement, ReinforcementFunction};
use crate::{Error, Result};

/// Parameters of one interacting system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<F = ReinforcementFunction> {
    pub n_agents: usize,
    pub alpha: f64,
    pub beta: f64,
    pub q: f64,
    pub f: F,
    /// Offset of the step schedule `r_n = 1 / (n0 + n + 1)`.
    pub n0: u64,
}

impl<F: Reinforcement> ModelParams<F> {
    /// Validates `alpha, beta in [0, 1)`, `alpha + beta in (0, 1)`, `q in (0, 1]`.
    ///
    /// The uncoupled single urn (`n_agents == 1`, `alpha == beta == 0`) is
    /// also accepted; it is the classical one-agent model.
    pub fn new(n_agents: usize, alpha: f64, beta: f64, q: f64, f: F) -> Result<Self> {
        if n_agents == 0 {
            return Err(Error::InvalidParams("at least one agent is required".into()));
        }
        if !(0.0..1.0).contains(&alpha) || !(0.0..1.0).contains(&beta) {
            return Err(Error::InvalidParams(format!(
                "alpha and beta must lie in [0, 1), got alpha = {alpha}, beta = {beta}"
            )));
        }
        let s = alpha + beta;
        if s >= 1.0 || (s <= 0.0 && n_agents > 1) {
            return Err(Error::InvalidParams(format!("alpha + beta must lie in (0, 1), got {s}")));
        }
        if !(q > 0.0 && q <= 1.0) {
            return Err(Error::InvalidParams(format!("q must lie in (0, 1], got {q}")));
        }
        Ok(Self { n_agents, alpha, beta, q, f, n0: 1 })
    }

    pub fn with_offset(mut self, n0: u64) -> Result<Self> {
        if n0 == 0 {
            return Err(Error::InvalidParams("step offset n0 must be at least 1".into()));
        }
        self.n0 = n0;
        Ok(self)
    }

    /// Weight `1 - alpha - beta` of the individual reinforcement term.
    pub fn gamma(&self) -> f64 {
        1.0 - self.alpha - self.beta
    }

    /// Step size `r_n`.
    pub fn step_size(&self, n: u64) -> f64 {
        1.0 / (self.n0 + n + 1) as f64
    }
}

/// State of the system at time `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub n: u64,
    pub z: Vec<f64>,
    /// Number of 1-choices made by each agent up to time `n`.
    pub cum_choices: Vec<u64>,
    pub zbar: f64,
}

impl StateVector {
    pub fn new(z0: Vec<f64>) -> Result<Self> {
        if z0.is_empty() {
            return Err(Error::InvalidParams("initial state must be non-empty".into()));
        }
        if let Some(&bad) = z0.iter().find(|z| !(0.0..=1.0).contains(*z)) {
            return Err(Error::Domain { value: bad });
        }
        let zbar = mean(&z0);
        Ok(Self { n: 0, cum_choices: vec![0; z0.len()], z: z0, zbar })
    }

    /// Empirical mean `Ibar[n, h]` of the choices of agent `h`.
    ///
    /// At `n == 0` no choice has been made yet; the initial inclination is
    /// reported instead.
    pub fn empirical_mean(&self, h: usize) -> f64 {
        if self.n == 0 {
            self.z[h]
        } else {
            self.cum_choices[h] as f64 / self.n as f64
        }
    }

    pub fn empirical_means(&self) -> Vec<f64> {
        (0..self.z.len()).map(|h| self.empirical_mean(h)).collect()
    }
}

fn mean(z: &[f64]) -> f64 {
    z.iter().sum::<f64>() / z.len() as f64
}

/// Per-run summary used by the Monte Carlo tools.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationReport {
    pub replication: usize,
    pub seed: u64,
    pub terminal_state: StateVector,
    pub empirical_means: Vec<f64>,
    /// Index into the zero list the terminal state was attributed to.
    pub assigned_zero: Option<usize>,
    pub distance_to_zero: f64,
}

/// How initial states are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitSpec {
    Fixed(Vec<f64>),
    Constant(f64),
    /// Independent uniform components, drawn from the replication's stream.
    IidUniform,
}

impl InitSpec {
    fn realize(&self, n_agents: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
        match self {
            Self::Fixed(z) if z.len() != n_agents => Err(Error::InvalidParams(format!(
                "initial vector has {} components, expected {n_agents}",
                z.len()
            ))),
            Self::Fixed(z) => Ok(z.clone()),
            Self::Constant(c) => Ok(vec![*c; n_agents]),
            Self::IidUniform => Ok((0..n_agents).map(|_| rng.random::<f64>()).collect()),
        }
    }
}

/// Probability that agent `h` chooses 1 at the next step.
pub fn choice_probability<F: Reinforcement>(p: &ModelParams<F>, s: &StateVector, h: usize) -> f64 {
    let prob = p.alpha * s.zbar + p.beta * p.q + p.gamma() * p.f.eval(s.z[h]);
    prob.clamp(0.0, 1.0)
}

/// Advances the state by one time step in place.
pub fn step<F: Reinforcement, R: Rng + ?Sized>(p: &ModelParams<F>, s: &mut StateVector, rng: &mut R) {
    // P[n, h] reads only z[h] and the time-n mean field, which stays in
    // `s.zbar` until the end of the step
    let r = p.step_size(s.n);
    for h in 0..s.z.len() {
        let prob = choice_probability(p, s, h);
        let chosen = rng.random::<f64>() < prob;
        let target = if chosen { 1.0 } else { 0.0 };
        s.z[h] = (1.0 - r) * s.z[h] + r * target;
        s.cum_choices[h] += chosen as u64;
    }
    s.n += 1;
    s.zbar = mean(&s.z);
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replication `r`: `mix64(base ^ (r + 1) * 0x9E3779B97F4A7C15)`.
pub fn split_seed(base_seed: u64, replication: u64) -> u64 {
    mix64(base_seed ^ (replication.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Default snapshot spacing: about a thousand snapshots per run.
pub fn default_record_every(horizon: u64) -> u64 {
    (horizon / 1000).max(1)
}

#[derive(Debug, Clone)]
pub struct Run {
    /// Snapshots at `n = 0, k, 2k, ...` and always at the horizon.
    pub trajectory: Vec<StateVector>,
    pub report: ReplicationReport,
}

/// Simulates one system for `horizon` steps from `z0`.
pub fn run<F: Reinforcement>(
    p: &ModelParams<F>,
    z0: &[f64],
    horizon: u64,
    seed: u64,
    record_every: u64,
) -> Result<Run> {
    run_from(p, &InitSpec::Fixed(z0.to_vec()), horizon, seed, record_every.max(1), 0)
}

fn check_agents<F>(p: &ModelParams<F>, s: &StateVector) -> Result<()> {
    if s.z.len() != p.n_agents {
        return Err(Error::InvalidParams(format!(
            "initial vector has {} components, expected {}",
            s.z.len(),
            p.n_agents
        )));
    }
    Ok(())
}

fn run_from<F: Reinforcement>(
    p: &ModelParams<F>,
    init: &InitSpec,
    horizon: u64,
    seed: u64,
    record_every: u64,
    replication: usize,
) -> Result<Run> {
    let mut rng = rng_from_seed(seed);
    let mut state = StateVector::new(init.realize(p.n_agents, &mut rng)?)?;
    check_agents(p, &state)?;
    let mut trajectory = vec![state.clone()];
    for n in 1..=horizon {
        step(p, &mut state, &mut rng);
        if n % record_every == 0 || n == horizon {
            trajectory.push(state.clone());
        }
    }
    let report = ReplicationReport {
        replication,
        seed,
        empirical_means: state.empirical_means(),
        terminal_state: state,
        assigned_zero: None,
        distance_to_zero: 0.0,
    };
    Ok(Run { trajectory, report })
}

fn run_terminal<F: Reinforcement>(
    p: &ModelParams<F>,
    init: &InitSpec,
    horizon: u64,
    seed: u64,
    replication: usize,
) -> Result<ReplicationReport> {
    let mut rng = rng_from_seed(seed);
    let mut state = StateVector::new(init.realize(p.n_agents, &mut rng)?)?;
    check_agents(p, &state)?;
    for _ in 0..horizon {
        step(p, &mut state, &mut rng);
    }
    Ok(ReplicationReport {
        replication,
        seed,
        empirical_means: state.empirical_means(),
        terminal_state: state,
        assigned_zero: None,
        distance_to_zero: 0.0,
    })
}

/// Trajectory of replication `r` of an experiment, consistent with
/// [`replicate`].
pub fn run_replication<F: Reinforcement>(
    p: &ModelParams<F>,
    init: &InitSpec,
    horizon: u64,
    replication: usize,
    base_seed: u64,
    record_every: u64,
) -> Result<Run> {
    let seed = split_seed(base_seed, replication as u64);
    run_from(p, init, horizon, seed, record_every.max(1), replication)
}

/// Runs `replications` independent systems in parallel. Reports are ordered
/// by replication index and independent of the thread count.
pub fn replicate<F: Reinforcement>(
    p: &ModelParams<F>,
    init: &InitSpec,
    horizon: u64,
    replications: usize,
    base_seed: u64,
) -> Result<Vec<ReplicationReport>> {
    if replications == 0 {
        return Err(Error::InvalidParams("at least one replication is required".into()));
    }
    (0..replications)
        .into_par_iter()
        .map(|r| run_terminal(p, init, horizon, split_seed(base_seed, r as u64), r))
        .collect()
}

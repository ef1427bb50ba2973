//! Simulation and equilibrium analysis for systems of `N` interacting,
//! nonlinearly reinforced stochastic processes.
//!
//! Each agent `h` holds an inclination `Z[n, h]` in `[0, 1]`. At every step
//! it draws a Bernoulli choice with probability
//! `alpha * mean(Z[n]) + beta * q + (1 - alpha - beta) * f(Z[n, h])` and moves
//! its inclination toward the outcome with step size `r_n ~ 1/n`. The long
//! run behaviour is governed by the zeros of the drift field `F`, which this
//! crate enumerates, classifies and checks against Monte Carlo runs.

pub mod asymptotics;
pub mod basin;
pub mod dynamics;
pub mod equilibria;
mod error;
pub mod landscape;
pub mod reinforcement;
pub(crate) mod roots;
pub mod stability;

pub use dynamics::{InitSpec, ModelParams, ReplicationReport, StateVector};
pub use equilibria::{ZeroKind, ZeroPoint};
pub use error::{Error, Result};
pub use reinforcement::{Reinforcement, ReinforcementFunction};
pub use stability::Stability;

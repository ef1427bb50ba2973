//! Potential of the drift field,
//! `V(z) = -alpha/(2N) (sum z)^2 - beta q sum z - g sum Phi(z_h) + |z|^2 / 2`,
//! with `F = -grad V` and `Phi(0) = 0`, and grid exports for two agents.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::ModelParams;
use crate::equilibria::drift;
use crate::reinforcement::Reinforcement;
use crate::{Error, Result};

pub const MAX_RESOLUTION: usize = 4096;

pub fn potential<F: Reinforcement>(p: &ModelParams<F>, z: &[f64]) -> f64 {
    let n = z.len() as f64;
    let sum: f64 = z.iter().sum();
    let prim: f64 = z.iter().map(|&x| p.f.primitive(x)).sum();
    let sq: f64 = z.iter().map(|x| x * x).sum();
    -p.alpha / (2.0 * n) * sum * sum - p.beta * p.q * sum - p.gamma() * prim + 0.5 * sq
}

/// Nodes per axis of a uniform grid on `[0,1]^2`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    resolution: usize,
}

impl GridSpec {
    pub fn new(resolution: usize) -> Result<Self> {
        if !(2..=MAX_RESOLUTION).contains(&resolution) {
            return Err(Error::InvalidParams(format!(
                "grid resolution must be in [2, {MAX_RESOLUTION}], got {resolution}"
            )));
        }
        Ok(GridSpec { resolution })
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.resolution - 1) as f64
    }

    fn node(&self, i: usize) -> f64 {
        if i + 1 == self.resolution {
            1.0
        } else {
            i as f64 * self.spacing()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldRow {
    pub z1: f64,
    pub z2: f64,
    #[serde(rename = "F1")]
    pub f1: f64,
    #[serde(rename = "F2")]
    pub f2: f64,
    #[serde(rename = "V")]
    pub v: f64,
}

/// Drift and potential on the grid, `z1` major, `z2` minor.
pub fn export_field_grid<F: Reinforcement>(p: &ModelParams<F>, grid: GridSpec) -> Result<Vec<FieldRow>> {
    if p.n_agents != 2 {
        return Err(Error::Precondition(format!("field export needs N = 2, got N = {}", p.n_agents)));
    }
    let r = grid.resolution;
    Ok((0..r)
        .into_par_iter()
        .flat_map_iter(|i| {
            let z1 = grid.node(i);
            (0..r).map(move |j| {
                let z2 = grid.node(j);
                let f = drift(p, &[z1, z2]);
                FieldRow { z1, z2, f1: f[0], f2: f[1], v: potential(p, &[z1, z2]) }
            })
        })
        .collect())
}

/// Writes rows as CSV with header `z1,z2,F1,F2,V`.
pub fn write_field_csv<W: Write>(rows: &[FieldRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

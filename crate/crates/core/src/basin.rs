//! Attribution of terminal states to zeros of the drift field.
//!
//! Distances compare sorted component vectors, which equals the distance to
//! the nearest permutation of a zero.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::dynamics::ReplicationReport;
use crate::equilibria::ZeroPoint;

/// Terminal states farther than this from every zero stay unassigned.
pub const ASSIGN_RADIUS: f64 = 0.1;
pub const HISTOGRAM_BIN: f64 = 0.01;
const BINS: usize = 100;

fn sorted(z: &[f64]) -> Vec<f64> {
    let mut v = z.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Index of the nearest zero and the distance to it, if any zero is within
/// [`ASSIGN_RADIUS`].
pub fn nearest_zero(z: &[f64], zeros: &[ZeroPoint]) -> Option<(usize, f64)> {
    let s = sorted(z);
    zeros
        .iter()
        .enumerate()
        .map(|(i, zero)| {
            let d = zero.expanded().iter().zip(&s).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            (i, d)
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .filter(|(_, d)| *d <= ASSIGN_RADIUS)
}

/// Fills `assigned_zero` and `distance_to_zero` of every report. Unassigned
/// reports keep the distance to the nearest zero.
pub fn assign(reports: &mut [ReplicationReport], zeros: &[ZeroPoint]) {
    for r in reports.iter_mut() {
        let s = sorted(&r.terminal_state.z);
        let nearest = zeros
            .iter()
            .map(|zero| zero.expanded().iter().zip(&s).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match nearest {
            Some((i, d)) => {
                r.assigned_zero = (d <= ASSIGN_RADIUS).then_some(i);
                r.distance_to_zero = d;
            }
            None => {
                r.assigned_zero = None;
                r.distance_to_zero = f64::INFINITY;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasinReport {
    pub replications: usize,
    /// Hits per zero, indexed like the zero list.
    pub hits: Vec<usize>,
    pub unassigned: usize,
    pub histogram: Histogram,
}

/// Counts of terminal component values in bins `[k w, (k+1) w)`, the last
/// bin closed at 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bin_width: f64,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn from_values<'a>(values: impl IntoIterator<Item = &'a f64>) -> Self {
        let mut counts = vec![0u64; BINS];
        for &v in values {
            let k = ((v / HISTOGRAM_BIN).floor() as usize).min(BINS - 1);
            counts[k] += 1;
        }
        Histogram { bin_width: HISTOGRAM_BIN, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn centers(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.counts.len()).map(|k| (k as f64 + 0.5) * self.bin_width)
    }

    /// Share of the mass in bins whose center lies within `radius` of one
    /// of `targets`.
    pub fn mass_near(&self, targets: &[f64], radius: f64) -> f64 {
        let near: u64 = self
            .centers()
            .zip(&self.counts)
            .filter(|(c, _)| targets.iter().any(|t| (c - t).abs() <= radius))
            .map(|(_, n)| n)
            .sum();
        near as f64 / self.total().max(1) as f64
    }

    /// `(center, count)` map with bin centers as string keys.
    pub fn to_map(&self) -> BTreeMap<String, u64> {
        self.centers()
            .zip(&self.counts)
            .filter(|(_, n)| **n > 0)
            .map(|(c, n)| (format!("{c:.3}"), *n))
            .collect()
    }
}

/// Assigns the reports and tallies hits and the component histogram.
pub fn basin_report(reports: &mut [ReplicationReport], zeros: &[ZeroPoint]) -> BasinReport {
    assign(reports, zeros);
    let mut hits = vec![0; zeros.len()];
    let mut unassigned = 0;
    for r in reports.iter() {
        match r.assigned_zero {
            Some(i) => hits[i] += 1,
            None => unassigned += 1,
        }
    }
    let histogram = Histogram::from_values(reports.iter().flat_map(|r| r.terminal_state.z.iter()));
    BasinReport { replications: reports.len(), hits, unassigned, histogram }
}

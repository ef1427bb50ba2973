use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _, Result};
use reinsync::asymptotics;
use reinsync::basin;
use reinsync::dynamics;
use reinsync::equilibria::{self, EnumerationOptions, ZeroKind};
use reinsync::landscape::{self, GridSpec};
use reinsync::stability::{self, Stability};
use reinsync::{ModelParams, ZeroPoint};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;
const DEFAULT_GRID: usize = 101;

pub struct Context {
    pub config: ExperimentConfig,
    pub params: ModelParams,
    pub seed: u64,
    pub out: PathBuf,
}

/// Failures that count as invalid input (exit code 2) rather than runtime errors.
#[derive(Debug)]
pub struct InvalidInput(pub String);

impl std::fmt::Display for InvalidInput {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InvalidInput {}

impl Context {
    fn zeros(&self) -> Result<Vec<ZeroPoint>> {
        let opts = EnumerationOptions { include_unstable_middle: self.config.include_unstable_middle, oracle_check: false };
        Ok(equilibria::all_zeros(&self.params, opts)?)
    }

    fn path(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        Ok(self.out.join(name))
    }
}

fn write_json(path: &Path, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn zero_json(id: usize, z: &ZeroPoint) -> Value {
    json!({
        "id": id,
        "groups": z.groups,
        "kind": z.kind,
        "residual": z.residual,
        "spectrum": z.spectrum,
        "stability": z.stability,
        "excluded_given_nonzero_start": z.excluded_given_nonzero_start,
    })
}

#[derive(Serialize)]
struct TrajectoryRow {
    n: u64,
    agent: usize,
    z: f64,
    ibar: f64,
}

#[derive(Serialize)]
struct ReportRow {
    replication: usize,
    seed: u64,
    agent: usize,
    z_final: f64,
    ibar_final: f64,
    assigned_zero_id: Option<usize>,
    distance: f64,
}

pub fn simulate(ctx: &Context) -> Result<String> {
    let c = &ctx.config;
    let p = &ctx.params;
    let zeros = ctx.zeros()?;
    let record_every = c.record_every.unwrap_or_else(|| dynamics::default_record_every(c.horizon));
    if c.wants("trajectory") {
        // the trajectory file follows replication 0
        let run = dynamics::run_replication(p, &c.init, c.horizon, 0, ctx.seed, record_every)?;
        let mut w = csv_writer(&ctx.path("trajectory.csv")?)?;
        for s in &run.trajectory {
            for (agent, &z) in s.z.iter().enumerate() {
                w.serialize(TrajectoryRow { n: s.n, agent, z, ibar: s.empirical_mean(agent) })?;
            }
        }
        w.flush()?;
    }
    let mut reports = dynamics::replicate(p, &c.init, c.horizon, c.replications, ctx.seed)?;
    basin::assign(&mut reports, &zeros);
    if c.wants("report") {
        let mut w = csv_writer(&ctx.path("report.csv")?)?;
        for r in &reports {
            for (agent, &z) in r.terminal_state.z.iter().enumerate() {
                w.serialize(ReportRow {
                    replication: r.replication,
                    seed: r.seed,
                    agent,
                    z_final: z,
                    ibar_final: r.empirical_means[agent],
                    assigned_zero_id: r.assigned_zero,
                    distance: r.distance_to_zero,
                })?;
            }
        }
        w.flush()?;
    }
    let (lo, hi) = reports
        .iter()
        .flat_map(|r| r.terminal_state.z.iter())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &z| (lo.min(z), hi.max(z)));
    let mut hits = vec![0usize; zeros.len()];
    for r in &reports {
        if let Some(i) = r.assigned_zero {
            hits[i] += 1;
        }
    }
    let nearest: Vec<String> = zeros
        .iter()
        .zip(&hits)
        .filter(|(_, h)| **h > 0)
        .map(|(z, h)| format!("{:?} x{h}", z.groups.iter().map(|g| format!("{:.4}", g.value)).collect::<Vec<_>>()))
        .collect();
    let unassigned = reports.iter().filter(|r| r.assigned_zero.is_none()).count();
    Ok(format!(
        "simulate: {} runs, T = {}, terminal components in [{lo:.4}, {hi:.4}]; nearest zeros: {}; unassigned: {unassigned}",
        reports.len(),
        c.horizon,
        if nearest.is_empty() { "none".to_string() } else { nearest.join(", ") },
    ))
}

pub fn equilibria_report(ctx: &Context) -> Result<Value> {
    let p = &ctx.params;
    let zeros = ctx.zeros()?;
    let support = stability::exclude_unstable(p, &zeros);
    let listed: Vec<Value> = zeros
        .iter()
        .enumerate()
        .map(|(id, z)| {
            let kept = support.iter().find(|s| s.groups == z.groups);
            let z = kept.unwrap_or(z);
            let mut v = zero_json(id, z);
            let clt = asymptotics::predict(p, z).ok();
            v["clt_exponent"] = json!(clt.as_ref().map(|c| c.lambda));
            v["regime"] = json!(clt.as_ref().map(|c| c.regime));
            v["sigma"] = json!(clt.as_ref().and_then(|c| c.sigma.clone()));
            v["sigma_unverified"] = json!(clt.as_ref().map(|c| c.sigma_unverified));
            v["in_predicted_support"] = json!(kept.is_some() && !z.excluded_given_nonzero_start);
            if z.kind == ZeroKind::NoSynchronization && z.groups.len() == 2 {
                let (lo, hi) = equilibria::restriction_bounds(p, z.groups[0].value, z.groups[1].value);
                v["restriction_bounds"] = json!([lo, hi]);
            }
            v
        })
        .collect();
    let d = equilibria::diagnostics(p);
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "model": ctx.config.model,
        "zeros": listed,
        "diagnostics": {
            "half_is_zero": d.half_is_zero,
            "degenerate": d.degenerate,
            "conditions": d.conditions,
            "critical_abscissas": d.critical,
        },
    }))
}

pub fn equilibria_cmd(ctx: &Context) -> Result<String> {
    let report = equilibria_report(ctx)?;
    if ctx.config.wants("zeros") {
        write_json(&ctx.path("zeros.json")?, &report)?;
    }
    Ok(serde_json::to_string_pretty(&report)?)
}

pub fn field(ctx: &Context) -> Result<String> {
    if ctx.params.n_agents != 2 {
        bail!(InvalidInput(format!("field export needs n_agents = 2, got {}", ctx.params.n_agents)));
    }
    let grid = GridSpec::new(ctx.config.grid_resolution.unwrap_or(DEFAULT_GRID))?;
    let rows = landscape::export_field_grid(&ctx.params, grid)?;
    let path = ctx.path("field.csv")?;
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    landscape::write_field_csv(&rows, BufWriter::new(file))?;
    Ok(format!("field: {} nodes written to {}", rows.len(), path.display()))
}

pub fn mc_report(ctx: &Context) -> Result<Value> {
    let c = &ctx.config;
    if c.replications < 2 {
        bail!(InvalidInput(format!("mc needs at least 2 replications, got {}", c.replications)));
    }
    let zeros = ctx.zeros()?;
    let mut reports = dynamics::replicate(&ctx.params, &c.init, c.horizon, c.replications, ctx.seed)?;
    let b = basin::basin_report(&mut reports, &zeros);
    let unstable_hits: usize = zeros
        .iter()
        .zip(&b.hits)
        .filter(|(z, _)| z.stability.is_linearly_unstable())
        .map(|(_, h)| h)
        .sum();
    let listed: Vec<Value> = zeros
        .iter()
        .enumerate()
        .map(|(id, z)| {
            let mut v = zero_json(id, z);
            v["hits"] = json!(b.hits[id]);
            v
        })
        .collect();
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "seed": ctx.seed,
        "horizon": c.horizon,
        "replications": b.replications,
        "unassigned": b.unassigned,
        "assign_radius": basin::ASSIGN_RADIUS,
        "unstable_share": unstable_hits as f64 / b.replications as f64,
        "zeros": listed,
        "histogram": b.histogram,
    }))
}

pub fn mc(ctx: &Context) -> Result<String> {
    let report = mc_report(ctx)?;
    if ctx.config.wants("basin") {
        write_json(&ctx.path("basin.json")?, &report)?;
    }
    Ok(format!(
        "mc: {} runs, unassigned {}, unstable share {}",
        report["replications"], report["unassigned"], report["unstable_share"]
    ))
}

pub fn clt_report(ctx: &Context) -> Result<Value> {
    let c = &ctx.config;
    let p = &ctx.params;
    let zeros = ctx.zeros()?;
    let (id, zero) = zeros
        .iter()
        .enumerate()
        .find(|(_, z)| {
            z.kind == ZeroKind::Synchronization
                && z.stability == Stability::StrictlyStable
                && asymptotics::clt_exponent(p, z).is_ok_and(|l| l > 0.5)
        })
        .context("no strictly stable synchronization zero with lambda > 1/2")?;
    let check = asymptotics::clt_empirical_check(p, zero, c.horizon, c.replications, ctx.seed)?;
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "seed": ctx.seed,
        "horizon": c.horizon,
        "zero": zero_json(id, zero),
        "regime": asymptotics::Regime::from_lambda(check.lambda),
        "check": check,
    }))
}

pub fn clt_check(ctx: &Context) -> Result<String> {
    let report = clt_report(ctx)?;
    if ctx.config.wants("clt") {
        write_json(&ctx.path("clt.json")?, &report)?;
    }
    Ok(format!(
        "clt-check: lambda {}, diagonal relative error {}, {} of {} runs qualified",
        report["check"]["lambda"],
        report["check"]["max_rel_err"],
        report["check"]["qualified"],
        report["check"]["replications"]
    ))
}

use featsel::rng::with_workers;
use featsel::{ModelParams, SelectionExperiment};
use serde::Serialize;
use serde_json::json;

use super::RunContext;
use crate::config::SimulateConfig;
use crate::envelope::{write_table, Envelope};
use crate::error::{CliError, Result};

pub const PAYLOAD: &str = "risk.csv";

#[derive(Debug, Serialize)]
struct Row {
    n: usize,
    p_t: usize,
    p_u: usize,
    q_u: usize,
    p: usize,
    q: usize,
    method: String,
    sampler: String,
    value: Option<f64>,
    stderr: Option<f64>,
    trials: Option<u64>,
    discarded: Option<u64>,
    error: String,
}

fn totals_minus(total: usize, p_t: usize, what: &str) -> Result<usize> {
    total
        .checked_sub(p_t)
        .ok_or_else(|| CliError::Config(format!("{what} = {total} is smaller than p_t = {p_t}")))
}

/// Cartesian product of the size lists, in `n, p_t, p_u, q_u` order.
pub fn grid(cfg: &SimulateConfig) -> Result<Vec<ModelParams>> {
    let mut out = Vec::new();
    for &n in &cfg.n {
        for &p_t in &cfg.p_t {
            let p_us = match cfg.p {
                Some(p) => vec![totals_minus(p, p_t, "p")?],
                None => cfg.p_u.clone(),
            };
            let q_us = match cfg.q {
                Some(q) => vec![totals_minus(q, p_t, "q")?],
                None => cfg.q_u.clone(),
            };
            for &p_u in &p_us {
                for &q_u in &q_us {
                    out.push(ModelParams::new(n, p_t, p_u, q_u)?);
                }
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("the simulation grid is empty".into()));
    }
    Ok(out)
}

pub fn run(cfg: &SimulateConfig, ctx: &RunContext, mut envelope: Envelope) -> Result<Envelope> {
    if cfg.methods.is_empty() {
        return Err(CliError::Config("at least one method is required".into()));
    }
    if cfg.mc_res == 0 {
        return Err(CliError::Config("mc_res must be at least 1".into()));
    }
    if !(cfg.signal_scale.is_finite() && (0.0..=1.0).contains(&cfg.signal_scale)) {
        return Err(CliError::Config(format!("signal_scale must lie in [0, 1], got {}", cfg.signal_scale)));
    }
    let points = grid(cfg)?;
    let seed = ctx.stream("simulate");
    let outcomes: Vec<_> = with_workers(ctx.workers, || {
        points
            .iter()
            .enumerate()
            .map(|(k, params)| {
                SelectionExperiment::new(*params, cfg.sampler, cfg.methods.clone(), cfg.mc_res)
                    .with_signal_scale(cfg.signal_scale)
                    .run(seed.child(k as u64))
            })
            .collect()
    });

    let mut rows = Vec::with_capacity(points.len() * cfg.methods.len());
    let mut failed = 0;
    for (params, outcome) in points.iter().zip(&outcomes) {
        if let Err(e) = outcome {
            failed += 1;
            envelope.warnings.push(format!("n={} p_t={} p_u={} q_u={}: {e}", params.n, params.p_t, params.p_u, params.q_u));
        }
        for (m, method) in cfg.methods.iter().enumerate() {
            let est = outcome.as_ref().ok().map(|v| v[m]);
            rows.push(Row {
                n: params.n,
                p_t: params.p_t,
                p_u: params.p_u,
                q_u: params.q_u,
                p: params.p(),
                q: params.q(),
                method: method.to_string(),
                sampler: cfg.sampler.to_string(),
                value: est.map(|e| e.value),
                stderr: est.map(|e| e.stderr),
                trials: est.map(|e| e.trials),
                discarded: est.map(|e| e.discarded),
                error: outcome.as_ref().err().map(|e| e.to_string()).unwrap_or_default(),
            });
        }
    }
    if failed == points.len() {
        return Err(CliError::Numerical(format!("all {failed} grid points failed; first: {}", envelope.warnings[0])));
    }
    envelope.payload.push(write_table(&ctx.out, PAYLOAD, &rows)?);
    envelope.summary = json!({
        "points": points.len(),
        "failed_points": failed,
        "rows": rows.len(),
    });
    Ok(envelope)
}

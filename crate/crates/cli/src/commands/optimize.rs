use featsel::optimizer::{run_search, Bounds, L1Objective, SearchReport};
use featsel::{DiscrepancyObjective, SearchConfig, Theta};
use serde::Serialize;
use serde_json::json;

use super::RunContext;
use crate::config::OptimizeConfig;
use crate::envelope::{write_table, Envelope};
use crate::error::{CliError, Result};

pub const CANDIDATES: &str = "candidates.csv";
pub const TRACE: &str = "trace.csv";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObjectiveSpec {
    Discrepancy,
    L1(Theta),
}

impl ObjectiveSpec {
    pub fn parse(s: &str) -> Result<Self> {
        if s == "discrepancy" {
            return Ok(ObjectiveSpec::Discrepancy);
        }
        let bad = || CliError::Config(format!("unknown objective '{s}' (expected discrepancy or l1:p_t,p_u,q_u)"));
        let rest = s.strip_prefix("l1:").ok_or_else(bad)?;
        let parts: Vec<usize> = rest.split(',').map(|v| v.trim().parse()).collect::<std::result::Result<_, _>>().map_err(|_| bad())?;
        match parts[..] {
            [p_t, p_u, q_u] => Ok(ObjectiveSpec::L1(Theta::new(p_t, p_u, q_u))),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Serialize)]
struct CandidateRow {
    rank: usize,
    id: usize,
    p_t: usize,
    p_u: usize,
    q_u: usize,
    mean: f64,
    batches: u64,
    discovered_at: usize,
}

#[derive(Debug, Serialize)]
struct TraceRow {
    iteration: usize,
    candidate: usize,
    p_t: usize,
    p_u: usize,
    q_u: usize,
    role: String,
    batch_mean: f64,
    running_mean: f64,
    batches: u64,
}

pub fn search_config(cfg: &OptimizeConfig) -> SearchConfig {
    let mut grid = Vec::new();
    for &p_t in &cfg.grid_p_t {
        for &p_u in &cfg.grid_p_u {
            for &q_u in &cfg.grid_q_u {
                grid.push(Theta::new(p_t, p_u, q_u));
            }
        }
    }
    let [a, b, c] = cfg.lower;
    let [d, e, f] = cfg.upper;
    SearchConfig {
        initial_grid: grid,
        survivors: cfg.survivors,
        mc_res: cfg.mc_res,
        t_final: cfg.t_final,
        perturbations_per_survivor: cfg.perturbations,
        bounds: Bounds { lower: Theta::new(a, b, c), upper: Theta::new(d, e, f) },
    }
}

fn role_name(role: featsel::optimizer::EvalRole) -> String {
    serde_json::to_value(role).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

pub fn run(cfg: &OptimizeConfig, ctx: &RunContext, mut envelope: Envelope) -> Result<Envelope> {
    let search = search_config(cfg);
    let seed = ctx.stream("optimize");
    let report: SearchReport = match ObjectiveSpec::parse(&cfg.objective)? {
        ObjectiveSpec::Discrepancy => {
            let objective = DiscrepancyObjective {
                n: cfg.n,
                method: cfg.method,
                direction: cfg.direction,
                exact_sampler: cfg.exact_sampler,
                pairing: cfg.pairing,
            };
            run_search(&objective, &search, seed, ctx.workers)?
        }
        ObjectiveSpec::L1(target) => run_search(&L1Objective { target }, &search, seed, ctx.workers)?,
    };

    let candidates: Vec<CandidateRow> = report
        .candidates
        .iter()
        .enumerate()
        .map(|(r, c)| CandidateRow {
            rank: r + 1,
            id: c.id,
            p_t: c.theta.p_t,
            p_u: c.theta.p_u,
            q_u: c.theta.q_u,
            mean: c.mean(),
            batches: c.batches,
            discovered_at: c.discovered_at,
        })
        .collect();
    let trace: Vec<TraceRow> = report
        .trace
        .iter()
        .map(|t| TraceRow {
            iteration: t.iteration,
            candidate: t.candidate,
            p_t: t.theta.p_t,
            p_u: t.theta.p_u,
            q_u: t.theta.q_u,
            role: role_name(t.role),
            batch_mean: t.batch_mean,
            running_mean: t.running_mean,
            batches: t.batches,
        })
        .collect();
    envelope.payload.push(write_table(&ctx.out, CANDIDATES, &candidates)?);
    envelope.payload.push(write_table(&ctx.out, TRACE, &trace)?);

    let best = report.best();
    if best.batches < cfg.t_final as u64 {
        envelope.warnings.push(format!("best candidate has only {} batches", best.batches));
    }
    envelope.summary = json!({
        "best": { "p_t": best.theta.p_t, "p_u": best.theta.p_u, "q_u": best.theta.q_u },
        "best_mean": best.mean(),
        "best_batches": best.batches,
        "candidates": report.candidates.len(),
        "evaluations": report.trace.len(),
    });
    Ok(envelope)
}

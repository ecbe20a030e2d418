use featsel::fdr::{rank_features, Correction, PermutationOptions};
use serde::Serialize;
use serde_json::json;

use super::select::load_inputs;
use super::RunContext;
use crate::config::FdrConfig;
use crate::envelope::{write_table, Envelope};
use crate::error::{CliError, Result};

pub const PAYLOAD: &str = "fdr.csv";

#[derive(Debug, Serialize)]
struct Row<'a> {
    rank: usize,
    feature: &'a str,
    index: usize,
    score: f64,
    p_value: f64,
    q_value: f64,
}

pub fn run(cfg: &FdrConfig, ctx: &RunContext, mut envelope: Envelope) -> Result<Envelope> {
    let (x, y) = load_inputs(&cfg.input, &mut envelope.warnings)?;
    let correction = cfg.correction.unwrap_or_else(|| Correction::default_for(cfg.method));
    let options = PermutationOptions {
        mc_res: cfg.mc_res,
        statistic: cfg.statistic,
        add_one: cfg.add_one,
        global_shuffle: cfg.shuffle,
        workers: ctx.workers,
    };
    let table = rank_features(&x, &y, cfg.method, cfg.null, &options, correction, ctx.stream("fdr")).map_err(|e| match e {
        featsel::Error::InvalidConfig(_) => CliError::Config(e.to_string()),
        other => CliError::from_data(other),
    })?;
    let rows: Vec<Row> = table
        .iter()
        .map(|f| Row {
            rank: f.rank,
            feature: &f.feature_name,
            index: f.feature_index,
            score: f.score,
            p_value: f.p_value,
            q_value: f.q_value,
        })
        .collect();
    envelope.payload.push(write_table(&ctx.out, PAYLOAD, &rows)?);
    let below = |level: f64| table.iter().filter(|f| f.q_value <= level).count();
    envelope.summary = json!({
        "features": table.len(),
        "correction": serde_json::to_value(correction).unwrap_or_default(),
        "q_at_most_0.05": below(0.05),
        "q_at_most_0.10": below(0.10),
        "min_q": table.iter().map(|f| f.q_value).fold(f64::INFINITY, f64::min),
    });
    Ok(envelope)
}

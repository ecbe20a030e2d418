use featsel::model::random_signal_block;
use featsel::quadrature::QuadratureConfig;
use featsel::risk::asymptotic_thresholding_risk;
use nalgebra::DMatrix;
use serde::Serialize;
use serde_json::json;

use super::RunContext;
use crate::config::AsymriskConfig;
use crate::envelope::{write_table, Envelope};
use crate::error::{CliError, Result};
use crate::ingest::{read_matrix, Orientation};

pub const PAYLOAD: &str = "asymrisk.csv";

#[derive(Debug, Serialize)]
struct Row {
    draw: u64,
    p_t: usize,
    p_u: usize,
    q: usize,
    expected_loss: f64,
    probability: f64,
}

/// Scaled means for each evaluation: the given signal file, or random
/// blocks `√(n − 1) · Ω` padded with `q_u` zero columns.
fn signals(cfg: &AsymriskConfig, ctx: &RunContext) -> Result<Vec<DMatrix<f64>>> {
    if let Some(path) = &cfg.signal {
        let m = read_matrix(path, Orientation::ObservationsAsRows)?;
        return Ok(vec![m.values().clone()]);
    }
    if cfg.n < 2 {
        return Err(CliError::Config(format!("n must be at least 2, got {}", cfg.n)));
    }
    if cfg.p_t == 0 || cfg.draws == 0 {
        return Err(CliError::Config("p_t and draws must be at least 1".into()));
    }
    let seed = ctx.stream("asymrisk");
    let scale = ((cfg.n - 1) as f64).sqrt();
    (0..cfg.draws)
        .map(|d| {
            let block = random_signal_block(cfg.p_t, &mut seed.child(d).rng())?;
            let mut means = DMatrix::zeros(cfg.p_t, cfg.p_t + cfg.q_u);
            means.view_mut((0, 0), (cfg.p_t, cfg.p_t)).copy_from(&(block.matrix() * scale));
            Ok(means)
        })
        .collect()
}

pub fn run(cfg: &AsymriskConfig, ctx: &RunContext, mut envelope: Envelope) -> Result<Envelope> {
    let quad = QuadratureConfig { abs_tol: cfg.abs_tol, rel_tol: cfg.rel_tol, ..QuadratureConfig::default() };
    let mut rows = Vec::new();
    for (d, means) in signals(cfg, ctx)?.iter().enumerate() {
        let loss = asymptotic_thresholding_risk(means, cfg.p_u, means.ncols(), &quad)?;
        rows.push(Row {
            draw: d as u64,
            p_t: means.nrows(),
            p_u: cfg.p_u,
            q: means.ncols(),
            expected_loss: loss,
            probability: 1.0 - loss,
        });
    }
    envelope.payload.push(write_table(&ctx.out, PAYLOAD, &rows)?);
    let mean = rows.iter().map(|r| r.expected_loss).sum::<f64>() / rows.len() as f64;
    envelope.summary = json!({ "draws": rows.len(), "mean_expected_loss": mean });
    Ok(envelope)
}

use featsel::fdr::{cross_correlation, cross_covariance, Statistic};
use featsel::{DataMatrix, Ranking};
use serde::Serialize;
use serde_json::json;

use super::RunContext;
use crate::config::{InputConfig, SelectConfig};
use crate::envelope::{write_table, Envelope};
use crate::error::{CliError, Result};
use crate::ingest::read_matrix;
use crate::preprocess::{counts_to_log_proportions, standardize_rows_columns, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE};

pub const PAYLOAD: &str = "ranking.csv";

#[derive(Debug, Serialize)]
struct Row<'a> {
    rank: usize,
    feature: &'a str,
    index: usize,
    score: f64,
}

fn standardized(m: DataMatrix, which: &str, warnings: &mut Vec<String>) -> Result<DataMatrix> {
    let (m, report) = standardize_rows_columns(&m, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER)
        .map_err(|e| CliError::Data(format!("{which}: {e}")))?;
    if !report.converged {
        warnings.push(format!("{which}: standardization did not converge in {} passes", report.iterations));
    }
    Ok(m)
}

/// Read and preprocess both matrices as the input section asks.
pub fn load_inputs(input: &InputConfig, warnings: &mut Vec<String>) -> Result<(DataMatrix, DataMatrix)> {
    if input.x.as_os_str().is_empty() || input.y.as_os_str().is_empty() {
        return Err(CliError::Config("both --x and --y inputs are required".into()));
    }
    let mut x = read_matrix(&input.x, input.orientation)?;
    let mut y = read_matrix(&input.y, input.orientation)?;
    if x.observation_ids() != y.observation_ids() {
        return Err(CliError::Data("X and Y must list the same observations in the same order".into()));
    }
    if input.y_counts {
        let (m, shifted) = counts_to_log_proportions(&y, input.pseudocount).map_err(|e| CliError::Data(format!("Y: {e}")))?;
        if shifted {
            warnings.push(format!("Y contains zero counts; pseudocount {} added to every entry", input.pseudocount));
        }
        y = m;
    }
    if input.standardize_x {
        x = standardized(x, "X", warnings)?;
    }
    if input.standardize_y {
        y = standardized(y, "Y", warnings)?;
    }
    Ok((x, y))
}

pub fn run(cfg: &SelectConfig, ctx: &RunContext, mut envelope: Envelope) -> Result<Envelope> {
    let (x, y) = load_inputs(&cfg.input, &mut envelope.warnings)?;
    let matrix = match cfg.statistic {
        Statistic::Covariance => cross_covariance(&x, &y).map_err(CliError::from_data)?,
        Statistic::Correlation => {
            let r = cross_correlation(&x, &y).map_err(CliError::from_data)?;
            for &j in &r.constant_x {
                envelope.warnings.push(format!("X feature '{}' is constant; its correlations are 0", x.feature_names()[j]));
            }
            for &j in &r.constant_y {
                envelope.warnings.push(format!("Y feature '{}' is constant; its correlations are 0", y.feature_names()[j]));
            }
            r.matrix
        }
    };
    let scores = cfg.method.score(&matrix)?;
    let ranking = Ranking::from_scores(&scores);
    let rows: Vec<Row> = ranking
        .order()
        .iter()
        .enumerate()
        .map(|(r, &j)| Row { rank: r + 1, feature: &x.feature_names()[j], index: j, score: scores.as_slice()[j] })
        .collect();
    envelope.payload.push(write_table(&ctx.out, PAYLOAD, &rows)?);
    envelope.summary = json!({
        "observations": x.observations(),
        "features": x.features(),
        "responses": y.features(),
        "top": rows.first().map(|r| r.feature),
    });
    Ok(envelope)
}

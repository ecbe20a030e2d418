//! Transforms applied to raw matrices before selection.

use featsel::{DataMatrix, Error, Result};
use nalgebra::DMatrix;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardizeReport {
    /// Column-then-row passes performed.
    pub iterations: usize,
    pub converged: bool,
}

fn distinct_at_least_two<'a>(mut it: impl Iterator<Item = &'a f64>) -> bool {
    match it.next() {
        Some(first) => it.any(|v| v != first),
        None => false,
    }
}

/// Mean and population variance (divisor `len`). With divisor `len − 1` on
/// both axes the squared totals disagree unless the matrix is square.
fn mean_var<'a>(values: impl IntoIterator<Item = &'a f64>) -> (f64, f64) {
    let values: Vec<f64> = values.into_iter().copied().collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

fn max_deviation(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for col in m.column_iter() {
        let (mean, var) = mean_var(col.iter());
        worst = worst.max(mean.abs()).max((var - 1.0).abs());
    }
    for row in m.row_iter() {
        let (mean, var) = mean_var(row.iter());
        worst = worst.max(mean.abs()).max((var - 1.0).abs());
    }
    worst
}

/// Alternately standardize columns and rows to mean 0 and population variance 1
/// until both hold within `tol`, or `max_iter` passes have run.
pub fn standardize_rows_columns(m: &DataMatrix, tol: f64, max_iter: usize) -> Result<(DataMatrix, StandardizeReport)> {
    let v = m.values();
    if v.nrows() < 2 || v.ncols() < 2 {
        return Err(Error::InvalidDimension("standardizing rows and columns needs at least a 2 x 2 matrix".into()));
    }
    for (j, col) in v.column_iter().enumerate() {
        if !distinct_at_least_two(col.iter()) {
            return Err(Error::Domain(format!("feature '{}' is constant", m.feature_names()[j])));
        }
    }
    for (i, row) in v.row_iter().enumerate() {
        if !distinct_at_least_two(row.iter()) {
            return Err(Error::Domain(format!("observation '{}' is constant", m.observation_ids()[i])));
        }
    }

    let mut x = v.clone();
    if max_deviation(&x) <= tol {
        return Ok((m.clone(), StandardizeReport { iterations: 0, converged: true }));
    }
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        for mut col in x.column_iter_mut() {
            let (mean, var) = mean_var(col.iter());
            col.apply(|v| *v = (*v - mean) / var.sqrt());
        }
        for mut row in x.row_iter_mut() {
            let (mean, var) = mean_var(row.iter());
            row.apply(|v| *v = (*v - mean) / var.sqrt());
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("standardization produced non-finite values".into()));
        }
        if max_deviation(&x) <= tol {
            converged = true;
            break;
        }
    }
    Ok((m.with_values(x)?, StandardizeReport { iterations, converged }))
}

/// Divide each observation row by its total and take natural logs. When any
/// entry is zero, `pseudocount` is added to every entry first and the
/// returned flag is set.
pub fn counts_to_log_proportions(m: &DataMatrix, pseudocount: f64) -> Result<(DataMatrix, bool)> {
    let v = m.values();
    if let Some(bad) = v.iter().find(|c| **c < 0.0) {
        return Err(Error::Domain(format!("negative count {bad}")));
    }
    for (i, row) in v.row_iter().enumerate() {
        if row.sum() <= 0.0 {
            return Err(Error::Domain(format!("observation '{}' has zero total count", m.observation_ids()[i])));
        }
    }
    let has_zero = v.iter().any(|c| *c == 0.0);
    if has_zero && !(pseudocount > 0.0) {
        return Err(Error::Domain("zero counts need a positive pseudocount".into()));
    }
    let shift = if has_zero { pseudocount } else { 0.0 };
    let mut x = v.add_scalar(shift);
    for mut row in x.row_iter_mut() {
        let total = row.sum();
        row.apply(|c| *c = (*c / total).ln());
    }
    Ok((m.with_values(x)?, has_zero))
}

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Eigenvalues below this are treated as numerical noise around zero.
pub const PSD_TOLERANCE: f64 = 1e-8;

/// Symmetric square root of a positive semidefinite matrix.
///
/// Eigenvalues in `[-PSD_TOLERANCE, 0)` are clipped to zero.
pub fn psd_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(m.clone());
    let mut roots = DVector::zeros(eig.eigenvalues.len());
    for (r, &ev) in roots.iter_mut().zip(eig.eigenvalues.iter()) {
        if ev < -PSD_TOLERANCE {
            return Err(Error::NotPositiveSemidefinite(ev));
        }
        *r = ev.max(0.0).sqrt();
    }
    let v = &eig.eigenvectors;
    Ok(v * DMatrix::from_diagonal(&roots) * v.transpose())
}

/// A factor `L` with `L Lᵀ = m`: Cholesky when it succeeds, otherwise the
/// symmetric square root.
pub fn psd_factor(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    match m.clone().cholesky() {
        Some(ch) => Ok(ch.l()),
        None => psd_sqrt(m),
    }
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sorted_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut sv: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

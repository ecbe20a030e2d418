//! Feature scores computed from a cross-covariance (or cross-correlation)
//! matrix, the rankings they induce, and the top-rank 1-0 loss.
//!
//! Rows of the matrix are features, columns are response variates. Feature
//! indices are zero-based throughout; the correlated features occupy
//! `0..p_t`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A `p × q` real matrix with `p, q ≥ 1` and finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCovMatrix(DMatrix<f64>);

impl CrossCovMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::InvalidDimension(format!(
                "cross-covariance matrix must be at least 1x1, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if let Some(bad) = entries.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite cross-covariance entry {bad}")));
        }
        Ok(CrossCovMatrix(entries))
    }

    pub fn from_row_slice(p: usize, q: usize, data: &[f64]) -> Result<Self> {
        if data.len() != p * q {
            return Err(Error::InvalidDimension(format!(
                "expected {} entries for a {p}x{q} matrix, got {}",
                p * q,
                data.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(p, q, data))
    }

    /// Features (rows).
    pub fn p(&self) -> usize {
        self.0.nrows()
    }

    /// Response variates (columns).
    pub fn q(&self) -> usize {
        self.0.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(&self.0 * c)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }
}

/// Nonnegative per-feature scores; larger is more promising.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(scores: Vec<f64>) -> Result<Self> {
        if let Some(bad) = scores.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return Err(Error::Domain(format!("scores must be finite and nonnegative, got {bad}")));
        }
        Ok(ScoreVector(scores))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Index of the best score, lowest index winning ties.
    pub fn top_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, &s) in self.0.iter().enumerate() {
            match best {
                Some(b) if self.0[b] >= s => {}
                _ => best = Some(i),
            }
        }
        best
    }
}

/// `order[r]` is the feature holding ordinal rank `r + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking {
    order: Vec<usize>,
}

impl Ranking {
    /// Descending by score; equal scores go to the lower feature index first.
    pub fn from_scores(scores: &ScoreVector) -> Self {
        let s = scores.as_slice();
        let mut order: Vec<usize> = (0..s.len()).collect();
        // Stable sort keeps ascending index among equal scores.
        order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
        Ranking { order }
    }

    /// Build from an explicit order; fails unless it is a permutation of `0..len`.
    pub fn from_order(order: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; order.len()];
        for &i in &order {
            if i >= order.len() || seen[i] {
                return Err(Error::Domain(format!("ranking order is not a permutation: {order:?}")));
            }
            seen[i] = true;
        }
        Ok(Ranking { order })
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn top(&self) -> Option<usize> {
        self.order.first().copied()
    }

    /// Inverse map: `ranks()[feature]` is the 1-based rank of `feature`.
    pub fn ranks(&self) -> Vec<usize> {
        let mut ranks = vec![0; self.order.len()];
        for (r, &i) in self.order.iter().enumerate() {
            ranks[i] = r + 1;
        }
        ranks
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

pub fn ranking_from_scores(scores: &ScoreVector) -> Ranking {
    Ranking::from_scores(scores)
}

/// 1 if the top-ranked feature is a noise feature (index ≥ `p_t`), else 0.
pub fn zero_one_loss(ranking: &Ranking, p_t: usize) -> u8 {
    match ranking.top() {
        Some(top) if top >= p_t => 1,
        _ => 0,
    }
}

/// The two selection methods under study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    #[serde(alias = "thres")]
    Thresholding,
    Svd,
}

impl MethodKind {
    pub const ALL: [MethodKind; 2] = [MethodKind::Thresholding, MethodKind::Svd];

    pub fn score(self, t: &CrossCovMatrix) -> Result<ScoreVector> {
        match self {
            MethodKind::Thresholding => Ok(score_thresholding(t)),
            MethodKind::Svd => score_svd(t),
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            MethodKind::Thresholding => "thres",
            MethodKind::Svd => "svd",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "thres" | "thresholding" => Ok(MethodKind::Thresholding),
            "svd" => Ok(MethodKind::Svd),
            other => Err(Error::InvalidConfig(format!("unknown method '{other}' (expected thres or svd)"))),
        }
    }
}

/// Row-wise maximum absolute entry.
pub fn score_thresholding(t: &CrossCovMatrix) -> ScoreVector {
    let m = t.as_matrix();
    let mut scores = vec![0.0_f64; m.nrows()];
    // Column-major storage: walk columns, update row maxima.
    for col in m.column_iter() {
        for (s, v) in scores.iter_mut().zip(col.iter()) {
            let a = v.abs();
            if a > *s {
                *s = a;
            }
        }
    }
    ScoreVector(scores)
}

/// Absolute loadings of the first left singular vector.
pub fn score_svd(t: &CrossCovMatrix) -> Result<ScoreVector> {
    let u = first_left_singular_vector(t)?;
    Ok(ScoreVector(u.iter().map(|v| v.abs()).collect()))
}

pub const POWER_TOLERANCE: f64 = 1e-12;
pub const POWER_MAX_ITER: usize = 10_000;
const RESIDUAL_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SvdDiagnostics {
    pub iterations: usize,
    /// Power iteration hit its cap and the dense eigensolver was used.
    pub dense_fallback: bool,
    /// The top two singular values coincide within tolerance; the returned
    /// vector is some unit vector in the top singular subspace.
    pub near_tie: bool,
    pub sigma1: f64,
}

pub fn first_left_singular_vector(t: &CrossCovMatrix) -> Result<DVector<f64>> {
    first_left_singular_vector_with_diagnostics(t).map(|(u, _)| u)
}

/// Power iteration on the smaller Gram matrix (`T Tᵀ` when `p ≤ q`, else
/// `Tᵀ T` followed by `u ∝ T v`).
///
/// Stops when the Rayleigh quotient changes by less than `1e-12` relative and
/// the eigen-residual is below `1e-10` relative. The sign is fixed so the
/// largest-magnitude component is positive.
pub fn first_left_singular_vector_with_diagnostics(t: &CrossCovMatrix) -> Result<(DVector<f64>, SvdDiagnostics)> {
    if t.is_zero() {
        return Err(Error::DegenerateMatrix("zero cross-covariance matrix has no principal direction"));
    }
    let m = t.as_matrix();
    let left_side = m.nrows() <= m.ncols();
    let gram = if left_side { m * m.transpose() } else { m.transpose() * m };

    let (x, mut diag) = top_eigenvector(&gram);
    let mut u = if left_side { x } else { m * x };
    let norm = u.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::DegenerateMatrix("first singular vector vanished"));
    }
    u /= norm;
    fix_sign(&mut u);
    diag.sigma1 = diag.sigma1.max(0.0).sqrt();
    Ok((u, diag))
}

fn fix_sign(u: &mut DVector<f64>) {
    let lead = u.iamax();
    if u[lead] < 0.0 {
        u.neg_mut();
    }
}

fn top_eigenvector(gram: &DMatrix<f64>) -> (DVector<f64>, SvdDiagnostics) {
    let d = gram.nrows();
    // Start from G e_k with the largest diagonal; G_kk > 0 whenever T ≠ 0.
    let k = (0..d).fold(0, |best, i| if gram[(i, i)] > gram[(best, best)] { i } else { best });
    let mut x: DVector<f64> = gram.column(k).into_owned();
    x /= x.norm();

    let mut w = DVector::zeros(d);
    let mut rho_prev = f64::NAN;
    for iter in 1..=POWER_MAX_ITER {
        gram.mul_to(&x, &mut w);
        let rho = x.dot(&w);
        let residual = (&w - &x * rho).norm();
        let stalled = (rho - rho_prev).abs() <= POWER_TOLERANCE * rho.abs();
        if residual <= RESIDUAL_TOLERANCE * rho.abs() && stalled || residual == 0.0 {
            return (x, SvdDiagnostics { iterations: iter, sigma1: rho, ..Default::default() });
        }
        rho_prev = rho;
        let wn = w.norm();
        if wn == 0.0 {
            break;
        }
        x.copy_from(&w);
        x /= wn;
    }

    let eig = SymmetricEigen::new(gram.clone());
    let mut idx: Vec<usize> = (0..d).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let l1 = eig.eigenvalues[idx[0]];
    let l2 = if d > 1 { eig.eigenvalues[idx[1]] } else { f64::NEG_INFINITY };
    let diag = SvdDiagnostics {
        iterations: POWER_MAX_ITER,
        dense_fallback: true,
        near_tie: (l1 - l2) <= POWER_TOLERANCE * l1.abs(),
        sigma1: l1,
    };
    (eig.eigenvectors.column(idx[0]).into_owned(), diag)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cc(p: usize, q: usize, data: &[f64]) -> CrossCovMatrix {
        CrossCovMatrix::from_row_slice(p, q, data).unwrap()
    }

    #[test]
    fn thresholding_examples() {
        let s = score_thresholding(&cc(2, 2, &[3.0, -1.0, 0.0, 2.0]));
        assert_eq!(s.as_slice(), &[3.0, 2.0]);
        let z = score_thresholding(&cc(3, 2, &[0.0; 6]));
        assert_eq!(z.as_slice(), &[0.0; 3]);
    }

    #[test]
    fn svd_diagonal() {
        let t = cc(2, 2, &[3.0, 0.0, 0.0, 2.0]);
        let u = first_left_singular_vector(&t).unwrap();
        assert!((u[0] - 1.0).abs() < 1e-12 && u[1].abs() < 1e-12);
        assert_eq!(score_svd(&t).unwrap().as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn svd_rank_one() {
        let a = [1.0, -2.0, 0.5, 3.0];
        let b = [0.3, -1.0, 2.0];
        let data: Vec<f64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        let u = first_left_singular_vector(&cc(4, 3, &data)).unwrap();
        let an = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        // Largest |a_i| is positive after sign fix.
        for (ui, ai) in u.iter().zip(a.iter()) {
            assert!((ui - ai / an).abs() < 1e-12, "{ui} vs {}", ai / an);
        }
    }

    #[test]
    fn svd_of_zero_is_degenerate() {
        let t = cc(2, 3, &[0.0; 6]);
        assert!(matches!(score_svd(&t), Err(Error::DegenerateMatrix(_))));
        // Thresholding still ranks by index.
        let r = Ranking::from_scores(&score_thresholding(&t));
        assert_eq!(r.order(), &[0, 1]);
        assert_eq!(zero_one_loss(&r, 1), 0);
    }

    #[test]
    fn tall_matrix_uses_right_gram() {
        let t = cc(3, 1, &[1.0, -4.0, 2.0]);
        let s = score_svd(&t).unwrap();
        let n = 21.0_f64.sqrt();
        assert!((s.as_slice()[1] - 4.0 / n).abs() < 1e-12);
    }

    #[test]
    fn exact_tie_is_flagged() {
        let t = cc(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        let (u, d) = first_left_singular_vector_with_diagnostics(&t).unwrap();
        assert!((u.norm() - 1.0).abs() < 1e-12);
        // G = I: start vector is already an eigenvector; any unit vector is valid.
        assert!(d.iterations >= 1);
    }

    #[test]
    fn ranking_examples() {
        let r = Ranking::from_scores(&ScoreVector::new(vec![0.5, 0.9, 0.5]).unwrap());
        assert_eq!(r.order(), &[1, 0, 2]);
        assert_eq!(r.ranks(), vec![2, 1, 3]);
        let r = Ranking::from_scores(&ScoreVector::new(vec![7.0]).unwrap());
        assert_eq!(r.order(), &[0]);
    }

    #[test]
    fn top_index_prefers_lowest_on_ties() {
        let s = ScoreVector::new(vec![0.2, 0.9, 0.9, 0.1]).unwrap();
        assert_eq!(s.top_index(), Some(1));
        assert_eq!(Ranking::from_scores(&s).top(), Some(1));
    }

    #[test]
    fn loss_examples() {
        let r = Ranking::from_order(vec![1, 0, 2, 3, 4]).unwrap();
        assert_eq!(zero_one_loss(&r, 3), 0);
        let r = Ranking::from_order(vec![4, 0, 1, 2, 3]).unwrap();
        assert_eq!(zero_one_loss(&r, 3), 1);
        assert_eq!(zero_one_loss(&r, 5), 0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(CrossCovMatrix::new(DMatrix::zeros(0, 3)).is_err());
        assert!(CrossCovMatrix::from_row_slice(1, 2, &[1.0, f64::NAN]).is_err());
        assert!(ScoreVector::new(vec![-1.0]).is_err());
        assert!(Ranking::from_order(vec![0, 0]).is_err());
        assert!("foo".parse::<MethodKind>().is_err());
        assert_eq!("thres".parse::<MethodKind>().unwrap(), MethodKind::Thresholding);
    }
}

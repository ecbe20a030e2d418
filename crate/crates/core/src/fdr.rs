//! Permutation-null p-values and q-values for real two-block data.
//!
//! Two nulls are available. The global null shuffles the entries inside each
//! observation row of `Y`, rescores, and pools all `p` null scores of every
//! replicate into one reference distribution shared by all features. The
//! local null permutes the observation order of `Y` and compares each
//! feature only with its own null scores.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::center_columns;
use crate::rng::{with_workers, Rng, StreamSeed};
use crate::selectors::{CrossCovMatrix, MethodKind, Ranking, ScoreVector};

/// Redraws allowed for a single replicate whose SVD is degenerate.
const MAX_REDRAWS: u64 = 100;

/// Observations × features, with labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: DMatrix<f64>,
    feature_names: Vec<String>,
    observation_ids: Vec<String>,
}

fn check_unique(labels: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::InvalidConfig(format!("duplicate {what} label '{l}'")));
        }
    }
    Ok(())
}

impl DataMatrix {
    pub fn new(values: DMatrix<f64>, feature_names: Vec<String>, observation_ids: Vec<String>) -> Result<Self> {
        if values.nrows() == 0 || values.ncols() == 0 {
            return Err(Error::InvalidDimension("data matrix must have at least one observation and one feature".into()));
        }
        if feature_names.len() != values.ncols() || observation_ids.len() != values.nrows() {
            return Err(Error::InvalidDimension(format!(
                "{} feature names and {} observation ids for a {}x{} matrix",
                feature_names.len(),
                observation_ids.len(),
                values.nrows(),
                values.ncols()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("data matrix contains non-finite value {bad}")));
        }
        check_unique(&feature_names, "feature")?;
        check_unique(&observation_ids, "observation")?;
        Ok(DataMatrix { values, feature_names, observation_ids })
    }

    /// Unlabelled matrix; features are named `f1, f2, …`, observations `o1, …`.
    pub fn from_values(values: DMatrix<f64>) -> Result<Self> {
        let features = (1..=values.ncols()).map(|j| format!("f{j}")).collect();
        let obs = (1..=values.nrows()).map(|i| format!("o{i}")).collect();
        Self::new(values, features, obs)
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn observation_ids(&self) -> &[String] {
        &self.observation_ids
    }

    pub fn observations(&self) -> usize {
        self.values.nrows()
    }

    pub fn features(&self) -> usize {
        self.values.ncols()
    }

    /// Same labels, new values of the same shape.
    pub fn with_values(&self, values: DMatrix<f64>) -> Result<Self> {
        if values.shape() != self.values.shape() {
            return Err(Error::InvalidDimension("replacement values change the matrix shape".into()));
        }
        Self::new(values, self.feature_names.clone(), self.observation_ids.clone())
    }
}

/// Which cross-moment matrix the scores are computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Correlation,
    Covariance,
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cor" | "correlation" => Ok(Statistic::Correlation),
            "cov" | "covariance" => Ok(Statistic::Covariance),
            other => Err(Error::InvalidConfig(format!("unknown statistic '{other}' (expected cor or cov)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationResult {
    pub matrix: CrossCovMatrix,
    /// Zero-variance columns of `X` / `Y`; their correlations are set to 0.
    pub constant_x: Vec<usize>,
    pub constant_y: Vec<usize>,
}

fn check_pair(x: &DataMatrix, y: &DataMatrix, min_n: usize) -> Result<()> {
    if x.observations() != y.observations() {
        return Err(Error::InvalidDimension(format!(
            "X has {} observations, Y has {}",
            x.observations(),
            y.observations()
        )));
    }
    if x.observation_ids != y.observation_ids {
        return Err(Error::InvalidConfig("X and Y observation ids differ (order must match)".into()));
    }
    if x.observations() < min_n {
        return Err(Error::InvalidSampleSize { n: x.observations(), reason: "too few observations" });
    }
    Ok(())
}

/// Centre columns and scale each to unit Euclidean norm; constant columns
/// become zero. Returns the indices of the constant columns.
fn unit_columns(m: &mut DMatrix<f64>) -> Vec<usize> {
    center_columns(m);
    let mut constant = Vec::new();
    for (j, mut col) in m.column_iter_mut().enumerate() {
        let norm = col.norm();
        // Scale-aware test for a column that was constant before centring.
        if norm <= 1e-12 * (1.0 + col.amax()) || norm == 0.0 {
            col.fill(0.0);
            constant.push(j);
        } else {
            col /= norm;
        }
    }
    constant
}

/// Pearson correlation of every `X` feature with every `Y` variate.
pub fn cross_correlation(x: &DataMatrix, y: &DataMatrix) -> Result<CorrelationResult> {
    check_pair(x, y, 3)?;
    let mut xs = x.values.clone();
    let mut ys = y.values.clone();
    let constant_x = unit_columns(&mut xs);
    let constant_y = unit_columns(&mut ys);
    Ok(CorrelationResult { matrix: CrossCovMatrix::new(xs.transpose() * ys)?, constant_x, constant_y })
}

/// Sample cross-covariance with divisor `n − 1`.
pub fn cross_covariance(x: &DataMatrix, y: &DataMatrix) -> Result<CrossCovMatrix> {
    check_pair(x, y, 2)?;
    let mut xc = x.values.clone();
    let mut yc = y.values.clone();
    center_columns(&mut xc);
    center_columns(&mut yc);
    CrossCovMatrix::new(xc.transpose() * yc / (x.observations() - 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NullKind {
    Global,
    Local,
}

impl fmt::Display for NullKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NullKind::Global => "global",
            NullKind::Local => "local",
        })
    }
}

impl FromStr for NullKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(NullKind::Global),
            "local" => Ok(NullKind::Local),
            other => Err(Error::InvalidConfig(format!("unknown null '{other}' (expected global or local)"))),
        }
    }
}

/// How the global null scrambles `Y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GlobalShuffle {
    /// Shuffle the entries within each observation row.
    WithinRows,
    /// Permute each variate column independently across observations.
    WithinColumns,
}

impl FromStr for GlobalShuffle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "within-rows" | "rows" => Ok(GlobalShuffle::WithinRows),
            "within-columns" | "columns" => Ok(GlobalShuffle::WithinColumns),
            other => Err(Error::InvalidConfig(format!("unknown shuffle '{other}' (expected within-rows or within-columns)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Correction {
    None,
    Harmonic,
}

impl Correction {
    /// `harmonic` for SVD and `none` for thresholding.
    pub fn default_for(method: MethodKind) -> Self {
        match method {
            MethodKind::Thresholding => Correction::None,
            MethodKind::Svd => Correction::Harmonic,
        }
    }

    pub fn factor(self, p: usize) -> f64 {
        match self {
            Correction::None => 1.0,
            Correction::Harmonic => harmonic_number(p),
        }
    }
}

impl FromStr for Correction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Correction::None),
            "harmonic" => Ok(Correction::Harmonic),
            other => Err(Error::InvalidConfig(format!("unknown correction '{other}' (expected none or harmonic)"))),
        }
    }
}

/// `Σ_{j=1}^p 1/j`.
pub fn harmonic_number(p: usize) -> f64 {
    (1..=p).map(|j| 1.0 / j as f64).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PermutationOptions {
    pub mc_res: u64,
    pub statistic: Statistic,
    /// Report `(1 + count) / (1 + denominator)` instead of `count / denominator`.
    pub add_one: bool,
    pub global_shuffle: GlobalShuffle,
    pub workers: usize,
}

impl PermutationOptions {
    pub fn new(mc_res: u64) -> Self {
        PermutationOptions {
            mc_res,
            statistic: Statistic::Correlation,
            add_one: false,
            global_shuffle: GlobalShuffle::WithinRows,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PValues {
    pub scores: Vec<f64>,
    pub p_values: Vec<f64>,
    /// Replicates redrawn because their SVD was degenerate.
    pub redrawn: u64,
}

struct Scorer {
    method: MethodKind,
    statistic: Statistic,
    x: DMatrix<f64>,
    divisor: f64,
}

impl Scorer {
    fn new(x: &DataMatrix, method: MethodKind, statistic: Statistic) -> Self {
        let mut xs = x.values.clone();
        match statistic {
            Statistic::Correlation => {
                unit_columns(&mut xs);
            }
            Statistic::Covariance => center_columns(&mut xs),
        }
        Scorer { method, statistic, x: xs, divisor: (x.observations() - 1) as f64 }
    }

    fn scores(&self, y: &DMatrix<f64>) -> Result<ScoreVector> {
        let mut ys = y.clone();
        let cross = match self.statistic {
            Statistic::Correlation => {
                unit_columns(&mut ys);
                self.x.transpose() * ys
            }
            Statistic::Covariance => {
                center_columns(&mut ys);
                self.x.transpose() * ys / self.divisor
            }
        };
        self.method.score(&CrossCovMatrix::new(cross)?)
    }
}

fn permuted(y: &DMatrix<f64>, null: NullKind, shuffle: GlobalShuffle, rng: &mut Rng) -> DMatrix<f64> {
    let (n, q) = y.shape();
    match (null, shuffle) {
        (NullKind::Local, _) => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            DMatrix::from_fn(n, q, |i, j| y[(order[i], j)])
        }
        (NullKind::Global, GlobalShuffle::WithinRows) => {
            let mut out = y.clone();
            let mut row: Vec<f64> = Vec::with_capacity(q);
            for i in 0..n {
                row.clear();
                row.extend(y.row(i).iter());
                row.shuffle(rng);
                for (j, v) in row.iter().enumerate() {
                    out[(i, j)] = *v;
                }
            }
            out
        }
        (NullKind::Global, GlobalShuffle::WithinColumns) => {
            let mut out = y.clone();
            for mut col in out.column_iter_mut() {
                col.as_mut_slice().shuffle(rng);
            }
            out
        }
    }
}

/// Per-feature permutation p-values with the `≤` comparison
/// `I(s(j) ≤ s⁽ⁱ⁾(k))` (zero p-values are possible unless `add_one` is set).
pub fn pvalues(
    x: &DataMatrix,
    y: &DataMatrix,
    method: MethodKind,
    null: NullKind,
    options: &PermutationOptions,
    seed: StreamSeed,
) -> Result<PValues> {
    check_pair(x, y, if options.statistic == Statistic::Correlation { 3 } else { 2 })?;
    if options.mc_res == 0 {
        return Err(Error::InvalidConfig("mc_res must be at least 1".into()));
    }
    let scorer = Scorer::new(x, method, options.statistic);
    let observed = scorer.scores(&y.values)?.into_inner();
    let p = observed.len();

    let replicates: Vec<(Vec<f64>, u64)> = with_workers(options.workers, || {
        (0..options.mc_res)
            .into_par_iter()
            .map(|i| -> Result<(Vec<f64>, u64)> {
                for attempt in 0..MAX_REDRAWS {
                    let mut rng = seed.child(i).child(attempt).rng();
                    let yp = permuted(&y.values, null, options.global_shuffle, &mut rng);
                    match scorer.scores(&yp) {
                        Ok(s) => return Ok((s.into_inner(), attempt)),
                        Err(Error::DegenerateMatrix(_)) => continue,
                        Err(e) => return Err(e),
                    }
                }
                Err(Error::TooManyDiscarded { discarded: MAX_REDRAWS, attempted: MAX_REDRAWS })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let redrawn = replicates.iter().map(|r| r.1).sum();

    let (counts, denominator): (Vec<u64>, u64) = match null {
        NullKind::Global => {
            let mut pooled: Vec<f64> = replicates.iter().flat_map(|r| r.0.iter().copied()).collect();
            pooled.sort_by(|a, b| a.total_cmp(b));
            let total = pooled.len() as u64;
            let counts = observed
                .iter()
                .map(|&s| total - pooled.partition_point(|&v| v < s) as u64)
                .collect();
            (counts, total)
        }
        NullKind::Local => {
            let mut counts = vec![0u64; p];
            for (null_scores, _) in &replicates {
                for (c, (&s, &v)) in counts.iter_mut().zip(observed.iter().zip(null_scores.iter())) {
                    *c += u64::from(s <= v);
                }
            }
            (counts, options.mc_res)
        }
    };
    let p_values = counts
        .iter()
        .map(|&c| if options.add_one { (1 + c) as f64 / (1 + denominator) as f64 } else { c as f64 / denominator as f64 })
        .collect();
    Ok(PValues { scores: observed, p_values, redrawn })
}

/// Ascending ranking of p-values. Ties go to the higher score when scores
/// are given, then to the lower index.
pub fn ascending_pvalue_ranking(p_values: &[f64], scores: Option<&[f64]>) -> Ranking {
    let mut order: Vec<usize> = (0..p_values.len()).collect();
    order.sort_by(|&a, &b| {
        let by_p = p_values[a].total_cmp(&p_values[b]);
        match scores {
            Some(s) => by_p.then(s[b].total_cmp(&s[a])),
            None => by_p,
        }
    });
    Ranking::from_order(order).expect("sorted indices form a permutation")
}

/// `q(j) = c · p · p_value(j) / τ(j)`, where `τ(j)` is the 1-based rank of
/// feature `j` in `ranking` and `c` the correction factor. Not clipped at 1.
pub fn qvalues(p_values: &[f64], ranking: &Ranking, correction: Correction) -> Result<Vec<f64>> {
    if ranking.len() != p_values.len() {
        return Err(Error::InvalidDimension(format!(
            "{} p-values but a ranking of {} features",
            p_values.len(),
            ranking.len()
        )));
    }
    let p = p_values.len();
    let c = correction.factor(p);
    let ranks = ranking.ranks();
    Ok(p_values.iter().zip(ranks).map(|(&pv, r)| c * p as f64 * pv / r as f64).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureInference {
    pub feature_name: String,
    pub feature_index: usize,
    pub score: f64,
    pub p_value: f64,
    pub rank: usize,
    pub q_value: f64,
}

/// Scores, p-values, ranks and q-values for every feature of `X`, best rank first.
pub fn rank_features(
    x: &DataMatrix,
    y: &DataMatrix,
    method: MethodKind,
    null: NullKind,
    options: &PermutationOptions,
    correction: Correction,
    seed: StreamSeed,
) -> Result<Vec<FeatureInference>> {
    let pv = pvalues(x, y, method, null, options, seed)?;
    let ranking = ascending_pvalue_ranking(&pv.p_values, Some(&pv.scores));
    let q = qvalues(&pv.p_values, &ranking, correction)?;
    let ranks = ranking.ranks();
    Ok(ranking
        .order()
        .iter()
        .map(|&j| FeatureInference {
            feature_name: x.feature_names[j].clone(),
            feature_index: j,
            score: pv.scores[j],
            p_value: pv.p_values[j],
            rank: ranks[j],
            q_value: q[j],
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Distribution, StandardNormal};

    fn random_data(n: usize, p: usize, seed: u64) -> DataMatrix {
        let mut rng = StreamSeed::new(seed).rng();
        DataMatrix::from_values(DMatrix::from_fn(n, p, |_, _| StandardNormal.sample(&mut rng))).unwrap()
    }

    fn pearson(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let sab: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let saa: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let sbb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        sab / (saa * sbb).sqrt()
    }

    #[test]
    fn correlation_matches_pairwise_formula() {
        let x = random_data(6, 4, 1);
        let y = random_data(6, 3, 2);
        let r = cross_correlation(&x, &y).unwrap();
        for i in 0..4 {
            for j in 0..3 {
                let a: Vec<f64> = x.values().column(i).iter().copied().collect();
                let b: Vec<f64> = y.values().column(j).iter().copied().collect();
                assert!((r.matrix.as_matrix()[(i, j)] - pearson(&a, &b)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn correlation_edge_cases() {
        let x = DataMatrix::from_values(DMatrix::from_column_slice(4, 2, &[1.0, 2.0, 3.0, 5.0, 1.0, -1.0, -1.0, 1.0])).unwrap();
        let y = DataMatrix::from_values(DMatrix::from_column_slice(4, 1, &[1.0, 2.0, 3.0, 5.0])).unwrap();
        let r = cross_correlation(&x, &y).unwrap();
        assert!((r.matrix.as_matrix()[(0, 0)] - 1.0).abs() < 1e-12);
        // Column 2 of X is orthogonal to Y after centring.
        let y2 = DataMatrix::from_values(DMatrix::from_column_slice(4, 1, &[1.0, 1.0, 2.0, 2.0])).unwrap();
        let r = cross_correlation(&x, &y2).unwrap();
        assert!(r.matrix.as_matrix()[(1, 0)].abs() < 1e-12);
        let constant = DataMatrix::from_values(DMatrix::from_element(4, 1, 3.0)).unwrap();
        let r = cross_correlation(&x, &constant).unwrap();
        assert_eq!(r.constant_y, vec![0]);
        assert!(r.matrix.as_matrix().iter().all(|v| *v == 0.0));
        let short = DataMatrix::from_values(DMatrix::from_element(2, 1, 3.0)).unwrap();
        assert!(cross_correlation(&short, &short).is_err());
    }

    #[test]
    fn mismatched_observations_rejected() {
        let x = random_data(5, 2, 3);
        let y = random_data(6, 2, 4);
        assert!(cross_correlation(&x, &y).is_err());
        let y = DataMatrix::new(random_data(5, 1, 5).values().clone(), vec!["a".into()], (0..5).map(|i| format!("z{i}")).collect()).unwrap();
        assert!(cross_covariance(&x, &y).is_err());
    }

    #[test]
    fn data_matrix_validation() {
        let v = DMatrix::zeros(2, 2);
        assert!(DataMatrix::new(v.clone(), vec!["a".into(), "a".into()], vec!["1".into(), "2".into()]).is_err());
        assert!(DataMatrix::new(v.clone(), vec!["a".into()], vec!["1".into(), "2".into()]).is_err());
        assert!(DataMatrix::from_values(DMatrix::from_element(1, 1, f64::NAN)).is_err());
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic_number(1), 1.0);
        assert!((harmonic_number(585) - 6.95).abs() < 0.005);
    }

    #[test]
    fn qvalue_formula_matches_naive() {
        let mut rng = StreamSeed::new(9).rng();
        let p: Vec<f64> = (0..40).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
        let ranking = ascending_pvalue_ranking(&p, None);
        let q = qvalues(&p, &ranking, Correction::Harmonic).unwrap();
        let q0 = qvalues(&p, &ranking, Correction::None).unwrap();
        let c: f64 = (1..=40).map(|j| 1.0 / j as f64).sum();
        for j in 0..40 {
            // Naive rank: count of strictly smaller p-values plus lower-index ties.
            let tau = 1 + (0..40).filter(|&k| p[k] < p[j] || (p[k] == p[j] && k < j)).count();
            let expect = c * 40.0 * p[j] / tau as f64;
            assert!((q[j] - expect).abs() < 1e-12);
            assert!((q[j] - c * q0[j]).abs() < 1e-12 * q[j].max(1.0));
        }
        let single = qvalues(&[0.3], &ascending_pvalue_ranking(&[0.3], None), Correction::Harmonic).unwrap();
        assert_eq!(single, vec![0.3]);
    }

    #[test]
    fn weakest_feature_gets_p_one() {
        let mut x = random_data(8, 5, 10).values().clone();
        x.column_mut(4).fill(1.0); // constant: correlation 0, lowest possible score
        let x = DataMatrix::from_values(x).unwrap();
        let y = random_data(8, 3, 11);
        for null in [NullKind::Global, NullKind::Local] {
            let pv = pvalues(&x, &y, MethodKind::Thresholding, null, &PermutationOptions::new(50), StreamSeed::new(1)).unwrap();
            assert_eq!(pv.p_values[4], 1.0);
            assert!(pv.p_values.iter().all(|p| (0.0..=1.0).contains(p)));
        }
    }

    #[test]
    fn pvalues_reproducible_and_worker_invariant() {
        let x = random_data(6, 8, 12);
        let y = random_data(6, 4, 13);
        let mut opts = PermutationOptions::new(200);
        let a = pvalues(&x, &y, MethodKind::Svd, NullKind::Global, &opts, StreamSeed::new(2)).unwrap();
        opts.workers = 3;
        let b = pvalues(&x, &y, MethodKind::Svd, NullKind::Global, &opts, StreamSeed::new(2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn add_one_smoothing_never_zero() {
        let x = random_data(6, 8, 14);
        let y = random_data(6, 4, 15);
        let mut opts = PermutationOptions::new(20);
        opts.add_one = true;
        let pv = pvalues(&x, &y, MethodKind::Thresholding, NullKind::Local, &opts, StreamSeed::new(3)).unwrap();
        assert!(pv.p_values.iter().all(|&p| p >= 1.0 / 21.0));
    }

    #[test]
    fn global_rank_follows_scores() {
        let x = random_data(10, 15, 16);
        let y = random_data(10, 5, 17);
        for method in MethodKind::ALL {
            for shuffle in [GlobalShuffle::WithinRows, GlobalShuffle::WithinColumns] {
                let mut opts = PermutationOptions::new(30);
                opts.global_shuffle = shuffle;
                let rep =
                    rank_features(&x, &y, method, NullKind::Global, &opts, Correction::default_for(method), StreamSeed::new(4))
                        .unwrap();
                let scores = ScoreVector::new(rep.iter().map(|f| f.score).collect()).unwrap();
                // Reported rows are in rank order, so scores must be non-increasing.
                assert!(scores.as_slice().windows(2).all(|w| w[0] >= w[1]));
                let psi = Ranking::from_scores(&method.score(&cross_correlation(&x, &y).unwrap().matrix).unwrap());
                let order: Vec<usize> = rep.iter().map(|f| f.feature_index).collect();
                assert_eq!(order, psi.order());
            }
        }
    }

    #[test]
    fn relabelling_x_permutes_outputs() {
        let x = random_data(7, 6, 18);
        let y = random_data(7, 3, 19);
        let perm = [3, 0, 5, 1, 4, 2];
        let xp = DataMatrix::from_values(DMatrix::from_fn(7, 6, |i, j| x.values()[(i, perm[j])])).unwrap();
        for null in [NullKind::Global, NullKind::Local] {
            let opts = PermutationOptions::new(40);
            let a = pvalues(&x, &y, MethodKind::Thresholding, null, &opts, StreamSeed::new(5)).unwrap();
            let b = pvalues(&xp, &y, MethodKind::Thresholding, null, &opts, StreamSeed::new(5)).unwrap();
            for j in 0..6 {
                assert_eq!(b.p_values[j], a.p_values[perm[j]]);
            }
        }
    }
}

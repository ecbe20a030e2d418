//! The block covariance model and samplers for the sample cross-covariance.
//!
//! The joint covariance of `(X, Y) = (X_t, X_u, Y_t, Y_u)` has identity
//! diagonal blocks and a single nonzero cross block between the correlated
//! features `X_t` and the correlated variates `Y_t`. Three samplers draw the
//! `p × q` sample cross-covariance:
//!
//! * [`sample_cross_cov_wishart`]: the off-diagonal block of a
//!   `Wishart(ν, Σ/ν)` draw (Bartlett decomposition; `ν = n − 1`).
//! * [`sample_cross_cov_data`]: same distribution, built from `n` simulated
//!   observations, exploiting the block structure. Use this when `p + q` is
//!   large.
//! * [`sample_cross_cov_asymptotic`]: the Gaussian limit with independent
//!   entries of variance `1/(n − 1)`.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::{ChiSquared, Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{psd_factor, psd_sqrt, singular_values};
use crate::rng::Rng;
use crate::selectors::CrossCovMatrix;

/// Slack allowed on the unit bound for singular values of a cross block.
const UNIT_BOUND_SLACK: f64 = 1e-10;

/// Simulation model size: `q_t = p_t` correlated variates are implied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub p_t: usize,
    pub p_u: usize,
    pub q_u: usize,
}

impl ModelParams {
    pub fn new(n: usize, p_t: usize, p_u: usize, q_u: usize) -> Result<Self> {
        let params = ModelParams { n, p_t, p_u, q_u };
        params.validate()?;
        Ok(params)
    }

    /// Build from totals `p = p_t + p_u`, `q = p_t + q_u`.
    pub fn from_totals(n: usize, p_t: usize, p: usize, q: usize) -> Result<Self> {
        if p < p_t || q < p_t {
            return Err(Error::InvalidDimension(format!("p = {p} and q = {q} must both be at least p_t = {p_t}")));
        }
        Self::new(n, p_t, p - p_t, q - p_t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidSampleSize { n: self.n, reason: "the sample covariance needs n >= 2" });
        }
        if self.p_t == 0 {
            return Err(Error::InvalidDimension("p_t must be at least 1".into()));
        }
        Ok(())
    }

    pub fn q_t(&self) -> usize {
        self.p_t
    }

    pub fn p(&self) -> usize {
        self.p_t + self.p_u
    }

    pub fn q(&self) -> usize {
        self.p_t + self.q_u
    }
}

/// `Σ_{X_t Y_t} = G1 · D · G2ᵀ` with `D`'s entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalBlock {
    matrix: DMatrix<f64>,
    singular_values: Vec<f64>,
}

impl SignalBlock {
    pub fn from_factors(g1: &DMatrix<f64>, d: &[f64], g2: &DMatrix<f64>) -> Result<Self> {
        let k = d.len();
        if k == 0 || g1.shape() != (k, k) || g2.shape() != (k, k) {
            return Err(Error::InvalidDimension(format!(
                "signal factors must be square of size {k}, got {:?} and {:?}",
                g1.shape(),
                g2.shape()
            )));
        }
        if let Some(bad) = d.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::Domain(format!("signal singular value {bad} outside [0, 1]")));
        }
        let diag = DMatrix::from_diagonal(&DVector::from_column_slice(d));
        Ok(SignalBlock { matrix: g1 * diag * g2.transpose(), singular_values: d.to_vec() })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    pub fn p_t(&self) -> usize {
        self.singular_values.len()
    }

    /// The block multiplied by `lambda ∈ [0, 1]`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Domain(format!("signal scale {lambda} outside [0, 1]")));
        }
        Ok(SignalBlock {
            matrix: &self.matrix * lambda,
            singular_values: self.singular_values.iter().map(|d| d * lambda).collect(),
        })
    }
}

/// Joint covariance of `(X, Y)` with identity diagonal blocks.
///
/// Only the leading `rows × cols` corner of `Σ_XY` can be nonzero; it is
/// stored alone so that large `p, q` never materialize the full matrix unless
/// asked to.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceModel {
    p: usize,
    q: usize,
    block: DMatrix<f64>,
    params: Option<ModelParams>,
}

impl CovarianceModel {
    fn with_block(p: usize, q: usize, block: DMatrix<f64>, params: Option<ModelParams>) -> Result<Self> {
        if p == 0 || q == 0 || block.nrows() > p || block.ncols() > q {
            return Err(Error::InvalidDimension(format!(
                "cross block {:?} does not fit in a {p}x{q} cross-covariance",
                block.shape()
            )));
        }
        if let Some(&s1) = singular_values(&block).first() {
            if s1 > 1.0 + UNIT_BOUND_SLACK {
                return Err(Error::NotPositiveSemidefinite(1.0 - s1));
            }
        }
        Ok(CovarianceModel { p, q, block, params })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn params(&self) -> Option<&ModelParams> {
        self.params.as_ref()
    }

    /// The nonzero leading corner of `Σ_XY`.
    pub fn active_block(&self) -> &DMatrix<f64> {
        &self.block
    }

    /// The full `p × q` population cross-covariance `Σ_XY`.
    pub fn cross_cov(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.p, self.q);
        m.view_mut((0, 0), self.block.shape()).copy_from(&self.block);
        m
    }

    /// The full `(p + q) × (p + q)` covariance, mirrored so it is exactly symmetric.
    pub fn sigma(&self) -> DMatrix<f64> {
        let d = self.p + self.q;
        let mut s = DMatrix::identity(d, d);
        for j in 0..self.block.ncols() {
            for i in 0..self.block.nrows() {
                let v = self.block[(i, j)];
                s[(i, self.p + j)] = v;
                s[(self.p + j, i)] = v;
            }
        }
        s
    }
}

pub fn assemble_sigma(signal: &SignalBlock, p_u: usize, q_u: usize) -> CovarianceModel {
    let k = signal.p_t();
    CovarianceModel {
        p: k + p_u,
        q: k + q_u,
        block: signal.matrix.clone(),
        params: None,
    }
}

/// Assemble and remember the model parameters.
pub fn assemble_model(signal: &SignalBlock, params: &ModelParams) -> Result<CovarianceModel> {
    params.validate()?;
    if signal.p_t() != params.p_t {
        return Err(Error::InvalidDimension(format!(
            "signal block has p_t = {}, params say {}",
            signal.p_t(),
            params.p_t
        )));
    }
    let mut model = assemble_sigma(signal, params.p_u, params.q_u);
    model.params = Some(*params);
    Ok(model)
}

/// `Ω` and its reference sample size `n0` for the shrinking-signal limit.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledOmegaModel {
    omega: DMatrix<f64>,
    n0: usize,
}

impl ScaledOmegaModel {
    pub fn new(omega: DMatrix<f64>, n0: usize) -> Result<Self> {
        if n0 == 0 {
            return Err(Error::InvalidSampleSize { n: 0, reason: "n0 must be at least 1" });
        }
        if omega.nrows() == 0 || omega.ncols() == 0 {
            return Err(Error::InvalidDimension("omega must be at least 1x1".into()));
        }
        if let Some(&s1) = singular_values(&omega).first() {
            if s1 > 1.0 + UNIT_BOUND_SLACK {
                return Err(Error::Domain(format!("largest singular value of omega is {s1} > 1")));
            }
        }
        Ok(ScaledOmegaModel { omega, n0 })
    }

    pub fn omega(&self) -> &DMatrix<f64> {
        &self.omega
    }

    pub fn n0(&self) -> usize {
        self.n0
    }
}

/// `Σ(n)` with off-diagonal block `√(n0/n) · Ω`.
pub fn scaled_sigma_n(scaled: &ScaledOmegaModel, n: usize) -> Result<CovarianceModel> {
    if n < scaled.n0 {
        return Err(Error::OutOfAsymptoticRange { n, n0: scaled.n0 });
    }
    let factor = if n == scaled.n0 { 1.0 } else { (scaled.n0 as f64 / n as f64).sqrt() };
    let (p, q) = scaled.omega.shape();
    CovarianceModel::with_block(p, q, &scaled.omega * factor, None)
}

fn normal_matrix(rows: usize, cols: usize, rng: &mut Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed orthogonal matrix: QR of a standard normal matrix with
/// the columns of `Q` flipped so that `R` has a positive diagonal.
pub fn random_orthogonal(dim: usize, rng: &mut Rng) -> Result<DMatrix<f64>> {
    if dim == 0 {
        return Err(Error::InvalidDimension("orthogonal matrix dimension must be at least 1".into()));
    }
    let qr = normal_matrix(dim, dim, rng).qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(q)
}

/// `G1 · D · G2ᵀ` with Haar `G1, G2` and `D_ii ~ Uniform[0, 1]`.
pub fn random_signal_block(p_t: usize, rng: &mut Rng) -> Result<SignalBlock> {
    if p_t == 0 {
        return Err(Error::InvalidDimension("p_t must be at least 1".into()));
    }
    let g1 = random_orthogonal(p_t, rng)?;
    let g2 = random_orthogonal(p_t, rng)?;
    let unit = Uniform::new_inclusive(0.0, 1.0).expect("valid range");
    let d: Vec<f64> = (0..p_t).map(|_| unit.sample(rng)).collect();
    SignalBlock::from_factors(&g1, &d, &g2)
}

fn require_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidSampleSize { n, reason: "the sample covariance needs n >= 2" });
    }
    Ok(())
}

/// Off-diagonal block of `Wishart(n − 1, Σ/(n − 1))`.
pub fn sample_cross_cov_wishart(model: &CovarianceModel, n: usize, rng: &mut Rng) -> Result<CrossCovMatrix> {
    require_n(n)?;
    sample_wishart_cross_block(model, n - 1, rng)
}

/// Off-diagonal block of `Wishart(ν, Σ/ν)`.
///
/// With `ν ≥ p + q` this uses the Bartlett decomposition `W = L A Aᵀ Lᵀ / ν`
/// (`A` lower triangular, `A_ii² ~ χ²_{ν−i}`, standard normal below the
/// diagonal). For singular Wisharts (`ν < p + q`) the factor is a
/// `(p + q) × ν` standard normal matrix instead.
pub fn sample_wishart_cross_block(model: &CovarianceModel, nu: usize, rng: &mut Rng) -> Result<CrossCovMatrix> {
    if nu == 0 {
        return Err(Error::InvalidSampleSize { n: nu, reason: "Wishart degrees of freedom must be positive" });
    }
    let dim = model.p + model.q;
    let l = psd_factor(&model.sigma())?;
    let a = if nu >= dim {
        let mut a = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            let chi2 = ChiSquared::new((nu - i) as f64).map_err(|e| Error::Domain(e.to_string()))?;
            a[(i, i)] = chi2.sample(rng).sqrt();
            for j in 0..i {
                a[(i, j)] = rng.sample(StandardNormal);
            }
        }
        a
    } else {
        normal_matrix(dim, nu, rng)
    };
    let m = l * a;
    let top = m.rows(0, model.p);
    let bottom = m.rows(model.p, model.q);
    CrossCovMatrix::new(top * bottom.transpose() / nu as f64)
}

/// Sample cross-covariance of `n` simulated observations (divisor `n − 1`).
///
/// Draws `X ~ N(0, I_p)`, then `Y_active = X_active B + E C` with
/// `C = (I − BᵀB)^{1/2}` for the nonzero corner `B`, and independent
/// standard normals elsewhere. Cost is `O(n p q)`.
pub fn sample_cross_cov_data(model: &CovarianceModel, n: usize, rng: &mut Rng) -> Result<CrossCovMatrix> {
    require_n(n)?;
    let (p, q) = (model.p, model.q);
    let (r, c) = model.block.shape();
    let mut x = normal_matrix(n, p, rng);
    let mut y = normal_matrix(n, q, rng);
    if r > 0 && c > 0 {
        let b = &model.block;
        let cond = DMatrix::identity(c, c) - b.transpose() * b;
        let root = psd_sqrt(&cond)?;
        let e = y.columns(0, c).into_owned();
        let active = x.columns(0, r) * b + e * root;
        y.columns_mut(0, c).copy_from(&active);
    }
    center_columns(&mut x);
    center_columns(&mut y);
    CrossCovMatrix::new(x.transpose() * y / (n - 1) as f64)
}

pub(crate) fn center_columns(m: &mut DMatrix<f64>) {
    let n = m.nrows() as f64;
    for mut col in m.column_iter_mut() {
        let mean = col.sum() / n;
        col.add_scalar_mut(-mean);
    }
}

/// Entrywise `N(Σ_XY[i, j], 1/(n − 1))`.
pub fn sample_cross_cov_asymptotic(sigma_xy: &CrossCovMatrix, n: usize, rng: &mut Rng) -> Result<CrossCovMatrix> {
    require_n(n)?;
    let sd = 1.0 / ((n - 1) as f64).sqrt();
    let mean = sigma_xy.as_matrix();
    let noise = normal_matrix(mean.nrows(), mean.ncols(), rng);
    CrossCovMatrix::new(noise * sd + mean)
}

/// [`sample_cross_cov_asymptotic`] for a model, without building the full mean.
///
/// Consumes the random stream identically to the generic version.
pub fn sample_cross_cov_asymptotic_model(model: &CovarianceModel, n: usize, rng: &mut Rng) -> Result<CrossCovMatrix> {
    require_n(n)?;
    let sd = 1.0 / ((n - 1) as f64).sqrt();
    let mut m = normal_matrix(model.p, model.q, rng) * sd;
    let shape = model.block.shape();
    let mut corner = m.view_mut((0, 0), shape);
    corner += &model.block;
    CrossCovMatrix::new(m)
}

/// The three ways to draw a sample cross-covariance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerKind {
    #[serde(alias = "wishart")]
    WishartExact,
    #[serde(alias = "data")]
    DataSimulation,
    #[serde(alias = "asymptotic")]
    AsymptoticGaussian,
}

impl SamplerKind {
    pub const ALL: [SamplerKind; 3] = [SamplerKind::WishartExact, SamplerKind::DataSimulation, SamplerKind::AsymptoticGaussian];

    pub fn sample(self, model: &CovarianceModel, n: usize, rng: &mut Rng) -> Result<CrossCovMatrix> {
        match self {
            SamplerKind::WishartExact => sample_cross_cov_wishart(model, n, rng),
            SamplerKind::DataSimulation => sample_cross_cov_data(model, n, rng),
            SamplerKind::AsymptoticGaussian => sample_cross_cov_asymptotic_model(model, n, rng),
        }
    }

    pub fn is_exact(self) -> bool {
        !matches!(self, SamplerKind::AsymptoticGaussian)
    }

    pub fn short_name(self) -> &'static str {
        match self {
            SamplerKind::WishartExact => "wishart",
            SamplerKind::DataSimulation => "data",
            SamplerKind::AsymptoticGaussian => "asymptotic",
        }
    }
}

impl std::fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.short_name())
    }
}

impl std::str::FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wishart" | "wishart-exact" => Ok(SamplerKind::WishartExact),
            "data" | "data-simulation" => Ok(SamplerKind::DataSimulation),
            "asymptotic" | "asymptotic-gaussian" => Ok(SamplerKind::AsymptoticGaussian),
            other => Err(Error::InvalidConfig(format!(
                "unknown sampler '{other}' (expected wishart, data or asymptotic)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs_diff, sorted_eigenvalues};
    use crate::rng::StreamSeed;

    fn rng(seed: u64) -> Rng {
        StreamSeed::new(seed).rng()
    }

    #[test]
    fn orthogonal_is_orthogonal() {
        let mut r = rng(1);
        for dim in 1..=6 {
            let q = random_orthogonal(dim, &mut r).unwrap();
            let qtq = q.transpose() * &q;
            assert!(max_abs_diff(&qtq, &DMatrix::identity(dim, dim)) < 1e-10);
        }
        assert!(random_orthogonal(0, &mut r).is_err());
    }

    #[test]
    fn orthogonal_1x1_is_a_fair_sign() {
        let mut r = rng(2);
        let draws = 20_000;
        let plus = (0..draws)
            .filter(|_| {
                let q = random_orthogonal(1, &mut r).unwrap()[(0, 0)];
                assert!(q == 1.0 || q == -1.0);
                q > 0.0
            })
            .count();
        let frac = plus as f64 / draws as f64;
        let se = (0.25 / draws as f64).sqrt();
        assert!((frac - 0.5).abs() < 4.0 * se, "{frac}");
    }

    #[test]
    fn orthogonal_entries_have_zero_mean() {
        let mut r = rng(3);
        let draws = 20_000;
        let vals: Vec<f64> = (0..draws).map(|_| random_orthogonal(3, &mut r).unwrap()[(0, 0)]).collect();
        let mean = vals.iter().sum::<f64>() / draws as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        assert!(mean.abs() < 3.0 * (var / draws as f64).sqrt(), "mean {mean}");
        // Haar entries of O(3) have variance 1/3.
        assert!((var - 1.0 / 3.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn signal_block_examples() {
        let mut r = rng(4);
        let s = random_signal_block(1, &mut r).unwrap();
        assert!((s.matrix()[(0, 0)].abs() - s.singular_values()[0]).abs() < 1e-15);
        let s = random_signal_block(4, &mut r).unwrap();
        let mut stored = s.singular_values().to_vec();
        stored.sort_by(|a, b| b.total_cmp(a));
        let sv = singular_values(s.matrix());
        for (a, b) in stored.iter().zip(sv.iter()) {
            assert!((a - b).abs() < 1e-10);
            assert!((0.0..=1.0 + 1e-12).contains(b));
        }
        assert!(random_signal_block(0, &mut r).is_err());
    }

    #[test]
    fn largest_singular_value_matches_max_of_uniforms() {
        // Oracle: max of 3 iid Uniform[0,1], simulated independently.
        let mut r = rng(5);
        let mut oracle = rng(6);
        let draws = 10_000;
        let vals: Vec<f64> = (0..draws)
            .map(|_| singular_values(random_signal_block(3, &mut r).unwrap().matrix())[0])
            .collect();
        let brute: Vec<f64> = (0..draws)
            .map(|_| (0..3).map(|_| oracle.random::<f64>()).fold(0.0, f64::max))
            .collect();
        let mean = vals.iter().sum::<f64>() / draws as f64;
        let bmean = brute.iter().sum::<f64>() / draws as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        let se = (2.0 * var / draws as f64).sqrt();
        assert!((mean - bmean).abs() < 3.0 * se, "{mean} vs {bmean}");
        assert!((bmean - 0.75).abs() < 0.01);
    }

    fn identity_signal(d: f64) -> SignalBlock {
        SignalBlock::from_factors(&DMatrix::identity(1, 1), &[d], &DMatrix::identity(1, 1)).unwrap()
    }

    #[test]
    fn assemble_two_by_two() {
        let m = assemble_sigma(&identity_signal(0.5), 0, 0);
        assert_eq!(m.sigma(), DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]));
    }

    #[test]
    fn assemble_layout_and_symmetry() {
        let mut r = rng(7);
        let s = random_signal_block(3, &mut r).unwrap();
        let m = assemble_sigma(&s, 2, 3);
        let sigma = m.sigma();
        assert_eq!(sigma.shape(), (11, 11));
        assert_eq!(sigma, sigma.transpose());
        // Noise feature rows have no covariance with any Y column.
        for i in 3..5 {
            for j in 5..11 {
                assert_eq!(sigma[(i, j)], 0.0);
            }
        }
        // Identity diagonal blocks.
        for i in 0..11 {
            assert_eq!(sigma[(i, i)], 1.0);
        }
        let ev = sorted_eigenvalues(&sigma);
        assert!(ev[0] >= -1e-8 && *ev.last().unwrap() <= 2.0 + 1e-8);
    }

    #[test]
    fn unit_signal_is_singular() {
        let mut r = rng(8);
        let g1 = random_orthogonal(3, &mut r).unwrap();
        let g2 = random_orthogonal(3, &mut r).unwrap();
        let s = SignalBlock::from_factors(&g1, &[1.0, 1.0, 1.0], &g2).unwrap();
        let ev = sorted_eigenvalues(&assemble_sigma(&s, 1, 1).sigma());
        assert!(ev[0].abs() < 1e-8, "{}", ev[0]);
        // Samplers still work on the boundary.
        let model = assemble_sigma(&s, 1, 1);
        assert!(sample_cross_cov_wishart(&model, 20, &mut r).is_ok());
        assert!(sample_cross_cov_data(&model, 20, &mut r).is_ok());
    }

    #[test]
    fn scaled_sigma_examples() {
        let omega = DMatrix::from_row_slice(2, 2, &[0.6, 0.0, 0.0, 1.0]);
        let sc = ScaledOmegaModel::new(omega.clone(), 5).unwrap();
        assert_eq!(scaled_sigma_n(&sc, 5).unwrap().cross_cov(), omega);
        assert_eq!(scaled_sigma_n(&sc, 20).unwrap().cross_cov(), &omega / 2.0);
        let ev = sorted_eigenvalues(&scaled_sigma_n(&sc, 5).unwrap().sigma());
        assert!(ev[0] >= -1e-10);
        assert!(matches!(scaled_sigma_n(&sc, 4), Err(Error::OutOfAsymptoticRange { .. })));
        assert!(ScaledOmegaModel::new(DMatrix::from_element(1, 1, 1.5), 1).is_err());
    }

    #[test]
    fn samplers_reject_small_n() {
        let m = assemble_sigma(&identity_signal(0.5), 1, 1);
        let mut r = rng(9);
        assert!(matches!(sample_cross_cov_wishart(&m, 1, &mut r), Err(Error::InvalidSampleSize { .. })));
        assert!(matches!(sample_cross_cov_data(&m, 1, &mut r), Err(Error::InvalidSampleSize { .. })));
        let cc = CrossCovMatrix::new(m.cross_cov()).unwrap();
        assert!(matches!(sample_cross_cov_asymptotic(&cc, 0, &mut r), Err(Error::InvalidSampleSize { .. })));
    }

    #[test]
    fn samplers_are_deterministic() {
        let mut r = rng(10);
        let model = assemble_sigma(&random_signal_block(2, &mut r).unwrap(), 2, 1);
        for kind in [SamplerKind::WishartExact, SamplerKind::DataSimulation, SamplerKind::AsymptoticGaussian] {
            let a = kind.sample(&model, 7, &mut rng(99)).unwrap();
            let b = kind.sample(&model, 7, &mut rng(99)).unwrap();
            assert_eq!(a, b, "{kind}");
            assert_eq!((a.p(), a.q()), (4, 3));
        }
        let cc = CrossCovMatrix::new(model.cross_cov()).unwrap();
        assert_eq!(
            sample_cross_cov_asymptotic(&cc, 7, &mut rng(5)).unwrap(),
            sample_cross_cov_asymptotic_model(&model, 7, &mut rng(5)).unwrap()
        );
    }

    fn entry_mean_check(kind: SamplerKind, model: &CovarianceModel, n: usize, draws: usize, seed: u64) {
        let mut r = rng(seed);
        let (p, q) = (model.p(), model.q());
        let mut sum = DMatrix::<f64>::zeros(p, q);
        let mut sumsq = DMatrix::<f64>::zeros(p, q);
        for _ in 0..draws {
            let s = kind.sample(model, n, &mut r).unwrap().into_inner();
            sumsq += s.component_mul(&s);
            sum += s;
        }
        let target = model.cross_cov();
        let nd = draws as f64;
        for i in 0..p {
            for j in 0..q {
                let mean = sum[(i, j)] / nd;
                let var = sumsq[(i, j)] / nd - mean * mean;
                let se = (var / nd).sqrt();
                assert!((mean - target[(i, j)]).abs() < 3.5 * se, "{kind} ({i},{j}): {mean} vs {}", target[(i, j)]);
            }
        }
    }

    #[test]
    fn no_signal_entries_are_centered() {
        let model = assemble_sigma(&identity_signal(0.0), 1, 1);
        entry_mean_check(SamplerKind::WishartExact, &model, 5, 50_000, 11);
        entry_mean_check(SamplerKind::DataSimulation, &model, 5, 50_000, 12);
    }

    #[test]
    fn wishart_mean_is_sigma() {
        let model = assemble_sigma(&identity_signal(0.5), 0, 0);
        entry_mean_check(SamplerKind::WishartExact, &model, 50, 50_000, 13);
        entry_mean_check(SamplerKind::DataSimulation, &model, 50, 50_000, 14);
    }

    #[test]
    fn asymptotic_unit_variance_at_n2() {
        let zero = CrossCovMatrix::new(DMatrix::zeros(100, 100)).unwrap();
        let s = sample_cross_cov_asymptotic(&zero, 2, &mut rng(15)).unwrap().into_inner();
        let n = s.len() as f64;
        let mean = s.sum() / n;
        let var = s.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((0.98..=1.02).contains(&var), "{var}");
    }

    #[test]
    fn asymptotic_entries_uncorrelated() {
        let mean = CrossCovMatrix::from_row_slice(1, 2, &[0.3, -0.2]).unwrap();
        let mut r = rng(16);
        let draws = 20_000;
        let pairs: Vec<(f64, f64)> = (0..draws)
            .map(|_| {
                let s = sample_cross_cov_asymptotic(&mean, 10, &mut r).unwrap();
                (s.as_matrix()[(0, 0)] - 0.3, s.as_matrix()[(0, 1)] + 0.2)
            })
            .collect();
        let prods: Vec<f64> = pairs.iter().map(|(a, b)| a * b).collect();
        let m = prods.iter().sum::<f64>() / draws as f64;
        let v = prods.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (draws - 1) as f64;
        assert!(m.abs() < 3.0 * (v / draws as f64).sqrt(), "{m}");
    }
}

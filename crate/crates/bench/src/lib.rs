//! Fixed inputs shared by the criterion benches.

use featsel::model::{assemble_model, random_signal_block, sample_cross_cov_asymptotic_model};
use featsel::{CovarianceModel, CrossCovMatrix, ModelParams, StreamSeed};

/// Model with `p_t` correlated features padded to `p × q`.
pub fn model(n: usize, p_t: usize, p: usize, q: usize, seed: u64) -> (ModelParams, CovarianceModel) {
    let params = ModelParams::from_totals(n, p_t, p, q).expect("valid sizes");
    let signal = random_signal_block(p_t, &mut StreamSeed::new(seed).rng()).expect("signal");
    let model = assemble_model(&signal, &params).expect("model");
    (params, model)
}

/// One noisy cross-covariance draw from [`model`].
pub fn cross_cov(p: usize, q: usize, seed: u64) -> CrossCovMatrix {
    let (params, model) = model(12, 10.min(p).min(q), p, q, seed);
    sample_cross_cov_asymptotic_model(&model, params.n, &mut StreamSeed::new(seed).named("draw").rng()).expect("draw")
}

//! Multivariate feature selection from a cross-covariance matrix.
//!
//! Two ranking methods are provided: thresholding (each feature's largest
//! absolute cross-covariance) and SVD (absolute loadings of the first left
//! singular vector). Around them sit samplers for a block covariance model,
//! Monte Carlo and closed-form estimates of how often each method ranks a
//! truly correlated feature first, a stochastic search over model sizes, and
//! permutation-null false discovery rates for real data.

pub mod error;
pub mod fdr;
pub mod linalg;
pub mod model;
pub mod optimizer;
pub mod quadrature;
pub mod risk;
pub mod rng;
pub mod selectors;
pub mod special;

pub use error::{Error, Result};
pub use fdr::{Correction, DataMatrix, FeatureInference, NullKind};
pub use model::{CovarianceModel, ModelParams, SamplerKind, ScaledOmegaModel, SignalBlock};
pub use optimizer::{Candidate, DiscrepancyObjective, SearchConfig, Theta};
pub use risk::{ExperimentOutcome, PairedDifference, RiskEstimate, SelectionExperiment};
pub use rng::StreamSeed;
pub use selectors::{CrossCovMatrix, MethodKind, Ranking, ScoreVector};

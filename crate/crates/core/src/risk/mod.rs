//! Monte Carlo estimates of top-rank selection probabilities.
//!
//! One trial draws a fresh random signal block, assembles the covariance
//! model, draws one sample cross-covariance with the chosen sampler, and
//! checks whether each method ranks a correlated feature first. Trial `i`
//! uses the stream `seed.child(i)`, so estimates do not depend on how many
//! workers run them.

mod asymptotic;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{assemble_model, random_signal_block, ModelParams, SamplerKind};
use crate::rng::{with_workers, StreamSeed};
use crate::selectors::MethodKind;

pub use asymptotic::asymptotic_thresholding_risk;

/// Largest tolerated fraction of degenerate trials.
pub const MAX_DISCARD_FRACTION: f64 = 1e-3;

/// A binomial Monte Carlo estimate of a selection probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub value: f64,
    pub stderr: f64,
    pub trials: u64,
    pub discarded: u64,
    pub successes: u64,
}

impl RiskEstimate {
    pub fn from_counts(successes: u64, trials: u64, discarded: u64) -> Result<Self> {
        let attempted = trials + discarded;
        if trials == 0 || discarded as f64 >= MAX_DISCARD_FRACTION * attempted as f64 && discarded > 0 {
            return Err(Error::TooManyDiscarded { discarded, attempted });
        }
        let value = successes as f64 / trials as f64;
        Ok(RiskEstimate {
            value,
            stderr: (value * (1.0 - value) / trials as f64).sqrt(),
            trials,
            discarded,
            successes,
        })
    }

    /// Estimated expected 1-0 loss on the same trials.
    pub fn expected_loss(&self) -> f64 {
        (self.trials - self.successes) as f64 / self.trials as f64
    }

    /// `√(se₁² + se₂²)`, the standard error of a difference of independent estimates.
    pub fn joint_stderr(&self, other: &RiskEstimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }
}

/// Several methods evaluated on the same simulated trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionExperiment {
    pub params: ModelParams,
    pub sampler: SamplerKind,
    pub methods: Vec<MethodKind>,
    pub mc_res: u64,
    /// Multiplies the signal block (held fixed per trial across scales).
    pub signal_scale: f64,
}

/// Difference of two methods' success rates on shared trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairedDifference {
    /// Rate of the first method minus rate of the second.
    pub difference: f64,
    /// Standard error from the per-trial differences.
    pub stderr: f64,
    /// Trials on which neither method was degenerate.
    pub trials: u64,
}

/// Per-method estimates plus the joint counts needed to compare methods.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub estimates: Vec<RiskEstimate>,
    /// `k × k`, row-major: trials where method `a` succeeded and `b` failed.
    discordant: Vec<u64>,
    /// `k × k`, row-major: trials where neither method was degenerate.
    shared: Vec<u64>,
}

impl ExperimentOutcome {
    /// Paired comparison of methods `a` and `b` (indices into `methods`).
    pub fn compare(&self, a: usize, b: usize) -> Result<PairedDifference> {
        let k = self.estimates.len();
        if a >= k || b >= k {
            return Err(Error::InvalidConfig(format!("method index out of range for {k} methods")));
        }
        let n = self.shared[a * k + b];
        if n == 0 {
            return Err(Error::TooManyDiscarded { discarded: self.estimates[a].discarded, attempted: self.estimates[a].trials });
        }
        let nf = n as f64;
        let (ab, ba) = (self.discordant[a * k + b] as f64, self.discordant[b * k + a] as f64);
        let mean = (ab - ba) / nf;
        let var = ((ab + ba) / nf - mean * mean).max(0.0);
        Ok(PairedDifference { difference: mean, stderr: (var / nf).sqrt(), trials: n })
    }
}

#[derive(Debug, Clone, Default)]
struct Tally {
    successes: Vec<u64>,
    trials: Vec<u64>,
    discarded: Vec<u64>,
    discordant: Vec<u64>,
    shared: Vec<u64>,
}

fn add_into(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

impl Tally {
    fn zeros(k: usize) -> Self {
        Tally {
            successes: vec![0; k],
            trials: vec![0; k],
            discarded: vec![0; k],
            discordant: vec![0; k * k],
            shared: vec![0; k * k],
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        add_into(&mut self.successes, &other.successes);
        add_into(&mut self.trials, &other.trials);
        add_into(&mut self.discarded, &other.discarded);
        add_into(&mut self.discordant, &other.discordant);
        add_into(&mut self.shared, &other.shared);
        self
    }

    fn record_pairs(&mut self) {
        let k = self.trials.len();
        for a in 0..k {
            for b in 0..k {
                if self.trials[a] == 1 && self.trials[b] == 1 {
                    self.shared[a * k + b] = 1;
                    self.discordant[a * k + b] = u64::from(self.successes[a] == 1 && self.successes[b] == 0);
                }
            }
        }
    }
}

impl SelectionExperiment {
    pub fn new(params: ModelParams, sampler: SamplerKind, methods: Vec<MethodKind>, mc_res: u64) -> Self {
        SelectionExperiment { params, sampler, methods, mc_res, signal_scale: 1.0 }
    }

    pub fn with_signal_scale(mut self, scale: f64) -> Self {
        self.signal_scale = scale;
        self
    }

    /// One estimate per method, in the order of `methods`. Runs on the
    /// current rayon pool.
    pub fn run(&self, seed: StreamSeed) -> Result<Vec<RiskEstimate>> {
        Ok(self.run_detailed(seed)?.estimates)
    }

    /// [`run`](Self::run) plus the joint counts behind [`ExperimentOutcome::compare`].
    pub fn run_detailed(&self, seed: StreamSeed) -> Result<ExperimentOutcome> {
        self.params.validate()?;
        if self.mc_res == 0 {
            return Err(Error::InvalidConfig("mc_res must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidConfig("at least one method is required".into()));
        }
        if !(0.0..=1.0).contains(&self.signal_scale) {
            return Err(Error::Domain(format!("signal scale {} outside [0, 1]", self.signal_scale)));
        }
        let k = self.methods.len();
        if self.params.p_u == 0 {
            // Every feature is correlated; the loss is identically zero.
            let estimates = (0..k).map(|_| RiskEstimate::from_counts(self.mc_res, self.mc_res, 0)).collect::<Result<_>>()?;
            return Ok(ExperimentOutcome { estimates, discordant: vec![0; k * k], shared: vec![self.mc_res; k * k] });
        }
        let tally = (0..self.mc_res)
            .into_par_iter()
            .map(|i| self.trial(seed.child(i)))
            .try_reduce(|| Tally::zeros(k), |a, b| Ok(a.merge(b)))?;
        let estimates = (0..k)
            .map(|m| RiskEstimate::from_counts(tally.successes[m], tally.trials[m], tally.discarded[m]))
            .collect::<Result<_>>()?;
        Ok(ExperimentOutcome { estimates, discordant: tally.discordant, shared: tally.shared })
    }

    fn trial(&self, seed: StreamSeed) -> Result<Tally> {
        let mut rng = seed.rng();
        let mut signal = random_signal_block(self.params.p_t, &mut rng)?;
        if self.signal_scale != 1.0 {
            signal = signal.scaled(self.signal_scale)?;
        }
        let model = assemble_model(&signal, &self.params)?;
        let sample = self.sampler.sample(&model, self.params.n, &mut rng)?;
        let mut tally = Tally::zeros(self.methods.len());
        for (m, method) in self.methods.iter().enumerate() {
            match method.score(&sample) {
                Ok(scores) => {
                    tally.trials[m] = 1;
                    let top = scores.top_index().expect("p >= 1");
                    tally.successes[m] = u64::from(top < self.params.p_t);
                }
                Err(Error::DegenerateMatrix(_)) => tally.discarded[m] = 1,
                Err(e) => return Err(e),
            }
        }
        tally.record_pairs();
        Ok(tally)
    }
}

/// Monte Carlo estimate of `P[top-ranked feature is correlated]`.
pub fn estimate_selection_probability(
    params: &ModelParams,
    method: MethodKind,
    sampler: SamplerKind,
    mc_res: u64,
    seed: StreamSeed,
) -> Result<RiskEstimate> {
    let est = SelectionExperiment::new(*params, sampler, vec![method], mc_res).run(seed)?;
    Ok(est[0])
}

/// One row of a risk surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub params: ModelParams,
    pub method: MethodKind,
    pub sampler: SamplerKind,
    pub result: std::result::Result<RiskEstimate, String>,
}

/// Estimate every grid point for every method. Point `k` uses
/// `seed.child(k)`; a failing point is recorded and the sweep continues.
pub fn sweep_risk_surface(
    grid: &[ModelParams],
    methods: &[MethodKind],
    sampler: SamplerKind,
    mc_res: u64,
    seed: StreamSeed,
    workers: usize,
) -> Result<Vec<SweepPoint>> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("sweep grid is empty".into()));
    }
    if methods.is_empty() {
        return Err(Error::InvalidConfig("at least one method is required".into()));
    }
    let rows = with_workers(workers, || {
        let mut rows = Vec::with_capacity(grid.len() * methods.len());
        for (k, params) in grid.iter().enumerate() {
            let outcome = SelectionExperiment::new(*params, sampler, methods.to_vec(), mc_res).run(seed.child(k as u64));
            for (m, &method) in methods.iter().enumerate() {
                let result = match &outcome {
                    Ok(est) => Ok(est[m]),
                    Err(e) => Err(e.to_string()),
                };
                rows.push(SweepPoint { params: *params, method, sampler, result });
            }
        }
        rows
    });
    Ok(rows)
}
